"""Shared JSON configuration for problem specs and reproducible run manifests.

Coefficient triples are stored as [k-vector, cos_amp, sin_amp]. Manifests are
canonical JSON (sorted keys, no whitespace) hashed with SHA-256 so any output
row can be traced back to the exact inputs that produced it.
"""

from __future__ import annotations

import hashlib
import json

from . import kernels
from .flow import IntegratorConfig, NewtonConfig
from .hamiltonians import ADVECTION, HamiltonianSpec, InitialData

PACKAGE_VERSION = "0.1.0"


def _coeffs_to_json(triples):
    return [[list(k), c, s] for k, c, s in triples]


def _coeffs_from_json(items):
    return tuple((tuple(int(v) for v in k), float(c), float(s)) for k, c, s in items)


def hamiltonian_to_config(spec: HamiltonianSpec) -> dict:
    cfg = {"kind": spec.kind, "d": spec.d, "growth_constant": spec.growth_constant}
    if spec.potential_coeffs:
        cfg["potential_coeffs"] = _coeffs_to_json(spec.potential.coeff_triples())
    if spec.kind == ADVECTION:
        cfg["velocity_coeffs"] = [_coeffs_to_json(c.coeff_triples()) for c in spec.velocity]
    return cfg


def hamiltonian_from_config(cfg: dict) -> HamiltonianSpec:
    return HamiltonianSpec(
        kind=cfg["kind"],
        d=int(cfg["d"]),
        potential_coeffs=_coeffs_from_json(cfg.get("potential_coeffs", [])),
        velocity_coeffs=tuple(_coeffs_from_json(c) for c in cfg.get("velocity_coeffs", [])),
        growth_constant=float(cfg.get("growth_constant", 0.0)),
    )


def initial_data_to_config(u0: InitialData) -> dict:
    return {"d": u0.d, "fourier_coeffs": _coeffs_to_json(u0.fourier_coeffs),
            "regularity_r": u0.regularity_r}


def initial_data_from_config(cfg: dict) -> InitialData:
    return InitialData(d=int(cfg["d"]),
                       fourier_coeffs=_coeffs_from_json(cfg["fourier_coeffs"]),
                       regularity_r=int(cfg.get("regularity_r", 2)))


def integrator_to_config(cfg: IntegratorConfig) -> dict:
    return {"dt": cfg.dt, "t_final": cfg.t_final, "method": cfg.method}


def integrator_from_config(cfg: dict, t_final=None) -> IntegratorConfig:
    return IntegratorConfig(dt=float(cfg.get("dt", 1e-3)),
                            t_final=float(cfg.get("t_final", 0.0) if t_final is None else t_final),
                            method=cfg.get("method", "rk4"))


def newton_from_config(cfg: dict) -> NewtonConfig:
    return NewtonConfig(tol=float(cfg.get("tol", 1e-10)),
                        max_iter=int(cfg.get("max_iter", 50)),
                        multistart_grid=int(cfg.get("multistart_grid", 8)))


def canonical_json_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json_bytes(obj)).hexdigest()


def build_manifest(command: str, config: dict, seed, threads: int) -> dict:
    """Everything needed to regenerate a run, plus the content hash of its inputs."""
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "threads": threads,
        "kernel_backend": kernels.BACKEND,
        "package_version": PACKAGE_VERSION,
        "input_hash": content_hash(config),
    }
    manifest["manifest_hash"] = content_hash(manifest)
    return manifest


def load_config(path) -> dict:
    """Read a config file; accepts a raw config or a previously written manifest."""
    with open(path) as fh:
        data = json.load(fh)
    if "config" in data and "command" in data:  # run manifest
        return data["config"]
    return data


def save_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
