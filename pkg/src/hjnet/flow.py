"""Characteristic flow of the Hamiltonian system and the exact reference solver.

The flow map pushes (q, p, z) along q' = grad_p H, p' = -grad_q H,
z' = L(q, p) with classical fixed-step RK4. The spatial characteristic map,
its finite-difference Jacobian, Newton inversion with multistart, and the
method-of-characteristics oracle build on that single integrator.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .hamiltonians import (
    ADVECTION,
    FREE_PARTICLE,
    TWO_PI,
    HamiltonianSpec,
    InitialData,
    eval_u0,
    wrap_centered,
    wrap_torus,
)


class IntegrationError(RuntimeError):
    """Non-finite state during integration; carries the time of failure."""

    def __init__(self, time: float, index: Optional[int] = None):
        self.time = float(time)
        self.index = index
        at = f" (batch index {index})" if index is not None else ""
        super().__init__(f"non-finite state at t={time:.6g}{at}")


class InversionError(RuntimeError):
    """No Newton seed converged; the map may no longer be invertible."""

    def __init__(self, q_target, t: float):
        self.q_target = np.asarray(q_target, dtype=float)
        self.t = float(t)
        super().__init__(
            f"characteristic inversion failed for target {self.q_target} at t={t:.6g}; "
            "t may exceed the existence horizon or the multistart grid is too coarse"
        )


class OracleError(RuntimeError):
    """Oracle evaluation aborted; carries the failing probe."""

    def __init__(self, index: int, point, cause: Exception):
        self.index = index
        self.point = np.asarray(point, dtype=float)
        super().__init__(f"oracle failed at probe {index} (q={self.point}): {cause}")


@dataclass
class PhaseState:
    """A point (q, p, z) on torus x momentum space x value line."""

    q: np.ndarray
    p: np.ndarray
    z: float

    def __post_init__(self):
        self.q = wrap_torus(np.atleast_1d(np.asarray(self.q, dtype=float)))
        self.p = np.atleast_1d(np.asarray(self.p, dtype=float))
        self.z = float(self.z)
        if self.q.shape != self.p.shape:
            raise ValueError(f"q and p dimensions differ: {self.q.shape} vs {self.p.shape}")


@dataclass
class IntegratorConfig:
    """Fixed-step classical RK4 configuration.

    ceil(t_final / dt) steps, the last one shortened to land exactly on
    t_final. Operations that take an explicit time reuse dt and ignore
    t_final.
    """

    dt: float = 1e-3
    t_final: float = 0.0
    method: str = "rk4"

    def __post_init__(self):
        if self.method != "rk4":
            raise ValueError("only the classical fixed-step rk4 method is supported")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_final < 0:
            raise ValueError("t_final must be >= 0")
        if self.t_final > 0 and self.dt > self.t_final:
            raise ValueError("dt must not exceed t_final")


@dataclass
class NewtonConfig:
    """Damped-Newton settings for characteristic inversion."""

    tol: float = 1e-10
    max_iter: int = 50
    multistart_grid: int = 8
    damping: float = 0.5
    max_backtracks: int = 30


@dataclass
class CharMonitor:
    """Invertibility monitor for the spatial characteristic map."""

    min_jacobian_det: float
    first_degenerate_time: Optional[float] = None
    rows: list = field(default_factory=list)  # (t, min det over probes)


def _step_schedule(t: float, dt: float):
    """Number of RK4 steps and the (shortened) final step for horizon t."""
    if t < 0:
        raise ValueError("integration time must be >= 0")
    if t == 0.0:
        return 0, 0.0
    n = max(1, int(math.ceil((t / dt) * (1.0 - 1e-9))))
    last = t - (n - 1) * dt
    return n, last


def _kernel_coeffs(spec: HamiltonianSpec):
    d = spec.d
    if spec.kind == FREE_PARTICLE:
        kind = kernels.KIND_FREE
        wave = np.zeros((0, d))
        cos_amps = np.zeros(0)
        sin_amps = np.zeros(0)
        comp = np.zeros(0, dtype=np.int64)
    elif spec.kind == ADVECTION:
        kind = kernels.KIND_ADVECTION
        parts = [(c.wave, c.cos_amps, c.sin_amps, np.full(len(c), i, dtype=np.int64))
                 for i, c in enumerate(spec.velocity)]
        wave = np.vstack([p[0] for p in parts]) if parts else np.zeros((0, d))
        cos_amps = np.concatenate([p[1] for p in parts]) if parts else np.zeros(0)
        sin_amps = np.concatenate([p[2] for p in parts]) if parts else np.zeros(0)
        comp = np.concatenate([p[3] for p in parts]) if parts else np.zeros(0, dtype=np.int64)
    else:
        kind = kernels.KIND_POTENTIAL
        wave = spec.potential.wave
        cos_amps = spec.potential.cos_amps
        sin_amps = spec.potential.sin_amps
        comp = np.zeros(len(cos_amps), dtype=np.int64)
    return (kind, np.ascontiguousarray(wave), np.ascontiguousarray(cos_amps),
            np.ascontiguousarray(sin_amps), np.ascontiguousarray(comp))


def flow_map(spec: HamiltonianSpec, q0, p0, z0, t: float, dt: float):
    """Array-level flow map: (n, d), (n, d), (n,) -> wrapped (q, p, z) at time t."""
    q0 = np.ascontiguousarray(q0, dtype=float)
    p0 = np.ascontiguousarray(p0, dtype=float)
    z0 = np.ascontiguousarray(z0, dtype=float)
    if q0.ndim != 2 or q0.shape[1] != spec.d or p0.shape != q0.shape or z0.shape != (len(q0),):
        raise ValueError("flow_map expects q0,p0 of shape (n, d) and z0 of shape (n,)")
    n_steps, last = _step_schedule(t, dt)
    if n_steps == 0 or len(q0) == 0:
        return wrap_torus(q0.copy()), p0.copy(), z0.copy()
    kind, wave, ca, sa, comp = _kernel_coeffs(spec)
    q, p, z = kernels.rk4_flow(kind, wave, ca, sa, comp, q0, p0, z0, dt, n_steps, last)
    bad = ~(np.isfinite(q).all(axis=1) & np.isfinite(p).all(axis=1) & np.isfinite(z))
    if bad.any():
        idx = int(np.argmax(bad))
        raise IntegrationError(_locate_failure(spec, q0[idx], p0[idx], z0[idx], t, dt), index=idx)
    return wrap_torus(q), p, z


def _locate_failure(spec, q0, p0, z0, t, dt):
    """Step one state until the blow-up appears; returns the failure time."""
    kind, wave, ca, sa, comp = _kernel_coeffs(spec)
    q = q0[None].copy()
    p = p0[None].copy()
    z = np.array([z0])
    n_steps, last = _step_schedule(t, dt)
    elapsed = 0.0
    for step in range(n_steps):
        h = dt if step < n_steps - 1 else last
        q, p, z = kernels.rk4_flow_python(kind, wave, ca, sa, comp, q, p, z, h, 1, h)
        elapsed += h
        if not (np.isfinite(q).all() and np.isfinite(p).all() and np.isfinite(z).all()):
            return elapsed
    return t


def integrate_flow(spec: HamiltonianSpec, s0: PhaseState, cfg: IntegratorConfig) -> PhaseState:
    """RK4 approximation of the flow at cfg.t_final, q wrapped onto the torus."""
    q, p, z = flow_map(spec, s0.q[None], s0.p[None], np.array([s0.z]), cfg.t_final, cfg.dt)
    return PhaseState(q=q[0], p=p[0], z=float(z[0]))


def integrate_flow_batch(spec: HamiltonianSpec, states, cfg: IntegratorConfig):
    """Elementwise integrate_flow over a list of states, order preserved."""
    states = list(states)
    if not states:
        return []
    q0 = np.stack([s.q for s in states])
    p0 = np.stack([s.p for s in states])
    z0 = np.array([s.z for s in states])
    q, p, z = flow_map(spec, q0, p0, z0, cfg.t_final, cfg.dt)
    return [PhaseState(q=q[i], p=p[i], z=float(z[i])) for i in range(len(states))]


def _phi_batch(spec: HamiltonianSpec, u0: InitialData, q0, t: float, dt: float):
    """Spatial characteristic map on a (n, d) batch of starting points."""
    q0 = np.atleast_2d(np.asarray(q0, dtype=float))
    _, p0 = eval_u0(u0, q0)
    q, _, _ = flow_map(spec, q0, p0, np.zeros(len(q0)), t, dt)
    return q


def spatial_characteristic(spec: HamiltonianSpec, u0: InitialData, q0, t: float,
                           cfg: IntegratorConfig):
    """q_t reached from q0 with initial momentum grad u0(q0)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return _phi_batch(spec, u0, np.asarray(q0, dtype=float)[None], t, cfg.dt)[0]


FD_STEP = 1e-5


def _phi_jacobian_batch(spec, u0, q0, t, dt, step=FD_STEP):
    """Central-difference Jacobians of the spatial characteristic map, (n, d, d)."""
    q0 = np.atleast_2d(np.asarray(q0, dtype=float))
    n, d = q0.shape
    shifted = []
    for j in range(d):
        e = np.zeros(d)
        e[j] = step
        shifted.append(q0 + e)
        shifted.append(q0 - e)
    stacked = _phi_batch(spec, u0, np.vstack(shifted), t, dt)
    jac = np.empty((n, d, d))
    for j in range(d):
        plus = stacked[2 * j * n : (2 * j + 1) * n]
        minus = stacked[(2 * j + 1) * n : (2 * j + 2) * n]
        jac[:, :, j] = wrap_centered(plus - minus) / (2.0 * step)
    return jac


def characteristic_jacobian_det(spec: HamiltonianSpec, u0: InitialData, q0, t: float,
                                cfg: IntegratorConfig) -> float:
    """det of d(q_t)/d(q0), by central differences on the torus."""
    if t < 0:
        raise ValueError("t must be >= 0")
    jac = _phi_jacobian_batch(spec, u0, np.asarray(q0, dtype=float)[None], t, cfg.dt)
    return float(np.linalg.det(jac[0]))


def _seed_grid(d: int, per_axis: int):
    axes = [np.arange(per_axis) * (TWO_PI / per_axis)] * d
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)


def _invert_batch(spec, u0, targets, t, dt, newton: NewtonConfig):
    """Damped multistart Newton for a batch of targets.

    Returns (roots (n, d), converged (n,), residuals (n,)). Every candidate
    follows its own deterministic iteration; results are order-independent.
    """
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    n, d = targets.shape
    seeds = _seed_grid(d, newton.multistart_grid)
    m = len(seeds)
    cand = np.repeat(seeds[None, :, :], n, axis=0).reshape(n * m, d)  # candidate q0
    tgt = np.repeat(targets, m, axis=0)

    def residuals(points, tgts):
        phi = _phi_batch(spec, u0, points, t, dt)
        r = wrap_centered(phi - tgts)
        return r, np.linalg.norm(r, axis=1)

    res_vec, res = residuals(cand, tgt)
    best_q = cand.copy()
    best_res = res.copy()
    converged = res <= newton.tol
    active = ~converged

    for _ in range(newton.max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        cur = cand[idx]
        cur_res_vec = res_vec[idx]
        cur_res = res[idx]
        jac = _phi_jacobian_batch(spec, u0, cur, t, dt)
        dets = np.linalg.det(jac)
        singular = np.abs(dets) < 1e-14
        step = np.zeros_like(cur)
        if (~singular).any():
            step[~singular] = np.linalg.solve(jac[~singular],
                                              cur_res_vec[~singular, :, None])[:, :, 0]
        # backtracking line search: halve the step on residual increase
        lam = np.ones(len(idx))
        accepted = np.zeros(len(idx), dtype=bool)
        new_q = cur.copy()
        new_res_vec = cur_res_vec.copy()
        new_res = cur_res.copy()
        trial_mask = ~singular
        for _bt in range(newton.max_backtracks):
            if not trial_mask.any():
                break
            trial = cur[trial_mask] - lam[trial_mask, None] * step[trial_mask]
            r_vec, r = residuals(trial, tgt[idx[trial_mask]])
            better = r < new_res[trial_mask]
            sel = np.flatnonzero(trial_mask)[better]
            new_q[sel] = trial[better]
            new_res_vec[sel] = r_vec[better]
            new_res[sel] = r[better]
            accepted[sel] = True
            worse = np.flatnonzero(trial_mask)[~better]
            trial_mask = np.zeros_like(trial_mask)
            trial_mask[worse] = True
            lam[worse] *= newton.damping
        cand[idx] = new_q
        res_vec[idx] = new_res_vec
        res[idx] = new_res
        improved = best_res[idx] > new_res
        best_q[idx[improved]] = new_q[improved]
        best_res[idx[improved]] = new_res[improved]
        done = new_res <= newton.tol
        stuck = ~accepted & ~done  # singular Jacobian or no descent at min step
        converged[idx[done]] = True
        active[idx[done | stuck]] = False

    # pick, per target, the converged candidate with smallest residual;
    # break exact ties by lexicographically smallest wrapped root
    roots = np.full((n, d), np.nan)
    ok = np.zeros(n, dtype=bool)
    final_res = np.full(n, np.inf)
    wrapped = wrap_torus(best_q)
    for i in range(n):
        sl = slice(i * m, (i + 1) * m)
        conv = np.flatnonzero(converged[sl])
        if len(conv) == 0:
            continue
        cand_res = best_res[sl][conv]
        cand_q = wrapped[sl][conv]
        order = sorted(range(len(conv)), key=lambda k: (cand_res[k], tuple(cand_q[k])))
        pick = order[0]
        roots[i] = cand_q[pick]
        final_res[i] = cand_res[pick]
        ok[i] = True
    return roots, ok, final_res


def invert_characteristic(spec: HamiltonianSpec, u0: InitialData, q_target, t: float,
                          cfg: IntegratorConfig, newton: Optional[NewtonConfig] = None):
    """Find q0 with spatial_characteristic(q0) = q_target, within newton.tol."""
    newton = newton or NewtonConfig()
    target = np.asarray(q_target, dtype=float)
    roots, ok, _ = _invert_batch(spec, u0, target[None], t, cfg.dt, newton)
    if not ok[0]:
        raise InversionError(target, t)
    return roots[0]


def oracle_solve(spec: HamiltonianSpec, u0: InitialData, t: float, eval_points,
                 cfg: IntegratorConfig, newton: Optional[NewtonConfig] = None):
    """Ground-truth solution values u(q, t) at the given probe points.

    Inverts the spatial characteristic map at each probe and accumulates the
    action along the recovered trajectory: u(q, t) = u0(q0) + z(t).
    """
    newton = newton or NewtonConfig()
    pts = np.atleast_2d(np.asarray(eval_points, dtype=float))
    if len(pts) == 0:
        return []
    roots, ok, _ = _invert_batch(spec, u0, pts, t, cfg.dt, newton)
    if not ok.all():
        idx = int(np.argmin(ok))
        raise OracleError(idx, pts[idx], InversionError(pts[idx], t))
    vals, grads = eval_u0(u0, roots)
    _, _, z = flow_map(spec, roots, grads, np.zeros(len(roots)), t, cfg.dt)
    return [float(v) for v in vals + z]


def estimate_tstar(spec: HamiltonianSpec, u0: InitialData, t_max: float,
                   cfg: IntegratorConfig, probe_per_axis: int = 16,
                   t_samples: int = 41) -> CharMonitor:
    """Sweep the Jacobian determinant over a probe grid and times up to t_max.

    The first sign change of the minimum determinant estimates the
    classical-solution horizon; the crossing time is linearly interpolated
    between sweep samples.
    """
    probes = _seed_grid(spec.d, probe_per_axis)
    times = np.linspace(0.0, t_max, t_samples)
    rows = [(0.0, 1.0)]
    min_det = 1.0
    first_zero = None
    prev_t, prev_min = 0.0, 1.0
    for t in times[1:]:
        jac = _phi_jacobian_batch(spec, u0, probes, float(t), cfg.dt)
        cur = float(np.min(np.linalg.det(jac)))
        rows.append((float(t), cur))
        min_det = min(min_det, cur)
        if first_zero is None and cur <= 0.0:
            # linear interpolation of the crossing between sweep samples
            if cur < 0.0 and prev_min > 0.0:
                first_zero = prev_t + (t - prev_t) * prev_min / (prev_min - cur)
            else:
                first_zero = float(t)
        prev_t, prev_min = float(t), cur
    return CharMonitor(min_jacobian_det=min_det, first_degenerate_time=first_zero, rows=rows)


def dump_trajectory(spec: HamiltonianSpec, s0: PhaseState, cfg: IntegratorConfig, path):
    """Write the stepwise trajectory as CSV rows (t, q..., p..., z)."""
    d = spec.d
    n_steps, last = _step_schedule(cfg.t_final, cfg.dt)
    q = s0.q[None].copy()
    p = s0.p[None].copy()
    z = np.array([s0.z])
    elapsed = 0.0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"q{i}" for i in range(d)] + [f"p{i}" for i in range(d)] + ["z"])
        writer.writerow([repr(0.0)] + [repr(v) for v in q[0]] + [repr(v) for v in p[0]]
                        + [repr(float(z[0]))])
        for step in range(n_steps):
            h = cfg.dt if step < n_steps - 1 else last
            q, p, z = flow_map(spec, q, p, z, h, h)
            elapsed += h
            writer.writerow([repr(elapsed)] + [repr(v) for v in q[0]]
                            + [repr(v) for v in p[0]] + [repr(float(z[0]))])
