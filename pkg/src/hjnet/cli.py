"""Benchmark and utility command line: convergence tables, size sweeps, the
direct-regression baseline, horizon detection, training, solving.

Every command reads a JSON config, writes RFC-4180 CSV rows that each carry
the run-manifest hash, writes the manifest itself, and (where it makes sense)
emits a small matplotlib script instead of rendered images.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .flow import IntegratorConfig, estimate_tstar, flow_map, oracle_solve
from .hamiltonians import TWO_PI, torus_distance
from .mls import PointSet, fill_distance
from .neural import (
    MlpParams,
    TrainConfig,
    generate_dataset,
    load_mlp,
    mlp_forward,
    network_depth,
    network_size,
    save_mlp,
    surrogate_apply,
    train_flow_net,
)
from .pipeline import PipelineConfig, hjnet_solve, make_uniform_grid, probe_lattice, sup_error

ERROR_FLOOR = 1e-12  # oracle accuracy floor; rows below it are excluded from slope fits


def fit_loglog_slope(h_values, errors, floor: float = ERROR_FLOOR) -> float:
    """Least-squares slope of log(error) against log(h); NaN when underdetermined."""
    pairs = [(math.log(h), math.log(e)) for h, e in zip(h_values, errors)
             if e >= floor and h > 0]
    if len(pairs) < 2:
        return float("nan")
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    return float(np.polyfit(xs, ys, 1)[0])


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_plot_script(path, csv_name, xlabel, ylabel, title, x_col, y_cols, loglog=True):
    lines = [
        "#!/usr/bin/env python3",
        f'"""Plot {csv_name} ({title})."""',
        "import csv",
        "from pathlib import Path",
        "import matplotlib",
        'matplotlib.use("Agg")',
        "import matplotlib.pyplot as plt",
        "",
        f'rows = list(csv.DictReader(open(Path(__file__).parent / "{csv_name}")))',
        f'xs = [float(r["{x_col}"]) for r in rows]',
    ]
    for col in y_cols:
        lines.append(f'ys_{col} = [float(r["{col}"]) for r in rows if r["{col}"]]')
    plot = "plt.loglog" if loglog else "plt.plot"
    for col in y_cols:
        lines.append(f'{plot}(xs[:len(ys_{col})], ys_{col}, marker="o", label="{col}")')
    lines += [
        f'plt.xlabel("{xlabel}")',
        f'plt.ylabel("{ylabel}")',
        f'plt.title("{title}")',
        "plt.legend()",
        "plt.grid(True, which='both', alpha=0.3)",
        f'plt.savefig(Path(__file__).parent / "{csv_name.replace(".csv", ".png")}", dpi=150)',
        "print('wrote', Path(__file__).parent / "
        f'"{csv_name.replace(".csv", ".png")}")',
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def _problem_from_config(config):
    spec = cfgmod.hamiltonian_from_config(config["hamiltonian"])
    u0 = cfgmod.initial_data_from_config(config["u0"]) if "u0" in config else None
    return spec, u0


def _integrator(config, t) -> IntegratorConfig:
    icfg = dict(config.get("integrator", {}))
    dt = float(icfg.get("dt", 1e-3))
    if t > 0:
        dt = min(dt, t)
    return IntegratorConfig(dt=dt, t_final=t, method=icfg.get("method", "rk4"))


def _map_rows(worker, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, items))
    return [worker(item) for item in items]


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    rows: list = field(default_factory=list)  # (n, h, sup_error, wall_time_s, status)
    fitted_slope: float = float("nan")
    manifest: dict = field(default_factory=dict)


def run_convergence(config: dict, out_dir, seed, threads: int):
    """Exact-backend pipeline error across grid resolutions, with slope fit."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = cfgmod.build_manifest("convergence", config, seed, threads)
    spec, u0 = _problem_from_config(config)
    t = float(config["t"])
    r = int(config["r"])
    grids = sorted(int(n) for n in config["grids"])
    probe_factor = int(config.get("probe_factor", 8))
    gamma = config.get("gamma")
    icfg = _integrator(config, t)
    newton = cfgmod.newton_from_config(config.get("newton", {}))

    def one(n):
        start = time.perf_counter()
        try:
            pcfg = PipelineConfig(t=t, r=r, n_per_axis=n, gamma=gamma)
            evaluator = hjnet_solve(u0, pcfg, hamiltonian=spec, integrator=icfg)
            h = evaluator.source_fill
            err = sup_error(evaluator, spec, u0, t, probe_factor * n, icfg, newton=newton)
            return (n, h, err, time.perf_counter() - start, "ok")
        except Exception as exc:
            h = fill_distance(make_uniform_grid(spec.d, n))
            return (n, h, float("nan"), time.perf_counter() - start, f"error: {exc}")

    rows = _map_rows(one, grids, threads)
    ok_rows = [row for row in rows if row[4] == "ok"]
    slope = fit_loglog_slope([row[1] for row in ok_rows], [row[2] for row in ok_rows])
    report = ConvergenceReport(rows=rows, fitted_slope=slope, manifest=manifest)

    mhash = manifest["manifest_hash"]
    _write_csv(out_dir / "convergence.csv",
               ["n", "h", "sup_error", "wall_time_s", "status", "manifest_hash"],
               [(n, h, e, w, s, mhash) for (n, h, e, w, s) in rows])
    cfgmod.save_json(out_dir / "convergence.manifest.json", manifest)
    _write_plot_script(out_dir / "convergence_plot.py", "convergence.csv",
                       "fill distance h", "sup error", "error vs fill distance",
                       "h", ["sup_error"])
    if math.isnan(slope):
        print("fitted slope: undefined (need >= 2 valid rows)")
    else:
        print(f"fitted slope: {slope:.3f}")
    exit_code = 0 if all(row[4] == "ok" for row in rows) else 1
    return report, exit_code


# ---------------------------------------------------------------------------
# tstar
# ---------------------------------------------------------------------------

def run_tstar(config: dict, out_dir, seed, threads: int):
    """Sweep min Jacobian determinant over time; report the first sign change."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = cfgmod.build_manifest("tstar", config, seed, threads)
    spec, u0 = _problem_from_config(config)
    t_max = float(config["t_max"])
    icfg = _integrator(config, t_max)
    monitor = estimate_tstar(spec, u0, t_max, icfg,
                             probe_per_axis=int(config.get("probe_per_axis", 32)),
                             t_samples=int(config.get("t_samples", 41)))
    mhash = manifest["manifest_hash"]
    _write_csv(out_dir / "tstar.csv", ["t", "min_jacobian_det", "manifest_hash"],
               [(t, det, mhash) for t, det in monitor.rows])
    cfgmod.save_json(out_dir / "tstar.manifest.json", manifest)
    _write_plot_script(out_dir / "tstar_plot.py", "tstar.csv", "t", "min det",
                       "Jacobian determinant sweep", "t", ["min_jacobian_det"],
                       loglog=False)
    if monitor.first_degenerate_time is None:
        print(f"no sign change up to t={t_max}")
    else:
        print(f"estimated existence horizon: {monitor.first_degenerate_time:.4f}")
    return monitor, 0


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def _train_config(config, seed) -> TrainConfig:
    tc = dict(config.get("train", {}))
    if seed is not None:
        tc["seed"] = seed
    return TrainConfig(
        learning_rate=float(tc.get("learning_rate", 1e-3)),
        beta1=float(tc.get("beta1", 0.9)),
        beta2=float(tc.get("beta2", 0.999)),
        epsilon=float(tc.get("epsilon", 1e-8)),
        batch_size=int(tc.get("batch_size", 64)),
        epochs=int(tc.get("epochs", 200)),
        seed=int(tc.get("seed", 0)),
        val_fraction=float(tc.get("val_fraction", 0.1)),
    )


def run_train(config: dict, out_dir, seed, threads: int):
    """Generate a flow dataset and train the surrogate; saves model + history."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = cfgmod.build_manifest("train", config, seed, threads)
    spec, _ = _problem_from_config(config)
    t = float(config["t"])
    icfg = _integrator(config, t)
    ds_cfg = config.get("dataset", {})
    dataset = generate_dataset(spec, t,
                               n_samples=int(ds_cfg.get("n_samples", 4096)),
                               sampling_box=float(ds_cfg.get("sampling_box", 1.0)),
                               seed=int(ds_cfg.get("seed", 0)), cfg=icfg)
    tcfg = _train_config(config, seed)
    arch = config.get("arch", [2 * spec.d + 1, 64, 64, 3 * spec.d + 1])
    params, history = train_flow_net(dataset, arch, tcfg)
    model_path = out_dir / config.get("model_out", "model.json")
    save_mlp(params, model_path)
    mhash = manifest["manifest_hash"]
    _write_csv(out_dir / "train_history.csv",
               ["epoch", "train_loss", "val_loss", "manifest_hash"],
               [(e, tr, va, mhash) for e, tr, va in history])
    cfgmod.save_json(out_dir / "train.manifest.json", manifest)
    print(f"final validation loss: {history[-1][2]:.6g} "
          f"(size {network_size(params)}, depth {network_depth(params)})")
    print(f"model written to {model_path}")
    return params, 0


# ---------------------------------------------------------------------------
# solve / oracle
# ---------------------------------------------------------------------------

def run_solve(config: dict, out_dir, seed, threads: int):
    """Run the full pipeline once and dump the solution on a probe lattice."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = cfgmod.build_manifest("solve", config, seed, threads)
    spec, u0 = _problem_from_config(config)
    t = float(config["t"])
    icfg = _integrator(config, t)
    backend = config.get("backend", "exact")
    surrogate = load_mlp(config["model"]) if backend == "surrogate" else None
    n = int(config["n_per_axis"])
    pcfg = PipelineConfig(t=t, r=int(config.get("r", u0.regularity_r)), n_per_axis=n,
                          gamma=config.get("gamma"), flow_backend=backend)
    evaluator = hjnet_solve(u0, pcfg, hamiltonian=spec, integrator=icfg, surrogate=surrogate)
    probes = probe_lattice(spec.d, int(config.get("probe_per_axis", 8 * n)))
    values = evaluator.eval_many(probes)
    mhash = manifest["manifest_hash"]
    _write_csv(out_dir / "solution.csv",
               [f"q{i}" for i in range(spec.d)] + ["value", "manifest_hash"],
               [tuple(float(c) for c in q) + (float(v), mhash)
                for q, v in zip(probes, values)])
    cfgmod.save_json(out_dir / "solve.manifest.json", manifest)
    print(f"wrote {len(probes)} solution values")
    return evaluator, 0


def run_oracle(config: dict, out_dir, seed, threads: int):
    """Dump exact method-of-characteristics values on a probe lattice."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = cfgmod.build_manifest("oracle", config, seed, threads)
    spec, u0 = _problem_from_config(config)
    t = float(config["t"])
    icfg = _integrator(config, t)
    newton = cfgmod.newton_from_config(config.get("newton", {}))
    probes = probe_lattice(spec.d, int(config.get("probe_per_axis", 64)))
    values = oracle_solve(spec, u0, t, probes, icfg, newton=newton)
    mhash = manifest["manifest_hash"]
    _write_csv(out_dir / "oracle.csv",
               [f"q{i}" for i in range(spec.d)] + ["value", "manifest_hash"],
               [tuple(float(c) for c in q) + (float(v), mhash)
                for q, v in zip(probes, values)])
    cfgmod.save_json(out_dir / "oracle.manifest.json", manifest)
    print(f"wrote {len(probes)} oracle values")
    return values, 0


# ---------------------------------------------------------------------------
# size sweep
# ---------------------------------------------------------------------------

@dataclass
class SizeSweepReport:
    rows: list = field(default_factory=list)
    target_exponent: float = 0.0
    manifest: dict = field(default_factory=dict)


def _surrogate_sup_error(spec, params, t, icfg, sampling_box, n_test, seed):
    """Worst held-out discrepancy between surrogate and exact flow outputs."""
    rng = np.random.default_rng(seed)
    q0 = rng.uniform(0.0, TWO_PI, size=(n_test, spec.d))
    p0 = rng.uniform(-sampling_box, sampling_box, size=(n_test, spec.d))
    z0 = rng.uniform(-sampling_box, sampling_box, size=n_test)
    q_ref, p_ref, z_ref = flow_map(spec, q0, p0, z0, t, icfg.dt)
    q_net, p_net, z_net = surrogate_apply(params, q0, p0, z0)
    err = np.sqrt(torus_distance(q_net, q_ref) ** 2
                  + np.sum((p_net - p_ref) ** 2, axis=1) + (z_net - z_ref) ** 2)
    return float(np.max(err))


def run_size_sweep(config: dict, out_dir, seed, threads: int):
    """Train surrogates of growing width; record error against size."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = cfgmod.build_manifest("size-sweep", config, seed, threads)
    spec, u0 = _problem_from_config(config)
    d = spec.d
    t = float(config["t"])
    icfg = _integrator(config, t)
    r = int(config.get("r", 4))
    widths = [int(w) for w in config.get("widths", [8, 16, 32, 64])]
    ds_cfg = config.get("dataset", {})
    sampling_box = float(ds_cfg.get("sampling_box", 1.0))
    dataset = generate_dataset(spec, t, n_samples=int(ds_cfg.get("n_samples", 4096)),
                               sampling_box=sampling_box,
                               seed=int(ds_cfg.get("seed", 0)), cfg=icfg)
    n_pipeline = int(config.get("n_per_axis", 64))
    probe_factor = int(config.get("probe_factor", 4))
    n_test = int(config.get("n_test", 1000))
    target_exponent = (2 * d + 1) / r

    rows = []
    for width in widths:
        arch = [2 * d + 1, width, width, 3 * d + 1]
        try:
            params, _ = train_flow_net(dataset, arch, _train_config(config, seed))
            size = network_size(params)
            depth = network_depth(params)
            flow_err = _surrogate_sup_error(spec, params, t, icfg, sampling_box,
                                            n_test, seed=int(ds_cfg.get("seed", 0)) + 1)
            pipe_err = float("nan")
            if u0 is not None:
                pcfg = PipelineConfig(t=t, r=r, n_per_axis=n_pipeline,
                                      flow_backend="surrogate")
                evaluator = hjnet_solve(u0, pcfg, hamiltonian=spec, integrator=icfg,
                                        surrogate=params)
                pipe_err = sup_error(evaluator, spec, u0, t,
                                     probe_factor * n_pipeline, icfg)
            rows.append([size, depth, flow_err, pipe_err, "ok"])
        except Exception as exc:
            rows.append([0, 0, float("nan"), float("nan"), f"error: {exc}"])
    ok_rows = [row for row in rows if row[4] == "ok"]
    ok_rows.sort(key=lambda row: row[0])
    sizes = [row[0] for row in ok_rows]
    if len(set(sizes)) != len(sizes):
        raise ValueError(f"trained sizes are not strictly increasing: {sizes}")
    # reference curve err ~ size^(-r/(2d+1)) anchored at the first valid row
    if ok_rows:
        s0, e0 = ok_rows[0][0], ok_rows[0][2]
        for row in ok_rows:
            row.append(e0 * (row[0] / s0) ** (-r / (2 * d + 1)))
    failed = [row for row in rows if row[4] != "ok"]
    for row in failed:
        row.append(float("nan"))
    all_rows = ok_rows + failed

    report = SizeSweepReport(rows=all_rows, target_exponent=target_exponent,
                             manifest=manifest)
    mhash = manifest["manifest_hash"]
    _write_csv(out_dir / "size_sweep.csv",
               ["size", "depth", "surrogate_sup_error", "pipeline_sup_error",
                "status", "reference_error", "manifest_hash"],
               [(s, dep, fe, pe, st, ref, mhash) for s, dep, fe, pe, st, ref in all_rows])
    cfgmod.save_json(out_dir / "size_sweep.manifest.json", manifest)
    _write_plot_script(out_dir / "size_sweep_plot.py", "size_sweep.csv",
                       "network size", "sup error",
                       f"error vs size (reference exponent {target_exponent:.3g})",
                       "size", ["surrogate_sup_error", "reference_error"])
    print(f"swept {len(ok_rows)} sizes; reference exponent (2d+1)/r = {target_exponent:.3g}")
    exit_code = 0 if not failed else 1
    return report, exit_code


# ---------------------------------------------------------------------------
# baseline: direct operator regression
# ---------------------------------------------------------------------------

def _sample_family(rng, d, max_wavenumber, coeff_bound, regularity_r):
    """Random trig-polynomial initial datum with 1/k^2-decaying amplitudes."""
    from .hamiltonians import InitialData
    coeffs = []
    for k in range(1, max_wavenumber + 1):
        scale = coeff_bound / (k * k)
        kvec = tuple([k] + [0] * (d - 1))
        coeffs.append((kvec, rng.uniform(-scale, scale), rng.uniform(-scale, scale)))
    return InitialData(d=d, fourier_coeffs=tuple(coeffs), regularity_r=regularity_r)


def _matched_width(target_size, n_in, n_out):
    width = int(round((target_size - n_out) / (n_in + n_out + 1)))
    return max(0, width)


def _fit_direct_mlp(x_train, y_train, width, tcfg: TrainConfig):
    """Plain MLP (or closed-form constant fit at width 0) on encoded inputs."""
    n_in, n_out = x_train.shape[1], y_train.shape[1]
    if width == 0:
        bias = y_train.mean(axis=0)  # MSE-optimal constant predictor
        params = MlpParams(layer_dims=(n_in, n_out),
                           weights=[np.zeros((n_out, n_in))], biases=[bias],
                           periodic_encoding=False)
        return params
    from .neural import _Adam, init_mlp, loss_and_grads
    params = init_mlp((n_in, width, n_out), seed=tcfg.seed, periodic_encoding=False)
    opt = _Adam(params, tcfg)
    rng = np.random.default_rng(tcfg.seed)
    for epoch in range(tcfg.epochs):
        order = rng.permutation(len(x_train))
        for start in range(0, len(x_train), tcfg.batch_size):
            batch = order[start:start + tcfg.batch_size]
            loss, gw, gb = loss_and_grads(params, x_train[batch], y_train[batch])
            if not np.isfinite(loss):
                from .neural import TrainingError
                raise TrainingError(epoch)
            opt.step(params, gw, gb)
    return params


def run_baseline(config: dict, out_dir, seed, threads: int):
    """Direct u0-values -> solution-values regression at matched model sizes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = cfgmod.build_manifest("baseline", config, seed, threads)
    spec, u0 = _problem_from_config(config)
    d = spec.d
    t = float(config["t"])
    icfg = _integrator(config, t)
    r = int(config.get("r", 4))
    n_encode = int(config.get("n_per_axis", 16))
    probe_per_axis = int(config.get("probe_per_axis", 2 * n_encode))
    fam = config.get("family", {})
    rng = np.random.default_rng(int(fam.get("seed", 0)))
    n_train_fns = int(fam.get("n_train", 48))
    n_test_fns = int(fam.get("n_test", 12))
    max_wn = int(fam.get("max_wavenumber", 2))
    bound = float(fam.get("coeff_bound", 1.0))

    grid = make_uniform_grid(d, n_encode)
    probes = probe_lattice(d, probe_per_axis)
    train_fns = [_sample_family(rng, d, max_wn, bound, r) for _ in range(n_train_fns)]
    test_fns = [_sample_family(rng, d, max_wn, bound, r) for _ in range(n_test_fns)]

    def dataset_for(fns):
        from .hamiltonians import eval_u0
        xs, ys = [], []
        for fn in fns:
            vals, _ = eval_u0(fn, grid.points)
            xs.append(vals)
            ys.append(np.array(oracle_solve(spec, fn, t, probes, icfg)))
        return np.array(xs), np.array(ys)

    x_train, y_train = dataset_for(train_fns)
    x_test, y_test = dataset_for(test_fns)

    ds_cfg = config.get("dataset", {})
    sampling_box = float(ds_cfg.get("sampling_box", 2.0))
    flow_ds = generate_dataset(spec, t, n_samples=int(ds_cfg.get("n_samples", 4096)),
                               sampling_box=sampling_box,
                               seed=int(ds_cfg.get("seed", 0)), cfg=icfg)
    widths = [int(w) for w in config.get("widths", [8, 16, 32])]
    tcfg = _train_config(config, seed)

    rows = []
    for width in widths:
        try:
            arch = [2 * d + 1, width, width, 3 * d + 1]
            params, _ = train_flow_net(flow_ds, arch, tcfg)
            size = network_size(params)
            pcfg = PipelineConfig(t=t, r=r, n_per_axis=n_encode, flow_backend="surrogate")
            hjnet_errs = []
            for fn in test_fns:
                evaluator = hjnet_solve(fn, pcfg, hamiltonian=spec, integrator=icfg,
                                        surrogate=params)
                truth = np.array(oracle_solve(spec, fn, t, probes, icfg))
                hjnet_errs.append(float(np.max(np.abs(evaluator.eval_many(probes) - truth))))
            hjnet_err = max(hjnet_errs)

            bl_width = _matched_width(size, len(grid), len(probes))
            bl_params = _fit_direct_mlp(x_train, y_train, bl_width, tcfg)
            bl_size = network_size(bl_params)
            pred = mlp_forward(bl_params, x_test)
            bl_err = float(np.max(np.abs(pred - y_test)))
            rows.append((size, hjnet_err, bl_size, bl_err, "ok"))
        except Exception as exc:
            rows.append((0, float("nan"), 0, float("nan"), f"error: {exc}"))

    mhash = manifest["manifest_hash"]
    _write_csv(out_dir / "baseline.csv",
               ["hjnet_size", "hjnet_sup_error", "baseline_size", "baseline_sup_error",
                "status", "manifest_hash"],
               [row + (mhash,) for row in rows])
    cfgmod.save_json(out_dir / "baseline.manifest.json", manifest)
    _write_plot_script(out_dir / "baseline_plot.py", "baseline.csv",
                       "model size", "sup error", "direct regression vs pipeline",
                       "hjnet_size", ["hjnet_sup_error", "baseline_sup_error"])
    exit_code = 0 if all(row[4] == "ok" for row in rows) else 1
    print(f"baseline comparison over {len(rows)} sizes written")
    return rows, exit_code


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "convergence": run_convergence,
    "size-sweep": run_size_sweep,
    "baseline": run_baseline,
    "tstar": run_tstar,
    "train": run_train,
    "solve": run_solve,
    "oracle": run_oracle,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hjnet",
                                     description="Hamilton-Jacobi pipeline benchmarks")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON config (or run manifest)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override training seed")
    common.add_argument("--threads", type=int, default=1,
                        help="parallel workers for independent table rows")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sub.add_parser(name, parents=[common])
    args = parser.parse_args(argv)
    config = cfgmod.load_config(args.config)
    try:
        _, exit_code = _COMMANDS[args.command](config, args.out, args.seed, args.threads)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
