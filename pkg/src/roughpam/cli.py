"""Command-line harness: validate, solve, moments, chaos, intermittency, selftest.

Batch operation only; every command loads a YAML config, validates it
fully, runs the computation and persists fingerprinted artifacts through
the result store.  Exit codes: 0 success, 2 config error, 3 flagged
estimate, 4 integrity error.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .chaos import ChaosBudget, chaos_norm_sq, chaos_norm_upper_bound, second_moment_series
from .config import RunConfig, load_config
from .errors import ConfigError, FlaggedEstimateError, IntegrityError, RoughPamError
from .feynman_kac import fk_moment, fk_moment_extrapolated
from .lab import LabBudget, fit_growth, moment_growth_scan, scaling_exponents
from .model import ModelParams
from .solver import solve, solve_ensemble, write_trajectory
from .store import ResultStore, render_csv, render_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FLAGGED = 3
EXIT_INTEGRITY = 4


def _store(config: RunConfig) -> ResultStore:
    return ResultStore(config.output_dir)


def _common_header(config: RunConfig, command: str) -> dict:
    return {
        "artifact": f"roughpam {__version__}",
        "command": command,
        "fingerprint": config.fingerprint(),
        "seed": config.seed,
        "h": config.model.h,
        "kappa": config.model.kappa,
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_validate(config: RunConfig, out=sys.stdout) -> int:
    """Admissibility quadratures and range checks; no artifacts."""
    model = config.model
    reports = [model.u0.chaos_admissibility(model.hurst),
               model.u0.picard_admissibility(model.hurst)]
    failed = False
    print(f"config fingerprint: {config.fingerprint()}", file=out)
    print(f"hurst h = {model.h} (spectral exponent {model.hurst.exponent:.6f})", file=out)
    for rep in reports:
        status = "pass" if rep.admissible else "FAIL"
        value = "n/a" if rep.integral is None else f"{rep.integral:.6g}"
        print(f"{status}: {rep.condition} -> {value} ({rep.detail})", file=out)
        failed = failed or not rep.admissible
    return EXIT_CONFIG if failed else EXIT_OK


def cmd_solve(config: RunConfig, out=sys.stdout) -> int:
    """Trajectory ensemble: summary CSV plus one exemplar binary trajectory."""
    model, grid = config.model, config.grid
    n_steps = int(round(model.horizon / grid.dt))
    snaps = config.solver.snapshot_times or (model.horizon,)
    snap_steps = sorted({int(round(t / grid.dt)) for t in snaps})
    summaries = solve_ensemble(model, grid, config.seed,
                               config.solver.n_trajectories, n_steps,
                               snapshot_steps=snap_steps,
                               k_track=config.solver.k_track,
                               batch=config.solver.batch)
    rows = [(s.time, s.mean_at_0, s.second_moment_at_0,
             s.second_moment_at_0_stderr, s.n) for s in summaries]
    summary_csv = render_csv(_common_header(config, "solve"),
                             ["t", "mean_at_0", "second_moment_at_0", "stderr", "n_samples"],
                             rows)
    exemplar = solve(model, grid, config.seed, n_steps,
                     snapshot_every=max(1, n_steps // 8))
    buf = io.BytesIO()
    write_trajectory(buf, model, grid, config.seed, exemplar)
    store = _store(config)
    record = store.write(config.fingerprint(), "solve", {"summary.csv": summary_csv})
    (store.root / config.fingerprint() / "trajectory.bin").write_bytes(buf.getvalue())
    for row in rows:
        print(f"t={row[0]:.6g} mean={row[1]:.6g} second_moment={row[2]:.6g} "
              f"stderr={row[3]:.3g} n={row[4]}", file=out)
    print(f"artifacts under {store.root / config.fingerprint()}", file=out)
    return EXIT_OK


def cmd_moments(config: RunConfig, out=sys.stdout) -> int:
    """Feynman-Kac moment estimates along the configured schedule."""
    model, fk = config.model, config.fk
    rows = []
    flagged = False
    for n in fk.n_list:
        if n == 1:
            est = fk_moment(1, fk.t, fk.x, fk.eps_schedule[-1], model,
                            fk.samples, config.seed, dt_b=fk.dt_b, method=fk.method)
        else:
            est = fk_moment_extrapolated(n, fk.t, fk.x, model, fk.eps_schedule,
                                         fk.samples, config.seed, dt_b=fk.dt_b,
                                         method=fk.method)
        flagged = flagged or est.flagged
        rows.append((est.n, est.t, est.x, est.eps, est.mean, est.stderr,
                     est.samples, est.seed, est.extrapolation_err,
                     ";".join(est.flags)))
        print(f"n={est.n} t={est.t:.6g} mean={est.mean:.6g} stderr={est.stderr:.3g} "
              f"extrap_err={est.extrapolation_err:.3g} flags={est.flags}", file=out)
    csv = render_csv(_common_header(config, "moments"),
                     ["n", "t", "x", "eps", "mean", "stderr", "samples", "seed",
                      "extrapolation_err", "flags"], rows)
    _store(config).write(config.fingerprint(), "moments", {"moments.csv": csv})
    return EXIT_FLAGGED if flagged else EXIT_OK


def cmd_chaos(config: RunConfig, out=sys.stdout) -> int:
    """Chaos norm table with envelope column, plus the series summary."""
    model, lab = config.model, config.lab
    budget = ChaosBudget(seed=config.seed)
    rows = []
    for n in range(1, lab.chaos_n_max + 1):
        est = chaos_norm_sq(n, config.fk.t, model, budget=budget)
        env = chaos_norm_upper_bound(n, config.fk.t, model)
        rows.append((n, est.value, est.stderr, env, est.method))
        print(f"n={n} norm_sq={est.value:.6g} stderr={est.stderr:.3g} "
              f"envelope={env:.6g} [{est.method}]", file=out)
    series = second_moment_series(config.fk.t, model, lab.chaos_n_max, budget=budget)
    print(f"second moment series = {series.value:.6g} +- {series.stderr:.3g} "
          f"(tail bound {series.tail_bound:.3g}, under_resolved={series.under_resolved})",
          file=out)
    csv = render_csv(_common_header(config, "chaos"),
                     ["n", "norm_sq", "stderr", "upper_bound", "method"], rows)
    payloads = {
        "chaos_norms.csv": csv,
        "chaos_series.json": render_json({
            "t": config.fk.t,
            "value": series.value,
            "stderr": series.stderr,
            "tail_bound": series.tail_bound,
            "n_max": series.n_max,
            "under_resolved": series.under_resolved,
        }),
    }
    _store(config).write(config.fingerprint(), "chaos", payloads)
    return EXIT_FLAGGED if series.under_resolved else EXIT_OK


def _synthetic_table(config: RunConfig):
    """Injected power-law moments: exact exponential growth for pipeline tests."""
    from .feynman_kac import MomentEstimate
    model, lab = config.model, config.lab
    h = model.h
    rows = []
    for kappa in lab.kappa_list:
        for n in lab.n_list:
            gamma = 0.5 * n ** (1.0 + 1.0 / h) * kappa ** (1.0 - 1.0 / h)
            for t in lab.t_grid:
                rows.append(MomentEstimate(
                    n=n, t=t, x=0.0, eps=0.0, mean=math.exp(gamma * t),
                    stderr=1e-9 * math.exp(gamma * t), samples=1,
                    seed=config.seed, schedule=(kappa,)))
    return rows


def cmd_intermittency(config: RunConfig, out=sys.stdout) -> int:
    """Full moment-growth pipeline: scan, fits, scaling report."""
    model, lab = config.model, config.lab
    budget = LabBudget(samples=lab.samples, eps_schedule=lab.eps_schedule,
                       dt_b=lab.dt_b, method=lab.method)
    if lab.synthetic:
        all_rows = _synthetic_table(config)
        by_kappa = {k: [r for r in all_rows if r.schedule == (k,)] for k in lab.kappa_list}
    else:
        all_rows = []
        by_kappa = {}
        for kappa in lab.kappa_list:
            rows = moment_growth_scan(lab.n_list, lab.t_grid, model, budget,
                                      config.seed, kappa=kappa)
            for r in rows:
                all_rows.append((kappa, r))
            by_kappa[kappa] = rows
        all_rows = [r for _, r in all_rows]

    base_kappa = min(lab.kappa_list, key=lambda k: abs(k - model.kappa))
    fits_n = [fit_growth(by_kappa[base_kappa], n) for n in lab.n_list]
    kappa_n = min(lab.n_list)
    fits_kappa = [(k, fit_growth(by_kappa[k], kappa_n)) for k in lab.kappa_list]
    report = scaling_exponents(fits_n, fits_kappa, model.hurst)

    csv_rows = []
    flagged_count = 0
    for kappa in lab.kappa_list:
        for r in by_kappa[kappa]:
            flagged_count += int(r.flagged)
            csv_rows.append((r.n, r.t, kappa, r.eps, r.mean, r.stderr,
                             r.samples, r.seed, ";".join(r.flags)))
    results_csv = render_csv(_common_header(config, "intermittency"),
                             ["n", "t", "kappa", "eps", "mean", "stderr",
                              "samples", "seed", "flags"], csv_rows)
    fits_json = render_json({
        "growth_fits": [{
            "n": f.n, "gamma": f.gamma, "gamma_stderr": f.gamma_stderr,
            "r_squared": f.r_squared, "t_window": list(f.t_window),
            "n_points": f.n_points,
        } for f in fits_n],
        "kappa_fits": [{"kappa": k, "gamma": f.gamma, "gamma_stderr": f.gamma_stderr,
                        "r_squared": f.r_squared} for k, f in fits_kappa],
        "scaling": {
            "slope_n": report.slope_n, "slope_n_stderr": report.slope_n_stderr,
            "target_n": report.target_n, "n_pass": report.n_pass,
            "slope_kappa": report.slope_kappa,
            "slope_kappa_stderr": report.slope_kappa_stderr,
            "target_kappa": report.target_kappa, "kappa_pass": report.kappa_pass,
            "tolerance": report.tolerance,
        },
        "flagged_rows": flagged_count,
    })
    _store(config).write(config.fingerprint(), "intermittency",
                         {"results.csv": results_csv, "fits.json": fits_json})
    for f in fits_n:
        print(f"gamma_{f.n} = {f.gamma:.4g} +- {f.gamma_stderr:.2g} (r2={f.r_squared:.4f})",
              file=out)
    print(f"slope_n = {report.slope_n:.4g} target {report.target_n:.4g} "
          f"pass={report.n_pass}", file=out)
    print(f"slope_kappa = {report.slope_kappa:.4g} target {report.target_kappa:.4g} "
          f"pass={report.kappa_pass}", file=out)
    return EXIT_FLAGGED if flagged_count else EXIT_OK


def _mini_pipeline(config: RunConfig, root: Path) -> dict[str, bytes]:
    """Scaled-down deterministic pipeline used by the selftest replay."""
    model = config.model
    grid = type(config.grid)(domain_length=config.grid.domain_length,
                             mode_cutoff=min(config.grid.mode_cutoff, 128),
                             dt=max(config.grid.dt, 1e-3))
    n_steps = max(1, int(round(0.05 / grid.dt)))
    params = ModelParams(hurst=model.hurst, kappa=model.kappa,
                         horizon=n_steps * grid.dt, u0=model.u0)
    summaries = solve_ensemble(params, grid, config.seed, 64, n_steps, batch=32)
    s = summaries[0]
    payloads = {}
    payloads["solve.csv"] = render_csv(
        {"fingerprint": config.fingerprint()},
        ["t", "mean_at_0", "second_moment_at_0", "stderr", "n_samples"],
        [(s.time, s.mean_at_0, s.second_moment_at_0, s.second_moment_at_0_stderr, s.n)]).encode()
    est = fk_moment_extrapolated(2, 0.05, 0.0, params, (1e-2, 1e-3, 1e-4),
                                 4000, config.seed, dt_b=1e-3)
    payloads["fk.csv"] = render_csv(
        {"fingerprint": config.fingerprint()},
        ["n", "t", "mean", "stderr", "extrapolation_err"],
        [(est.n, est.t, est.mean, est.stderr, est.extrapolation_err)]).encode()
    est3 = chaos_norm_sq(3, 0.1, params, budget=ChaosBudget(
        max_samples=200_000, batch=100_000, seed=config.seed))
    payloads["chaos.csv"] = render_csv(
        {"fingerprint": config.fingerprint()},
        ["n", "value", "stderr"], [(3, est3.value, est3.stderr)]).encode()
    return payloads


def cmd_selftest(config: RunConfig, out=sys.stdout) -> int:
    """Replay two fixed-seed pipelines and byte-compare all payloads."""
    with tempfile.TemporaryDirectory() as tmp:
        first = _mini_pipeline(config, Path(tmp) / "a")
        second = _mini_pipeline(config, Path(tmp) / "b")
    mismatches = [name for name in first if first[name] != second.get(name)]
    for name in first:
        status = "identical" if name not in mismatches else "DIFFERS"
        print(f"replay {name}: {status} ({len(first[name])} bytes)", file=out)
    if mismatches:
        print(f"selftest FAILED: payload mismatch in {mismatches}", file=out)
        return EXIT_INTEGRITY
    print("selftest passed: byte-identical replay", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "moments": cmd_moments,
    "chaos": cmd_chaos,
    "intermittency": cmd_intermittency,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roughpam",
        description="Simulation lab for the rough-noise parabolic Anderson model")
    parser.add_argument("--version", action="version", version=f"roughpam {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0].lower())
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument("--threads", type=int, default=None, help="worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, seed_override=args.seed,
                             out_override=args.out, threads_override=args.threads)
        return _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FlaggedEstimateError as exc:
        print(f"flagged estimate: {exc}", file=sys.stderr)
        return EXIT_FLAGGED
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except RoughPamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
