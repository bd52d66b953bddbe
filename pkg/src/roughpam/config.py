"""Run configuration: schema, validation, canonical fingerprint.

Configs are YAML with a top-level ``version`` field.  Loading validates
every component invariant up front (an invalid config never partially
executes) and produces a canonical fingerprint, the sha256 of the
sorted-key JSON rendering, which every artifact embeds so results can be
traced back to the exact configuration and seed that produced them.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError
from .model import InitialCondition, ModelParams
from .noise import HurstParam, SpectralGrid

CONFIG_VERSION = 1

_U0_KEYS = {"kind", "value", "center", "width", "amplitude", "name", "decay"}


@dataclass(frozen=True)
class SolverConfig:
    n_trajectories: int = 2000
    snapshot_times: tuple = ()
    batch: int = 256
    k_track: int = 16


@dataclass(frozen=True)
class FkConfig:
    dt_b: float = 6.25e-5
    eps_schedule: tuple = (1e-3, 1e-4, 1e-5)
    samples: int = 100_000
    n_list: tuple = (1, 2, 3)
    t: float = 0.25
    x: float = 0.0
    method: str = "trapezoid"


@dataclass(frozen=True)
class LabConfig:
    n_list: tuple = (2, 3, 4, 5)
    t_grid: tuple = (0.075, 0.125, 0.175, 0.225, 0.275, 0.325)
    kappa_list: tuple = (0.5, 1.0, 2.0)
    samples: int = 200_000
    dt_b: float = 2.5e-4
    eps_schedule: tuple = (1e-3, 1e-4, 1e-5)
    method: str = "trapezoid"
    chaos_n_max: int = 8
    synthetic: bool = False


@dataclass(frozen=True)
class RunConfig:
    """Full experiment configuration; immutable after load."""

    model: ModelParams
    grid: SpectralGrid
    solver: SolverConfig
    fk: FkConfig
    lab: LabConfig
    seed: int
    output_dir: str
    threads: int = 1
    version: int = CONFIG_VERSION

    def canonical_dict(self) -> dict:
        d = {
            "version": self.version,
            "model": {
                "h": self.model.h,
                "kappa": self.model.kappa,
                "horizon": self.model.horizon,
                "u0": asdict(self.model.u0),
            },
            "grid": asdict(self.grid),
            "solver": asdict(self.solver),
            "fk": asdict(self.fk),
            "lab": asdict(self.lab),
            "seed": self.seed,
        }
        return d

    def fingerprint(self) -> str:
        payload = json.dumps(self.canonical_dict(), sort_keys=True,
                             separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{path}: {message}")


def _get(section: dict, path: str, key: str, default=None, required: bool = False):
    if key not in section:
        if required:
            raise ConfigError(f"{path}.{key}: required field missing")
        return default
    return section[key]


def _parse_u0(section, path: str) -> InitialCondition:
    if section is None:
        return InitialCondition.constant(1.0)
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected a mapping")
    unknown = set(section) - _U0_KEYS
    _require(not unknown, path, f"unknown fields {sorted(unknown)}")
    kind = _get(section, path, "kind", required=True)
    try:
        if kind == "constant":
            return InitialCondition.constant(float(_get(section, path, "value", 1.0)))
        if kind == "gaussian_bump":
            return InitialCondition.gaussian_bump(
                center=float(_get(section, path, "center", 0.0)),
                width=float(_get(section, path, "width", 1.0)),
                amplitude=float(_get(section, path, "amplitude", 1.0)))
        if kind == "catalog":
            return InitialCondition.from_catalog(_get(section, path, "name", required=True))
        if kind == "fourier_decay_probe":
            return InitialCondition(kind="fourier_decay_probe",
                                    decay=float(_get(section, path, "decay", 1.0)))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.kind: unknown initial condition kind {kind!r}")


def _parse_tuple(value, path: str, cast=float) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{path}: expected a list")
    try:
        return tuple(cast(v) for v in value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_config(path: str | Path, seed_override: int | None = None,
                out_override: str | None = None,
                threads_override: int | None = None) -> RunConfig:
    """Parse and fully validate a YAML run configuration."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"{path}: YAML parse error{where}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    version = raw.get("version", CONFIG_VERSION)
    _require(version == CONFIG_VERSION, "version",
             f"unsupported config version {version} (expected {CONFIG_VERSION})")

    msec = raw.get("model", {}) or {}
    try:
        hurst = HurstParam(float(_get(msec, "model", "h", required=True)))
    except ValueError as exc:
        raise ConfigError(f"model.h: {exc}") from exc
    u0 = _parse_u0(msec.get("u0"), "model.u0")
    try:
        model = ModelParams(hurst=hurst,
                            kappa=float(_get(msec, "model", "kappa", 1.0)),
                            horizon=float(_get(msec, "model", "horizon", 0.25)),
                            u0=u0)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc

    gsec = raw.get("grid", {}) or {}
    try:
        grid = SpectralGrid(
            domain_length=float(_get(gsec, "grid", "domain_length", 32.0)),
            mode_cutoff=int(_get(gsec, "grid", "mode_cutoff", 1024)),
            dt=float(_get(gsec, "grid", "dt", 2.5e-4)))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    n_steps = model.horizon / grid.dt
    _require(abs(n_steps - round(n_steps)) < 1e-9, "grid.dt",
             f"dt = {grid.dt} does not divide the horizon {model.horizon}")

    ssec = raw.get("solver", {}) or {}
    solver = SolverConfig(
        n_trajectories=int(_get(ssec, "solver", "n_trajectories", 2000)),
        snapshot_times=_parse_tuple(_get(ssec, "solver", "snapshot_times", []), "solver.snapshot_times"),
        batch=int(_get(ssec, "solver", "batch", 256)),
        k_track=int(_get(ssec, "solver", "k_track", 16)))
    _require(solver.n_trajectories >= 1, "solver.n_trajectories", "must be positive")
    for t in solver.snapshot_times:
        _require(0.0 < t <= model.horizon + 1e-12, "solver.snapshot_times",
                 f"snapshot {t} outside (0, horizon]")

    fsec = raw.get("fk", {}) or {}
    fk = FkConfig(
        dt_b=float(_get(fsec, "fk", "dt_b", grid.dt / 4.0)),
        eps_schedule=_parse_tuple(_get(fsec, "fk", "eps_schedule", [1e-3, 1e-4, 1e-5]), "fk.eps_schedule"),
        samples=int(_get(fsec, "fk", "samples", 100_000)),
        n_list=_parse_tuple(_get(fsec, "fk", "n_list", [1, 2, 3]), "fk.n_list", cast=int),
        t=float(_get(fsec, "fk", "t", model.horizon)),
        x=float(_get(fsec, "fk", "x", 0.0)),
        method=str(_get(fsec, "fk", "method", "trapezoid")))
    _require(fk.dt_b > 0.0, "fk.dt_b", "must be positive")
    _require(len(fk.eps_schedule) >= 3, "fk.eps_schedule", "needs at least three values")
    _require(all(b < a for a, b in zip(fk.eps_schedule, fk.eps_schedule[1:])),
             "fk.eps_schedule", "must be strictly decreasing")
    _require(all(e > 0 for e in fk.eps_schedule), "fk.eps_schedule", "entries must be positive")
    _require(fk.method in ("trapezoid", "bridge"), "fk.method", "must be trapezoid or bridge")
    _require(all(n >= 1 for n in fk.n_list), "fk.n_list", "orders must be >= 1")
    _require(fk.samples >= 2, "fk.samples", "needs at least two samples")

    lsec = raw.get("lab", {}) or {}
    lab = LabConfig(
        n_list=_parse_tuple(_get(lsec, "lab", "n_list", [2, 3, 4, 5]), "lab.n_list", cast=int),
        t_grid=_parse_tuple(_get(lsec, "lab", "t_grid",
                                 [0.075, 0.125, 0.175, 0.225, 0.275, 0.325]), "lab.t_grid"),
        kappa_list=_parse_tuple(_get(lsec, "lab", "kappa_list", [0.5, 1.0, 2.0]), "lab.kappa_list"),
        samples=int(_get(lsec, "lab", "samples", 200_000)),
        dt_b=float(_get(lsec, "lab", "dt_b", 2.5e-4)),
        eps_schedule=_parse_tuple(_get(lsec, "lab", "eps_schedule", [1e-3, 1e-4, 1e-5]), "lab.eps_schedule"),
        method=str(_get(lsec, "lab", "method", "trapezoid")),
        chaos_n_max=int(_get(lsec, "lab", "chaos_n_max", 8)),
        synthetic=bool(_get(lsec, "lab", "synthetic", False)))
    _require(all(n >= 1 for n in lab.n_list), "lab.n_list", "orders must be >= 1")
    _require(all(b > a for a, b in zip(lab.t_grid, lab.t_grid[1:])), "lab.t_grid",
             "must be strictly increasing")
    _require(all(k > 0 for k in lab.kappa_list), "lab.kappa_list", "must be positive")
    _require(lab.method in ("trapezoid", "bridge"), "lab.method", "must be trapezoid or bridge")

    seed = int(raw.get("seed", 0)) if seed_override is None else int(seed_override)
    out = str(raw.get("output_dir", "results")) if out_override is None else str(out_override)
    threads = int(raw.get("threads", 1)) if threads_override is None else int(threads_override)
    _require(threads >= 1, "threads", "must be >= 1")
    return RunConfig(model=model, grid=grid, solver=solver, fk=fk, lab=lab,
                     seed=seed, output_dir=out, threads=threads, version=version)
