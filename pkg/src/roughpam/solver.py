"""Fourier-Galerkin solver for the multiplicative-noise heat equation.

One time step applies the exponential-Euler update

    u_hat(t + dt) = exp(-kappa dt xi^2 / 2) * (u_hat(t) + F[u(t) dW])

where the product ``u(t) dW`` is evaluated pointwise in real space on a
3/2-padded grid (the product of two band-limited fields is quadratic, so
the padding removes aliasing) and the noise increment is independent of
the pre-step field, keeping the stochastic term a martingale.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import BinaryIO, Sequence

import numpy as np

from .errors import GridMismatchError, SolverInstabilityError
from .model import ModelParams
from .noise import HurstParam, NoiseIncrement, SpectralGrid, sample_noise_coeffs
from .seeding import DOMAIN_SOLVER, spawn_rng

__all__ = [
    "SolutionField",
    "heat_semigroup_apply",
    "step_mild",
    "solve",
    "solve_ensemble",
    "v_norm",
    "picard_contraction_probe",
    "EnsembleSummary",
    "PicardProbeResult",
]

STABILITY_LIMIT = 1e12


@dataclass(frozen=True)
class SolutionField:
    """Solution snapshot: Hermitian Fourier coefficients at one time."""

    grid: SpectralGrid
    time: float
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.grid.n_modes,):
            raise GridMismatchError(
                f"coefficients {self.coeffs.shape} do not fit grid with {self.grid.n_modes} modes")
        self.coeffs.flags.writeable = False

    def real_values(self, n: int | None = None) -> np.ndarray:
        """Real-space view on ``n`` collocation points."""
        return self.grid.spectrum_to_real(self.coeffs, n=n)

    def value_at_zero(self) -> float:
        """u(t, 0) from the Hermitian spectrum."""
        return float(np.real(self.coeffs[0]) + 2.0 * np.sum(np.real(self.coeffs[1:])))


def initial_field(params: ModelParams, grid: SpectralGrid) -> SolutionField:
    return SolutionField(grid=grid, time=0.0, coeffs=params.u0.spectrum(grid))


def _decay_factors(grid: SpectralGrid, kappa: float, tau: float) -> np.ndarray:
    xi = grid.frequencies()
    return np.exp(-0.5 * kappa * tau * xi ** 2)


def heat_semigroup_apply(field: SolutionField, tau: float, kappa: float) -> SolutionField:
    """Propagate a snapshot by the deterministic heat semigroup."""
    if tau < 0.0:
        raise ValueError(f"semigroup time must be nonnegative, got {tau}")
    coeffs = field.coeffs * _decay_factors(field.grid, kappa, tau)
    return SolutionField(grid=field.grid, time=field.time + tau, coeffs=coeffs)


def v_norm(field: SolutionField, hurst: HurstParam) -> float:
    """Squared-ish energy norm ``int |Fu|^2 (1 + |xi|^(1-2h)) dxi`` on the grid.

    Quadratically homogeneous: scaling the field by ``a`` scales the value
    by ``a^2``.
    """
    return _v_norm_coeffs(field.coeffs, field.grid, hurst)


def _v_norm_coeffs(coeffs: np.ndarray, grid: SpectralGrid, hurst: HurstParam) -> float:
    xi = grid.frequencies()
    weight = 1.0 + xi ** hurst.exponent
    mags = np.abs(coeffs) ** 2
    total = weight[0] * mags[..., 0] + 2.0 * np.sum(weight[1:] * mags[..., 1:], axis=-1)
    return float(2.0 * math.pi * grid.domain_length * total)


def _product_spectrum(state: np.ndarray, noise: np.ndarray,
                      grid: SpectralGrid) -> np.ndarray:
    """Spectrum of the pointwise product ``u * dW`` on the padded grid."""
    n = grid.n_dealiased
    u = grid.spectrum_to_real(state, n=n)
    dw = grid.spectrum_to_real(noise, n=n)
    return grid.real_to_spectrum(u * dw)


def _step_coeffs(state: np.ndarray, noise: np.ndarray, grid: SpectralGrid,
                 decay: np.ndarray) -> np.ndarray:
    """Vectorized exponential-Euler step on (..., K+1) coefficient arrays."""
    return decay * (state + _product_spectrum(state, noise, grid))


def step_mild(field: SolutionField, dw: NoiseIncrement, params: ModelParams,
              grid: SpectralGrid) -> SolutionField:
    """One exponential-Euler step with the given noise increment.

    The pre-step field multiplies the increment (non-anticipating
    evaluation), then one semigroup factor is applied to the sum.
    """
    if field.grid != grid or dw.grid != grid:
        raise GridMismatchError("field, noise and grid arguments must share one grid")
    decay = _decay_factors(grid, params.kappa, grid.dt)
    coeffs = _step_coeffs(field.coeffs, dw.coeffs, grid, decay)
    return SolutionField(grid=grid, time=field.time + grid.dt, coeffs=coeffs)


def solve(params: ModelParams, grid: SpectralGrid, seed: int, n_steps: int,
          snapshot_every: int = 1, noise_scale: float = 1.0,
          rng: np.random.Generator | None = None) -> list[SolutionField]:
    """Integrate one trajectory and return snapshots.

    ``n_steps * grid.dt`` should equal the model horizon; this is checked
    loosely so exploratory runs with other horizons remain possible.
    ``noise_scale`` is a test hook: 0 degenerates the dynamics to the
    deterministic heat flow.  Deterministic for fixed ``(seed, config)``.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    if abs(n_steps * grid.dt - params.horizon) > 1e-9 * max(1.0, params.horizon):
        raise ValueError(
            f"n_steps * dt = {n_steps * grid.dt} does not match horizon {params.horizon}")
    rng = spawn_rng(seed, DOMAIN_SOLVER) if rng is None else rng
    decay = _decay_factors(grid, params.kappa, grid.dt)
    state = params.u0.spectrum(grid)
    snapshots = [SolutionField(grid=grid, time=0.0, coeffs=state.copy())]
    for j in range(n_steps):
        noise = noise_scale * sample_noise_coeffs(grid, params.hurst, rng)
        state = _step_coeffs(state, noise, grid, decay)
        t = (j + 1) * grid.dt
        vn = _v_norm_coeffs(state, grid, params.hurst)
        if not np.isfinite(vn) or vn > STABILITY_LIMIT:
            raise SolverInstabilityError(
                f"V-norm {vn:.3e} exceeded stability limit at t={t:.6f}",
                time=t, v_norm=vn)
        if (j + 1) % snapshot_every == 0 or j == n_steps - 1:
            snapshots.append(SolutionField(grid=grid, time=t, coeffs=state.copy()))
    return snapshots


# ---------------------------------------------------------------------------
# Ensembles
# ---------------------------------------------------------------------------

@dataclass
class EnsembleSummary:
    """Streaming ensemble statistics at one snapshot time.

    ``mean_coeffs`` carries the tracked low modes with per-component
    standard errors so mean-preservation can be tested mode by mode.
    ``second_moment_spatial`` is the spatially averaged second moment
    (equal to the pointwise one for constant initial data and much less
    noisy); ``second_moment_at_0`` is the pointwise estimator at x = 0.
    """

    time: float
    n: int
    mean_coeffs: np.ndarray
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    mean_at_0: float
    mean_at_0_stderr: float
    second_moment_at_0: float
    second_moment_at_0_stderr: float
    second_moment_spatial: float
    second_moment_spatial_stderr: float


class _Welford:
    """Streaming mean / second central moment with fixed-order batch merges."""

    def __init__(self, width: int):
        self.count = 0
        self.mean = np.zeros(width)
        self.m2 = np.zeros(width)

    def add(self, batch: np.ndarray) -> None:
        b = batch.shape[0]
        if b == 0:
            return
        bmean = batch.mean(axis=0)
        bm2 = ((batch - bmean) ** 2).sum(axis=0)
        if self.count == 0:
            self.count, self.mean, self.m2 = b, bmean, bm2
            return
        delta = bmean - self.mean
        total = self.count + b
        self.mean = self.mean + delta * (b / total)
        self.m2 = self.m2 + bm2 + delta ** 2 * (self.count * b / total)
        self.count = total

    def stderr(self) -> np.ndarray:
        if self.count < 2:
            return np.full_like(self.mean, np.inf)
        return np.sqrt(self.m2 / (self.count - 1) / self.count)


def solve_ensemble(params: ModelParams, grid: SpectralGrid, seed: int,
                   n_trajectories: int, n_steps: int,
                   snapshot_steps: Sequence[int] | None = None,
                   k_track: int = 16, batch: int = 256,
                   noise_scale: float = 1.0) -> list[EnsembleSummary]:
    """Run a batched trajectory ensemble and accumulate snapshot statistics.

    Trajectories are advanced in vectorized batches; batch ``i`` draws from
    the Philox stream keyed by ``(seed, DOMAIN_SOLVER, i)``, so the result
    is independent of batch size only through the fixed batch->stream map,
    and bit-reproducible for fixed ``(seed, batch)``.
    """
    if snapshot_steps is None:
        snapshot_steps = [n_steps]
    snapshot_steps = sorted(set(int(s) for s in snapshot_steps))
    if snapshot_steps[0] < 1 or snapshot_steps[-1] > n_steps:
        raise ValueError("snapshot steps must lie in [1, n_steps]")
    k_track = min(k_track, grid.mode_cutoff)
    decay = _decay_factors(grid, params.kappa, grid.dt)
    xi = grid.frequencies()
    vweight = 1.0 + xi ** params.hurst.exponent

    width = 2 * (k_track + 1) + 4  # tracked re/im modes + scalar statistics
    stats = {s: _Welford(width) for s in snapshot_steps}

    n_batches = (n_trajectories + batch - 1) // batch
    for bi in range(n_batches):
        b = min(batch, n_trajectories - bi * batch)
        rng = spawn_rng(seed, DOMAIN_SOLVER, bi)
        state = np.broadcast_to(params.u0.spectrum(grid), (b, grid.n_modes)).copy()
        for j in range(n_steps):
            noise = sample_noise_coeffs(grid, params.hurst, rng, shape=(b,))
            if noise_scale != 1.0:
                noise *= noise_scale
            state = _step_coeffs(state, noise, grid, decay)
            step = j + 1
            if step in stats:
                mags = np.abs(state) ** 2
                vn = 2.0 * math.pi * grid.domain_length * (
                    vweight[0] * mags[:, 0] + 2.0 * mags[:, 1:] @ vweight[1:])
                worst = float(np.max(vn))
                if not np.isfinite(worst) or worst > STABILITY_LIMIT:
                    raise SolverInstabilityError(
                        f"V-norm {worst:.3e} exceeded stability limit at t={step * grid.dt:.6f}",
                        time=step * grid.dt, v_norm=worst)
                u_at_0 = np.real(state[:, 0]) + 2.0 * np.sum(np.real(state[:, 1:]), axis=1)
                sq_spatial = mags[:, 0] + 2.0 * np.sum(mags[:, 1:], axis=1)
                block = np.concatenate([
                    np.real(state[:, : k_track + 1]),
                    np.imag(state[:, : k_track + 1]),
                    u_at_0[:, None],
                    (u_at_0 ** 2)[:, None],
                    sq_spatial[:, None],
                    vn[:, None],
                ], axis=1)
                stats[step].add(block)

    out = []
    for s in snapshot_steps:
        w = stats[s]
        se = w.stderr()
        m = k_track + 1
        out.append(EnsembleSummary(
            time=s * grid.dt,
            n=w.count,
            mean_coeffs=w.mean[:m] + 1j * w.mean[m:2 * m],
            stderr_re=se[:m],
            stderr_im=se[m:2 * m],
            mean_at_0=float(w.mean[2 * m]),
            mean_at_0_stderr=float(se[2 * m]),
            second_moment_at_0=float(w.mean[2 * m + 1]),
            second_moment_at_0_stderr=float(se[2 * m + 1]),
            second_moment_spatial=float(w.mean[2 * m + 2]),
            second_moment_spatial_stderr=float(se[2 * m + 2]),
        ))
    return out


# ---------------------------------------------------------------------------
# Fixed-point (Picard) probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PicardProbeResult:
    """Per-iterate contraction diagnostics of the mild fixed-point map."""

    sup_diffs: list[float]          # sup_t E|u_{m+1} - u_m|_V^2, m = 0, 1, ...
    final_vs_solve: float           # V-norm mismatch of last iterate vs direct solve
    solution_v_norm: float


def picard_contraction_probe(params: ModelParams, grid: SpectralGrid,
                             n_iter: int, mc_samples: int, seed: int,
                             noise_scale: float = 1.0) -> PicardProbeResult:
    """Iterate the mild map with common noise and track successive differences.

    Each Monte Carlo sample draws one noise realization for the whole
    horizon and applies the map ``v -> heat flow + stochastic convolution
    of v`` repeatedly, starting from the deterministic heat flow.  The
    fixed point of the discrete map is exactly the direct solver
    trajectory for the same noise.
    """
    if n_iter < 2:
        raise ValueError("need at least two iterates to form differences")
    n_steps = int(round(params.horizon / grid.dt))
    decay = _decay_factors(grid, params.kappa, grid.dt)
    xi = grid.frequencies()
    vweight = 1.0 + xi ** params.hurst.exponent

    def traj_vnorms_sq(diff: np.ndarray) -> np.ndarray:
        mags = np.abs(diff) ** 2
        return 2.0 * math.pi * grid.domain_length * (
            vweight[0] * mags[:, 0] + 2.0 * mags[:, 1:] @ vweight[1:])

    u0_hat = params.u0.spectrum(grid)
    sup_acc = np.zeros(n_iter)
    final_gap = 0.0
    sol_norm = 0.0
    for s in range(mc_samples):
        rng = spawn_rng(seed, DOMAIN_SOLVER, s)
        noise = sample_noise_coeffs(grid, params.hurst, rng, shape=(n_steps,))
        if noise_scale != 1.0:
            noise *= noise_scale
        # iterate 0: pure heat flow
        current = np.empty((n_steps + 1, grid.n_modes), dtype=np.complex128)
        current[0] = u0_hat
        for j in range(n_steps):
            current[j + 1] = decay * current[j]
        for m in range(n_iter):
            new = np.empty_like(current)
            new[0] = u0_hat
            for j in range(n_steps):
                # the previous iterate sits inside the stochastic product
                new[j + 1] = decay * (new[j] + _product_spectrum(current[j], noise[j], grid))
            sup_acc[m] += float(np.max(traj_vnorms_sq(new - current)))
            current = new
        # direct solve with the same noise equals the fixed point
        direct = u0_hat.copy()
        for j in range(n_steps):
            direct = _step_coeffs(direct, noise[j], grid, decay)
        gap = np.abs(current[-1] - direct) ** 2
        final_gap += 2.0 * math.pi * grid.domain_length * float(
            vweight[0] * gap[0] + 2.0 * np.sum(vweight[1:] * gap[1:]))
        mags = np.abs(direct) ** 2
        sol_norm += 2.0 * math.pi * grid.domain_length * float(
            vweight[0] * mags[0] + 2.0 * np.sum(vweight[1:] * mags[1:]))
    return PicardProbeResult(
        sup_diffs=list(sup_acc / mc_samples),
        final_vs_solve=final_gap / mc_samples,
        solution_v_norm=sol_norm / mc_samples)


# ---------------------------------------------------------------------------
# Binary trajectory export
# ---------------------------------------------------------------------------

_TRAJ_MAGIC = b"RPTJ"
_TRAJ_VERSION = 1


def write_trajectory(stream: BinaryIO, params: ModelParams, grid: SpectralGrid,
                     seed: int, snapshots: Sequence[SolutionField]) -> None:
    """Binary snapshot stream (little-endian).

    Header: magic ``RPTJ``, u32 version, f64 L, u64 K, f64 dt, f64 h,
    f64 kappa, i64 seed, u64 n_snapshots.  Each snapshot: f64 time then
    (K+1) complex coefficients as (real, imag) float64 pairs.
    """
    stream.write(_TRAJ_MAGIC)
    stream.write(struct.pack("<IdQdddqQ", _TRAJ_VERSION, grid.domain_length,
                             grid.mode_cutoff, grid.dt, params.h, params.kappa,
                             seed, len(snapshots)))
    for snap in snapshots:
        stream.write(struct.pack("<d", snap.time))
        inter = np.empty((grid.n_modes, 2))
        inter[:, 0] = snap.coeffs.real
        inter[:, 1] = snap.coeffs.imag
        stream.write(inter.astype("<f8").tobytes())


def read_trajectory(stream: BinaryIO):
    magic = stream.read(4)
    if magic != _TRAJ_MAGIC:
        raise ValueError(f"not a trajectory file (magic {magic!r})")
    version, length, cutoff, dt, h, kappa, seed, n_snaps = struct.unpack(
        "<IdQdddqQ", stream.read(60))
    if version != _TRAJ_VERSION:
        raise ValueError(f"unsupported trajectory file version {version}")
    grid = SpectralGrid(domain_length=length, mode_cutoff=int(cutoff), dt=dt)
    snaps = []
    for _ in range(n_snaps):
        (t,) = struct.unpack("<d", stream.read(8))
        raw = np.frombuffer(stream.read(grid.n_modes * 16), dtype="<f8").reshape(-1, 2)
        snaps.append(SolutionField(grid=grid, time=t, coeffs=raw[:, 0] + 1j * raw[:, 1]))
    return grid, HurstParam(h), kappa, int(seed), snaps
