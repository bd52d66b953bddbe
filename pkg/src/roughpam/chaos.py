"""Chaos-series machinery: simplex integrals, kernels, weighted norms.

The solution of the multiplicative-noise heat equation expands into
orthogonal stochastic integrals of explicit heat-kernel product kernels.
This module evaluates those kernels pointwise, their weighted squared
norms (the series terms of the second moment), exact ordered-time
simplex integrals, an analytic envelope for the series tail, and the
Mittag-Leffler style bound used to sum such tails.

All norm formulas are stated in frequency variables.  For the ordered
time sector ``0 < s_1 < ... < s_n < t`` with gaps ``D_i = s_(i+1) - s_i``
(``s_(n+1) = t``) the n-th squared-norm term for constant initial data
``u0 = c`` reads

    T_n = c^2 c1h^n int_gaps int_R^n  prod_i exp(-kappa D_i eta_i^2)
          * prod_i |eta_i - eta_(i-1)|^(1-2h)  d eta  d D,    eta_0 = 0,

with the gap domain ``D_i > 0, sum D_i < t``.  Non-constant initial data
wrap one more closed-form Gaussian integral around the same expression.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .errors import FlaggedEstimateError
from .model import InitialCondition, ModelParams
from .noise import HurstParam, c1h
from .seeding import spawn_rng

__all__ = [
    "MultiIndex",
    "ChaosNormEstimate",
    "ChaosBudget",
    "simplex_integral_exact",
    "simplex_bound_check",
    "SimplexBoundReport",
    "lemma_alphabet",
    "chaos_kernel",
    "chaos_norm_sq",
    "chaos_norm_upper_bound",
    "second_moment_series",
    "SecondMomentSeries",
    "mittag_leffler_envelope",
    "MittagLefflerReport",
]

DOMAIN_CHAOS = 6


# ---------------------------------------------------------------------------
# Simplex integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiIndex:
    """Gap-power multi-index with components in (-1, 1)."""

    alpha: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.alpha)
        object.__setattr__(self, "alpha", a)
        for v in a:
            if not (-1.0 < v < 1.0):
                raise ValueError(f"multi-index component {v} outside (-1, 1)")

    def __len__(self) -> int:
        return len(self.alpha)

    @property
    def total(self) -> float:
        return float(sum(self.alpha))


def lemma_alphabet(hurst: HurstParam) -> tuple[float, float, float]:
    """Gap powers arising from the norm-bound expansion: 0, 1-2h, 2(1-2h)."""
    e = hurst.exponent
    return (0.0, e, 2.0 * e)


def simplex_integral_exact(t: float, alpha) -> float:
    """Ordered-time integral ``int_(0<r_1<...<r_m<t) prod (r_i - r_(i-1))^alpha_i dr``.

    Dirichlet's formula gives the exact value
    ``t^(|alpha|+m) prod Gamma(alpha_i + 1) / Gamma(|alpha| + m + 1)``;
    the free upper gap ``t - r_m`` contributes the +1 in the denominator
    argument with no Gamma factor of its own.
    """
    if t <= 0.0:
        raise ValueError(f"upper time must be positive, got {t}")
    a = np.asarray(alpha.alpha if isinstance(alpha, MultiIndex) else alpha, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("alpha must be a non-empty vector")
    if np.any(a <= -1.0):
        raise ValueError(f"divergent gap power in {a.tolist()} (needs every alpha_i > -1)")
    m = a.size
    total = float(a.sum())
    log_val = (total + m) * math.log(t) + float(np.sum(special.gammaln(a + 1.0))) \
        - float(special.gammaln(total + m + 1.0))
    return math.exp(log_val)


@dataclass(frozen=True)
class SimplexBoundReport:
    """Exact simplex integral against its Gamma-denominator bound."""

    exact: float
    bound: float
    c_supplied: float
    minimal_c: float
    holds: bool


def simplex_bound_check(t: float, alpha, c: float) -> SimplexBoundReport:
    """Compare the exact integral with ``c^m t^(|alpha|+m) / Gamma(|alpha|+m+1)``.

    The minimal admissible constant for this instance is the geometric
    mean of the Gamma factors, ``(prod Gamma(alpha_i+1))^(1/m)``.
    """
    a = np.asarray(alpha.alpha if isinstance(alpha, MultiIndex) else alpha, dtype=float)
    exact = simplex_integral_exact(t, a)
    m = a.size
    total = float(a.sum())
    envelope = c ** m * math.exp((total + m) * math.log(t)
                                 - float(special.gammaln(total + m + 1.0)))
    minimal = math.exp(float(np.mean(special.gammaln(a + 1.0))))
    return SimplexBoundReport(exact=exact, bound=envelope, c_supplied=c,
                              minimal_c=minimal, holds=exact <= envelope * (1 + 1e-12))


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

def _heat_kernel(z: float, tau: float, kappa: float) -> float:
    return math.exp(-0.5 * z * z / (kappa * tau)) / math.sqrt(2.0 * math.pi * kappa * tau)


def chaos_kernel(points, t: float, x: float, params: ModelParams) -> float:
    """Symmetrized n-th chaos kernel at distinct time-space points.

    ``points`` is a sequence of ``(s_i, x_i)`` with the ``s_i`` distinct in
    (0, t).  Times are sorted and the value is ``1/n!`` times the chain of
    heat kernels from the initial heat flow through the sorted points to
    ``(t, x)``; by construction the value is invariant under permutations
    of the input points.
    """
    pts = [(float(s), float(y)) for s, y in points]
    n = len(pts)
    if n == 0:
        raise ValueError("need at least one point")
    times = [s for s, _ in pts]
    if len(set(times)) != n:
        raise ValueError("coincident times are a measure-zero degeneracy; rejected")
    if min(times) <= 0.0 or max(times) >= t:
        raise ValueError(f"all times must lie strictly inside (0, {t})")
    pts.sort(key=lambda p: p[0])
    kappa = params.kappa
    value = params.u0.heat_mean(pts[0][0], pts[0][1], kappa)
    for i in range(1, n):
        value *= _heat_kernel(pts[i][1] - pts[i - 1][1], pts[i][0] - pts[i - 1][0], kappa)
    value *= _heat_kernel(x - pts[-1][1], t - pts[-1][0], kappa)
    return value / math.gamma(n + 1.0)


# ---------------------------------------------------------------------------
# Weighted squared norms of the kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChaosBudget:
    """Monte Carlo effort control for the norm estimator."""

    rel_tol: float = 5e-3
    max_samples: int = 4_000_000
    batch: int = 200_000
    seed: int = 20260809


@dataclass(frozen=True)
class ChaosNormEstimate:
    """Estimate of one squared-norm series term ``n! |f_n|^2``."""

    order: int
    value: float
    stderr: float
    method: str
    samples: int = 0
    budget_exhausted: bool = False


def _scaled_gauss_power_moment(h: float, gamma: np.ndarray) -> np.ndarray:
    """``G(gamma) = int exp(-z^2) |z - gamma|^(1-2h) dz`` (Kummer closed form)."""
    return math.gamma(1.0 - h) * special.hyp1f1(-(0.5 - h), 0.5, -np.square(gamma))


class _RProfile:
    """Tabulated ``R(rho) = int exp(-w^2) |w|^(1-2h) G(rho w) dw``.

    Smooth and monotone between the limits ``R(0) = Gamma(1-h)^2`` and
    ``R(rho) ~ sqrt(pi) Gamma(3/2-2h) rho^(1-2h)``; tabulated on a log
    grid and interpolated in ``log rho``.
    """

    def __init__(self, h: float, n_rho: int = 600, n_w: int = 400):
        self.h = h
        # Gauss-Legendre in the desingularized variable y = w^(2-2h)
        y_hi = 6.0 ** (2.0 - 2.0 * h)
        nodes, weights = np.polynomial.legendre.leggauss(n_w)
        y = 0.5 * y_hi * (nodes + 1.0)
        wts = 0.5 * y_hi * weights
        w = y ** (1.0 / (2.0 - 2.0 * h))
        base = np.exp(-w * w) / (2.0 - 2.0 * h)
        self._log_rho = np.linspace(-9.0, 9.0, n_rho)
        rho = np.exp(self._log_rho)
        gm = _scaled_gauss_power_moment(h, rho[:, None] * w[None, :])
        self._table = 2.0 * (gm * (base * wts)[None, :]).sum(axis=1)
        self._lo = math.gamma(1.0 - h) ** 2
        self._hi_coef = math.sqrt(math.pi) * math.gamma(1.5 - 2.0 * h)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        out = np.empty_like(rho)
        lo = rho <= math.exp(self._log_rho[0])
        hi = rho >= math.exp(self._log_rho[-1])
        mid = ~(lo | hi)
        out[lo] = self._lo
        out[hi] = self._hi_coef * rho[hi] ** (1.0 - 2.0 * self.h)
        out[mid] = np.interp(np.log(rho[mid]), self._log_rho, self._table)
        return out


_R_PROFILES: dict[float, _RProfile] = {}


def _r_profile(h: float) -> _RProfile:
    if h not in _R_PROFILES:
        _R_PROFILES[h] = _RProfile(h)
    return _R_PROFILES[h]


def _norm_sq_n1_quadrature(t, params, x) -> float:
    """First-order term by nested (gap, frequency) quadrature.

    The frequency integral at gap ``tau = t - s`` is a Gaussian power
    moment ``scale(tau)^(h-1) * int exp(-z) z^(-h) dz``; the remaining
    gap integral has an integrable ``tau^(h-1)`` endpoint which the
    substitution ``u = tau^h`` absorbs exactly.
    """
    h = params.h
    kappa = params.kappa
    u0 = params.u0
    # int exp(-z) z^(-h) dz desingularized by y = z^(1-h)
    gauss_moment, _ = integrate.quad(
        lambda y: math.exp(-y ** (1.0 / (1.0 - h))) / (1.0 - h),
        0.0, 45.0, epsabs=1e-13, epsrel=1e-12, limit=300)
    if u0.is_constant:
        amp2 = u0.value_const ** 2
        a_t = math.inf
    else:
        a_t = 0.5 * (u0.width ** 2 + kappa * t)
        amp2 = (u0.amplitude ** 2 * u0.width ** 2 / (2.0 * a_t)
                * math.exp(-0.5 * (x - u0.center) ** 2 / a_t))

    def shaved(u):
        # (scale/(kappa tau))^(h-1) after factoring tau^(h-1) into du
        tau = u ** (1.0 / h)
        corr = 1.0 if u0.is_constant else 1.0 - kappa * tau / (2.0 * a_t)
        return corr ** (h - 1.0)

    outer, _ = integrate.quad(shaved, 0.0, t ** h, epsabs=1e-12, epsrel=1e-10, limit=200)
    return c1h(params.hurst) * amp2 * gauss_moment * kappa ** (h - 1.0) * outer / h


def _norm_sq_n2_quadrature(t, params) -> float:
    """Second-order term for constant initial data by tensor quadrature.

    In gap variables (a, b) the term reduces to
    ``c^2 c1h^2 kappa^(2h-2) int a^(h-1) b^(h-1) R(sqrt(b/a)) da db`` over
    ``a, b > 0, a + b < t``; substituting ``a = u^(1/h), b = v^(1/h)``
    removes both endpoint singularities.
    """
    h = params.h
    if not params.u0.is_constant:
        raise NotImplementedError("tensor quadrature implemented for constant initial data")
    rprof = _r_profile(h)

    def rp(rho: float) -> float:
        return float(rprof(np.array([rho]))[0])

    # Gap-sum coordinates (a, b) = (s(1-th), s th) factor the integral: the
    # radial part is t^(2h)/(2h) exactly, the angular part is 1-d with
    # integrable endpoint powers th^(h-1) and (1-th)^(2h-3/2), absorbed by
    # power substitutions on each half.
    def left(y):  # y = th^h on (0, 1/2)
        th = y ** (1.0 / h)
        return (1.0 - th) ** (h - 1.0) * rp(math.sqrt(th / (1.0 - th))) / h

    q = 2.0 * h - 0.5
    tail_coef = math.sqrt(math.pi) * math.gamma(1.5 - 2.0 * h)

    def right(z):  # z = (1-th)^q on (1/2, 1)
        sig = z ** (1.0 / q)
        th = 1.0 - sig
        # R grows like rho^(1-2h); factor the growth out so the limit sig -> 0 is finite
        shaved = rp(math.sqrt(th / sig)) * sig ** (0.5 - h) if sig > 1e-280 else \
            tail_coef * th ** (0.5 - h)
        return th ** (h - 1.0) * shaved / q

    i_left, _ = integrate.quad(left, 0.0, 0.5 ** h, epsabs=1e-10, epsrel=1e-9, limit=300)
    i_right, _ = integrate.quad(right, 0.0, 0.5 ** q, epsabs=1e-10, epsrel=1e-9, limit=300)
    angular = i_left + i_right
    const = params.u0.value_const ** 2
    return (const * c1h(params.hurst) ** 2 * params.kappa ** (2.0 * h - 2.0)
            * t ** (2.0 * h) / (2.0 * h) * angular)


def _norm_sq_monte_carlo(n, t, params, x, budget: ChaosBudget,
                         mollify_eps: float = 0.0) -> ChaosNormEstimate:
    """Importance-sampled gap/frequency Monte Carlo for any order.

    Time gaps are drawn from a Dirichlet density proportional to
    ``prod D_i^(a-1)`` with ``a = 2h - 1/2`` (chosen so the weight keeps a
    finite second moment for every admissible h), frequencies from the
    Gaussian factors.  Streaming mean/variance, fixed batch order.

    ``mollify_eps > 0`` inserts the Gaussian mollifier factor
    ``exp(-eps (eta_i - eta_(i-1))^2)`` per frequency increment, which
    turns the series into the second moment of the eps-mollified model;
    this is the cross-check target for the Feynman-Kac estimator.
    """
    h = params.h
    kappa = params.kappa
    u0 = params.u0
    a = 2.0 * h - 0.5
    log_z = n * a * math.log(t) + n * special.gammaln(a) - special.gammaln(n * a + 1.0)
    log_pref = n * math.log(c1h(params.hurst)) + log_z + 0.5 * n * math.log(math.pi / kappa)
    if u0.is_constant:
        log_pref += 2.0 * math.log(abs(u0.value_const)) if u0.value_const != 0.0 else -math.inf
    expo = 1.0 - 2.0 * h

    count = 0
    mean = 0.0
    m2 = 0.0
    batch_idx = 0
    while count < budget.max_samples:
        b = min(budget.batch, budget.max_samples - count)
        rng = spawn_rng(budget.seed, DOMAIN_CHAOS, n, batch_idx)
        gaps = t * rng.dirichlet([a] * n + [1.0], size=b)[:, :n]
        gaps = np.maximum(gaps, 1e-300)
        eta = rng.standard_normal((b, n)) / np.sqrt(2.0 * kappa * gaps)
        diff = np.empty_like(eta)
        diff[:, 0] = np.abs(eta[:, 0])
        if n > 1:
            diff[:, 1:] = np.abs(np.diff(eta, axis=1))
        log_w = log_pref + (0.5 - a) * np.log(gaps).sum(axis=1) \
            + expo * np.log(np.maximum(diff, 1e-300)).sum(axis=1)
        if mollify_eps > 0.0:
            log_w -= mollify_eps * np.square(diff).sum(axis=1)
        if not u0.is_constant:
            a_t = 0.5 * (u0.width ** 2 + kappa * t)
            lin = kappa * (gaps * eta).sum(axis=1)
            log_w += (math.log(u0.amplitude ** 2 * u0.width ** 2 / (2.0 * a_t))
                      + (lin ** 2 - (x - u0.center) ** 2) / (2.0 * a_t))
        w = np.exp(log_w)
        # fixed-order streaming merge
        bmean = w.mean()
        bm2 = ((w - bmean) ** 2).sum()
        if count == 0:
            mean, m2 = bmean, bm2
        else:
            delta = bmean - mean
            tot = count + b
            mean += delta * b / tot
            m2 += bm2 + delta ** 2 * count * b / tot
        count += b
        batch_idx += 1
        stderr = math.sqrt(m2 / (count - 1) / count) if count > 1 else math.inf
        if stderr <= budget.rel_tol * max(abs(mean), 1e-300):
            return ChaosNormEstimate(order=n, value=float(mean), stderr=float(stderr),
                                     method="monte_carlo", samples=count)
    return ChaosNormEstimate(order=n, value=float(mean), stderr=float(stderr),
                             method="monte_carlo", samples=count, budget_exhausted=True)


def chaos_norm_sq(n: int, t: float, params: ModelParams,
                  budget: ChaosBudget | None = None, x: float = 0.0,
                  method: str | None = None) -> ChaosNormEstimate:
    """Series term ``n! |f_n(., t, x)|^2`` of the second-moment expansion.

    Orders 1 and 2 go through deterministic quadrature, higher orders
    through importance-sampled Monte Carlo (``method`` forces one or the
    other).  For constant initial data the value is independent of ``x``.
    """
    if n < 1:
        raise ValueError("chaos order must be >= 1 (order 0 is the squared mean)")
    if t <= 0.0:
        raise ValueError("time must be positive")
    budget = budget or ChaosBudget()
    u0 = params.u0
    if u0.is_constant and u0.value_const == 0.0:
        return ChaosNormEstimate(order=n, value=0.0, stderr=0.0, method="exact")
    if not (u0.is_constant or u0.is_bump):
        raise NotImplementedError(f"chaos norms not defined for {u0.kind} initial data")
    if method is None:
        method = "quadrature" if (n <= 2 and (u0.is_constant or n == 1)) else "monte_carlo"
    if method == "quadrature":
        if n == 1:
            return ChaosNormEstimate(order=1, value=_norm_sq_n1_quadrature(t, params, x),
                                     stderr=0.0, method="quadrature")
        if n == 2:
            return ChaosNormEstimate(order=2, value=_norm_sq_n2_quadrature(t, params),
                                     stderr=0.0, method="quadrature")
        raise ValueError("tensor quadrature only implemented for orders 1 and 2")
    return _norm_sq_monte_carlo(n, t, params, x, budget)


# ---------------------------------------------------------------------------
# Envelope and series
# ---------------------------------------------------------------------------

ENVELOPE_PREF = 0.55  # covers the exact 1/2 of the binary expansion with slack


def _envelope_log_terms(params: ModelParams, t: float) -> tuple[float, float]:
    """Per-order log ratio and the initial-data factor of the norm envelope."""
    h = params.h
    c_gamma = math.pi / math.cos(math.pi * (1.0 - 2.0 * h))
    log_ratio = math.log(2.0 * c_gamma * c1h(params.hurst)) + h * math.log(t) \
        + (h - 1.0) * math.log(params.kappa)
    u0 = params.u0
    if u0.is_constant:
        ufac = abs(u0.value_const)
    else:
        kt = params.kappa * t
        power = 0.5 - h
        val, _ = integrate.quad(
            lambda z: (1.0 + kt ** (0.5 * power) * z ** power) * float(u0.fourier_abs(np.array(z))),
            0.0, np.inf, limit=400)
        ufac = val / math.pi
    return log_ratio, ufac


def chaos_norm_upper_bound(n: int, t: float, params: ModelParams) -> float:
    """Analytic envelope for the n-th squared-norm term.

    Derived by expanding ``|eta_i - eta_(i-1)|^(1-2h)`` into the
    three-letter gap-power alphabet and applying the exact simplex
    formula to each of the ``2^(n-1)`` terms; the per-letter constant is
    the Gamma-reflection value ``pi / cos(pi (1-2h))`` at the largest
    letter.  A sanity envelope, not a tight value.
    """
    if n < 1:
        raise ValueError("envelope defined for orders >= 1")
    log_ratio, ufac = _envelope_log_terms(params, t)
    log_val = math.log(ENVELOPE_PREF) + n * log_ratio \
        - float(special.gammaln(n * params.h + 1.0)) + 2.0 * math.log(max(ufac, 1e-300))
    return math.exp(log_val)


def _second_moment_mollified(t: float, params: ModelParams, n_max: int, eps: float,
                             budget: ChaosBudget | None = None,
                             x: float = 0.0) -> tuple[float, float]:
    """Second moment of the eps-mollified model by series Monte Carlo.

    Validation target for the Feynman-Kac estimator at the same eps; no
    limits involved on either side.  Returns ``(value, stderr)``.
    """
    budget = budget or ChaosBudget()
    total = params.u0.heat_mean(t, x, params.kappa) ** 2
    var = 0.0
    for n in range(1, n_max + 1):
        est = _norm_sq_monte_carlo(n, t, params, x, budget, mollify_eps=eps)
        total += est.value
        var += est.stderr ** 2
    return total, math.sqrt(var)


@dataclass(frozen=True)
class SecondMomentSeries:
    """Truncated second-moment series with an analytic tail envelope."""

    value: float
    stderr: float
    tail_bound: float
    n_max: int
    terms: tuple
    under_resolved: bool


def second_moment_series(t: float, params: ModelParams, n_max: int,
                         budget: ChaosBudget | None = None,
                         x: float = 0.0) -> SecondMomentSeries:
    """Partial sum of the chaos series for ``E[u(t,x)^2]`` plus tail envelope.

    The zeroth term is the squared heat-flow mean.  Flags the result as
    under-resolved when the tail envelope exceeds 10 percent of the
    partial sum.
    """
    if n_max < 2:
        raise ValueError("need n_max >= 2 for a meaningful series")
    terms = [ChaosNormEstimate(order=0, value=params.u0.heat_mean(t, x, params.kappa) ** 2,
                               stderr=0.0, method="exact")]
    for n in range(1, n_max + 1):
        terms.append(chaos_norm_sq(n, t, params, budget=budget, x=x))
    partial = float(sum(est.value for est in terms))
    stderr = math.sqrt(sum(est.stderr ** 2 for est in terms))
    log_ratio, ufac = _envelope_log_terms(params, t)
    tail = 0.0
    n = n_max + 1
    while n < n_max + 400:
        term = math.exp(math.log(ENVELOPE_PREF) + n * log_ratio
                        - float(special.gammaln(n * params.h + 1.0))) * ufac ** 2
        tail += term
        if term < 1e-18 * max(partial, 1e-300):
            break
        n += 1
    return SecondMomentSeries(value=partial, stderr=stderr, tail_bound=tail,
                              n_max=n_max, terms=tuple(terms),
                              under_resolved=tail > 0.1 * partial)


# ---------------------------------------------------------------------------
# Mittag-Leffler style envelope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MittagLefflerReport:
    """Partial sum of ``sum_m x^m / Gamma(a m + 1)`` against ``c1 exp(c2 x^(1/a))``.

    Values are carried in log space as well since the sums overflow double
    precision long before the comparison becomes uninteresting.
    """

    log_sum: float
    log_envelope: float
    n_terms: int
    c1: float
    c2: float
    holds: bool

    @property
    def partial_sum(self) -> float:
        return math.exp(self.log_sum) if self.log_sum < 709 else math.inf

    @property
    def envelope(self) -> float:
        return math.exp(self.log_envelope) if self.log_envelope < 709 else math.inf


def mittag_leffler_envelope(x: float, a: float, c1: float = 2.0,
                            c2: float = 1.0) -> MittagLefflerReport:
    """Sum the fractional-Gamma series and report whether the envelope holds.

    Terms are accumulated in log space until they drop 16 orders below the
    running maximum (past the peak), which reproduces the full double
    precision value of the sum for any representable ``x``.
    """
    if not (0.0 < a < 1.0):
        raise ValueError(f"index a must lie in (0, 1), got {a}")
    if x < 0.0:
        raise ValueError(f"argument must be nonnegative, got {x}")
    if x == 0.0:
        return MittagLefflerReport(log_sum=0.0, log_envelope=math.log(c1),
                                   n_terms=1, c1=c1, c2=c2, holds=c1 >= 1.0)
    log_x = math.log(x)
    log_terms = []
    m = 0
    peak = -math.inf
    while True:
        lt = m * log_x - float(special.gammaln(a * m + 1.0))
        log_terms.append(lt)
        peak = max(peak, lt)
        if m > 0 and lt < peak - 37.0 and lt < log_terms[-2]:
            break
        if m > 50_000_000:  # unreachable for representable x, defensive
            break
        m += 1
    log_sum = float(special.logsumexp(np.array(log_terms)))
    log_env = math.log(c1) + c2 * x ** (1.0 / a)
    return MittagLefflerReport(log_sum=log_sum, log_envelope=log_env,
                               n_terms=len(log_terms), c1=c1, c2=c2,
                               holds=log_sum <= log_env)
