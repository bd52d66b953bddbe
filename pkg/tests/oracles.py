"""Independent oracles for the test suite.

Everything here is implemented against the raw mathematical definitions
(brute-force nested quadrature, classical closed forms), deliberately
avoiding the package's own evaluation paths so the two sides stay
independent.
"""

import math

import numpy as np
from scipy import integrate, special


def simplex_quad(t, alpha, tol=1e-10):
    """Nested adaptive quadrature of the ordered-time gap-power integral.

    Integrates ``prod (r_i - r_(i-1))^alpha_i`` over ``0 < r_1 < ... < r_m < t``
    by recursion on the outermost time, one adaptive quadrature per level.
    Endpoint singularities are left to QUADPACK's extrapolation.
    """
    alpha = list(alpha)
    m = len(alpha)

    def level(i, lower, upper):
        # integrate r_i from lower to upper; alpha index i-1 applies to (r_i - r_(i-1))
        if i == m:
            def integrand(r):
                return (r - lower) ** alpha[m - 1]
            val, _ = integrate.quad(integrand, lower, upper, epsabs=tol, epsrel=tol,
                                    limit=150)
            return val

        def integrand(r):
            return (r - lower) ** alpha[i - 1] * level(i + 1, r, upper)
        val, _ = integrate.quad(integrand, lower, upper, epsabs=tol, epsrel=tol,
                                limit=150)
        return val

    return level(1, 0.0, t)


def cosine_transform_bruteforce(x, eps, h, xi_max=None):
    """Mollified covariance by naive panel quadrature between cosine zeros."""
    if xi_max is None:
        xi_max = math.sqrt(40.0 / eps)
    if x == 0.0:
        val, _ = integrate.quad(lambda xi: math.exp(-eps * xi * xi) * xi ** (1 - 2 * h),
                                0.0, xi_max, limit=500)
        return val / math.pi
    # integrate between consecutive zeros of cos(x xi) and sum
    period = math.pi / x
    edges = [0.0, 0.5 * period]
    while edges[-1] < xi_max:
        edges.append(edges[-1] + period)
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        b = min(b, xi_max)
        val, _ = integrate.quad(
            lambda xi: math.cos(x * xi) * math.exp(-eps * xi * xi) * xi ** (1 - 2 * h),
            a, b, limit=200)
        total += val
        if b >= xi_max:
            break
    return total / math.pi


def gaussian_bump_norm_sq(h, amplitude, width, dt):
    """Closed-form noise norm of a time-indicator Gaussian-bump function."""
    return (math.gamma(2 * h + 1) * math.sin(math.pi * h) * math.gamma(1 - h)
            * amplitude ** 2 * width ** (2 * h) * dt)


def first_chaos_closed_form(h, kappa, t):
    """``c1h Gamma(1-h) kappa^(h-1) t^h / h`` for unit constant initial data."""
    c1h = math.gamma(2 * h + 1) * math.sin(math.pi * h) / (2 * math.pi)
    return c1h * math.gamma(1 - h) * kappa ** (h - 1) * t ** h / h


def pair_functional_mean(h, kappa, t, eps):
    """``E[int_0^t f_eps(B^1 - B^2) dr]`` via the Gaussian characteristic function.

    The path difference at time r is centered Gaussian with variance
    ``2 kappa r``, so the expectation is
    ``(2 pi)^-1 Gamma(1-h) [(eps + kappa t)^h - eps^h] / (kappa h)``.
    """
    g = math.gamma(1 - h) / (2 * math.pi)
    return g * ((eps + kappa * t) ** h - eps ** h) / (kappa * h)


def pair_functional_mean_quad(h, kappa, t, eps):
    """Same as above by direct double quadrature (slower, independent)."""
    def inner(r):
        val, _ = integrate.quad(
            lambda xi: math.exp(-(eps + kappa * r) * xi * xi) * xi ** (1 - 2 * h),
            0.0, math.sqrt(60.0 / eps), limit=300)
        return val / math.pi
    val, _ = integrate.quad(inner, 0.0, t, limit=200)
    return val


def mittag_leffler_half(x):
    """``E_(1/2)(x) = exp(x^2) erfc(-x)`` classical identity."""
    return math.exp(x * x) * special.erfc(-x)


def heat_mean_quad(u0_fourier, t, x, kappa, xi_max=60.0):
    """``(p_t * u0)(x)`` through the Fourier representation by quadrature."""
    def integrand(xi):
        return (u0_fourier(xi) * np.exp(-0.5 * kappa * t * xi ** 2)
                * np.exp(1j * xi * x)).real
    val, _ = integrate.quad(integrand, -xi_max, xi_max, limit=400)
    return val / (2.0 * math.pi)
