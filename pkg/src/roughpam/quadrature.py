"""Adaptive quadrature helpers.

Thin wrappers around ``scipy.integrate.quad`` that enforce explicit error
reporting and add divergence detection for integrals over the half line,
which the admissibility checks need (a divergent integral must fail
loudly, not return a large number).
"""

from __future__ import annotations

import math
from typing import Callable

from scipy import integrate

from .errors import DivergentIntegralError, QuadratureError


def quad_checked(f: Callable[[float], float], a: float, b: float,
                 tol: float = 1e-10, limit: int = 200, **kwargs) -> float:
    """``scipy.integrate.quad`` that raises if the tolerance is not met."""
    value, err = integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=limit, **kwargs)
    if err > max(tol, 1e-10 * abs(value)) * 50:
        raise QuadratureError(
            f"quadrature on [{a}, {b}] achieved error {err:.3e}, requested {tol:.3e}",
            value=value, error_estimate=err)
    return value


def half_line_integral(f: Callable[[float], float], rtol: float = 1e-9,
                       first: float = 1.0, max_doublings: int = 60) -> float:
    """Integrate ``f`` over [0, inf) by panel doubling, detecting divergence.

    Panels [R, 2R] are accumulated until they become negligible relative to
    the running total.  If panel contributions stop decaying (the signature
    of a polynomially or logarithmically divergent tail), raise
    ``DivergentIntegralError`` with the partial value.
    """
    total, _ = integrate.quad(f, 0.0, first, limit=200)
    upper = first
    prev_panel = math.inf
    stalled = 0
    for _ in range(max_doublings):
        panel, _ = integrate.quad(f, upper, 2.0 * upper, limit=200)
        total += panel
        upper *= 2.0
        if abs(panel) <= rtol * max(abs(total), 1e-300):
            return total
        # A convergent tail must shrink per doubled panel; allow slack for
        # slowly decaying but summable tails (panel ratio < 0.95).
        if abs(panel) >= 0.95 * abs(prev_panel):
            stalled += 1
            if stalled >= 4:
                raise DivergentIntegralError(
                    f"integrand tail does not decay (panel {panel:.3e} at R={upper:.3e})",
                    partial=total, upper_limit=upper)
        else:
            stalled = 0
        prev_panel = panel
    raise QuadratureError(
        f"half-line integral did not settle after {max_doublings} doublings",
        value=total)
