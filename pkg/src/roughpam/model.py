"""Model parameters and admissible initial conditions.

Two integrability conditions on the initial condition are checked by
quadrature: the chaos-series condition
``int (1 + |xi|^(1/2 - h)) |Fu0(xi)| dxi < inf`` and the fixed-point
condition ``int |Fu0(xi)|^2 (1 + |xi|^(1-2h)) dxi < inf``.  Constant
initial data are admissible for both by convention (their transform is a
point mass at frequency zero, where both weights equal one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .catalog import TestFunction, default_catalog
from .errors import DivergentIntegralError
from .noise import HurstParam, SpectralGrid
from .quadrature import half_line_integral

__all__ = ["InitialCondition", "ModelParams", "AdmissibilityReport"]

_KINDS = ("constant", "gaussian_bump", "catalog", "fourier_decay_probe")


@dataclass(frozen=True)
class AdmissibilityReport:
    """Outcome of one admissibility quadrature."""

    condition: str
    admissible: bool
    integral: float | None
    detail: str


@dataclass(frozen=True)
class InitialCondition:
    """Initial condition with an analytically known Fourier transform.

    Kinds:

    * ``constant``: ``u0(x) = value``.
    * ``gaussian_bump``: ``amplitude * exp(-(x - center)^2 / (2 width^2))``.
    * ``catalog``: the spatial part of a shipped catalog entry.
    * ``fourier_decay_probe``: diagnostic profile defined through its
      transform ``Fu0(xi) = (1 + |xi|)^(-decay)``; used to exercise the
      admissibility checks, not solvable (no pointwise values).
    """

    kind: str
    value_const: float = 1.0
    center: float = 0.0
    width: float = 1.0
    amplitude: float = 1.0
    catalog_name: str = ""
    decay: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown initial condition kind {self.kind!r}")
        if self.kind == "gaussian_bump" and self.width <= 0.0:
            raise ValueError("bump width must be positive")
        if self.kind == "catalog":
            entry = default_catalog().get(self.catalog_name)
            if entry is None:
                raise ValueError(f"no catalog entry named {self.catalog_name!r}")
            object.__setattr__(self, "center", entry.center)
            object.__setattr__(self, "width", entry.width)
            object.__setattr__(self, "amplitude", entry.amplitude)

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, value: float = 1.0) -> "InitialCondition":
        return cls(kind="constant", value_const=value)

    @classmethod
    def gaussian_bump(cls, center: float = 0.0, width: float = 1.0,
                      amplitude: float = 1.0) -> "InitialCondition":
        return cls(kind="gaussian_bump", center=center, width=width, amplitude=amplitude)

    @classmethod
    def from_catalog(cls, name: str) -> "InitialCondition":
        return cls(kind="catalog", catalog_name=name)

    # -- pointwise and spectral views ---------------------------------
    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    @property
    def is_bump(self) -> bool:
        return self.kind in ("gaussian_bump", "catalog")

    def values(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.is_constant:
            return np.full_like(x, self.value_const)
        if self.is_bump:
            z = (x - self.center) / self.width
            return self.amplitude * np.exp(-0.5 * z * z)
        raise NotImplementedError(f"{self.kind} has no pointwise values")

    def fourier_abs(self, xi: np.ndarray) -> np.ndarray:
        """|Fu0(xi)| for non-constant kinds."""
        xi = np.asarray(xi, dtype=float)
        if self.is_bump:
            amp = abs(self.amplitude) * self.width * math.sqrt(2.0 * math.pi)
            return amp * np.exp(-0.5 * self.width ** 2 * xi ** 2)
        if self.kind == "fourier_decay_probe":
            return (1.0 + np.abs(xi)) ** (-self.decay)
        raise NotImplementedError("constant initial data have a point-mass transform")

    def spectrum(self, grid: SpectralGrid) -> np.ndarray:
        """Fourier-series coefficients of the periodized initial condition."""
        coeffs = np.zeros(grid.n_modes, dtype=np.complex128)
        if self.is_constant:
            coeffs[0] = self.value_const
            return coeffs
        if self.is_bump:
            xi = grid.frequencies()
            amp = self.amplitude * self.width * math.sqrt(2.0 * math.pi)
            ft = amp * np.exp(-0.5 * self.width ** 2 * xi ** 2) * np.exp(-1j * xi * self.center)
            return ft / grid.domain_length
        raise NotImplementedError(f"{self.kind} cannot be placed on a grid")

    def heat_mean(self, t: float, x: float, kappa: float) -> float:
        """Whole-line heat flow ``(p_t * u0)(x)`` in closed form."""
        if self.is_constant:
            return self.value_const
        if self.is_bump:
            s2 = self.width ** 2 + kappa * t
            return (self.amplitude * self.width / math.sqrt(s2)
                    * math.exp(-0.5 * (x - self.center) ** 2 / s2))
        raise NotImplementedError(f"{self.kind} has no heat flow")

    # -- admissibility -------------------------------------------------
    def chaos_admissibility(self, hurst: HurstParam) -> AdmissibilityReport:
        cond = "int (1+|xi|^(1/2-h)) |Fu0| dxi"
        if self.is_constant:
            return AdmissibilityReport(cond, True, None,
                                       "constant initial data admissible by convention")
        power = 0.5 - hurst.h
        try:
            val = 2.0 * half_line_integral(
                lambda xi: (1.0 + xi ** power) * float(self.fourier_abs(np.array(xi))))
        except DivergentIntegralError as exc:
            return AdmissibilityReport(cond, False, exc.partial,
                                       f"divergent: {exc}")
        return AdmissibilityReport(cond, True, val, "finite")

    def picard_admissibility(self, hurst: HurstParam) -> AdmissibilityReport:
        cond = "int |Fu0|^2 (1+|xi|^(1-2h)) dxi"
        if self.is_constant:
            return AdmissibilityReport(cond, True, None,
                                       "constant initial data admissible by convention")
        expo = hurst.exponent
        try:
            val = 2.0 * half_line_integral(
                lambda xi: (1.0 + xi ** expo) * float(self.fourier_abs(np.array(xi))) ** 2)
        except DivergentIntegralError as exc:
            return AdmissibilityReport(cond, False, exc.partial,
                                       f"divergent: {exc}")
        return AdmissibilityReport(cond, True, val, "finite")


@dataclass(frozen=True)
class ModelParams:
    """Hurst index, diffusivity, horizon and initial condition."""

    hurst: HurstParam
    kappa: float = 1.0
    horizon: float = 0.25
    u0: InitialCondition = field(default_factory=InitialCondition.constant)

    def __post_init__(self):
        if self.kappa <= 0.0:
            raise ValueError(f"diffusivity kappa must be positive, got {self.kappa}")
        if self.horizon <= 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")

    @property
    def h(self) -> float:
        return self.hurst.h
