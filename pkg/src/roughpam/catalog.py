"""Catalog of time-space test functions with analytic Fourier transforms.

Every covariance and isometry test needs an oracle, so the catalog is
restricted to shapes with closed-form transforms: a time indicator
``1_[t_start, t_end](s)`` times a Gaussian bump
``A exp(-(x - c)^2 / (2 w^2))``.  The entries ship as a documented text
file (one per line: name, center, width, amplitude, t_start, t_end) and
the intervals are aligned to the default solver time steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .noise import HurstParam, c1h

__all__ = ["TestFunction", "load_catalog", "default_catalog"]


@dataclass(frozen=True)
class TestFunction:
    """Separable test function: time indicator times Gaussian bump."""

    name: str
    center: float
    width: float
    amplitude: float
    t_start: float
    t_end: float

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError(f"{self.name}: bump width must be positive")
        if self.t_end < self.t_start:
            raise ValueError(f"{self.name}: empty time interval")

    def spatial_value(self, x: np.ndarray) -> np.ndarray:
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.amplitude * np.exp(-0.5 * z * z)

    def spatial_fourier(self, xi: np.ndarray) -> np.ndarray:
        """Continuous Fourier transform of the spatial part."""
        xi = np.asarray(xi, dtype=float)
        amp = self.amplitude * self.width * math.sqrt(2.0 * math.pi)
        return amp * np.exp(-0.5 * self.width ** 2 * xi ** 2) * np.exp(-1j * xi * self.center)

    def value(self, s: np.ndarray, x: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        ind = ((s >= self.t_start) & (s < self.t_end)).astype(float)
        return ind * self.spatial_value(x)

    def h_norm_sq_closed_form(self, hurst: HurstParam) -> float:
        """Exact squared noise norm.

        ``c1h * dt * int |Fg|^2 |xi|^(1-2h) dxi`` reduces to
        ``Gamma(2h+1) sin(pi h) Gamma(1-h) A^2 w^(2h) (t_end - t_start)``
        by the Gaussian moment integral.
        """
        h = hurst.h
        return (2.0 * math.pi * c1h(hurst) * math.gamma(1.0 - h)
                * self.amplitude ** 2 * self.width ** (2.0 * h)
                * (self.t_end - self.t_start))


def _parse_catalog(text: str, origin: str) -> dict[str, TestFunction]:
    entries: dict[str, TestFunction] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(f"{origin}:{lineno}: expected 6 fields, got {len(parts)}")
        name = parts[0]
        try:
            center, width, amplitude, t0, t1 = map(float, parts[1:])
        except ValueError as exc:
            raise ValueError(f"{origin}:{lineno}: {exc}") from exc
        if name in entries:
            raise ValueError(f"{origin}:{lineno}: duplicate catalog entry {name!r}")
        entries[name] = TestFunction(name, center, width, amplitude, t0, t1)
    return entries


def load_catalog(path: str | Path) -> dict[str, TestFunction]:
    path = Path(path)
    return _parse_catalog(path.read_text(), str(path))


def default_catalog() -> dict[str, TestFunction]:
    """The ten-function catalog shipped with the package."""
    text = resources.files("roughpam").joinpath("data/catalog.txt").read_text()
    return _parse_catalog(text, "data/catalog.txt")
