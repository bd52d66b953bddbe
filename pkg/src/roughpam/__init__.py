"""Simulation lab for the 1-d parabolic Anderson model with rough spatial noise.

Three independent representations of the solution's moments are
implemented and cross-validated: Fourier-Galerkin mild-solution
trajectories, a truncated chaos series for the second moment, and
mollified Feynman-Kac Monte Carlo, plus an experiment layer for
moment-growth (intermittency) scans.
"""

from .catalog import TestFunction, default_catalog, load_catalog
from .errors import (
    ConfigError,
    DivergentIntegralError,
    FlaggedEstimateError,
    GridMismatchError,
    IntegrityError,
    QuadratureError,
    RoughPamError,
    SolverInstabilityError,
)
from .model import InitialCondition, ModelParams
from .noise import (
    HurstParam,
    NoiseIncrement,
    SpectralDensityWeight,
    SpectralGrid,
    c1h,
    inner_product_h,
    ito_integral_variance_check,
    mollified_cov,
    pair_coupling,
    sample_noise_increment,
)
from .solver import (
    SolutionField,
    heat_semigroup_apply,
    picard_contraction_probe,
    solve,
    solve_ensemble,
    step_mild,
    v_norm,
)

__version__ = "0.1.0"
