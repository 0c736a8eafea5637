"""Detection-loophole Bell-test parameter optimization.

The package evaluates a count-difference objective J whose negativity
certifies violation of a local-realism bound with inefficient detectors,
finds optimal source states and polarizer settings by a self-contained
Nelder-Mead search, models a count-level experiment with background and
accidental coincidences, and quantifies robustness of a design when the
polarizer angles fluctuate.
"""

from ._kernels import BACKEND
from .fluctuation import (
    FluctuationSpec,
    MonteCarloStats,
    SnrOptimum,
    SnrReport,
    analytic_mean_B,
    average_rule,
    monte_carlo_stats,
    optimize_snr,
    smoothed_stats,
)
from .linalg import (
    ConvergenceError,
    EigenDecomp4,
    as_hermitian,
    as_state_vec,
    herm_eig4,
    quad_form,
    tensor2x2,
)
from .model import (
    EberhardParams,
    EberhardState,
    EfficiencyPair,
    Settings,
    SpectralCheck,
    ZetaMax,
    closed_form_B,
    courant_fischer_check,
    eberhard_state,
    j_per_n,
    operator_sum_B,
    settings_for,
    sigma_op,
    tau_op,
    zeta_max,
)
from .simplex import Bounds, OptResult, SimplexConfig, multi_start, nelder_mead
from .vienna import (
    ViennaExperiment,
    ViennaState,
    accidentals,
    density_matrix,
    projection,
    singles_a,
    singles_b,
    true_coincidences,
    vienna_j,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Bounds",
    "ConvergenceError",
    "EberhardParams",
    "EberhardState",
    "EfficiencyPair",
    "EigenDecomp4",
    "FluctuationSpec",
    "MonteCarloStats",
    "OptResult",
    "Settings",
    "SimplexConfig",
    "SnrOptimum",
    "SnrReport",
    "SpectralCheck",
    "ViennaExperiment",
    "ViennaState",
    "ZetaMax",
    "accidentals",
    "analytic_mean_B",
    "as_hermitian",
    "as_state_vec",
    "average_rule",
    "closed_form_B",
    "courant_fischer_check",
    "density_matrix",
    "eberhard_state",
    "herm_eig4",
    "j_per_n",
    "monte_carlo_stats",
    "multi_start",
    "nelder_mead",
    "operator_sum_B",
    "optimize_snr",
    "projection",
    "quad_form",
    "settings_for",
    "sigma_op",
    "singles_a",
    "singles_b",
    "smoothed_stats",
    "tau_op",
    "tensor2x2",
    "true_coincidences",
    "vienna_j",
    "zeta_max",
]
