"""Photon-added displaced Fock states: construction, Wigner functions, nonclassicality
and non-Gaussianity measures, and photon-loss dynamics."""

__version__ = "0.1.0"

from .special_numerics import QuadratureSpec, integrate_phase_space, laguerre_general, log_factorial
from .states import DensityMatrix, FockVector, PadfsParams, limiting_state, padfs_coefficients, to_density_matrix
from .wigner import WignerGrid, wigner_generic, wigner_grid, wigner_padfs
from .measures import (
    CovarianceMatrix,
    MeasureReport,
    beamsplitter_output,
    covariance_matrix,
    find_inversion,
    linear_entropy_closed_form,
    linear_entropy_potential,
    measure_report,
    rel_entropy_non_gaussianity,
    skew_info_measure,
    wigner_log_negativity,
)
from .loss import LossParams, evolve_loss, noisy_wigner, wigner_at_origin_witness, wln_decay_curve, wln_threshold

__all__ = [
    "QuadratureSpec",
    "integrate_phase_space",
    "laguerre_general",
    "log_factorial",
    "DensityMatrix",
    "FockVector",
    "PadfsParams",
    "limiting_state",
    "padfs_coefficients",
    "to_density_matrix",
    "WignerGrid",
    "wigner_generic",
    "wigner_grid",
    "wigner_padfs",
    "CovarianceMatrix",
    "MeasureReport",
    "beamsplitter_output",
    "covariance_matrix",
    "find_inversion",
    "linear_entropy_closed_form",
    "linear_entropy_potential",
    "measure_report",
    "rel_entropy_non_gaussianity",
    "skew_info_measure",
    "wigner_log_negativity",
    "LossParams",
    "evolve_loss",
    "noisy_wigner",
    "wigner_at_origin_witness",
    "wln_decay_curve",
    "wln_threshold",
]
