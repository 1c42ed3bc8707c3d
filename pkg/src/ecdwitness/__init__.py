"""Witnesses of Wigner negativity and non-Gaussian entanglement built from
pointwise characteristic-function measurements.

The package simulates multimode bosonic states on truncated Fock spaces,
builds the Hermitian witness matrices whose negative eigenvalues certify
Wigner negativity and entanglement, bounds those eigenvalues against
measurement error, optimizes the measurement points, and reproduces the
state-family and photon-loss case studies at desk scale.
"""

from .charwig import (cat_ntr_lower_bound, char_fn, char_fn_batch,
                      collective_marginal, export_wigner_grid,
                      negativity_volume, partial_transpose, pt_min_eigenvalue,
                      reduced_collective_wigner, register_negativity_reduction,
                      wigner, wigner_batch)
from .fock import (DensityOperator, FockSpace, PureState, TruncationWarning,
                   apply_gaussian_map, beamsplitter, destroy,
                   displacement_matrix, make_state, mode_rotation_to_collective,
                   multimode_displacement, partial_trace, squeeze)
from .measures import (SchmidtSpectrum, e_ppt, e_sep, n_tr_fock_bounds,
                       pt_negativity, schmidt)
from .noise import LossChannel, apply_loss, apply_loss_dilation
from .optimizer import (OptimizerConfig, OptimizerTrace, cat_points,
                        fock_bell_points, grad_lambda_min, heuristic_init,
                        hex_disk_points, optimize, pstmsv_points, ring_points)
from .shotsim import (MeasurementPlan, MeasurementRecord, MeasurementSetting,
                      assemble_measured_witness, ecd_expectations,
                      exact_records, hoeffding_radius, records_from_jsonl,
                      records_to_jsonl, sample)
from .symplectic import (GaussianFrame, SymplecticMap, beamsplitter_map,
                         collective_map, identity_map, pair_points, phase_map,
                         points_from_json, points_to_json, squeeze_map,
                         transform_point_set, wedge)
from .witness import (MatrixKind, MatrixMode, PhaseSpacePointSet,
                      WitnessMatrix, WitnessResult, build_C, build_C2, certify,
                      evaluate, matrix_from_json, matrix_to_json,
                      propagate_error, result_to_json)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
