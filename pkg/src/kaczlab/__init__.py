"""Kaczmarz reconstruction for stationary sequences with atomic spectral measures."""

__version__ = "0.1.0"

from .engine import (InputStream, ReconstructionReport, auxiliary_sequence, error_term, g_reconstruction,
                     kaczmarz_run, parseval_defect, series_reconstruction)
from .errors import (ConfigError, DepthError, DimensionError, DomainError, KaczlabError, MeasureError,
                     NonConvergenceWarning, NumericalError, RankError, RankWarning)
from .hilbert import frame_bounds, gram_frame, inner, norm, phi_matrix, phi_vector, span_basis
from .noise import NoiseProfile, maximal_function, model_space_basis, noise_coefficients, wold_decompose
from .relaxation import abel_partial, abel_sweep, augmented_run, augmented_vs_relaxed, relaxed_limit, relaxed_run
from .series import CoefficientSeries
from .spectral import (AtomicMeasure, CantorMeasure, LebesgueMeasure, MomentSequence, alpha_coefficients,
                       b_coefficients, cauchy_transform, inner_function, make_atomic, moments, roots_of_unity_measure)
from .truncation import (PeriodicSystem, analysis, classical_bound, cycle_operator_norm, frame_bound_check,
                         moore_penrose_lss, periodize, truncated_noisy_run)
