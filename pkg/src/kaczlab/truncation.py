"""Truncate, periodize and reconstruct: noise bounds for finite vector systems.

The first ``N`` vectors ``phi_1..phi_N`` (1-based here, to keep the cycle
operator ``T = (I - P_N) ... (I - P_1)`` in its natural order) are repeated
with period ``N``. Classical Kaczmarz on the periodic system converges to the
projection of ``x`` on their span when the data are clean; with noise the
error stays below a bound driven by ``||T||``. Relaxed Kaczmarz with
``omega -> 0`` gives the Moore-Penrose least-squares solution, whose error is
controlled by the lower frame bound.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .engine import ReconstructionReport
from .errors import DimensionError, NumericalError, RankWarning
from .hilbert import as_vector, frame_bounds, from_standard, norm, phi_matrix, span_basis, to_standard
from .relaxation import _cycle_map

PINV_RCOND = 1e-10


@dataclass(frozen=True, eq=False)
class PeriodicSystem:
    """Unit vectors ``phi_1..phi_N`` repeated with period ``N``.

    ``vectors[j - 1]`` holds ``phi_j``.
    """

    measure: object
    vectors: np.ndarray

    @property
    def period(self):
        return self.vectors.shape[0]

    def vector(self, n):
        """``phi_n^(N)`` for any ``n >= 1``."""
        return self.vectors[(n - 1) % self.period]

    def standard(self):
        """Vectors in standard coordinates, one per row."""
        return to_standard(self.measure, self.vectors)

    def span(self):
        return span_basis(self.measure, self.vectors)


def system_from_vectors(m, vectors):
    V = np.array([as_vector(m, v) for v in vectors])
    if V.shape[0] < 1:
        raise DimensionError("a periodic system needs at least one vector")
    norms = np.sqrt(np.abs(V) ** 2 @ m.weights)
    if np.any(np.abs(norms - 1.0) > 1e-12):
        raise DimensionError("periodic systems must consist of unit vectors")
    V.setflags(write=False)
    return PeriodicSystem(m, V)


def periodize(m, N):
    """``phi_1..phi_N`` of the stationary sequence of ``m``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return system_from_vectors(m, phi_matrix(m, N, start=1))


def _restricted_projections(sys):
    U = sys.span()
    P = sys.standard() @ np.conj(U)        # row j: coordinates of phi_j in the span basis
    return U, P


def cycle_operator(sys):
    """Matrix of ``T`` on ``span(phi_1..phi_N)`` in an orthonormal basis."""
    U, P = _restricted_projections(sys)
    r = U.shape[1]
    T = np.eye(r, dtype=complex)
    for p in P:
        T = (np.eye(r) - np.outer(p, np.conj(p))) @ T
    return T


def cycle_operator_norm(sys):
    T = cycle_operator(sys)
    if T.size == 0:
        return 0.0
    return float(np.linalg.norm(T, 2))


def _tail_weights(sys):
    """``||(I - P_N) ... (I - P_{j+1}) phi_j||`` for ``j = 1..N`` (1 for ``j = N``)."""
    U, P = _restricted_projections(sys)
    r = U.shape[1]
    L = np.eye(r, dtype=complex)
    out = np.zeros(sys.period)
    for j in range(sys.period - 1, -1, -1):
        out[j] = np.linalg.norm(L @ P[j])
        L = L @ (np.eye(r) - np.outer(P[j], np.conj(P[j])))
    return out


def classical_bound(sys, eps):
    """``(|eps_N| + sum_{j<N} ||(I-P_N)...(I-P_{j+1}) phi_j|| |eps_j|) / (1 - ||T||)``."""
    eps = np.asarray(eps, dtype=complex)
    if eps.shape != (sys.period,):
        raise DimensionError(f"need {sys.period} noise values, got {eps.shape}")
    num = float(np.dot(_tail_weights(sys), np.abs(eps)))
    if num == 0.0:
        return 0.0
    return num / (1.0 - cycle_operator_norm(sys))


def default_cycles(sys):
    """``max(100, ceil(20 / (1 - ||T||)))``: enough for the transient ``||T||**m`` to die."""
    return max(100, math.ceil(20.0 / (1.0 - cycle_operator_norm(sys))))


def limsup_estimate(errors):
    """Maximum over the last fifth of the per-cycle errors."""
    errors = np.asarray(errors)
    k = math.ceil(errors.size / 5)
    return float(errors[-k:].max())


def moore_penrose_lss(sys, c):
    """Least-squares solution of ``<z, phi_n> = c_n`` inside ``span(phi_1..phi_N)``.

    Computed with the pseudoinverse of the analysis map in an orthonormal basis
    of the span. When the analysis map on the whole space is numerically rank
    deficient (the vectors do not span, or nearly fail to) the least-squares
    solution is not unique; the minimum-norm one is returned with a
    :class:`RankWarning`.
    """
    c = np.asarray(c, dtype=complex)
    if c.shape != (sys.period,):
        raise DimensionError(f"need {sys.period} data values, got {c.shape}")
    s = np.linalg.svd(sys.standard(), compute_uv=False)
    if s.size < sys.measure.size or s[-1] < PINV_RCOND * s[0]:
        warnings.warn("analysis operator is numerically rank deficient", RankWarning, stacklevel=2)
    U = sys.span()
    Theta = np.conj(sys.standard()) @ U
    a = np.linalg.pinv(Theta, rcond=PINV_RCOND) @ c
    return from_standard(sys.measure, U @ a)


def analysis(sys, x):
    """``(<x, phi_1>, ..., <x, phi_N>)``."""
    x = as_vector(sys.measure, x)
    return np.conj(sys.vectors) @ (sys.measure.weights * x)


def project(sys, x):
    """``P_N x``: orthogonal projection onto the span of the system."""
    U = sys.span()
    xs = to_standard(sys.measure, as_vector(sys.measure, x))
    return from_standard(sys.measure, U @ (np.conj(U).T @ xs))


def frame_bound_check(sys, x, eps, check=True):
    """``(||P_N x - z||**2, sum |eps_n|**2 / A_N)`` for ``z`` the noisy least-squares solution.

    With ``check`` set, a violation beyond 1e-10 raises :class:`NumericalError`.
    """
    eps = np.asarray(eps, dtype=complex)
    z = moore_penrose_lss(sys, analysis(sys, x) + eps)
    lhs = norm(sys.measure, project(sys, x) - z) ** 2
    A, _ = frame_bounds(sys.measure, sys.vectors)
    rhs = float(np.sum(np.abs(eps) ** 2)) / A
    if check and lhs > rhs + 1e-10:
        raise NumericalError(f"least-squares noise bound violated: {lhs} > {rhs}")
    return lhs, rhs


def truncated_noisy_run(sys, x, eps, cycles=None):
    """Classical Kaczmarz on the periodic system with data ``<x, phi_n> + eps_n``.

    Starts from 0, so the first step is ``(<x, phi_1> + eps_1) phi_1``.
    ``error_norms[k]`` is ``||P_N x - x~_{(k+1)N}||``. The bound values carry the
    classical bound, the frame right-hand side, the limsup estimate and
    ``||x - P_N x||``, the part of the error no amount of denoising removes.
    """
    m = sys.measure
    x = as_vector(m, x)
    eps = np.asarray(eps, dtype=complex)
    if eps.shape != (sys.period,):
        raise DimensionError(f"need {sys.period} noise values, got {eps.shape}")
    if cycles is None:
        cycles = default_cycles(sys)
    if cycles < 1:
        raise ValueError("need at least one cycle")
    M, t = _cycle_map(m, sys.vectors, analysis(sys, x) + eps, 1.0)
    target = project(sys, x)
    y = np.zeros(m.size, dtype=complex)
    errors = np.zeros(cycles)
    for k in range(cycles):
        y = M @ y + t
        errors[k] = norm(m, target - y)
    bound = classical_bound(sys, eps)
    A, _ = frame_bounds(m, sys.vectors)
    frame_rhs = float(np.sum(np.abs(eps) ** 2)) / A
    gap = norm(m, x - target)
    return ReconstructionReport(
        final=y,
        error_norms=errors,
        bound_values={
            "classical": bound,
            "frame_rhs": frame_rhs,
            "limsup": limsup_estimate(errors),
            "cycle_norm": cycle_operator_norm(sys),
            "projection_gap": gap,
        },
        metadata={"measure": m.to_dict(), "period": sys.period, "cycles": int(cycles)},
        columns={
            "classical_bound": np.full(cycles, bound),
            "frame_rhs": np.full(cycles, frame_rhs),
            "projection_gap": np.full(cycles, gap),
        },
    )


def cycle_csv(report):
    """Per-cycle CSV: cycle, error_vs_projection, classical_bound, frame_rhs, projection_gap."""
    return report.to_csv(index_name="cycle", error_name="error_vs_projection", start=1)
