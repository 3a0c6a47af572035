"""Abel summation, the augmented Kaczmarz iteration and relaxed Kaczmarz.

Abel summation damps the n-th term of the Kaczmarz series by ``r**n``; the
augmented iteration produces exactly those damped partial sums as a second
sequence ``y_n`` driven by the ordinary iterates ``x_n``. The relaxed
iteration scales each correction by ``omega``; over a periodic system its cycle
limits ``y(omega)`` tend to the least-squares solution as ``omega -> 0``.
"""

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .engine import InputStream, convolve_alpha, fmt, synthesize
from .errors import DepthError, DomainError, NonConvergenceWarning
from .hilbert import as_vector, norm, phi_matrix
from .spectral import AtomicMeasure, alpha_coefficients

ABEL_DEPTH_CAP = 10**6
DEFAULT_OMEGA_GRID = (0.08, 0.04, 0.02, 0.01, 0.005)


def _check_r(r):
    r = float(r)
    if not 0.0 < r < 1.0:
        raise DomainError(f"r must lie in (0, 1), got {r!r}")
    return r


def abel_partial(m, alpha, c, r, N):
    """``sum_{n<=N} r**n (alpha * c)_n phi_n``."""
    r = _check_r(r)
    cs = c.values(N) if isinstance(c, InputStream) else np.asarray(c, dtype=complex)
    a = convolve_alpha(alpha, cs, N)
    return synthesize(m, a * r ** np.arange(N + 1))


def augmented_run(m, c, r, N):
    """Augmented Kaczmarz: ordinary ``x_n`` plus the damped accumulator ``y_n``.

    ``y_n = y_{n-1} + r**n <x_n - x_{n-1}, phi_n> phi_n``; returns ``y_N``.
    """
    r = _check_r(r)
    cs = c.values(N)
    w = m.weights
    x = np.zeros(m.size, dtype=complex)
    y = np.zeros(m.size, dtype=complex)
    Phi = phi_matrix(m, N)
    WPhi = w * np.conj(Phi)
    rn = 1.0
    for n in range(N + 1):
        x_new = x + (cs[n] - x @ WPhi[n]) * Phi[n]
        y = y + rn * ((x_new - x) @ WPhi[n]) * Phi[n]
        x = x_new
        rn *= r
    return y


@dataclass
class AbelSweepResult:
    r_values: list
    errors: list
    depths: list
    cap_hit: list = field(default_factory=list)

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["r", "depth", "error"])
        for r, n, e in zip(self.r_values, self.depths, self.errors):
            wr.writerow([fmt(r), n, fmt(e)])
        return buf.getvalue()


def _alpha_times(m, alpha, cs):
    """``alpha * c`` up to ``len(cs)``; atomic measures without ``alpha`` use the rational filter."""
    L = cs.size
    if alpha is not None and len(alpha) >= L:
        return convolve_alpha(alpha, cs, L - 1)
    if isinstance(m, AtomicMeasure):
        P, Q = m.rational_form()
        return lfilter(Q, P, cs)
    return convolve_alpha(alpha_coefficients(m, L - 1), cs, L - 1)


def adaptive_depth(increments, window, threshold):
    """First ``N`` closing a run of ``window`` increments below ``threshold``, else None."""
    n = np.arange(increments.size)
    last_big = np.maximum.accumulate(np.where(increments < threshold, -1, n))
    hits = np.flatnonzero(n - last_big >= window)
    return int(hits[0]) if hits.size else None


def abel_sweep(m, c, r_grid, tol, truth, alpha=None, cap=ABEL_DEPTH_CAP):
    """Damped reconstruction error ``||truth - abel_partial||`` for each ``r``.

    The depth ``N(r)`` is the first index at which the increments
    ``r**n |(alpha * c)_n|`` have stayed below ``tol * (1 - r)`` for
    ``ceil(50 / (1 - r))`` consecutive terms, capped at ``cap``.
    """
    r_grid = [_check_r(r) for r in r_grid]
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise DomainError("r_grid must be increasing")
    truth = as_vector(m, truth)
    out = AbelSweepResult([], [], [], [])
    for r in r_grid:
        window = math.ceil(50.0 / (1.0 - r))
        threshold = tol * (1.0 - r)
        L = min(cap, 2 * window)
        while True:
            a = _alpha_times(m, alpha, c.values(L))
            damp = r ** np.arange(L + 1)
            N = adaptive_depth(damp * np.abs(a), window, threshold)
            if N is not None or L >= cap:
                break
            L = min(cap, 2 * L)
        hit = N is None
        if hit:
            N = L
        y = synthesize(m, (damp * a)[: N + 1])
        out.r_values.append(r)
        out.depths.append(int(N))
        out.errors.append(norm(m, truth - y))
        out.cap_hit.append(hit)
    return out


@dataclass
class RelaxedResult:
    omega: float
    cycle_iterates: list
    limit: np.ndarray
    step_norms: np.ndarray
    converged: bool

    def contraction_ratio(self, tail=20):
        """Geometric fit of the last ``tail`` cycle-to-cycle step norms."""
        s = self.step_norms[self.step_norms > 0]
        s = s[-tail:]
        if s.size < 3:
            return 0.0
        slope = np.polyfit(np.arange(s.size), np.log(s), 1)[0]
        return float(np.exp(slope))


def relaxed_steps(m, vectors, cvals, omegas, x0=None):
    """Run ``x_n = x_{n-1} + omega_n (c_n - <x_{n-1}, v_n>) v_n`` over the given vectors."""
    V = np.asarray(vectors, dtype=complex)
    WV = m.weights * np.conj(V)
    x = np.zeros(m.size, dtype=complex) if x0 is None else np.array(x0, dtype=complex)
    for v, wv, cn, om in zip(V, WV, cvals, omegas):
        x = x + om * (cn - x @ wv) * v
    return x


def _cycle_map(m, V, cvals, omega):
    """Affine map ``y -> M y + t`` performed by one relaxed sweep over ``V``."""
    d = m.size
    WV = m.weights * np.conj(V)
    M = np.eye(d, dtype=complex)
    t = np.zeros(d, dtype=complex)
    for v, wv, cn in zip(V, WV, cvals):
        step = np.eye(d) - omega * np.outer(v, wv)
        M = step @ M
        t = step @ t + omega * cn * v
    return M, t


def relaxed_run(m, vectors, c, omega, max_cycles, tol, keep_iterates=False):
    """Cycle limits ``y_m = x_{mN}`` of relaxed Kaczmarz over a period-``N`` system.

    Starts from ``x_0 = 0``. Stops once ``||y_m - y_{m-1}|| < tol``; if
    ``max_cycles`` is reached first a :class:`NonConvergenceWarning` is issued and
    the last iterate is still returned.
    """
    omega = float(omega)
    if not 0.0 < omega < 2.0:
        raise DomainError(f"omega must lie in (0, 2), got {omega!r}")
    V = np.array([as_vector(m, v) for v in vectors])
    period = V.shape[0]
    cvals = c.values(period - 1) if isinstance(c, InputStream) else np.asarray(c, dtype=complex)[:period]
    if cvals.size < period:
        raise DepthError("need one input per vector")
    M, t = _cycle_map(m, V, cvals, omega)
    y = np.zeros(m.size, dtype=complex)
    iterates = []
    steps = []
    converged = False
    for _ in range(int(max_cycles)):
        y_new = M @ y + t
        s = norm(m, y_new - y)
        steps.append(s)
        y = y_new
        if keep_iterates:
            iterates.append(y.copy())
        if s < tol:
            converged = True
            break
    if not converged:
        warnings.warn(f"relaxed Kaczmarz (omega={omega}) did not reach tol={tol} in {max_cycles} cycles",
                      NonConvergenceWarning, stacklevel=2)
    if not keep_iterates:
        iterates = [y.copy()]
    return RelaxedResult(omega, iterates, y, np.array(steps), converged)


def _neville_at_zero(pts, ys):
    """Value at 0 of the interpolating polynomial through ``(pts[i], ys[i])`` (Neville tableau).

    Written out rather than delegated so the result does not depend on a
    randomized node ordering, which would break byte-identical reports.
    """
    p = [np.asarray(y, dtype=complex) for y in ys]
    for k in range(1, len(pts)):
        p = [(pts[i + k] * p[i] - pts[i] * p[i + 1]) / (pts[i + k] - pts[i]) for i in range(len(p) - 1)]
    return p[0]


def relaxed_limit(m, vectors, c, omega_grid=DEFAULT_OMEGA_GRID, tol=1e-14, max_cycles=2_000_000, order=None):
    """Extrapolate ``y(omega)`` to ``omega = 0``.

    ``y(omega)`` is computed at every grid point and a polynomial in ``omega``
    through the ``order + 1`` smallest points is evaluated at 0 (Richardson).
    ``order=1`` is the two-point linear rule; the default uses every point,
    which is needed for 1e-6 accuracy because the error of ``y(omega)`` is only
    first order in ``omega``.
    """
    grid = [float(w) for w in omega_grid]
    if any(not 0.0 < w < 2.0 for w in grid):
        raise DomainError("omega values must lie in (0, 2)")
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise DomainError("omega_grid must be decreasing")
    ys = np.array([relaxed_run(m, vectors, c, w, max_cycles, tol).limit for w in grid])
    if len(grid) == 1:
        return ys[0]
    k = len(grid) - 1 if order is None else min(int(order), len(grid) - 1)
    return _neville_at_zero(grid[-(k + 1):], ys[-(k + 1):])


def augmented_vs_relaxed(m, vectors, c, r, N):
    """``||y_N(augmented) - x_N(relaxed, omega_n = r**n)||``.

    Both recursions run over ``v_0, ..., v_K`` with ``K = min(N, len(vectors) - 1)``;
    pass ``vectors=None`` to use the stationary sequence ``phi_0..phi_N``.
    """
    r = _check_r(r)
    if vectors is None:
        V = phi_matrix(m, N)
    else:
        V = np.array([as_vector(m, v) for v in vectors])[: N + 1]
    K = V.shape[0] - 1
    cvals = c.values(K) if isinstance(c, InputStream) else np.asarray(c, dtype=complex)[: K + 1]
    WV = m.weights * np.conj(V)
    x = np.zeros(m.size, dtype=complex)
    y = np.zeros(m.size, dtype=complex)
    rn = 1.0
    for n in range(K + 1):
        x_new = x + (cvals[n] - x @ WV[n]) * V[n]
        y = y + rn * ((x_new - x) @ WV[n]) * V[n]
        x = x_new
        rn *= r
    relaxed = relaxed_steps(m, V, cvals, r ** np.arange(K + 1))
    return norm(m, y - relaxed)
