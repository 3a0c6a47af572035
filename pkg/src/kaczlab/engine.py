"""Kaczmarz iteration for stationary sequences and its series representation.

The iteration started from ``x_0 = c_0 phi_0`` and updated by

    x_n = x_{n-1} + (c_n - <x_{n-1}, phi_n>) phi_n

equals the partial series ``sum_{n<=N} (sum_{j<=n} alpha_{n-j} c_j) phi_n`` for
*any* input sequence ``c``. With ``c_n = <x, phi_n> + eps_n`` the noise enters
only through the convolution ``alpha * eps``, the error term ``E_eps``.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DepthError
from .hilbert import as_vector, norm, phi_matrix, vector_to_json
from .series import CoefficientSeries, truncated_convolve
from .spectral import moments

_BLOCK = 4096


class InputStream:
    """Scalar inputs ``c_0, c_1, ...`` fed to the iteration.

    ``provenance`` is one of ``"clean"``, ``"noisy"`` or ``"raw"``.
    """

    def __init__(self, fn, provenance="raw"):
        self._fn = fn
        self.provenance = provenance

    def values(self, depth):
        """``c_0..c_depth`` as a complex array."""
        out = np.asarray(self._fn(int(depth)), dtype=complex)
        if out.shape != (depth + 1,):
            raise DepthError(f"input stream produced {out.shape} values, wanted {depth + 1}")
        return out

    @classmethod
    def raw(cls, seq):
        arr = np.array(seq, dtype=complex).ravel()

        def fn(depth):
            if depth >= arr.size:
                raise DepthError(f"raw stream holds {arr.size} values, {depth + 1} requested")
            return arr[: depth + 1]

        return cls(fn, "raw")

    @classmethod
    def clean(cls, m, x):
        """``c_n = <x, phi_n>``."""
        wx = m.weights * as_vector(m, x)

        def fn(depth):
            return np.conj(phi_matrix(m, depth)) @ wx

        return cls(fn, "clean")

    @classmethod
    def noisy(cls, m, x, noise):
        """``c_n = <x, phi_n> + eps_n``; ``noise`` is a profile or a coefficient list."""
        clean = cls.clean(m, x)
        if hasattr(noise, "coefficients"):
            eps_fn = noise.coefficients
        else:
            eps = np.array(noise.coeffs if isinstance(noise, CoefficientSeries) else noise, dtype=complex).ravel()

            def eps_fn(depth):
                out = np.zeros(depth + 1, dtype=complex)
                k = min(depth + 1, eps.size)
                out[:k] = eps[:k]
                return out

        def fn(depth):
            return clean.values(depth) + np.asarray(eps_fn(depth), dtype=complex)[: depth + 1]

        return cls(fn, "noisy")

    @classmethod
    def periodic(cls, base):
        """Repeat ``base`` forever (used with periodized vector systems)."""
        arr = np.array(base, dtype=complex).ravel()

        def fn(depth):
            return np.resize(arr, depth + 1)

        return cls(fn, "raw")


@dataclass
class ReconstructionReport:
    final: np.ndarray
    error_norms: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterates: list = None
    bound_values: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    # extra per-step columns exported to CSV next to ``error``
    columns: dict = field(default_factory=dict)

    @property
    def steps(self):
        return len(self.error_norms)

    def to_dict(self):
        return {
            "final": vector_to_json(self.final),
            "error_norms": [float(e) for e in self.error_norms],
            "bound_values": {k: float(v) for k, v in self.bound_values.items()},
            "metadata": self.metadata,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self, index_name="step", error_name="error", start=0):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        w.writerow([index_name, error_name, *names])
        for i, e in enumerate(self.error_norms):
            w.writerow([i + start, fmt(e), *(fmt(self.columns[k][i]) for k in names)])
        return buf.getvalue()


def fmt(v):
    """17 significant digits, locale independent."""
    return format(float(v), ".17g")


def kaczmarz_run(m, c, N, keep_trajectory=False, truth=None, stop_tol=None):
    """Run ``N`` Kaczmarz steps on the stationary sequence of ``m``.

    With ``truth`` given, ``error_norms[n] = ||truth - x_n||``. ``stop_tol``
    (requires ``truth``) ends the run at the first step whose error is below it.
    The largest interpolation residual ``|<x_n, phi_n> - c_n|`` is recorded in
    ``metadata["max_residual"]``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    if stop_tol is not None and truth is None:
        raise ValueError("stop_tol needs a ground truth")
    cs = c.values(N)
    w = m.weights
    x = np.zeros(m.size, dtype=complex)
    if truth is not None:
        truth = as_vector(m, truth)
    errors = []
    traj = [] if keep_trajectory else None
    max_res = 0.0
    n = 0
    done = False
    for start in range(0, N + 1, _BLOCK):
        stop = min(N, start + _BLOCK - 1)
        Phi = phi_matrix(m, stop, start)
        WPhi = w * np.conj(Phi)
        for row in range(stop - start + 1):
            n = start + row
            phi, wphi = Phi[row], WPhi[row]
            x = x + (cs[n] - x @ wphi) * phi
            max_res = max(max_res, abs(x @ wphi - cs[n]))
            if keep_trajectory:
                traj.append(x.copy())
            if truth is not None:
                e = math.sqrt(float(np.sum(w * np.abs(truth - x) ** 2)))
                errors.append(e)
                if stop_tol is not None and e < stop_tol:
                    done = True
                    break
        if done:
            break
    return ReconstructionReport(
        final=x,
        error_norms=np.array(errors),
        iterates=traj,
        metadata={"measure": m.to_dict(), "steps": n, "provenance": c.provenance, "max_residual": max_res},
    )


def convolve_alpha(alpha, c, N):
    """``a_n = sum_{j<=n} alpha_{n-j} c_j`` for ``n = 0..N``."""
    alpha = alpha.coeffs if isinstance(alpha, CoefficientSeries) else np.asarray(alpha, dtype=complex)
    if alpha.size < N + 1:
        raise DepthError(f"alpha has {alpha.size} terms, need {N + 1}")
    c = np.asarray(c, dtype=complex)
    if c.size < N + 1:
        raise DepthError(f"inputs have {c.size} terms, need {N + 1}")
    return truncated_convolve(alpha[: N + 1], c[: N + 1], N + 1)


def _values(c, N):
    if isinstance(c, InputStream):
        return c.values(N)
    if isinstance(c, CoefficientSeries):
        return c.coeffs
    return np.asarray(c, dtype=complex)


def synthesize(m, coeffs, vectors=None):
    """``sum_n coeffs[n] v_n`` with ``v_n = phi_n`` unless ``vectors`` is given."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if vectors is None:
        out = np.zeros(m.size, dtype=complex)
        for start in range(0, coeffs.size, _BLOCK):
            stop = min(coeffs.size, start + _BLOCK) - 1
            out += coeffs[start: stop + 1] @ phi_matrix(m, stop, start)
        return out
    return coeffs @ np.asarray(vectors)[: coeffs.size]


def partial_sum_norms(m, coeffs, vectors=None):
    """``|| sum_{n<=k} coeffs[n] v_n ||`` for every ``k``."""
    coeffs = np.asarray(coeffs, dtype=complex)
    V = phi_matrix(m, coeffs.size - 1) if vectors is None else np.asarray(vectors)[: coeffs.size]
    S = np.cumsum(coeffs[:, None] * V, axis=0)
    return np.sqrt(np.abs(S) ** 2 @ m.weights)


def series_reconstruction(m, alpha, c, N):
    """Partial series ``sum_{n<=N} (alpha * c)_n phi_n``."""
    return synthesize(m, convolve_alpha(alpha, _values(c, N), N))


def auxiliary_sequence(m, N):
    """``g_0 = phi_0``, ``g_n = phi_n - sum_{i<n} <phi_n, phi_i> g_i``; shape ``(N+1, d)``."""
    Phi = phi_matrix(m, N)
    mu = moments(m, N)
    g = np.zeros_like(Phi)
    g[0] = Phi[0]
    for n in range(1, N + 1):
        # <phi_n, phi_i> = mu_hat(i - n) = conj(mu_hat(n - i))
        g[n] = Phi[n] - np.conj(mu[n:0:-1]) @ g[:n]
    return g


def g_reconstruction(m, alpha, c, N, g=None):
    """``sum_{n<=N} (alpha * c)_n g_n``: the frame-style reconstruction."""
    if g is None:
        g = auxiliary_sequence(m, N)
    return convolve_alpha(alpha, _values(c, N), N) @ g[: N + 1]


def parseval_defect(m, x, N, g=None):
    """``| sum_{n<=N} |<x, g_n>|**2 - ||x||**2 |``."""
    x = as_vector(m, x)
    if g is None:
        g = auxiliary_sequence(m, N)
    coeffs = np.conj(g[: N + 1]) @ (m.weights * x)
    return float(abs(np.sum(np.abs(coeffs) ** 2) - norm(m, x) ** 2))


def error_term(m, alpha, eps, N):
    """Partial sum of ``E_eps = sum_n (alpha * eps)_n phi_n`` through ``n = N``."""
    e = _values(eps, N)
    if e.size < N + 1:
        raise DepthError(f"noise has {e.size} terms, need {N + 1}")
    return synthesize(m, convolve_alpha(alpha, e, N))


def stabilized(increment_norms, tol):
    """True when the last ``ceil(N/10)`` increments are all below ``tol / N``."""
    inc = np.asarray(increment_norms, dtype=float)
    N = inc.size - 1
    if N < 1:
        return False
    k = math.ceil(N / 10)
    return bool(np.all(inc[-k:] < tol / N))


def growth_exponent(norms, start=1):
    """Least-squares slope of ``log ||S_N||`` against ``log N`` for ``N >= start``.

    Near 0 for bounded partial sums; positive values are evidence of divergence.
    """
    norms = np.asarray(norms, dtype=float)
    Ns = np.arange(norms.size)
    mask = (Ns >= max(start, 1)) & (norms > 0)
    if mask.sum() < 2:
        return 0.0
    slope, _ = np.polyfit(np.log(Ns[mask]), np.log(norms[mask]), 1)
    return float(slope)
