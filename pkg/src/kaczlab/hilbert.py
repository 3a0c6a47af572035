"""Concrete Hilbert space for a stationary sequence.

For an atomic measure with atoms ``x_k`` and weights ``w_k`` the space is
``L^2(mu) = C^d`` with ``<u, v> = sum_k w_k u_k conj(v_k)`` and
``phi_n = exp(2 pi i n x_k)``. Spectral vectors are plain complex arrays of
length ``d``. Linear algebra maps them to standard coordinates with
``u -> sqrt(w) * u`` so that ordinary Hermitian routines apply.

For sources without atoms only the Gram (moment) realization is available.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import DimensionError
from .spectral import moments

# relative singular-value cutoff used to decide the span of a vector family
SPAN_RTOL = 1e-10


def as_vector(m, u):
    u = np.asarray(u, dtype=complex)
    if u.shape != (m.size,):
        raise DimensionError(f"vector has shape {u.shape}, measure has {m.size} atoms")
    return u


def phi_vector(m, n):
    """``phi_n`` as the spectral vector ``exp(2 pi i n x_k)``."""
    return np.exp(2j * np.pi * n * m.positions)


def phi_matrix(m, N, start=0):
    """Rows ``phi_start, ..., phi_N`` stacked into an array of shape ``(N - start + 1, d)``."""
    n = np.arange(start, N + 1)
    return np.exp(2j * np.pi * np.outer(n, m.positions))


def inner(m, u, v):
    u = as_vector(m, u)
    v = as_vector(m, v)
    return complex(np.sum(m.weights * u * np.conj(v)))


def norm(m, u):
    u = as_vector(m, u)
    return float(np.sqrt(np.sum(m.weights * np.abs(u) ** 2)))


def to_standard(m, u):
    return np.sqrt(m.weights) * np.asarray(u, dtype=complex)


def from_standard(m, a):
    return np.asarray(a, dtype=complex) / np.sqrt(m.weights)


def _stack(m, vectors):
    vs = [as_vector(m, v) for v in vectors]
    if not vs:
        raise DimensionError("need at least one vector")
    return np.array(vs)


def span_basis(m, vectors, rtol=SPAN_RTOL):
    """Orthonormal basis (standard coordinates, as columns) of ``span(vectors)``."""
    A = to_standard(m, _stack(m, vectors)).T          # (d, k)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return U[:, :0]
    rank = int(np.sum(s > rtol * s[0]))
    return U[:, :rank]


def project_span(m, basis, x):
    """Orthogonal projection of ``x`` onto ``span(basis)`` in ``L^2(mu)``."""
    x = as_vector(m, x)
    U = span_basis(m, basis)
    xs = to_standard(m, x)
    return from_standard(m, U @ (U.conj().T @ xs))


def frame_bounds(m, vectors):
    """Extreme eigenvalues ``(A, B)`` of the frame operator on ``span(vectors)``."""
    A = to_standard(m, _stack(m, vectors))            # rows are the vectors
    s = np.linalg.svd(A, compute_uv=False)
    s = s[s > SPAN_RTOL * s[0]] if s[0] > 0 else s[:0]
    if s.size == 0:
        return 0.0, 0.0
    eig = s ** 2
    return float(eig.min()), float(eig.max())


@dataclass(frozen=True, eq=False)
class GramFrame:
    """Gram matrix ``G[i, j] = <phi_j, phi_i> = mu_hat(i - j)``.

    ``min_eigenvalue`` is reported rather than corrected: repeated vectors
    (roots-of-unity measures) make ``G`` singular, and that is legitimate.
    """

    matrix: np.ndarray
    min_eigenvalue: float

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def singular(self):
        return self.min_eigenvalue <= 1e-10 * max(1.0, self.size)


def gram_frame(src, N):
    if N < 1:
        raise ValueError("N must be >= 1")
    mu = moments(src, N - 1)
    G = toeplitz(mu, np.conj(mu))
    G.setflags(write=False)
    lam = float(np.linalg.eigvalsh(G).min())
    return GramFrame(G, lam)


def gram_inner(G, cu, cv):
    """``<sum c_j phi_j, sum d_i phi_i> = d^H G c`` for coefficient lists."""
    cu = np.asarray(cu, dtype=complex).ravel()
    cv = np.asarray(cv, dtype=complex).ravel()
    if cu.size > G.size or cv.size > G.size:
        raise DimensionError("coefficient list longer than the Gram matrix")
    M = G.matrix
    return complex(np.conj(cv) @ M[: cv.size, : cu.size] @ cu)


def vector_to_json(u):
    return [[float(z.real), float(z.imag)] for z in np.asarray(u, dtype=complex)]


def vector_from_json(data):
    return np.array([complex(re, im) for re, im in data], dtype=complex)
