"""Spectral measures and the analytic functions attached to them.

Every measure here lives on ``[0, 1)`` (identified with the unit circle via
``x -> exp(2 pi i x)``) and exposes its Fourier moments

    mu_hat(n) = integral of exp(-2 pi i n x) d mu(x).

From the moments we build the Cauchy transform ``mu_plus(z) = sum mu_hat(n) z**n``,
the inner function ``b = 1 - 1/mu_plus`` and the coefficients ``alpha`` of
``1 - b = 1/mu_plus``.

For atomic measures ``mu_plus`` is rational, ``P(z) / Q(z)`` with
``Q(z) = prod_k (1 - z conj(zeta_k))``, so ``alpha`` obeys a linear recurrence
of order ``d - 1`` and can be generated to depth 10**6 in linear time.
"""

from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.signal import lfilter

from .errors import (DepthError, DimensionError, DomainError, DuplicateAtomError,
                     NumericalError, RangeError, WeightSumError)
from .series import CoefficientSeries, truncated_convolve

WEIGHT_TOL = 1e-9
# Cantor product factors are dropped once their angle is below this
CANTOR_ANGLE_CUTOFF = 1e-12


def _readonly(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


class MomentSource:
    """Anything that can report Fourier moments ``mu_hat(0..n_max)``."""

    kind = "abstract"

    def moments(self, n_max):
        raise NotImplementedError

    def moment(self, n):
        if n < 0:
            return complex(np.conj(self.moment(-n)))
        return complex(self.moments(n)[n])

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class AtomicMeasure(MomentSource):
    """Finitely supported probability measure; build it with :func:`make_atomic`."""

    positions: np.ndarray
    weights: np.ndarray

    kind = "atomic"

    @property
    def size(self):
        return self.positions.size

    @property
    def nodes(self):
        """Atoms as points ``exp(2 pi i x_k)`` on the unit circle."""
        return np.exp(2j * np.pi * self.positions)

    def moments(self, n_max):
        n = np.arange(n_max + 1)
        return np.exp(-2j * np.pi * np.outer(n, self.positions)) @ self.weights

    def rational_form(self):
        """Polynomials ``(P, Q)`` (ascending coefficients) with ``mu_plus = P / Q``."""
        conj_nodes = np.conj(self.nodes)
        factors = [np.array([1.0, -c]) for c in conj_nodes]
        Q = reduce(np.convolve, factors, np.array([1.0 + 0j]))
        P = np.zeros(self.size, dtype=complex)
        for k, w in enumerate(self.weights):
            others = factors[:k] + factors[k + 1:]
            P += w * reduce(np.convolve, others, np.array([1.0 + 0j]))
        return P, Q

    def to_dict(self):
        return {"kind": "atomic", "atoms": [[float(x), float(w)] for x, w in zip(self.positions, self.weights)]}

    def __repr__(self):
        atoms = ", ".join(f"({x:.6g}, {w:.6g})" for x, w in zip(self.positions, self.weights))
        return f"AtomicMeasure([{atoms}])"


class LebesgueMeasure(MomentSource):
    kind = "lebesgue"

    def moments(self, n_max):
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = 1.0
        return out

    def to_dict(self):
        return {"kind": "lebesgue"}

    def __repr__(self):
        return "LebesgueMeasure()"


class CantorMeasure(MomentSource):
    """Middle-thirds Cantor measure on [0, 1]."""

    kind = "cantor"

    def moments(self, n_max):
        return np.array([_cantor_moment(n) for n in range(n_max + 1)], dtype=complex)

    def to_dict(self):
        return {"kind": "cantor"}

    def __repr__(self):
        return "CantorMeasure()"


def _cantor_moment(n):
    # (-1)^n prod_k cos(2 pi n / 3^k)
    prod = 1.0
    scale = 1.0 / 3.0
    while True:
        theta = 2.0 * np.pi * n * scale
        if abs(theta) < CANTOR_ANGLE_CUTOFF:
            break
        prod *= np.cos(theta)
        scale /= 3.0
    return (-1.0) ** n * prod


class MomentSequence(MomentSource):
    """Moments given explicitly; ``values[0]`` must be 1 and ``|values| <= 1``."""

    kind = "moments"

    def __init__(self, values):
        vals = np.array(values, dtype=complex).ravel()
        if vals.size == 0 or abs(vals[0] - 1.0) > WEIGHT_TOL:
            raise RangeError("explicit moments must start with mu_hat(0) = 1")
        if np.any(np.abs(vals) > 1.0 + WEIGHT_TOL):
            raise RangeError("explicit moments must satisfy |mu_hat(n)| <= 1")
        self.values = _readonly(vals)

    def moments(self, n_max):
        if n_max >= self.values.size:
            raise DepthError(f"only {self.values.size} moments were supplied, {n_max + 1} requested")
        return self.values[: n_max + 1].copy()

    def to_dict(self):
        return {"kind": "moments", "values": [[v.real, v.imag] for v in self.values]}

    def __repr__(self):
        return f"MomentSequence(len={self.values.size})"


def make_atomic(pairs):
    """Validate ``[(position, weight), ...]`` and return an :class:`AtomicMeasure`.

    Atoms are sorted by position. Weights are never renormalized: a total mass
    off from 1 by more than 1e-9 raises :class:`WeightSumError`.
    """
    pairs = [(float(x), float(w)) for x, w in pairs]
    if not pairs:
        raise RangeError("an atomic measure needs at least one atom")
    pairs.sort()
    pos = np.array([p for p, _ in pairs])
    wts = np.array([w for _, w in pairs])
    if np.any(pos < 0.0) or np.any(pos >= 1.0) or not np.all(np.isfinite(pos)):
        raise RangeError("atom positions must lie in [0, 1)")
    if np.any(wts <= 0.0) or not np.all(np.isfinite(wts)):
        raise RangeError("atom weights must be positive")
    if np.any(np.diff(pos) == 0.0):
        raise DuplicateAtomError("atom positions must be distinct")
    if abs(wts.sum() - 1.0) > WEIGHT_TOL:
        raise WeightSumError(f"weights sum to {wts.sum()!r}, not 1")
    return AtomicMeasure(_readonly(pos), _readonly(wts))


def roots_of_unity_measure(N):
    """Uniform measure on ``{k / N}``; its inner function is ``z**N``."""
    return make_atomic([(k / N, 1.0 / N) for k in range(N)])


def measure_from_dict(d):
    """Inverse of ``to_dict`` for every moment source."""
    kind = d.get("kind")
    extra = set(d) - {"kind", "atoms", "values"}
    if extra:
        raise ValueError(f"unknown measure keys: {sorted(extra)}")
    if kind == "atomic":
        return make_atomic(d["atoms"])
    if kind == "lebesgue":
        return LebesgueMeasure()
    if kind == "cantor":
        return CantorMeasure()
    if kind == "moments":
        return MomentSequence([complex(re, im) for re, im in d["values"]])
    raise ValueError(f"unknown measure kind {kind!r}")


def fourier_moment(src, n):
    """``mu_hat(n)``; negative ``n`` uses ``mu_hat(-n) = conj(mu_hat(n))``."""
    return src.moment(int(n))


def moments(src, n_max):
    return np.asarray(src.moments(int(n_max)), dtype=complex)


def alpha_recursion(mu_hat, N):
    """Coefficients of ``1/mu_plus`` from moments by direct power-series inversion.

    ``alpha_0 = 1`` and ``alpha_n = -sum_{j<n} alpha_j mu_hat(n - j)``. Costs
    O(N**2); used for non-atomic sources and as the check on the rational route.
    """
    mu_hat = np.asarray(mu_hat, dtype=complex)
    if mu_hat.size < N + 1:
        raise DepthError("not enough moments for the requested depth")
    alpha = np.zeros(N + 1, dtype=complex)
    alpha[0] = 1.0
    for n in range(1, N + 1):
        alpha[n] = -np.dot(alpha[:n], mu_hat[n:0:-1])
    return alpha


def alpha_coefficients(src, N):
    """``alpha_0..alpha_N``: the power-series coefficients of ``1 - b = 1/mu_plus``."""
    N = int(N)
    if isinstance(src, AtomicMeasure):
        P, Q = src.rational_form()
        impulse = np.zeros(N + 1, dtype=complex)
        impulse[0] = 1.0
        alpha = lfilter(Q, P, impulse)
        alpha[0] = 1.0
        return CoefficientSeries(alpha)
    return CoefficientSeries(alpha_recursion(moments(src, N), N))


def b_coefficients(src, N):
    """Series of the inner function, ``b = -sum_{n>=1} alpha_n z**n``."""
    alpha = alpha_coefficients(src, N).coeffs
    b = -alpha.copy()
    b[0] = 0.0
    return CoefficientSeries(b)


def cauchy_series(src, N):
    """Series of ``mu_plus``: the moments themselves."""
    return CoefficientSeries(moments(src, N))


def _check_disc(z):
    z = complex(z)
    if not abs(z) < 1.0:
        raise DomainError(f"|z| must be < 1, got |z| = {abs(z)!r}")
    return z


def cauchy_transform(src, z, degree=None):
    """``mu_plus(z)``; closed form for atomic measures, truncated series otherwise."""
    z = _check_disc(z)
    if isinstance(src, AtomicMeasure):
        return complex(np.sum(src.weights / (1.0 - z * np.conj(src.nodes))))
    if degree is None:
        raise DepthError(f"{src.kind} sources need an explicit truncation degree")
    return complex(cauchy_series(src, degree)(z))


def inner_function(src, z, degree=None):
    """``b(z) = 1 - 1/mu_plus(z)``."""
    mp = cauchy_transform(src, z, degree)
    if abs(mp) < 1e-300:
        raise NumericalError("Cauchy transform vanished; b(z) undefined")
    return 1.0 - 1.0 / mp


def herglotz_residual(m, z):
    """Gap between ``Re((1+b)/(1-b))`` and the Poisson integral of ``m`` at ``z``."""
    z = _check_disc(z)
    b = inner_function(m, z)
    lhs = ((1.0 + b) / (1.0 - b)).real
    rhs = np.sum(m.weights * (1.0 - abs(z) ** 2) / np.abs(m.nodes - z) ** 2)
    return float(abs(lhs - rhs))


def normalized_cauchy_transform(m, f, z):
    """``V_mu f(z)`` for a spectral vector ``f`` (one value per atom)."""
    z = _check_disc(z)
    f = np.asarray(f, dtype=complex)
    if f.shape != (m.size,):
        raise DimensionError(f"vector has shape {f.shape}, measure has {m.size} atoms")
    kern = m.weights / (1.0 - z * np.conj(m.nodes))
    return complex(np.dot(kern, f) / np.sum(kern))


def normalized_cauchy_series(m, f, degree):
    """Taylor coefficients of ``V_mu f`` to ``degree``.

    The numerator has coefficients ``<f, phi_n>``; dividing by ``mu_plus``
    convolves them with ``alpha``. The result lies in the model space of ``b``.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != (m.size,):
        raise DimensionError(f"vector has shape {f.shape}, measure has {m.size} atoms")
    n = np.arange(degree + 1)
    fhat = np.exp(-2j * np.pi * np.outer(n, m.positions)) @ (m.weights * f)
    alpha = alpha_coefficients(m, degree).coeffs
    return CoefficientSeries(truncated_convolve(alpha, fhat, degree + 1))


def radial_evaluate(s, r, x):
    """``sum_n d_n r**n exp(2 pi i n x)`` over the stored coefficients."""
    r = float(r)
    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius must be in [0, 1), got {r!r}")
    coeffs = s.coeffs if isinstance(s, CoefficientSeries) else np.asarray(s, dtype=complex)
    return complex(CoefficientSeries(coeffs)(r * np.exp(2j * np.pi * x)))
