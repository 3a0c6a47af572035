"""Truncated complex power series.

A :class:`CoefficientSeries` stores ``d_0, ..., d_D`` and stands for
``d_0 + d_1 z + ... + d_D z**D``. Products are truncated to the shorter
operand, so a product never claims more accuracy than its inputs.
"""

import numpy as np
from scipy.signal import fftconvolve

from .errors import DepthError

# above this many multiply-adds, switch from direct to FFT convolution
_DIRECT_LIMIT = 4_000_000


def truncated_convolve(a, b, length):
    """First ``length`` coefficients of the Cauchy product of ``a`` and ``b``."""
    a = np.asarray(a, dtype=complex)[:length]
    b = np.asarray(b, dtype=complex)[:length]
    if a.size == 0 or b.size == 0:
        return np.zeros(length, dtype=complex)
    if a.size * b.size <= _DIRECT_LIMIT:
        out = np.convolve(a, b)
    else:
        out = fftconvolve(a, b)
    res = np.zeros(length, dtype=complex)
    n = min(length, out.size)
    res[:n] = out[:n]
    return res


class CoefficientSeries:
    """Finite list of power-series coefficients, index = power of z."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs):
        arr = np.array(coeffs, dtype=complex).ravel()
        if arr.size == 0:
            raise ValueError("a series needs at least one coefficient")
        arr.setflags(write=False)
        self._coeffs = arr

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def degree(self):
        return self._coeffs.size - 1

    def __len__(self):
        return self._coeffs.size

    def __getitem__(self, item):
        return self._coeffs[item]

    def __iter__(self):
        return iter(self._coeffs)

    def __repr__(self):
        return f"CoefficientSeries(degree={self.degree}, coeffs={self._coeffs[:6]!r}{'...' if self.degree > 5 else ''})"

    def __call__(self, z):
        """Evaluate the truncated sum at ``z`` (scalar or array)."""
        z = np.asarray(z, dtype=complex)
        if self._coeffs.size <= 64:
            out = np.zeros_like(z)
            for c in self._coeffs[::-1]:
                out = out * z + c
        else:
            n = np.arange(self._coeffs.size)
            out = np.array([np.dot(self._coeffs, zz**n) for zz in z.ravel()]).reshape(z.shape)
        return out[()] if out.ndim == 0 else out

    def truncate(self, degree):
        if degree > self.degree:
            raise DepthError(f"series of degree {self.degree} cannot be read to degree {degree}")
        return CoefficientSeries(self._coeffs[: degree + 1])

    def padded(self, degree):
        """Coefficients up to ``degree``, zero-filled past the stored ones."""
        out = np.zeros(degree + 1, dtype=complex)
        n = min(degree + 1, self._coeffs.size)
        out[:n] = self._coeffs[:n]
        return out

    def _coerce(self, other):
        if isinstance(other, CoefficientSeries):
            return other
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            c = self._coeffs.copy()
            c[0] += other
            return CoefficientSeries(c)
        n = min(len(self), len(o))
        return CoefficientSeries(self._coeffs[:n] + o._coeffs[:n])

    __radd__ = __add__

    def __neg__(self):
        return CoefficientSeries(-self._coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return CoefficientSeries(self._coeffs * other)
        n = min(len(self), len(o))
        return CoefficientSeries(truncated_convolve(self._coeffs, o._coeffs, n))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0 or int(k) != k:
            raise ValueError("only nonnegative integer powers are supported")
        out = CoefficientSeries(np.eye(1, len(self), dtype=complex)[0])
        for _ in range(int(k)):
            out = out * self
        return out

    def norm(self):
        """Coefficient-space (H^2) norm of the stored terms."""
        return float(np.linalg.norm(self._coeffs))

    def allclose(self, other, atol=1e-12):
        o = other if isinstance(other, CoefficientSeries) else CoefficientSeries(other)
        n = max(len(self), len(o))
        return bool(np.allclose(self.padded(n - 1), o.padded(n - 1), rtol=0, atol=atol))
