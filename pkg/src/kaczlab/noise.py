"""Noise sequences and the function-theoretic diagnostics used to classify them.

A noise sequence ``eps_n`` is identified with ``eps(z) = sum eps_n z**n``.
Profiles cover the hypothesis classes that matter for the Kaczmarz error
term: bounded analytic noise (geometric, polynomial), multiples of the inner
function, Wold-synthesized noise ``mu_plus * sum_j b**j f_j``, square-summable
random noise, and the adversarial choice ``eps_n = mu_hat(n)``.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DepthError, DomainError, RankError
from .series import CoefficientSeries, truncated_convolve
from .spectral import b_coefficients, cauchy_transform, inner_function, moments

KINDS = ("geometric", "harmonic", "random_l2", "polynomial", "model_space_multiple",
         "wold_synth", "moment_adversary", "explicit")
_NEEDS_SOURCE = {"model_space_multiple", "wold_synth", "moment_adversary"}
# successive growth over the last three radii that marks a profile as unbounded
UNBOUNDED_GROWTH = 10.0


def _as_coeffs(v):
    if isinstance(v, CoefficientSeries):
        return v.coeffs
    return np.array(v, dtype=complex).ravel()


@dataclass(frozen=True, eq=False)
class NoiseProfile:
    """One noise sequence; use the named constructors rather than ``__init__``."""

    kind: str
    params: dict = field(default_factory=dict)
    source: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind in _NEEDS_SOURCE and self.source is None:
            raise ValueError(f"{self.kind} noise must be bound to a moment source")

    @classmethod
    def geometric(cls, c, rho):
        if not 0.0 < rho < 1.0:
            raise DomainError("rho must lie in (0, 1)")
        return cls("geometric", {"c": complex(c), "rho": float(rho)})

    @classmethod
    def harmonic(cls):
        return cls("harmonic")

    @classmethod
    def random_l2(cls, seed, s=1.0):
        if not s > 0.5:
            raise DomainError("decay exponent must exceed 1/2 for square summability")
        return cls("random_l2", {"seed": int(seed), "s": float(s)})

    @classmethod
    def polynomial(cls, coeffs):
        return cls("polynomial", {"coeffs": _as_coeffs(coeffs)})

    @classmethod
    def explicit(cls, coeffs):
        return cls("explicit", {"coeffs": _as_coeffs(coeffs)})

    @classmethod
    def model_space_multiple(cls, h, source):
        """``eps = b * h``."""
        return cls("model_space_multiple", {"h": _as_coeffs(h)}, source)

    @classmethod
    def wold_synth(cls, fs, source):
        """``eps = mu_plus * sum_j b**j f_j`` so that ``(1 - b) eps = sum_j b**j f_j``."""
        return cls("wold_synth", {"fs": [_as_coeffs(f) for f in fs]}, source)

    @classmethod
    def moment_adversary(cls, source):
        return cls("moment_adversary", {}, source)

    @property
    def K(self):
        return len(self.params["fs"]) if self.kind == "wold_synth" else None

    def coefficients(self, depth):
        return noise_coefficients(self, depth).coeffs

    def to_dict(self):
        d = {"kind": self.kind}
        for k, v in self.params.items():
            if k == "c":
                d[k] = [v.real, v.imag]
            elif k in ("coeffs", "h"):
                d[k] = [[z.real, z.imag] for z in v]
            elif k == "fs":
                d[k] = [[[z.real, z.imag] for z in f] for f in v]
            else:
                d[k] = v
        return d


def _complex(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def _clist(v):
    return np.array([_complex(z) for z in v], dtype=complex)


def read_coefficient_csv(path):
    """Read ``index,re,im`` rows into a coefficient array (missing indices are 0)."""
    rows = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "index":
                continue
            rows[int(row[0])] = complex(float(row[1]), float(row[2]))
    if not rows:
        raise ValueError(f"{path}: no coefficients")
    out = np.zeros(max(rows) + 1, dtype=complex)
    for i, v in rows.items():
        out[i] = v
    return out


_ALLOWED_KEYS = {
    "geometric": {"c", "rho"},
    "harmonic": set(),
    "random_l2": {"seed", "s"},
    "polynomial": {"coeffs"},
    "explicit": {"coeffs", "file"},
    "model_space_multiple": {"h"},
    "wold_synth": {"fs"},
    "moment_adversary": set(),
}


def profile_from_dict(d, source=None):
    kind = d.get("kind")
    if kind not in _ALLOWED_KEYS:
        raise ValueError(f"unknown noise kind {kind!r}")
    extra = set(d) - {"kind"} - _ALLOWED_KEYS[kind]
    if extra:
        raise ValueError(f"unknown keys for {kind} noise: {sorted(extra)}")
    if kind == "geometric":
        return NoiseProfile.geometric(_complex(d.get("c", 1.0)), float(d["rho"]))
    if kind == "harmonic":
        return NoiseProfile.harmonic()
    if kind == "random_l2":
        return NoiseProfile.random_l2(d["seed"], d.get("s", 1.0))
    if kind == "polynomial":
        return NoiseProfile.polynomial(_clist(d["coeffs"]))
    if kind == "explicit":
        if "file" in d:
            return NoiseProfile.explicit(read_coefficient_csv(d["file"]))
        return NoiseProfile.explicit(_clist(d["coeffs"]))
    if kind == "model_space_multiple":
        return NoiseProfile.model_space_multiple(_clist(d["h"]), source)
    if kind == "wold_synth":
        return NoiseProfile.wold_synth([_clist(f) for f in d["fs"]], source)
    return NoiseProfile.moment_adversary(source)


def _pad(a, depth):
    out = np.zeros(depth + 1, dtype=complex)
    k = min(depth + 1, a.size)
    out[:k] = a[:k]
    return out


def wold_synthesize(fs, b, degree):
    """``sum_j b**j f_j`` truncated at ``degree``."""
    bb = _pad(_as_coeffs(b), degree)
    total = np.zeros(degree + 1, dtype=complex)
    power = _pad(np.array([1.0 + 0j]), degree)
    for f in fs:
        total += truncated_convolve(power, _pad(_as_coeffs(f), degree), degree + 1)
        power = truncated_convolve(power, bb, degree + 1)
    return CoefficientSeries(total)


def noise_coefficients(p, depth):
    """``eps_0..eps_depth`` for the profile ``p``."""
    depth = int(depth)
    if depth < 0:
        raise DepthError("depth must be >= 0")
    n = np.arange(depth + 1)
    kind, prm = p.kind, p.params
    if kind == "geometric":
        eps = prm["c"] * prm["rho"] ** n
    elif kind == "harmonic":
        eps = 1.0 / (n + 1.0)
    elif kind == "random_l2":
        rng = np.random.default_rng(prm["seed"])
        xi = rng.standard_normal((depth + 1, 2)) @ np.array([1.0, 1j]) / math.sqrt(2.0)
        eps = xi * (n + 1.0) ** (-prm["s"])
    elif kind in ("polynomial", "explicit"):
        eps = _pad(prm["coeffs"], depth)
    elif kind == "model_space_multiple":
        eps = truncated_convolve(b_coefficients(p.source, depth).coeffs, _pad(prm["h"], depth), depth + 1)
    elif kind == "wold_synth":
        s = wold_synthesize(prm["fs"], b_coefficients(p.source, depth), depth).coeffs
        eps = truncated_convolve(moments(p.source, depth), s, depth + 1)
    else:
        eps = moments(p.source, depth)
    return CoefficientSeries(np.asarray(eps, dtype=complex))


def eval_noise(p, z, degree=None):
    """``eps(z)`` for ``|z| < 1``.

    Closed forms are used wherever they exist; ``random_l2`` (and non-atomic
    sources) need an explicit truncation ``degree``.
    """
    z = complex(z)
    if not abs(z) < 1.0:
        raise DomainError(f"|z| must be < 1, got {abs(z)!r}")
    kind, prm = p.kind, p.params
    if kind == "geometric":
        return prm["c"] / (1.0 - prm["rho"] * z)
    if kind == "harmonic":
        return 1.0 + 0j if z == 0 else -np.log(1.0 - z) / z
    if kind in ("polynomial", "explicit"):
        return complex(CoefficientSeries(prm["coeffs"])(z))
    if kind == "model_space_multiple":
        return inner_function(p.source, z, degree) * complex(CoefficientSeries(prm["h"])(z))
    if kind == "moment_adversary":
        return cauchy_transform(p.source, z, degree)
    if kind == "wold_synth":
        b = inner_function(p.source, z, degree)
        total = sum(b**j * complex(CoefficientSeries(f)(z)) for j, f in enumerate(prm["fs"]))
        return cauchy_transform(p.source, z, degree) * total
    if degree is None:
        raise DepthError("random_l2 noise needs an explicit truncation degree")
    return complex(noise_coefficients(p, degree)(z))


def _growth_flag(series):
    """Last three values strictly increasing with overall growth above 10x."""
    a, b, c = series[-3:]
    return bool(a < b < c and c > UNBOUNDED_GROWTH * a)


@dataclass
class MaximalEstimate:
    values: np.ndarray
    r_grid: list
    unbounded: list

    @property
    def any_unbounded(self):
        return any(self.unbounded)


def radial_table(p, m, r_grid, degree=None):
    """Sorted radii and ``|eps(r zeta_k)|`` with one row per radius, one column per atom."""
    r_grid = [float(r) for r in r_grid]
    if any(not 0.0 <= r < 1.0 for r in r_grid):
        raise DomainError("radii must lie in [0, 1)")
    if len(r_grid) < 3 or max(r_grid) < 0.999:
        raise DomainError("r_grid needs at least three radii reaching 0.999")
    r_grid = sorted(r_grid)
    table = np.array([[abs(eval_noise(p, r * zeta, degree)) for zeta in m.nodes] for r in r_grid])
    return r_grid, table


def maximal_function(p, m, r_grid, degree=None):
    """Grid estimate of ``sup_r |eps(r exp(2 pi i x_k))|`` at each atom (``r = 0`` included).

    An atom is flagged unbounded when the values at the last three radii grow
    successively by more than 10x overall. This is a heuristic diagnostic,
    never a certificate.
    """
    r_grid, table = radial_table(p, m, r_grid, degree)
    flags = [_growth_flag(table[:, k]) for k in range(m.size)]
    # r = 0 belongs to every radial supremum
    values = np.maximum(table.max(axis=0), abs(eval_noise(p, 0.0, degree)))
    return MaximalEstimate(values, r_grid, flags)


def hoelder_check(p, m, q, r_grid, degree=None):
    """``max_r sum_k w_k |eps(r zeta_k)|**(2q)``; ``inf`` when the growth flag trips."""
    if not q > 1.0:
        raise DomainError("q must exceed 1")
    r_grid, table = radial_table(p, m, r_grid, degree)
    integrals = (table ** (2.0 * q)) @ m.weights
    if _growth_flag(integrals):
        return math.inf
    return float(integrals.max())


def l2_norm(p, depth):
    """``(sum_{n<=depth} |eps_n|**2)**(1/2)``, with the exact tail added for geometric noise."""
    eps = noise_coefficients(p, depth).coeffs
    sq = float(np.sum(np.abs(eps) ** 2))
    if p.kind == "geometric":
        rho2 = p.params["rho"] ** 2
        sq += abs(p.params["c"]) ** 2 * rho2 ** (depth + 1) / (1.0 - rho2)
    return math.sqrt(sq)


def model_space_basis(b, degree, dim=None, rtol=1e-10, max_dim=64):
    """Orthonormal coefficient basis of ``H^2 (-) b H^2`` truncated at ``degree``.

    Columns ``S*^k b`` (``k >= 1``, backward shifts of ``b``) span the model
    space when ``b(0) = 0``; they form a Hankel matrix whose numerical rank is
    the degree of a rational ``b``. ``b`` must carry at least
    ``degree + dim + 1`` terms unless it is a polynomial (missing terms are 0).
    Returns an array of shape ``(degree + 1, dim)``.
    """
    bc = _as_coeffs(b)
    if abs(bc[0]) > 1e-12:
        raise DomainError("model space basis needs b(0) = 0")
    J = int(dim) if dim is not None else min(max_dim, degree)
    padded = _pad(bc, degree + J + 1)
    H = np.array([padded[k: k + degree + 1] for k in range(1, J + 1)]).T
    U, s, _ = np.linalg.svd(H, full_matrices=False)
    if s[0] == 0.0:
        raise RankError("b is identically zero")
    rank = int(dim) if dim is not None else int(np.sum(s > rtol * s[0]))
    if s[rank - 1] <= rtol * s[0]:
        raise RankError(f"model space of dimension {rank} is degenerate at degree {degree}")
    return U[:, :rank]


def wold_decompose(s, b, K, degree, dim=None):
    """Least-squares ``s ~ sum_{j<K} b**j f_j`` with each ``f_j`` in the model space of ``b``.

    Returns ``(fs, residual)`` where ``residual`` is the coefficient-space
    distance from ``s`` (truncated at ``degree``) to the fitted sum.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    bc = _as_coeffs(b)
    E = model_space_basis(bc, degree, dim)
    bb = _pad(bc, degree)
    blocks = []
    power = _pad(np.array([1.0 + 0j]), degree)
    for _ in range(K):
        blocks.append(np.array([truncated_convolve(power, E[:, i], degree + 1) for i in range(E.shape[1])]).T)
        power = truncated_convolve(power, bb, degree + 1)
    A = np.hstack(blocks)
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise RankError("truncated Wold system is degenerate; raise the degree")
    target = _pad(_as_coeffs(s), degree)
    coef, *_ = np.linalg.lstsq(A, target, rcond=None)
    d = E.shape[1]
    fs = [CoefficientSeries(E @ coef[j * d:(j + 1) * d]) for j in range(K)]
    residual = float(np.linalg.norm(target - A @ coef))
    return fs, residual
