import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _measures import ATOMIC, DIRAC, THREE, TWO, random_complex, random_vector, truncation_systems, unit
from kaczlab.errors import DimensionError, RankWarning
from kaczlab.hilbert import frame_bounds, inner, norm, phi_vector
from kaczlab.relaxation import relaxed_limit
from kaczlab.truncation import (analysis, classical_bound, cycle_csv, cycle_operator, cycle_operator_norm,
                                default_cycles, frame_bound_check, limsup_estimate, moore_penrose_lss, periodize,
                                project, system_from_vectors, truncated_noisy_run)


SYSTEMS = truncation_systems()
IDS = [k for k, _ in SYSTEMS]


def dense_cycle(sys):
    """``T`` on the whole space, built from the rank-one projections directly."""
    m = sys.measure
    T = np.eye(m.size, dtype=complex)
    for j in range(1, sys.period + 1):
        phi = sys.vector(j)
        P = np.outer(phi, np.conj(phi) * m.weights)     # u -> <u, phi> phi
        T = (np.eye(m.size) - P) @ T
    return T


# -- periodize -----------------------------------------------------------------------

def test_periodize_examples():
    s = periodize(TWO, 2)
    assert np.allclose(s.vectors, [phi_vector(TWO, 1), phi_vector(TWO, 2)])
    s = periodize(THREE, 3)
    assert abs(np.linalg.det(s.vectors)) > 1e-3
    assert s.span().shape[1] == 3
    s = periodize(DIRAC, 5)
    assert s.period == 5 and np.allclose(s.vectors, 1)


def test_periodic_accessor_wraps():
    s = periodize(ATOMIC["generic4"], 3)
    for n in range(1, 20):
        assert np.array_equal(s.vector(n), s.vector(n + 3))
    assert np.array_equal(s.vector(3), s.vectors[2])
    with pytest.raises(ValueError):
        periodize(TWO, 0)


def test_system_requires_unit_vectors():
    with pytest.raises(DimensionError):
        system_from_vectors(TWO, [[1.0, 0.0]])
    with pytest.raises(DimensionError):
        system_from_vectors(TWO, [])


# -- cycle operator ---------------------------------------------------------------------

def test_cycle_norm_examples():
    assert cycle_operator_norm(periodize(TWO, 2)) == pytest.approx(0, abs=1e-14)
    assert cycle_operator_norm(periodize(ATOMIC["roots4"], 4)) == pytest.approx(0, abs=1e-14)
    v = phi_vector(THREE, 1)
    assert cycle_operator_norm(system_from_vectors(THREE, [v, v, v])) == pytest.approx(0, abs=1e-14)
    t = cycle_operator_norm(periodize(THREE, 3))
    assert 0 < t < 1


@pytest.mark.parametrize("key,sys", SYSTEMS, ids=IDS)
def test_cycle_norm_below_one_and_matches_dense(key, sys):
    t = cycle_operator_norm(sys)
    assert 0 <= t < 1
    # on the span the restricted matrix and the full operator agree
    U = sys.span()
    Ts = np.sqrt(sys.measure.weights)[:, None] * dense_cycle(sys) / np.sqrt(sys.measure.weights)[None, :]
    assert np.allclose(U @ cycle_operator(sys), Ts @ U, atol=1e-12)


# -- classical Kaczmarz on the periodic system ---------------------------------------------

@pytest.mark.parametrize("key,sys", SYSTEMS, ids=IDS)
def test_clean_data_decays_geometrically(key, sys):
    m = sys.measure
    x = random_vector(np.random.default_rng(1), m)
    rep = truncated_noisy_run(sys, x, np.zeros(sys.period), cycles=30)
    t = cycle_operator_norm(sys)
    start = norm(m, project(sys, x))
    for k, e in enumerate(rep.error_norms):
        assert e <= t ** (k + 1) * start + 1e-12


def test_cycle_map_matches_stepwise_kaczmarz():
    sys = periodize(ATOMIC["gen6"], 4)
    m = sys.measure
    rng = np.random.default_rng(2)
    x = random_vector(rng, m)
    eps = random_complex(rng, 4)
    c = analysis(sys, x) + eps
    y = np.zeros(m.size, dtype=complex)
    errs = []
    for _ in range(7):
        for j in range(1, 5):
            phi = sys.vector(j)
            y = y + (c[j - 1] - inner(m, y, phi)) * phi
        errs.append(norm(m, project(sys, x) - y))
    rep = truncated_noisy_run(sys, x, eps, cycles=7)
    assert np.allclose(rep.error_norms, errs, atol=1e-13)
    assert np.allclose(rep.final, y, atol=1e-13)


def test_orthonormal_limsup_is_noise_norm():
    sys = periodize(TWO, 2)
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = random_vector(rng, TWO)
        eps = random_complex(rng, 2)
        rep = truncated_noisy_run(sys, x, eps, cycles=5)
        assert rep.bound_values["limsup"] == pytest.approx(np.linalg.norm(eps), abs=1e-12)
        assert np.allclose(rep.error_norms, np.linalg.norm(eps), atol=1e-12)


def test_dirac_single_equation():
    sys = periodize(DIRAC, 1)
    rep = truncated_noisy_run(sys, [0.4 + 1j], [0.3 - 0.4j], cycles=4)
    assert np.allclose(rep.error_norms, 0.5)


def test_classical_bound_examples():
    assert classical_bound(periodize(THREE, 3), np.zeros(3)) == 0
    sys = periodize(TWO, 2)
    rng = np.random.default_rng(4)
    for _ in range(10):
        eps = random_complex(rng, 2)
        b = classical_bound(sys, eps)
        assert np.linalg.norm(eps) - 1e-12 <= b <= np.sum(np.abs(eps)) + 1e-12
    sys = periodize(THREE, 3)
    eps = np.full(3, 0.1)
    rep = truncated_noisy_run(sys, random_vector(rng, THREE), eps)
    assert np.isfinite(rep.bound_values["classical"])
    assert rep.bound_values["limsup"] <= rep.bound_values["classical"]
    with pytest.raises(DimensionError):
        classical_bound(sys, np.zeros(2))


def test_limsup_and_default_cycles():
    assert limsup_estimate([5, 4, 3, 2, 1]) == 1
    assert limsup_estimate(np.r_[np.ones(8), [3, 2]]) == 3
    assert default_cycles(periodize(TWO, 2)) == 100
    sys = periodize(ATOMIC["gen8"], 8)
    assert default_cycles(sys) >= 20 / (1 - cycle_operator_norm(sys))


@pytest.mark.parametrize("key,sys", SYSTEMS, ids=IDS)
def test_classical_bound_holds(key, sys):
    m = sys.measure
    rng = np.random.default_rng(5)
    x = random_vector(rng, m)
    for _ in range(50):
        eps = random_complex(rng, sys.period)
        rep = truncated_noisy_run(sys, x, eps)
        assert rep.bound_values["limsup"] <= rep.bound_values["classical"] + 1e-8


# -- least squares and the frame bound -------------------------------------------------------

def test_moore_penrose_examples():
    rng = np.random.default_rng(6)
    sys = periodize(ATOMIC["generic4"], 3)
    x = random_vector(rng, sys.measure)
    with pytest.warns(RankWarning):
        z = moore_penrose_lss(sys, analysis(sys, x))
    assert norm(sys.measure, z - project(sys, x)) < 1e-10
    sys = periodize(TWO, 2)
    c = random_complex(rng, 2)
    assert np.allclose(moore_penrose_lss(sys, c), c @ sys.vectors)
    v = phi_vector(THREE, 1)
    sys = system_from_vectors(THREE, [v, v])
    with pytest.warns(RankWarning):
        z = moore_penrose_lss(sys, [0, 2])
    assert inner(THREE, z, v) == pytest.approx(1)


def test_moore_penrose_is_least_squares():
    # compare with a generic solver on the normal equations over the span
    sys = periodize(ATOMIC["gen6"], 9)
    m = sys.measure
    c = random_complex(np.random.default_rng(7), 9)
    A = np.conj(sys.vectors) * m.weights          # <z, phi_n> = (A z)_n
    ref = np.linalg.lstsq(A, c, rcond=None)[0]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        z = moore_penrose_lss(sys, c)
    assert norm(m, z - ref) < 1e-10


def test_full_rank_system_does_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        moore_penrose_lss(periodize(THREE, 4), np.ones(4))


def test_frame_check_examples():
    rng = np.random.default_rng(8)
    sys = periodize(THREE, 3)
    x = random_vector(rng, THREE)
    lhs, rhs = frame_bound_check(sys, x, np.zeros(3))
    assert lhs < 1e-20 and rhs == 0
    sys = periodize(TWO, 2)
    eps = random_complex(rng, 2)
    lhs, rhs = frame_bound_check(sys, random_vector(rng, TWO), eps)
    assert frame_bounds(TWO, sys.vectors)[0] == pytest.approx(1)
    assert lhs == pytest.approx(np.sum(np.abs(eps) ** 2)) and rhs == pytest.approx(lhs)
    sys = periodize(THREE, 3)
    lhs, rhs = frame_bound_check(sys, x, random_complex(rng, 3))
    assert lhs < rhs


@pytest.mark.parametrize("key,sys", SYSTEMS, ids=IDS)
def test_frame_bound_holds(key, sys):
    rng = np.random.default_rng(9)
    x = random_vector(rng, sys.measure)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankWarning)
        for _ in range(50):
            lhs, rhs = frame_bound_check(sys, x, random_complex(rng, sys.period), check=False)
            assert lhs <= rhs + 1e-8


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["three", "generic4", "gen6", "gen8"]), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_relaxed_limit_is_moore_penrose(name, N, seed):
    m = ATOMIC[name]
    sys = periodize(m, N)
    c = random_complex(np.random.default_rng(seed), N)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankWarning)
        z = moore_penrose_lss(sys, c)
    assert norm(m, relaxed_limit(m, sys.vectors, c) - z) < 1e-6


# -- accuracy against noise ---------------------------------------------------------------

def test_tradeoff_columns():
    m = ATOMIC["gen8"]
    rng = np.random.default_rng(10)
    x = unit(m, random_vector(rng, m))
    gaps = []
    for N in range(1, 9):
        sys = periodize(m, N)
        eps = 0.01 * random_complex(rng, N)
        rep = truncated_noisy_run(sys, x, eps, cycles=200)
        gap, rhs = rep.bound_values["projection_gap"], rep.bound_values["frame_rhs"]
        gaps.append(gap)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RankWarning)
            z = moore_penrose_lss(sys, analysis(sys, x) + eps)
        assert norm(m, x - z) <= gap + np.sqrt(rhs) + 1e-12
        assert np.allclose(rep.columns["projection_gap"], gap)
    assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-12 and gaps[0] > 0.1


def test_cycle_csv_header():
    sys = periodize(THREE, 3)
    rep = truncated_noisy_run(sys, np.ones(3), [0.1, 0.0, -0.1], cycles=3)
    lines = cycle_csv(rep).splitlines()
    assert lines[0].split(",")[:4] == ["cycle", "error_vs_projection", "classical_bound", "frame_rhs"]
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "2", "3"]
