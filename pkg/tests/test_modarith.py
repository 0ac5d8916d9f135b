import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chirpradar.modarith import (
    ALL,
    Modulus,
    PlaneLine,
    PlanePoint,
    ShiftedLine,
    intersect,
    inv2,
    is_prime,
    line_points,
    random_distinct_lines,
    symplectic,
)
from conftest import line_ref


def trial_division(n):
    return n >= 2 and all(n % k for k in range(2, int(n**0.5) + 1))


def test_is_prime_matches_trial_division():
    assert [n for n in range(3000) if is_prime(n)] == [n for n in range(3000) if trial_division(n)]


@pytest.mark.parametrize("n", [2**31 - 1, 1_000_000_007, 2_147_483_629])
def test_is_prime_large_primes(n):
    assert is_prime(n)


@pytest.mark.parametrize("n", [561, 1105, 3215031751, 2**31 - 3])
def test_is_prime_rejects_composites_and_carmichaels(n):
    assert not is_prime(n)


@pytest.mark.parametrize("N", [0, 1, 2, 4, 9, 15, -7, 221])
def test_modulus_rejects_non_odd_primes(N):
    with pytest.raises(ValueError, match="odd prime"):
        Modulus(N)


@pytest.mark.parametrize("N, expected", [(5, 3), (199, 100), (7, 4)])
def test_inv2(N, expected):
    m = Modulus(N)
    assert inv2(m) == m.inv2 == expected
    assert 2 * expected % N == 1


def test_line_points_examples():
    m = Modulus(5)
    assert line_points(ShiftedLine(PlaneLine(m, 0))) == [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]
    assert set(line_points(ShiftedLine(PlaneLine(m, None), (2, 0)))) == {
        (2, 0), (2, 1), (2, 2), (2, 3), (2, 4)}
    assert set(line_points(ShiftedLine(PlaneLine(m, 2), (0, 1)))) == {
        (0, 1), (1, 3), (2, 0), (3, 2), (4, 4)}


def test_line_param_roundtrip_and_off_line_error():
    m = Modulus(7)
    for L in m.lines():
        for t in range(7):
            assert L.param(L.point(t)) == t
        off = next(p for p in itertools.product(range(7), repeat=2) if not L.contains(p))
        with pytest.raises(ValueError):
            L.param(off)


def test_intersect_examples():
    m = Modulus(5)
    L0, Linf, L1, L3 = PlaneLine(m, 0), PlaneLine(m, None), PlaneLine(m, 1), PlaneLine(m, 3)
    assert intersect(ShiftedLine(L0), ShiftedLine(Linf)) == (0, 0)
    assert intersect(ShiftedLine(L1), ShiftedLine(L1, (0, 1))) is None
    assert intersect(ShiftedLine(L1, (0, 1)), ShiftedLine(L3)) == (3, 4)
    assert intersect(ShiftedLine(L1, (2, 2)), ShiftedLine(L1, (0, 0))) == ALL


@pytest.mark.parametrize("N", [5, 7, 11])
def test_intersect_matches_set_oracle(N):
    m = Modulus(N)
    rng = np.random.default_rng(N)
    lines = m.lines()
    for A, B in itertools.product(lines, repeat=2):
        sa = tuple(int(x) for x in rng.integers(N, size=2))
        sb = tuple(int(x) for x in rng.integers(N, size=2))
        X, Y = ShiftedLine(A, sa), ShiftedLine(B, sb)
        common = line_ref(N, A.slope, sa) & line_ref(N, B.slope, sb)
        got = intersect(X, Y)
        if len(common) == N:
            assert got == ALL
        elif not common:
            assert got is None
        else:
            assert common == {tuple(got)}


def test_distinct_origin_lines_meet_only_at_origin_and_partition_plane():
    for N in (5, 7, 13):
        m = Modulus(N)
        sets = [set(line_points(L)) for L in m.lines()]
        assert len(sets) == N + 1 and all(len(s) == N for s in sets)
        for s, t in itertools.combinations(sets, 2):
            assert s & t == {(0, 0)}
        punctured = [s - {(0, 0)} for s in sets]
        union = set().union(*punctured)
        assert len(union) == N * N - 1 == sum(len(s) for s in punctured)


def test_shifted_line_canonical_equality_exhaustive():
    N = 5
    m = Modulus(N)
    pts = list(itertools.product(range(N), repeat=2))
    for L in m.lines():
        for v, w in itertools.product(pts, repeat=2):
            same_set = line_ref(N, L.slope, v) == line_ref(N, L.slope, w)
            assert (ShiftedLine(L, v) == ShiftedLine(L, w)) == same_set
            assert same_set == L.contains(m.sub(v, w))


def test_shifted_line_usable_as_dict_key():
    m = Modulus(7)
    L = PlaneLine(m, 3)
    d = {ShiftedLine(L, (1, 2)): "x"}
    assert d[ShiftedLine(L, (2, 5))] == "x"


def test_symplectic_examples():
    assert symplectic(Modulus(5), (1, 0), (0, 1)) == 1
    assert symplectic(Modulus(5), (2, 3), (2, 3)) == 0
    assert symplectic(Modulus(7), (3, 5), (2, 6)) == 1


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([5, 7, 13, 199]), st.tuples(*[st.integers(-1000, 1000)] * 4))
def test_symplectic_antisymmetric(N, c):
    m = Modulus(N)
    u, v = c[:2], c[2:]
    assert symplectic(m, u, v) == (-symplectic(m, v, u)) % N
    assert symplectic(m, u, u) == 0
    assert 0 <= symplectic(m, u, v) < N


def test_plane_point_reduction():
    m = Modulus(7)
    assert m.point(-1, 15) == PlanePoint(6, 1)
    assert m.add((5, 6), (4, 3)) == (2, 2)
    assert m.neg((0, 3)) == (0, 4)


def test_random_distinct_lines_contracts():
    m = Modulus(5)
    rng = np.random.default_rng(0)
    for _ in range(50):
        ls = random_distinct_lines(m, 3, rng)
        assert len(set(ls)) == 3
    assert len(set(random_distinct_lines(m, 6, rng))) == 6
    with pytest.raises(ValueError):
        random_distinct_lines(m, 7, rng)


def test_random_line_uniform_chi_square():
    m = Modulus(5)
    rng = np.random.default_rng(1)
    idx = {L: k for k, L in enumerate(m.lines())}
    counts = np.zeros(6)
    n = 6000
    for _ in range(n):
        counts[idx[random_distinct_lines(m, 1, rng)[0]]] += 1
    chi2 = float(np.sum((counts - n / 6) ** 2 / (n / 6)))
    assert chi2 < 20.52  # 0.999 quantile, 5 degrees of freedom


def test_line_names():
    m = Modulus(5)
    assert str(PlaneLine(m, 2)) == "L_2"
    assert str(PlaneLine(m, None)) == "L_inf"
