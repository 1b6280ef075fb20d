from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyprohorov.levy import levy_distance
from levyprohorov.measures import (
    LINE,
    MeasureError,
    PointSet,
    SpaceMismatchError,
    cdf_of,
    eps_neighborhood,
    make_discrete_measure,
    measure_of,
    point_mass,
    uniform_cdf,
)
from levyprohorov.prohorov import (
    EnumerationCapError,
    prohorov_bruteforce,
    prohorov_feasible,
    prohorov_onesided,
)
from oracles import mixed_feasible, prohorov_naive
from strategies import cdfs, finite_measures, finite_spaces, line_measures

F = uniform_cdf()
NU = make_discrete_measure(LINE, [0, "1/4"], ["2/3", "1/3"])
TWO = make_discrete_measure(LINE, [-1, 1], ["1/2", "1/2"])
Q4 = make_discrete_measure(LINE, ["1/8", "3/8", "5/8", "7/8"], ["1/4"] * 4)


def _violates(big, small, A, eps):
    return measure_of(big, A) > measure_of(small, eps_neighborhood(A, eps)) + eps


def test_worked_pair_feasible_at_value():
    assert prohorov_feasible(F, NU, Q(3, 8)).feasible
    check = prohorov_feasible(F, NU, Q(3, 8) - Q(1, 100))
    assert not check.feasible


def test_worked_pair_value_and_certificate():
    r = prohorov_bruteforce(F, NU)
    assert r.value == Q(3, 8) and r.attained
    assert r.witness_set.points == (0, Q(1, 4)) and r.side == "nu"
    assert _violates(NU, F, r.witness_set, r.probe_below)


def test_worked_pair_hand_analysis():
    # the three subsets of the atoms: C1 = {0}, C2 = {1/4}, C3 = {0, 1/4}
    for eps in (Q(1, 8), Q(1, 4), Q(3, 8)):
        C3 = eps_neighborhood(PointSet(LINE, (0, Q(1, 4))), eps)
        assert measure_of(F, C3) + eps == Q(1, 4) + 2 * eps
    C1 = eps_neighborhood(PointSet(LINE, (0,)), Q(3, 8))
    assert measure_of(NU, PointSet(LINE, (0,))) <= measure_of(F, C1) + Q(3, 8)


def test_worked_pair_onesided():
    assert prohorov_onesided(NU, F).value == Q(3, 8)


def test_worked_pair_grid_oracle():
    grid = [Q(k, 8) for k in range(-2, 11)]
    assert mixed_feasible(F, NU, Q(3, 8), grid)
    assert not mixed_feasible(F, NU, Q(3, 8) - Q(1, 10**4), grid)


def test_identical_measures():
    assert prohorov_bruteforce(NU, NU).value == 0
    assert prohorov_onesided(NU, NU).value == 0
    for eps in (Q(1, 100), Q(1, 2), 1):
        assert prohorov_feasible(NU, NU, eps).feasible


def test_curated_pair():
    mu = point_mass(0)
    check = prohorov_feasible(mu, TWO, Q(1, 2))
    assert not check.feasible and check.witness_set.points == (0,)
    r = prohorov_bruteforce(mu, TWO)
    assert r.value == 1 and r.witness_set.points == (0,)
    assert prohorov_naive(mu, TWO) == 1


def test_point_masses_half_apart():
    a, b = point_mass(0), point_mass(Q(1, 2))
    r = prohorov_bruteforce(a, b)
    assert r.value == Q(1, 2) and not r.attained
    assert prohorov_onesided(a, b).value == prohorov_onesided(b, a).value == Q(1, 2)


def test_quantized_uniform():
    assert prohorov_bruteforce(Q4, NU).value == Q(3, 8)
    assert prohorov_naive(Q4, NU) == Q(3, 8)
    assert prohorov_bruteforce(F, Q4).value == Q(1, 9)


def test_errors():
    with pytest.raises(MeasureError):
        prohorov_feasible(NU, NU, 0)
    with pytest.raises(MeasureError):
        prohorov_bruteforce(F, F)
    with pytest.raises(MeasureError):
        prohorov_onesided(F, NU)
    big = make_discrete_measure(LINE, list(range(11)), ["1/11"] * 11)
    with pytest.raises(EnumerationCapError):
        prohorov_bruteforce(big, big)
    assert prohorov_bruteforce(big, Q4, cap=15).value >= 0
    from levyprohorov.measures import FiniteMetricSpace
    sp = FiniteMetricSpace(((0, 1), (1, 0)))
    with pytest.raises(SpaceMismatchError):
        prohorov_bruteforce(NU, make_discrete_measure(sp, [0], [1]))


@settings(max_examples=120)
@given(line_measures(max_atoms=3), line_measures(max_atoms=3))
def test_matches_naive_oracle(mu, nu):
    assert prohorov_bruteforce(mu, nu).value == prohorov_naive(mu, nu)


@settings(max_examples=60)
@given(finite_spaces().flatmap(lambda sp: st.tuples(finite_measures(sp), finite_measures(sp))))
def test_matches_naive_oracle_on_finite_spaces(pair):
    mu, nu = pair
    assert prohorov_bruteforce(mu, nu).value == prohorov_naive(mu, nu)


@settings(max_examples=150)
@given(line_measures(), line_measures())
def test_onesided_reduction(mu, nu):
    v = prohorov_bruteforce(mu, nu).value
    assert prohorov_onesided(mu, nu).value == v
    assert prohorov_onesided(nu, mu).value == v


@settings(max_examples=60)
@given(finite_spaces().flatmap(
    lambda sp: st.tuples(finite_measures(sp), finite_measures(sp), finite_measures(sp))))
def test_metric_axioms_on_finite_spaces(triple):
    x, y, z = triple
    xy = prohorov_bruteforce(x, y).value
    assert xy == prohorov_bruteforce(y, x).value
    assert (xy == 0) == (x == y)
    assert prohorov_bruteforce(x, z).value <= xy + prohorov_bruteforce(y, z).value


@settings(max_examples=100)
@given(line_measures(), line_measures())
def test_huber_inequality(mu, nu):
    assert levy_distance(cdf_of(mu), cdf_of(nu)).value <= prohorov_bruteforce(mu, nu).value


@settings(max_examples=60)
@given(cdfs(max_pieces=3), line_measures(max_atoms=3))
def test_mixed_pairs_against_grid_oracle(G, nu):
    r = prohorov_bruteforce(G, nu)
    v = r.value
    grid = sorted({Q(k, 8) for k in range(-20, 21)} | set(G.breakpoints) | set(nu.atoms))
    tiny = Q(1, 10**4)
    assert mixed_feasible(G, nu, v + tiny, grid)
    if v > tiny:
        assert not mixed_feasible(G, nu, v - tiny, grid)
    assert levy_distance(G, cdf_of(nu)).value <= v


@settings(max_examples=60)
@given(line_measures(), line_measures())
def test_certificates_recheck(mu, nu):
    r = prohorov_bruteforce(mu, nu)
    if r.value == 0:
        assert mu == nu
        return
    big, small = (mu, nu) if r.side == "mu" else (nu, mu)
    assert _violates(big, small, r.witness_set, r.probe_below)
    assert prohorov_feasible(mu, nu, r.probe_above).feasible


def test_every_subset_counts_as_closed():
    # on a finite space nothing is special-cased: the witness can be any subset
    from levyprohorov.measures import FiniteMetricSpace
    sp = FiniteMetricSpace(((0, 1, 1), (1, 0, 1), (1, 1, 0)))
    mu = make_discrete_measure(sp, [0, 1], ["1/2", "1/2"])
    nu = make_discrete_measure(sp, [2], [1])
    r = prohorov_bruteforce(mu, nu)
    assert r.value == 1 and prohorov_naive(mu, nu) == 1
