from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyprohorov.convergence import (
    PiecewiseLinearFunction,
    default_families,
    helly_subsequence,
    integrate,
    levy_convergence_profile,
    portmanteau_report,
    quantize,
    tail_window,
    tightness_witness,
)
from levyprohorov.levy import levy_distance
from levyprohorov.measures import (
    LINE,
    FiniteMetricSpace,
    IntervalUnion,
    MeasureError,
    SpaceMismatchError,
    cdf_of,
    closed,
    make_discrete_measure,
    measure_of,
    point_mass,
    uniform_cdf,
)
from levyprohorov.prohorov import prohorov_bruteforce
from oracles import levy_graphical
from strategies import cdfs, line_measures

NU = make_discrete_measure(LINE, [0, "1/4"], ["2/3", "1/3"])


def shrinking(N=64):
    return [point_mass(Q(1, n)) for n in range(1, N + 1)]


def perturbed(N=32):
    # mass 1/n leaks to 5, so the Prohorov distance to the point mass at 0 is 1/n
    return [point_mass(5) if n == 1 else make_discrete_measure(LINE, [0, 5], [1 - Q(1, n), Q(1, n)])
            for n in range(1, N + 1)]


def test_tail_window():
    assert tail_window(64) == (49, 64)
    assert tail_window(3) == (3, 3)
    assert tail_window(1) == (1, 1)


def test_integrate_exact():
    f = PiecewiseLinearFunction((0, Q(1, 2), 1), (0, 1, 0))
    assert integrate(f, uniform_cdf()) == Q(1, 2)
    assert integrate(f, NU) == Q(1, 3) * Q(1, 2)


# Portmanteau


def test_shrinking_point_masses():
    rep = portmanteau_report(shrinking(), point_mass(0))
    assert rep.all_passed
    assert rep.conditions["closed"].margin <= 0
    assert rep.traces["closed", "{0}"][-1] == 0  # mu_n({0}) = 0 < 1 = limit
    assert "{0}" in rep.conditions["continuity"].excluded
    assert rep.prefix_length == 64 and rep.window == (49, 64)


def test_constant_sequence_zero_margins():
    rep = portmanteau_report([NU] * 8, NU)
    assert rep.all_passed
    for c in rep.conditions.values():
        assert c.margin == 0


def test_alternating_signs_flag_oscillation():
    seq = [point_mass(Q((-1) ** n, n)) for n in range(1, 65)]
    rep = portmanteau_report(seq, point_mass(0))
    for name in ("closed", "open", "functions"):
        assert rep.conditions[name].passed
    assert rep.conditions["open"].oscillating
    assert "(0, 1/4)" in rep.conditions["open"].oscillating


def test_escaping_mass_fails():
    seq = [point_mass(n) for n in range(1, 17)]
    rep = portmanteau_report(seq, point_mass(0))
    assert not rep.conditions["closed"].passed
    assert not rep.conditions["functions"].passed


def test_tolerance():
    rep = portmanteau_report(perturbed(), point_mass(0))
    assert not rep.conditions["closed"].passed
    rep = portmanteau_report(perturbed(), point_mass(0), tol=Q(1, 24))
    assert rep.all_passed


def test_families_validation():
    with pytest.raises(MeasureError):
        portmanteau_report([NU], NU, families={"closed": []})
    sp = FiniteMetricSpace(((0, 1), (1, 0)))
    with pytest.raises(SpaceMismatchError):
        portmanteau_report([NU], make_discrete_measure(sp, [0], [1]))
    with pytest.raises(MeasureError):
        portmanteau_report([], NU)


def test_custom_family():
    fam = {"closed": [IntervalUnion.of(closed(0, 1))]}
    rep = portmanteau_report(shrinking(8), point_mass(0), families=fam)
    assert rep.conditions["closed"].family_size == 1 and rep.conditions["closed"].passed


def test_finite_space_constant_sequence():
    sp = FiniteMetricSpace(((0, 1, 2), (1, 0, 1), (2, 1, 0)))
    mu = make_discrete_measure(sp, [0, 2], ["1/3", "2/3"])
    rep = portmanteau_report([mu] * 4, mu)
    assert rep.all_passed
    assert default_families(mu)["functions"]


def test_default_functions_avoid_limit_support():
    fams = default_families(NU)
    for f in fams["functions"]:
        for a in NU.atoms:
            # constant near every atom of the limit
            assert f(a - Q(1, 10**6)) == f(a) == f(a + Q(1, 10**6))


def test_closed_margins_bounded_by_prohorov_distance():
    seq = perturbed()
    limit = point_mass(0)
    rep = portmanteau_report(seq, limit)
    for n, mu in enumerate(seq, start=1):
        pi = prohorov_bruteforce(mu, limit).value
        assert pi == Q(1, n)
        for (cond, label), trace in rep.traces.items():
            if cond == "closed":
                assert trace[n - 1] - rep.limit_values[cond, label] <= pi


@pytest.mark.parametrize("seq", [shrinking(24), perturbed(24)])
def test_passing_sequences_have_decreasing_prohorov_profiles(seq):
    rep = portmanteau_report(seq, point_mass(0), tol=Q(1, 16))
    assert rep.all_passed
    prof = [prohorov_bruteforce(m, point_mass(0)).value for m in seq]
    assert prof == sorted(prof, reverse=True)
    assert prof[-1] <= Q(1, 24)


# Lévy profile


def test_levy_profile_shrinking():
    seq = [cdf_of(m) for m in shrinking()]
    prof = levy_convergence_profile(seq, cdf_of(point_mass(0)), grid=[Q(-1), Q(1, 4)])
    assert prof.levy == [Q(1, n) for n in range(1, 65)]
    assert prof.levy[:3] == [levy_graphical(F, cdf_of(point_mass(0))) for F in seq[:3]]
    assert prof.differences[1] == [0, -1]  # F_2(1/4) = 0 while F(1/4) = 1


def test_levy_profile_constant_and_alternating():
    F = cdf_of(NU)
    assert levy_convergence_profile([F] * 5, F).levy == [0] * 5
    seq = [cdf_of(point_mass((-1) ** n)) for n in range(1, 9)]
    assert levy_convergence_profile(seq, cdf_of(point_mass(0))).levy == [1] * 8


def test_levy_profile_rejects_jump_grid_points():
    with pytest.raises(MeasureError):
        levy_convergence_profile([cdf_of(NU)], cdf_of(NU), grid=[0])


# quantization


def test_quantize_uniform():
    q = quantize(uniform_cdf(), Q(1, 4))
    assert q.atoms == (Q(1, 8), Q(3, 8), Q(5, 8), Q(7, 8))
    assert q.weights == (Q(1, 4),) * 4
    assert prohorov_bruteforce(uniform_cdf(), q).value <= Q(1, 4)


def test_quantize_fine_grid_is_identity():
    assert quantize(NU, Q(1, 8)) == NU


def test_quantize_merges_atoms():
    q = quantize(NU, Q(1, 2))
    assert q.weights == (1,)
    assert prohorov_bruteforce(NU, q).value <= Q(1, 2)


def test_quantize_validation():
    with pytest.raises(MeasureError):
        quantize(NU, 0)
    sp = FiniteMetricSpace(((0, 1), (1, 0)))
    with pytest.raises(SpaceMismatchError):
        quantize(make_discrete_measure(sp, [0], [1]), Q(1, 2))


@settings(max_examples=100)
@given(line_measures(max_atoms=6), st.integers(1, 24))
def test_quantization_bound_discrete(mu, k):
    delta = Q(k, 16)
    q = quantize(mu, delta)
    assert sum(q.weights) == 1
    assert prohorov_bruteforce(mu, q).value <= delta


@settings(max_examples=40)
@given(cdfs(max_pieces=3), st.integers(2, 12))
def test_quantization_bound_cdf(F, k):
    delta = Q(k, 8)
    q = quantize(F, delta)
    assert prohorov_bruteforce(F, q).value <= delta


# tightness


def test_tightness_two_atom_family():
    fam = [make_discrete_measure(LINE, [0, n], ["1/2", "1/2"]) for n in range(1, 6)]
    w = tightness_witness(fam, Q(2, 5))
    assert w.interval == (0, 5) and w.holds()
    # shrinking either end loses half the mass of the last member
    for a, b in ((Q(1, 100), 5), (0, 5 - Q(1, 100))):
        masses = [measure_of(m, IntervalUnion.of(closed(a, b))) for m in fam]
        assert any(m <= 1 - Q(2, 5) for m in masses)


def test_tightness_point_mass_and_vacuous_eps():
    assert tightness_witness([point_mass(0)], Q(1, 3)).interval == (0, 0)
    w = tightness_witness([NU, point_mass(3)], 1)
    assert w.interval[0] == w.interval[1] == 0 and w.holds()


def test_tightness_validation():
    with pytest.raises(MeasureError):
        tightness_witness([NU], 0)
    with pytest.raises(MeasureError):
        tightness_witness([], Q(1, 2))


@settings(max_examples=60)
@given(st.lists(line_measures(max_atoms=3), min_size=1, max_size=4), st.integers(1, 9))
def test_tightness_minimal(fam, k):
    eps = Q(k, 10)
    w = tightness_witness(fam, eps)
    a, b = w.interval
    assert all(m > 1 - eps for m in w.masses)
    pts = sorted(set().union(*(m.atoms for m in fam)))
    # no interval with support endpoints that is strictly shorter works
    for i, x in enumerate(pts):
        for y in pts[i:]:
            if y - x < b - a:
                masses = [measure_of(m, IntervalUnion.of(closed(x, y))) for m in fam]
                assert not all(m > 1 - eps for m in masses)


# Helly selection


def test_helly_shrinking():
    seq = [cdf_of(m) for m in shrinking()]
    grid = [Q(k, 16) for k in range(-16, 33)]
    h = helly_subsequence(seq, grid, Q(1, 32))
    assert h.status == "ok"
    assert h.limit == cdf_of(point_mass(0))
    assert h.indices == list(range(16, 65))
    assert h.levy_to_limit == [Q(1, n) for n in h.indices]
    assert h.levy_to_limit == sorted(h.levy_to_limit, reverse=True)
    assert max(h.levy_to_limit) <= Q(1, 16) and h.levy_to_limit[-1] < Q(1, 16)
    assert helly_subsequence(seq, grid, Q(1, 32)) == h


def test_helly_constant_sequence():
    F = cdf_of(NU)
    h = helly_subsequence([F] * 6, [Q(k, 8) for k in range(-8, 9)], 0)
    assert h.indices == list(range(1, 7))
    assert h.limit == F


def test_helly_alternating():
    seq = [cdf_of(point_mass(0 if n % 2 else 1)) for n in range(1, 17)]
    h = helly_subsequence(seq, [Q(k, 4) for k in range(-4, 9)], Q(1, 32))
    assert h.indices == list(range(2, 17, 2))
    assert h.limit == cdf_of(point_mass(1))
    assert set(h.levy_to_limit) == {0}


def test_helly_validation():
    with pytest.raises(MeasureError):
        helly_subsequence([cdf_of(NU)], [0], 0)
    with pytest.raises(MeasureError):
        helly_subsequence([cdf_of(NU)] * 2, [], 0)


def test_helly_limit_is_a_levy_limit_for_uniform_shifts():
    seq = [uniform_cdf(Q(1, n), 1 + Q(1, n)) for n in range(1, 33)]
    h = helly_subsequence(seq, [Q(k, 32) for k in range(-32, 96)], Q(1, 64))
    assert h.status == "ok"
    assert levy_distance(h.limit, uniform_cdf()).value <= Q(1, 16)
