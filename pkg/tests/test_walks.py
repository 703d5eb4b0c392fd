import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from burnside_lab._runtime import RegimeError
from burnside_lab.presentations import (
    ParameterSystem,
    build_presentation,
    classify_torsion,
    empty_presentation,
    schedule,
)
from burnside_lab.walks import (
    BLOCK,
    NotLazyError,
    StepDistribution,
    cyclic_group,
    dihedral_group,
    exact_distance_distribution,
    formal_endpoint_counts,
    formal_word_bound_check,
    generates_free_group,
    inequality3,
    kesten_decay_check,
    kesten_radius,
    lazy_uniform,
    limit_point_analysis,
    alternating_profile,
    product_walk_torsion,
    reduce_batch,
    return_probabilities,
    sample_walk_torsion,
    schedule_surrogate_profile,
    tv_decay_curve,
    tv_distance,
)
from burnside_lab.words import Alphabet, free_reduce


def maximal(m, rank):
    return build_presentation(Alphabet(m), ParameterSystem(m=m), rank, "maximal")


def endpoint_law(m, r):
    """Exact endpoint distribution of the lazy walk by enumerating all (2m+1)^r step sequences."""
    letters = [0] + [s * g for g in range(1, m + 1) for s in (1, -1)]
    out = {}
    for steps in itertools.product(letters, repeat=r):
        w = free_reduce([l for l in steps if l])
        out[w] = out.get(w, 0) + 1
    return out


def exact_law_probability(p, r):
    m = p.alphabet.rank
    counts = endpoint_law(m, r)
    hits = sum(c for w, c in counts.items() if classify_torsion(w, p, check_regime=False).satisfies_law(p.params.n))
    return Fraction(hits, (2 * m + 1) ** r)


# ------------------------------------------------------------ exact distance chain


@pytest.mark.parametrize("m", [1, 2, 3])
def test_two_step_return(m):
    assert return_probabilities(m, 2, exact=True)[2] == Fraction(1, 2 * m + 1)


@pytest.mark.parametrize("m, r", [(2, 5), (3, 4), (1, 7)])
def test_distance_distribution_matches_enumeration(m, r):
    dist = exact_distance_distribution(m, r)
    counts = endpoint_law(m, r)
    by_len = [0] * (r + 1)
    for w, c in counts.items():
        by_len[len(w)] += c
    assert dist == [Fraction(c, (2 * m + 1) ** r) for c in by_len]


@given(st.integers(1, 5), st.integers(0, 150))
@settings(max_examples=40, deadline=None)
def test_distance_distribution_mass_and_support(m, r):
    dist = exact_distance_distribution(m, r, exact=False)
    assert abs(sum(dist) - 1) < 1e-12
    assert len(dist) == r + 1 and all(x >= 0 for x in dist)


def test_exact_switches_to_float_past_64():
    assert isinstance(exact_distance_distribution(2, 64)[0], Fraction)
    assert isinstance(exact_distance_distribution(2, 65)[0], float)


def test_kesten_inequality_holds():
    rep = kesten_decay_check(2, 200)
    assert rep.holds and rep.worst_ratio <= 1
    assert rep.rho_hat == pytest.approx(kesten_radius(2))
    assert abs(rep.fitted - rep.rho_hat) < 0.02
    with pytest.raises(ValueError):
        kesten_decay_check(2, 5)


def test_kesten_radius_values():
    assert kesten_radius(1) == pytest.approx(1.0)
    assert kesten_radius(2) == pytest.approx((1 + 2 * math.sqrt(3)) / 5)


def test_inequality3():
    v, ok = inequality3(0.5, 0.01, 2)
    assert v == pytest.approx(0.5**1.06 * 5**0.07) and ok
    assert not inequality3(0.99, 0.2, 2)[1]


# ------------------------------------------------------------ Monte Carlo


def test_reduce_batch():
    steps = np.array([[1, -1, 2, 0], [1, 2, -2, -1], [0, 0, 0, 0], [2, 1, 0, 1]])
    stack, length = reduce_batch(steps)
    got = [tuple(stack[i, : length[i]]) for i in range(4)]
    assert got == [(2,), (), (), (2, 1, 1)]


@pytest.mark.parametrize("m, rank, r", [(2, 3, 6), (2, 2, 4), (1, 2, 5)])
def test_monte_carlo_within_four_standard_errors(m, rank, r):
    p = maximal(m, rank)
    exact = float(exact_law_probability(p, r))
    rep = sample_walk_torsion(p, StepDistribution.lazy_free(m), r, 20_000, seed=1)
    assert abs(rep.p_hat - exact) <= 4 * rep.se


def test_monte_carlo_interval_coverage():
    p = maximal(2, 3)
    r = 4
    exact = float(exact_law_probability(p, r))
    inside = 0
    for seed in range(100):
        rep = sample_walk_torsion(p, StepDistribution.lazy_free(2), r, 400, seed=seed)
        inside += abs(rep.p_hat - exact) <= 4 * max(rep.se, 1e-12)
    assert inside >= 99


def test_walk_deterministic_and_jobs_invariant():
    p = maximal(2, 3)
    step = StepDistribution.lazy_free(2)
    n = 2 * BLOCK + 17
    a = sample_walk_torsion(p, step, 8, n, seed=5, jobs=1)
    b = sample_walk_torsion(p, step, 8, n, seed=5, jobs=3)
    c = sample_walk_torsion(p, step, 8, n, seed=5, jobs=1)
    assert a.summary() == b.summary() == c.summary()
    assert a.samples == n
    assert sample_walk_torsion(p, step, 8, n, seed=6).hits != a.hits


def test_walk_refusals():
    p = maximal(2, 2)
    step = StepDistribution.lazy_free(2)
    with pytest.raises(ValueError):
        sample_walk_torsion(p, step, 4, 0, seed=0)
    with pytest.raises(RegimeError):
        sample_walk_torsion(p, step, p.regime_cap + 1, 10, seed=0)
    rep = sample_walk_torsion(p, step, p.regime_cap + 1, 10, seed=0, allow_partial=True)
    assert rep.samples == 10
    with pytest.raises(ValueError):
        sample_walk_torsion(p, StepDistribution.uniform([0, 3]), 4, 10, seed=0)


def test_walk_flags():
    p = maximal(2, 1)
    assert sample_walk_torsion(p, StepDistribution.lazy_free(2), 2, 10, seed=0).flags == {
        "lazy": True,
        "symmetric": True,
        "degenerate": False,
    }
    flags = sample_walk_torsion(p, StepDistribution.uniform([1, -1]), 2, 10, seed=0).flags
    assert flags == {"lazy": False, "symmetric": True, "degenerate": True}


def test_empty_presentation_only_identity_hits():
    p = empty_presentation(Alphabet(2))
    rep = sample_walk_torsion(p, StepDistribution.lazy_free(2), 4, 5000, seed=2)
    assert rep.hits == rep.identity_hits and rep.torsion_hits == 0
    exact = float(exact_distance_distribution(2, 4)[0])
    assert abs(rep.p_hat - exact) <= 4 * rep.se


@pytest.mark.parametrize("rank, steps, factor", [(1, 2, None), (2, 3, 1), (3, 4, 1)])
def test_product_walk_consistent(rank, steps, factor):
    p = maximal(2, rank)
    rep = product_walk_torsion(p, 1, StepDistribution.lazy_free(2), steps, 20_000, seed=3, first_factor=factor)
    assert rep.first_steps == (4 if factor is None else factor) * steps
    assert 0 < rep.product < 1
    assert rep.consistent


def test_product_walk_plumbing():
    p = maximal(2, 1)
    rep = product_walk_torsion(p, 1, StepDistribution.lazy_free(2), 1, 100, seed=0)
    assert rep.first_steps == 4 and rep.second.steps == 1 and rep.joint.samples == 100
    with pytest.raises(RegimeError):
        product_walk_torsion(p, 2, StepDistribution.lazy_free(2), p.regime_cap, 10, seed=0)


# ------------------------------------------------------------ total variation


def test_tv_distance_example():
    assert tv_distance({0: Fraction(1, 2), 1: Fraction(1, 2)}, {0: 1}) == Fraction(1, 2)
    assert tv_distance({0: 1}, {0: 1}) == 0


def test_tv_decay_cyclic():
    g = cyclic_group(5)
    curve = tv_decay_curve(g, lazy_uniform(g, [1, 4]), 200, thresholds=[1e-6])
    assert curve.first_below(1e-6) is not None and curve.first_below(1e-6) <= 200
    assert curve.thresholds["1e-06"] == curve.first_below(1e-6)
    assert curve.non_increasing_from(1)


def test_tv_decay_dihedral():
    g = dihedral_group(8)
    assert g.order == 16
    curve = tv_decay_curve(g, lazy_uniform(g, [(1, 0), (0, 1)]), 300)
    assert curve.floats()[-1] < 1e-6
    assert curve.values[0] > curve.values[-1]


def test_tv_requires_lazy():
    g = cyclic_group(4)
    with pytest.raises(NotLazyError):
        tv_decay_curve(g, {1: Fraction(1, 2), 3: Fraction(1, 2)}, 10)


def test_tv_first_step_by_hand():
    # mu = (1/2)(delta_0 + delta_1) on Z/4: mu*mu = (1/4, 1/2, 1/4), distance 1/4 + 0 + 1/4
    g = cyclic_group(4)
    curve = tv_decay_curve(g, {0: Fraction(1, 2), 1: Fraction(1, 2)}, 1)
    assert curve.values == [Fraction(1, 4)]


# ------------------------------------------------------------ limit points


def test_limit_constant_sequence():
    rep = limit_point_analysis([0.3] * 1000, 0.05)
    assert rep.gap == 0 and rep.connected and len(rep.cells) == 1


def test_limit_slow_oscillation_is_connected():
    seq = [math.sin(math.log(n + 1)) for n in range(100_000)]
    rep = limit_point_analysis(seq, 0.05)
    assert rep.connected and rep.gap <= 0.1


def test_limit_alternating_is_disconnected():
    rep = limit_point_analysis(alternating_profile(10_000), 0.05)
    assert rep.gap == pytest.approx(1.0)
    assert rep.gap > 2 * rep.eps and rep.max_late_step == 1.0
    assert not rep.steps_vanish and not rep.connected


def test_limit_rejects_bad_eps():
    with pytest.raises(ValueError):
        limit_point_analysis([0.1], 0)


def test_schedule_surrogate_steps_shrink():
    prof = schedule_surrogate_profile(schedule(1, 1, 20_000), 20_000)
    diffs = np.abs(np.diff(prof))
    assert all(d <= 1 / math.sqrt(j + 1) + 1e-12 for j, d in enumerate(diffs, start=1))
    assert 0 <= min(prof) and max(prof) <= 1


# ------------------------------------------------------------ formal words


@pytest.mark.parametrize("m, R", [(1, 6), (2, 5)])
def test_formal_endpoint_counts_match_enumeration(m, R):
    assert formal_endpoint_counts(m, R) == endpoint_law(m, R)


def test_formal_bound_empty_presentation():
    p = empty_presentation(Alphabet(2))
    rep = formal_word_bound_check(p, 2, 6)
    dist = exact_distance_distribution(2, 6)
    assert rep["finite_order"] == dist[0] * 5**6
    assert rep["finite_order"] + rep["infinite_order"] == rep["total"] == 5**6


def test_formal_bound_hypotheses():
    p = maximal(2, 2)
    rep = formal_word_bound_check(p, 4, 3)
    assert rep["hypotheses"]["gap_vacuous"]
    rep = formal_word_bound_check(p, 2, 8)
    assert not rep["hypotheses"]["gap_vacuous"]
    assert rep["hypotheses"]["no_periods_in_gap"]
    assert rep["finite_order"] + rep["infinite_order"] == 5**8
    counts = endpoint_law(2, 8)
    finite = sum(c for w, c in counts.items() if classify_torsion(w, p, check_regime=False).kind != "free-surrogate")
    assert rep["finite_order"] == finite


# ------------------------------------------------------------ generation


def test_generates_free_group():
    assert generates_free_group([(1,), (2,)], 2)
    assert generates_free_group([(1, 2), (2,)], 2)
    assert not generates_free_group([(1,)], 2)
    assert not generates_free_group([(1, 1), (2,)], 2)
    assert not generates_free_group([(1, 2, -1), (2,)], 2)
    assert generates_free_group([(1,), (1, 2, -1)], 2)
