import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from burnside_lab._runtime import BudgetExceeded
from burnside_lab.census import (
    aperiodic_exponent,
    aperiodic_lower_bound_check,
    binomial_tail,
    count_aperiodic_exact,
    count_disjoint_squares,
    count_pairfree_aperiodic_Y,
    count_theta_exact,
    count_unbalanced,
    is_pair_free,
    is_t_aperiodic,
    is_theta_word,
    iter_pairfree_words,
    pairfree_exponent,
    pairfree_lower_bound_check,
    tail_bound_check,
    theta_census,
    theta_upper_bound,
    x_form,
    x_form_raw,
)
from burnside_lab.words import count_reduced_words, is_reduced, iter_reduced_words

x1, x2 = 1, 2


def has_power(w, t):
    """Direct scan for a subword Y^t with Y nonempty."""
    n = len(w)
    for i in range(n):
        for p in range(1, (n - i) // t + 1):
            y = w[i : i + p]
            if w[i : i + p * t] == y * t:
                return True
    return False


def brute_aperiodic(m, r, t):
    letters = [s * g for g in range(1, m + 1) for s in (1, -1)]
    return sum(1 for w in itertools.product(letters, repeat=r) if is_reduced(w) and not has_power(w, t))


def max_disjoint_squares(w):
    """Interval packing by DP over positions."""
    n = len(w)
    best = [0] * (n + 2)
    for i in range(n - 2, -1, -1):
        best[i] = max(best[i + 1], (1 + best[i + 2]) if w[i] == w[i + 1] else 0)
    return best[0]


# ------------------------------------------------------------ aperiodic words


def test_is_t_aperiodic_examples():
    assert not is_t_aperiodic((x1, x1), 2)
    assert is_t_aperiodic((x1, x2), 2)
    w = (x1, x2, x1, x2, x1)
    assert is_t_aperiodic(w, 3)
    assert not is_t_aperiodic(w, 2)


@given(st.lists(st.sampled_from([1, -1, 2]), max_size=16), st.integers(2, 4))
def test_is_t_aperiodic_matches_scan(w, t):
    assert is_t_aperiodic(tuple(w), t) == (not has_power(tuple(w), t))


def test_count_aperiodic_examples():
    assert count_aperiodic_exact(2, 1, 2) == 4
    assert count_aperiodic_exact(2, 2, 2) == 8
    assert count_aperiodic_exact(2, 0, 2) == 1


@pytest.mark.parametrize("t", [2, 3])
def test_count_aperiodic_matches_brute_force(t):
    for r in range(8):
        assert count_aperiodic_exact(2, r, t) == brute_aperiodic(2, r, t)


def test_count_aperiodic_frozen_values():
    # computed once and cross-checked against the brute force up to r = 7
    assert [count_aperiodic_exact(2, r, 2) for r in range(11)] == [1, 4, 8, 16, 24, 40, 64, 104, 144, 216, 328]
    assert [count_aperiodic_exact(2, r, 3) for r in range(9)] == [1, 4, 12, 32, 88, 240, 648, 1752, 4744]


def test_aperiodic_monotone_in_t_and_below_total():
    for r in range(1, 8):
        counts = [count_aperiodic_exact(2, r, t) for t in (2, 3, 4)]
        assert counts == sorted(counts)
        assert counts[-1] <= count_reduced_words(2, r)


def test_aperiodic_jobs_invariant():
    assert count_aperiodic_exact(2, 8, 3, jobs=1) == count_aperiodic_exact(2, 8, 3, jobs=3)


def test_aperiodic_budget():
    with pytest.raises(BudgetExceeded):
        count_aperiodic_exact(2, 8, 3, budget=100)


def test_aperiodic_exponent_condition():
    for m, l in [(2, 2.5), (3, 4.5), (3, 2.0)]:
        t = aperiodic_exponent(m, l)
        ok = lambda s: l**s > 2 * m and 2 * m * l / (l**s - 2 * m) < 2 * m - 1 - l
        assert ok(t) and all(not ok(s) for s in range(2, t))
    with pytest.raises(ValueError):
        aperiodic_exponent(2, 3.0)


def test_lower_bound_check():
    t, holds, reps = aperiodic_lower_bound_check(2, 8, 2.5)
    assert t == 4 and holds
    t, holds, reps = aperiodic_lower_bound_check(3, 6, 4.5)
    assert t == 3 and holds
    assert all(Fraction(rep.exact) >= Fraction(4.5) ** rep.r for rep in reps)
    _, holds, _ = aperiodic_lower_bound_check(2, 0, 2.9)
    assert holds


# ------------------------------------------------------------ theta words


def test_disjoint_square_examples():
    assert count_disjoint_squares((x1, x1)) == 1
    assert count_disjoint_squares((x1, x1, x1)) == 1
    assert count_disjoint_squares((x1,) * 4) == 2
    assert is_theta_word((x1, x1), 0.03)
    assert not is_theta_word((x1, x2), 0.03)


def test_theta_matches_interval_packing():
    for n in range(11):
        for w in iter_reduced_words(2, n):
            assert count_disjoint_squares(w) == max_disjoint_squares(w)
            for theta in (0.03, 0.25, 0.4):
                assert is_theta_word(w, theta) == (max_disjoint_squares(w) >= theta * n)


def test_theta_counts_below_bound():
    assert count_theta_exact(2, 1, 0.25) == 0
    for theta in (0.25, 0.4):
        for r in range(1, 9):
            rep = theta_census(2, r, theta)
            assert rep.exact == sum(1 for w in iter_reduced_words(2, r) if max_disjoint_squares(w) >= theta * r)
            assert rep.exact <= rep.bound


def test_theta_bound_formula():
    b = theta_upper_bound(2, 10, 0.25)
    k = math.floor(10 - 2.5)
    assert b["k"] == k == 7
    assert b["combinatorial"] == math.comb(7, 3) * 4 * 3**6
    assert not b["headline_hypotheses_ok"]
    assert theta_upper_bound(2**101, 4, 0.03)["headline_hypotheses_ok"]


# ------------------------------------------------------------ Y-words


def test_x_form_examples():
    # y1 -> x1, y2 -> x1^2, y3 -> x2
    assert x_form((2, 3)) == (x1, x1, x2)
    assert x_form((1, -2)) == (-x1,)
    assert x_form_raw((1, -2)) == (x1, -x1, -x1)


def test_x_form_of_pairfree_is_reduced():
    for r in range(9):
        for w in iter_pairfree_words(2, r):
            xf = x_form(w)
            assert xf == x_form_raw(w)
            assert is_reduced(xf)
            assert r <= len(xf) <= 2 * r


def test_pairfree_counts():
    assert count_pairfree_aperiodic_Y(2, 1, 2) == 8
    assert count_pairfree_aperiodic_Y(3, 0, 2) == 1
    letters = [s * y for y in range(1, 5) for s in (1, -1)]
    for r in range(6):
        brute = sum(
            1 for w in itertools.product(letters, repeat=r) if is_pair_free(w) and not has_power(w, 3)
        )
        assert count_pairfree_aperiodic_Y(2, r, 3) == brute


def test_pairfree_lower_bound():
    assert pairfree_exponent(3, 7.5) == 3
    t, holds, reps = pairfree_lower_bound_check(3, 6, 7.5)
    assert holds and all(rep.exact >= 7.5**rep.r for rep in reps)


# ------------------------------------------------------------ binomial tails and unbalanced words


def test_binomial_tail_examples():
    assert binomial_tail(4, 0.49) == 5
    assert binomial_tail(0, 0.4) == 1
    # odd r: the sum is exactly half of the symmetric row; even r: strictly below half
    for r in range(1, 65):
        q = Fraction(binomial_tail(r, 0.499), 2**r)
        assert q == Fraction(1, 2) if r % 2 else q < Fraction(1, 2)


def test_tail_bound_check():
    h = -(0.4 * math.log2(0.4) + 0.6 * math.log2(0.6))
    assert all(tail_bound_check(r, 0.4, 1, 2**h) for r in range(0, 80))
    assert not tail_bound_check(20, 0.4, 1, 1.1)
    with pytest.raises(ValueError):
        tail_bound_check(5, 0.5, 1, 1.9)


def unbalanced_closed_form(m, r, lam):
    per_pattern = 2 * m * (2 * m - 2) ** (r - 1)
    return sum(math.comb(r, k) * per_pattern for k in range(r + 1) if k <= lam * r or r - k <= lam * r)


def test_unbalanced_brute_force_and_closed_form():
    letters = [s * y for y in range(1, 5) for s in (1, -1)]
    for r in range(1, 6):
        brute = 0
        for w in itertools.product(letters, repeat=r):
            if is_pair_free(w):
                even = sum(1 for y in w if abs(y) % 2 == 0)
                brute += even <= 0.499 * r or r - even <= 0.499 * r
        assert count_unbalanced(2, r).exact == brute == unbalanced_closed_form(2, r, 0.499)


def test_unbalanced_below_dominating_value():
    rep = count_unbalanced(2, 1)
    assert rep.exact == 8
    for r in range(1, 9):
        rep = count_unbalanced(2, r)
        assert rep.exact == unbalanced_closed_form(2, r, 0.499)
        assert rep.extra["exact_few_even"] <= rep.extra["dominating_per_parity"]
        assert rep.bound_satisfied


def test_census_reports_deterministic():
    assert theta_census(2, 7, 0.25).row() == theta_census(2, 7, 0.25, jobs=2).row()
    assert count_unbalanced(2, 5).row() == count_unbalanced(2, 5, jobs=2).row()
