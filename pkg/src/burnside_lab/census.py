"""Exact censuses of aperiodic words, theta-words and Y-words, with the
counting bounds they are compared against.

All counts are exact integers produced by depth-first enumeration; bound
values are evaluated numerically and reported next to the counts together
with a flag saying whether the bound's hypotheses hold at the given
parameters.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ._runtime import BudgetExceeded, Counter, merge_counts, resolve_budget, shard_map
from .words import Word, count_reduced_words, free_reduce, is_reduced, iter_reduced_words, smallest_period

THETA = 0.03
BALANCE = 0.499


@dataclass
class CensusReport:
    m: int
    r: int
    exact: int
    bound: float
    hypotheses_ok: bool
    t: int | None = None
    theta: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def bound_satisfied(self) -> bool:
        return self.exact <= self.bound

    def row(self) -> dict:
        d = asdict(self)
        extra = d.pop("extra")
        d["bound_satisfied"] = self.bound_satisfied
        d.update(extra)
        return d


def _safe_pow(base: float, exp: float) -> float:
    try:
        return math.pow(base, exp)
    except OverflowError:
        return math.inf


# ------------------------------------------------------------ aperiodicity


def is_t_aperiodic(w: Sequence[int], t: int) -> bool:
    """True iff ``w`` has no nonempty subword of the form ``Y**t``.

    For each start position the failure function gives the smallest period
    ``p`` of every prefix; a prefix of length ``L >= t*p`` is a ``t``-th power.
    """
    if t < 2:
        raise ValueError("t must be at least 2")
    n = len(w)
    for i in range(n):
        s = w[i:]
        fail = _borders(s)
        for length in range(t, len(s) + 1):
            if length >= t * (length - fail[length]):
                return False
    return True


def _borders(s: Sequence) -> list[int]:
    n = len(s)
    fail = [0] * (n + 1)
    k = 0
    for i in range(1, n):
        while k > 0 and s[k] != s[i]:
            k = fail[k]
        if s[k] == s[i]:
            k += 1
        fail[i + 1] = k
    return fail


class _PowerTracker:
    """Incremental detection of a ``t``-th power ending at the last letter.

    ``runs[p]`` counts the consecutive positions ``j`` ending at the current
    end with ``w[j] == w[j - p]``; the suffix of length ``t*p`` is a ``t``-th
    power iff ``runs[p] >= (t - 1) * p``.
    """

    def __init__(self, t: int):
        self.t = t
        self.word: list[int] = []
        self.stack: list[list[int]] = [[0]]

    def push(self, letter) -> bool:
        """Append ``letter``; return False (and leave state pushed) if a power appears."""
        w = self.word
        n = len(w)
        w.append(letter)
        prev = self.stack[-1]
        runs = [0] * (n + 1)
        t = self.t
        ok = True
        for p in range(1, n + 1):
            if w[n - p] == letter:
                c = (prev[p] if p < len(prev) else 0) + 1
                runs[p] = c
                if c >= (t - 1) * p and t * p <= n + 1:
                    ok = False
        self.stack.append(runs)
        return ok

    def pop(self) -> None:
        self.word.pop()
        self.stack.pop()


def _count_aperiodic_from(prefix: tuple, length: int, t: int, next_letters, limit: int) -> tuple[int, int]:
    tracker = _PowerTracker(t)
    counter = Counter(limit)
    for l in prefix:
        if not tracker.push(l):
            return 0, len(prefix)
    counter.tick(len(prefix))

    def rec(depth: int) -> int:
        if depth == length:
            return 1
        total = 0
        last = tracker.word[-1] if tracker.word else None
        for l in next_letters(last):
            counter.tick()
            if tracker.push(l):
                total += rec(depth + 1)
            tracker.pop()
        return total

    return rec(len(prefix)), counter.used


def _reduced_next(m: int):
    letters = [s * g for g in range(1, m + 1) for s in (1, -1)]

    def nxt(last):
        if last is None:
            return letters
        return [l for l in letters if l != -last]

    return nxt


def _pairfree_next(m: int):
    letters = [s * y for y in range(1, 2 * m + 1) for s in (1, -1)]

    def nxt(last):
        if last is None:
            return letters
        pair = (abs(last) + 1) // 2
        return [l for l in letters if (abs(l) + 1) // 2 != pair]

    return nxt


def _aperiodic_shard(args) -> tuple[int, int]:
    kind, m, r, t, first, limit = args
    nxt = _reduced_next(m) if kind == "reduced" else _pairfree_next(m)
    return _count_aperiodic_from((first,), r, t, nxt, limit)


def _sharded_aperiodic(kind: str, m: int, r: int, t: int, budget: int | None, jobs: int) -> int:
    if t < 2:
        raise ValueError("t must be at least 2")
    if r < 0:
        raise ValueError("r must be non-negative")
    if r == 0:
        return 1
    limit = resolve_budget(budget)
    nxt = _reduced_next(m) if kind == "reduced" else _pairfree_next(m)
    shards = [(kind, m, r, t, first, limit) for first in nxt(None)]
    count, _ = merge_counts(shard_map(_aperiodic_shard, shards, jobs), limit)
    return count


def count_aperiodic_exact(m: int, r: int, t: int, budget: int | None = None, jobs: int = 1) -> int:
    """Number of reduced ``t``-aperiodic words of length ``r`` over ``m`` generators."""
    if m < 1:
        raise ValueError("m must be positive")
    return _sharded_aperiodic("reduced", m, r, t, budget, jobs)


def aperiodic_exponent(m: int, l: float) -> int:
    """Smallest ``t >= 2`` with ``l**t > 2m`` and ``2ml/(l**t - 2m) < 2m - 1 - l``."""
    if not 0 < l < 2 * m - 1:
        raise ValueError("need 0 < l < 2m - 1")
    return _smallest_t(2 * m, l, 2 * m - 1 - l)


def _smallest_t(alphabet_size: int, l: float, slack: float) -> int:
    if l <= 1:
        # l**t never exceeds the alphabet size; every t >= 2 fails the condition
        raise ValueError("need l > 1 for the exponent condition to be satisfiable")
    t = 2
    while True:
        denom = l**t - alphabet_size
        if denom > 0 and alphabet_size * l / denom < slack:
            return t
        t += 1


def aperiodic_lower_bound_check(
    m: int, r: int, l: float, budget: int | None = None, jobs: int = 1
) -> tuple[int, bool, list[CensusReport]]:
    """Check ``b(j) >= l**j`` for ``j = 0..r`` with ``t`` from the exponent condition.

    Returns ``(t, holds, per-length reports)``.
    """
    t = aperiodic_exponent(m, l)
    reports = []
    for j in range(r + 1):
        exact = count_aperiodic_exact(m, j, t, budget, jobs)
        reports.append(CensusReport(m, j, exact, _safe_pow(l, j), True, t=t, extra={"l": l, "kind": "lower"}))
    holds = all(Fraction(rep.exact) >= Fraction(l) ** rep.r for rep in reports)
    return t, holds, reports


# ------------------------------------------------------------ theta words


def count_disjoint_squares(w: Sequence[int]) -> int:
    """Maximum number of pairwise disjoint subwords ``x x`` (``x`` any letter)."""
    count = 0
    i = 0
    n = len(w)
    while i < n - 1:
        if w[i] == w[i + 1]:
            count += 1
            i += 2
        else:
            i += 1
    return count


def is_theta_word(w: Sequence[int], theta: float = THETA) -> bool:
    return count_disjoint_squares(w) >= theta * len(w)


def theta_split(r: int, theta: float) -> int:
    """``k = floor(r - theta*r)``, the collapsed length used by the counting argument."""
    return math.floor(r - theta * r)


def theta_upper_bound(m: int, r: int, theta: float = THETA) -> dict:
    """Bounds on the number of theta-words of length ``r``.

    ``combinatorial`` is ``C(k, r-k) * #reduced(k)``; ``relaxed`` replaces the
    binomial by ``2**r``; ``headline`` is ``(2m-1)**((1 - theta/2) r)``, whose
    hypothesis ``m > 2**(3/theta)`` is reported in ``headline_hypotheses_ok``
    (the additional "r large" requirement is not checkable at finite r).
    """
    if m < 2 or r < 1:
        raise ValueError("need m >= 2 and r >= 1")
    k = theta_split(r, theta)
    reduced_k = count_reduced_words(m, k)
    combinatorial = math.comb(k, r - k) * reduced_k
    relaxed = 2**r * reduced_k
    headline = _safe_pow(2 * m - 1, (1 - theta / 2) * r)
    # log2 comparison avoids overflowing 2**(3/theta) for small theta
    hyp = math.log2(m) > 3 / theta
    return {
        "k": k,
        "combinatorial": combinatorial,
        "relaxed": relaxed,
        "headline": headline,
        "headline_hypotheses_ok": hyp,
    }


def _theta_shard(args) -> tuple[int, int]:
    m, r, theta, first, limit = args
    counter = Counter(limit)
    count = 0
    for w in iter_reduced_words(m, r - 1):
        if w and w[0] == -first:
            continue
        counter.tick()
        if is_theta_word((first,) + w, theta):
            count += 1
    return count, counter.used


def count_theta_exact(m: int, r: int, theta: float = THETA, budget: int | None = None, jobs: int = 1) -> int:
    if r == 0:
        return 1
    limit = resolve_budget(budget)
    firsts = [s * g for g in range(1, m + 1) for s in (1, -1)]
    parts = shard_map(_theta_shard, [(m, r, theta, f, limit) for f in firsts], jobs)
    return merge_counts(parts, limit)[0]


def theta_census(m: int, r: int, theta: float = THETA, budget: int | None = None, jobs: int = 1) -> CensusReport:
    exact = count_theta_exact(m, r, theta, budget, jobs)
    b = theta_upper_bound(m, r, theta)
    return CensusReport(
        m,
        r,
        exact,
        b["combinatorial"],
        True,
        theta=theta,
        extra={"headline": b["headline"], "headline_hypotheses_ok": b["headline_hypotheses_ok"], "k": b["k"]},
    )


# ------------------------------------------------------------ Y-alphabet


def y_letter_pair(y: int) -> int:
    """Index ``j`` of the pair ``{y_(2j-1), y_(2j)}`` containing ``y``."""
    return (abs(y) + 1) // 2


def x_form(w: Iterable[int]) -> Word:
    """Substitute ``y_(2j-1) -> x_j`` and ``y_(2j) -> x_j**2`` and freely reduce."""
    out = []
    for y in w:
        j = y_letter_pair(y)
        s = 1 if y > 0 else -1
        out.extend([s * j] * (2 if abs(y) % 2 == 0 else 1))
    return free_reduce(out)


def x_form_raw(w: Iterable[int]) -> Word:
    out = []
    for y in w:
        j = y_letter_pair(y)
        s = 1 if y > 0 else -1
        out.extend([s * j] * (2 if abs(y) % 2 == 0 else 1))
    return tuple(out)


def is_pair_free(w: Sequence[int]) -> bool:
    return all(y_letter_pair(w[i]) != y_letter_pair(w[i + 1]) for i in range(len(w) - 1))


def pairfree_exponent(m: int, l: float) -> int:
    """Smallest ``t >= 2`` with ``4ml/(l**t - 4m) < 4m - 4 - l``."""
    if not 0 < l < 4 * m - 4:
        raise ValueError("need 0 < l < 4m - 4")
    return _smallest_t(4 * m, l, 4 * m - 4 - l)


def count_pairfree_aperiodic_Y(m: int, r: int, t: int, budget: int | None = None, jobs: int = 1) -> int:
    """Pair-free ``t``-aperiodic words of Y-length ``r`` over ``2m`` Y-letters."""
    if m < 1:
        raise ValueError("m must be positive")
    return _sharded_aperiodic("pairfree", m, r, t, budget, jobs)


def pairfree_lower_bound_check(m: int, r: int, l: float, budget: int | None = None, jobs: int = 1):
    t = pairfree_exponent(m, l)
    reports = []
    for j in range(r + 1):
        exact = count_pairfree_aperiodic_Y(m, j, t, budget, jobs)
        reports.append(
            CensusReport(m, j, exact, _safe_pow(l, j), m >= 3, t=t, extra={"l": l, "kind": "lower"})
        )
    holds = all(Fraction(rep.exact) >= Fraction(l) ** rep.r for rep in reports)
    return t, holds, reports


def iter_pairfree_words(m: int, r: int):
    nxt = _pairfree_next(m)

    def rec(prefix):
        if len(prefix) == r:
            yield tuple(prefix)
            return
        for l in nxt(prefix[-1] if prefix else None):
            prefix.append(l)
            yield from rec(prefix)
            prefix.pop()

    yield from rec([])


# ------------------------------------------------------------ binomial tails


def binomial_tail(r: int, lam: float) -> int:
    """``sum_{0 <= j <= lam*r} C(r, j)`` as an exact integer."""
    if r < 0:
        raise ValueError("r must be non-negative")
    top = math.floor(Fraction(lam) * r)
    return sum(math.comb(r, j) for j in range(0, min(top, r) + 1))


def tail_bound_check(r: int, lam: float, c: float, d: float) -> bool:
    """Exact check of ``binomial_tail(r, lam) <= c * d**r``."""
    if not 0 < lam < 0.5:
        raise ValueError("tail bound needs 0 < lambda < 1/2")
    if not 0 < d < 2:
        raise ValueError("tail bound needs 0 < d < 2")
    return Fraction(binomial_tail(r, lam)) <= Fraction(c) * Fraction(d) ** r


def _unbalanced_shard(args):
    m, r, first, threshold, limit = args
    counter = Counter(limit)
    nxt = _pairfree_next(m)
    even = odd = either = 0
    stack = [(first,)]
    # iterative DFS over pair-free words starting with `first`
    while stack:
        w = stack.pop()
        counter.tick()
        if len(w) == r:
            n_even = sum(1 for y in w if abs(y) % 2 == 0)
            n_odd = r - n_even
            e = n_even <= threshold
            o = n_odd <= threshold
            even += e
            odd += o
            either += e or o
            continue
        for l in reversed(nxt(w[-1])):
            stack.append(w + (l,))
    return (even, odd, either), counter.used


def count_unbalanced(m: int, r: int, balance: float = BALANCE, budget: int | None = None, jobs: int = 1) -> CensusReport:
    """Pair-free Y-words of length ``r`` with few even or few odd letters.

    ``exact`` counts words whose even-letter count or odd-letter count is at
    most ``balance * r``; ``bound`` is twice the single-parity dominating
    value ``(2m)**r * sum_{k <= balance r} C(r, k)`` (one copy per parity).
    """
    if r < 1:
        raise ValueError("r must be positive")
    limit = resolve_budget(budget)
    threshold = Fraction(balance) * r
    firsts = _pairfree_next(m)(None)
    parts = shard_map(_unbalanced_shard, [(m, r, f, threshold, limit) for f in firsts], jobs)
    even = odd = either = used = 0
    for (e, o, x), n in parts:
        even += e
        odd += o
        either += x
        used += n
    if used > limit:
        raise BudgetExceeded(used, limit)
    dominating = (2 * m) ** r * binomial_tail(r, balance)
    return CensusReport(
        m,
        r,
        either,
        2 * dominating,
        True,
        theta=balance,
        extra={"exact_few_even": even, "exact_few_odd": odd, "dominating_per_parity": dominating},
    )
