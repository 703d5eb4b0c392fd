"""Burnside-type presentations built rank by rank, modelled in the free group.

Every group-level question (equality, conjugacy, order) is answered in the
free group, which is exact for words no longer than the low-rank regime cap
``n // 6``: relators have length at least ``n``, so none of them fits inside
the balls involved.  Questions outside the cap raise :class:`RegimeError`.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import asdict, dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

from ._runtime import Counter, RegimeError, resolve_budget
from .census import THETA, is_theta_word
from .words import (
    Alphabet,
    Word,
    conj_class_key,
    count_reduced_words,
    cyclic_reduce,
    format_word,
    free_conjugate,
    free_reduce,
    inverse,
    is_conjugate_into_subalphabet,
    is_cyclically_reduced,
    iter_reduced_words,
    parse_word,
    primitive_root,
    rotate,
    word_key,
)

FORMAT = "burnside-lab/presentation"
VERSION = 1

VARIANTS = ("maximal", "avoid-subgroup", "theta-filtered", "coprime-split", "schedule-gated")


def regime_cap(n: int) -> int:
    return n // 6


# ------------------------------------------------------------ parameters


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class ParameterSystem:
    """The small parameters ``theta > 1/m > beta > gamma > eps > zeta > 1/n``.

    ``t`` is the aperiodicity exponent used by the distinctness condition
    ``eps * n > t``.
    """

    m: int = 2
    theta: float = THETA
    beta: float = 0.02
    gamma: float = 0.01
    eps: float = 0.005
    zeta: float = 0.002
    n: int = 1001
    t: int = 3

    def __post_init__(self):
        for name in ("theta", "beta", "gamma", "eps", "zeta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if self.n % 2 == 0:
            raise ValueError("exponent n must be odd")

    @property
    def beta_bar(self) -> float:
        return 1 - self.beta

    @property
    def gamma_bar(self) -> float:
        return 1 - self.gamma

    @property
    def regime_cap(self) -> int:
        return regime_cap(self.n)

    def chain(self) -> list[tuple[str, float]]:
        return [
            ("theta", self.theta),
            ("1/m", 1 / self.m),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("eps", self.eps),
            ("zeta", self.zeta),
            ("1/n", 1 / self.n),
        ]

    def chain_ok(self) -> bool:
        values = [v for _, v in self.chain()]
        return all(a > b for a, b in zip(values, values[1:]))

    def chain_violations(self) -> list[str]:
        c = self.chain()
        return [f"{a} > {b} fails ({x:g} <= {y:g})" for (a, x), (b, y) in zip(c, c[1:]) if not x > y]

    def side_conditions(self) -> list[Condition]:
        """Recorded inequalities, each tagged by the argument that needs it."""
        lhs2 = 0.5 + 2 * self.beta + self.eps
        lhs3 = (1 + self.gamma) / self.beta_bar
        return [
            Condition("aperiodic-distinctness: eps*n > t", self.eps * self.n, self.t, self.eps * self.n > self.t),
            Condition("contiguity-degree: 1/2 + 2beta + eps < 1 - gamma", lhs2, self.gamma_bar, lhs2 < self.gamma_bar),
            Condition("cell-boundary: (1 + gamma)/(1 - beta) < 3/2", lhs3, 1.5, lhs3 < 1.5),
        ]

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "ParameterSystem":
        return cls(**data)


# ------------------------------------------------------------ schedule


@dataclass(frozen=True)
class RadiusSchedule:
    """Radii ``0 = r0 < r1 < r2 < ...``; ``j`` is free iff ``r_i <= j < r_{i+1}`` with ``i`` even."""

    K: int
    r1: int
    radii: tuple[int, ...]

    def interval_index(self, j: int) -> int:
        if j < 0:
            raise ValueError("radius must be non-negative")
        if j >= self.radii[-1]:
            raise ValueError(f"radius {j} beyond the computed horizon")
        return bisect_right(self.radii, j) - 1

    def is_free(self, j: int) -> bool:
        return self.interval_index(j) % 2 == 0

    def classify(self, j: int) -> str:
        return "free" if self.is_free(j) else "torsion"

    def intervals(self) -> list[tuple[int, int, str]]:
        return [
            (a, b, "free" if i % 2 == 0 else "torsion")
            for i, (a, b) in enumerate(zip(self.radii, self.radii[1:]))
        ]

    def satisfies_gamma(self, gamma: float) -> bool:
        return self.K > 2 / gamma

    def to_json(self) -> dict:
        return {"K": self.K, "r1": self.r1, "radii": list(self.radii)}


def schedule(K: int, r1: int, horizon: int) -> RadiusSchedule:
    """Radii up to the first one exceeding ``horizon`` (so every ``j <= horizon`` is classified)."""
    if K < 1 or r1 < 1:
        raise ValueError("need K >= 1 and r1 >= 1")
    radii = [0, r1]
    while radii[-1] <= horizon:
        i1 = len(radii)  # index of the radius being added
        factor = 2 * K if i1 % 2 == 0 else 8 * K**3
        radii.append(factor * radii[-1])
    return RadiusSchedule(K, r1, tuple(radii))


# ------------------------------------------------------------ periods


@dataclass(frozen=True)
class Period:
    word: Word
    exponent: int

    @property
    def rank(self) -> int:
        return len(self.word)

    @property
    def key(self) -> Word:
        return conj_class_key(self.word)


@dataclass(frozen=True)
class PeriodFilter:
    """``all``, ``theta``, ``not-theta`` or ``avoid`` (a set of generator ids)."""

    kind: str = "all"
    theta: float = THETA
    sub: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("all", "theta", "not-theta", "avoid"):
            raise ValueError(f"unknown filter {self.kind!r}")

    def accepts(self, w: Word) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "theta":
            return is_theta_word(w, self.theta)
        if self.kind == "not-theta":
            return not is_theta_word(w, self.theta)
        return not is_conjugate_into_subalphabet(w, self.sub)


def class_members(key: Word) -> list[Word]:
    """Cyclic shifts of ``key`` and of its inverse, sorted by canonical word order."""
    inv = inverse(key)
    members = {rotate(key, s) for s in range(len(key))} | {rotate(inv, s) for s in range(len(key))}
    return sorted(members, key=word_key)


def iter_period_classes(rank: int, i: int, budget: int | None = None):
    """Yield the key of every class of cyclically reduced primitive words of length ``i``."""
    counter = Counter(resolve_budget(budget))
    for w in iter_reduced_words(rank, i):
        counter.tick()
        if not is_cyclically_reduced(w) or primitive_root(w)[1] != 1:
            continue
        if conj_class_key(w) == w:
            yield w


def enumerate_periods(
    alphabet: Alphabet,
    i: int,
    filt: PeriodFilter | None = None,
    exponent: int = 1001,
    budget: int | None = None,
) -> list[Period]:
    """One representative per class passing ``filt``: its least accepted member."""
    if i < 1:
        raise ValueError("rank must be at least 1")
    filt = filt or PeriodFilter()
    out = []
    for key in iter_period_classes(alphabet.rank, i, budget):
        rep = _least_accepted(key, filt)
        if rep is not None:
            out.append(Period(rep, exponent))
    return out


def _least_accepted(key: Word, filt: PeriodFilter) -> Word | None:
    if filt.kind == "all":
        return key
    for w in class_members(key):
        if filt.accepts(w):
            return w
    return None


# ------------------------------------------------------------ presentations


@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    params: ParameterSystem
    variant: str
    ranks: tuple[tuple[Period, ...], ...]
    options: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def max_rank(self) -> int:
        return len(self.ranks)

    @property
    def regime_cap(self) -> int:
        return self.params.regime_cap

    def periods(self) -> list[Period]:
        return [p for rank in self.ranks for p in rank]

    def rank(self, i: int) -> tuple[Period, ...]:
        return self.ranks[i - 1]

    @cached_property
    def index(self) -> dict[Word, Period]:
        return {p.key: p for p in self.periods()}

    def without(self, period: Period) -> "Presentation":
        ranks = tuple(tuple(q for q in rank if q != period) for rank in self.ranks)
        return replace(self, ranks=ranks)

    def with_period(self, period: Period) -> "Presentation":
        ranks = [list(r) for r in self.ranks]
        while len(ranks) < period.rank:
            ranks.append([])
        ranks[period.rank - 1].append(period)
        return replace(self, ranks=tuple(tuple(r) for r in ranks))

    def to_json(self) -> dict:
        return {
            "format": FORMAT,
            "version": VERSION,
            "alphabet": self.alphabet.to_json(),
            "params": self.params.to_json(),
            "variant": self.variant,
            "options": self.options,
            "ranks": [
                {
                    "rank": i + 1,
                    "periods": [
                        {"word": format_word(p.word, self.alphabet), "exponent": p.exponent} for p in rank
                    ],
                }
                for i, rank in enumerate(self.ranks)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Presentation":
        if data.get("format") != FORMAT:
            raise ValueError("not a presentation document")
        if data.get("version") != VERSION:
            raise ValueError(f"unsupported presentation version {data.get('version')!r}")
        alphabet = Alphabet.from_json(data["alphabet"])
        ranks = []
        for i, entry in enumerate(data["ranks"]):
            if entry["rank"] != i + 1:
                raise ValueError("ranks must be listed in order")
            ranks.append(
                tuple(Period(parse_word(p["word"], alphabet), int(p["exponent"])) for p in entry["periods"])
            )
        return cls(
            alphabet,
            ParameterSystem.from_json(data["params"]),
            data["variant"],
            tuple(ranks),
            dict(data.get("options", {})),
        )


def empty_presentation(alphabet: Alphabet, params: ParameterSystem | None = None) -> Presentation:
    return Presentation(alphabet, params or ParameterSystem(m=alphabet.rank), "maximal", ())


def build_presentation(
    alphabet: Alphabet,
    params: ParameterSystem,
    max_rank: int,
    variant: str = "maximal",
    *,
    sub: Sequence[str] = ("a", "b"),
    radii: RadiusSchedule | None = None,
    n1: int | None = None,
    n2: int | None = None,
    check_regime: bool = True,
    budget: int | None = None,
) -> Presentation:
    """Populate ranks ``1..max_rank`` according to ``variant``.

    ``coprime-split`` gives every class with a theta-member its least such
    member and exponent ``n1``; the other classes keep their key and get
    ``n2``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if max_rank < 0:
        raise ValueError("max_rank must be non-negative")
    if check_regime and max_rank > params.regime_cap:
        raise RegimeError(f"max_rank {max_rank} exceeds the regime cap {params.regime_cap} for n={params.n}")
    n = params.n
    options: dict = {}
    if variant == "avoid-subgroup":
        ids = alphabet.named(*sub) if sub else frozenset()
        if len(ids) < 2:
            raise ValueError("avoid-subgroup needs a sub-alphabet of named generators such as a, b")
        filt = PeriodFilter("avoid", sub=ids)
        options["sub"] = list(sub)
    elif variant == "theta-filtered":
        filt = PeriodFilter("theta", params.theta)
    else:
        filt = PeriodFilter()
    if variant == "coprime-split":
        n1 = n if n1 is None else n1
        n2 = n + 2 if n2 is None else n2
        for e in (n1, n2):
            if e % 2 == 0 or e < n:
                raise ValueError("exponents must be odd and at least n")
        options.update(n1=n1, n2=n2)
    if variant == "schedule-gated":
        if radii is None:
            raise ValueError("schedule-gated needs a radius schedule")
        if radii.radii[-1] <= max_rank:
            raise ValueError("schedule horizon does not cover max_rank")
        options["schedule"] = radii.to_json()

    ranks = []
    theta_filter = PeriodFilter("theta", params.theta)
    for i in range(1, max_rank + 1):
        if variant == "schedule-gated" and radii.is_free(i):
            ranks.append(())
            continue
        if variant == "coprime-split":
            rank = []
            for key in iter_period_classes(alphabet.rank, i, budget):
                rep = _least_accepted(key, theta_filter)
                rank.append(Period(key, n2) if rep is None else Period(rep, n1))
            ranks.append(tuple(rank))
        else:
            ranks.append(tuple(enumerate_periods(alphabet, i, filt, n, budget)))
    return Presentation(alphabet, params, variant, tuple(ranks), options)


def check_conditions(p: Presentation) -> list[str]:
    """Violations of the rank, primitivity and distinct-class conditions (empty if all hold)."""
    problems = []
    for i, rank in enumerate(p.ranks, start=1):
        keys = set()
        for per in rank:
            if per.rank != i:
                problems.append(f"L1: {format_word(per.word, p.alphabet)} listed in rank {i}")
            if not is_cyclically_reduced(per.word) or primitive_root(per.word)[1] != 1:
                problems.append(f"L2: {format_word(per.word, p.alphabet)} is a conjugate of a proper power")
            if per.exponent % 2 == 0 or per.exponent < p.params.n:
                problems.append(f"exponent {per.exponent} of {format_word(per.word, p.alphabet)} invalid")
            k = per.key
            if k in keys:
                problems.append(f"L3: {format_word(per.word, p.alphabet)} repeats a class in rank {i}")
            keys.add(k)
    return problems


def diff_presentations(a: Presentation, b: Presentation) -> dict:
    """Per-rank added/removed period words and exponent changes from ``a`` to ``b``."""
    out: dict = {"variant": [a.variant, b.variant] if a.variant != b.variant else None}
    if a.params != b.params:
        out["params"] = {
            k: [v, getattr(b.params, k)] for k, v in asdict(a.params).items() if v != getattr(b.params, k)
        }
    ranks = []
    for i in range(1, max(a.max_rank, b.max_rank) + 1):
        pa = {per.word: per.exponent for per in (a.rank(i) if i <= a.max_rank else ())}
        pb = {per.word: per.exponent for per in (b.rank(i) if i <= b.max_rank else ())}
        added = sorted(set(pb) - set(pa), key=word_key)
        removed = sorted(set(pa) - set(pb), key=word_key)
        changed = sorted((w for w in set(pa) & set(pb) if pa[w] != pb[w]), key=word_key)
        if added or removed or changed:
            ranks.append(
                {
                    "rank": i,
                    "added": [format_word(w, b.alphabet) for w in added],
                    "removed": [format_word(w, a.alphabet) for w in removed],
                    "exponent_changed": [[format_word(w, a.alphabet), pa[w], pb[w]] for w in changed],
                }
            )
    out["ranks"] = ranks
    return out


# ------------------------------------------------------------ torsion


@dataclass(frozen=True)
class TorsionVerdict:
    kind: str  # trivial | torsion | free-surrogate
    rank_bound: int
    order: int | None = None
    period: Word | None = None
    power: int | None = None
    root: Word | None = None

    def satisfies_law(self, n: int) -> bool:
        """Whether ``g**n == 1``."""
        if self.kind == "trivial":
            return True
        return self.kind == "torsion" and n % self.order == 0


def classify_torsion(w: Sequence[int], p: Presentation, check_regime: bool = True) -> TorsionVerdict:
    """Order of ``w`` in the group presented by ``p``, decided in the free group."""
    w = free_reduce(w)
    cap = p.regime_cap
    if check_regime and len(w) > cap:
        raise RegimeError(f"word of length {len(w)} exceeds the regime cap {cap}")
    if not w:
        return TorsionVerdict("trivial", cap)
    core, _ = cyclic_reduce(w)
    root, k = primitive_root(core)
    per = p.index.get(conj_class_key(root))
    if per is None:
        return TorsionVerdict("free-surrogate", cap, root=root)
    if not free_conjugate(root, per.word):
        k = -k
    order = per.exponent // math.gcd(per.exponent, abs(k))
    return TorsionVerdict("torsion", cap, order=order, period=per.word, power=k)


# ------------------------------------------------------------ ball census


def sphere_size(m: int, j: int) -> int:
    return count_reduced_words(m, j)


@dataclass
class BallReport:
    radius: int
    n: int
    regime_cap: int
    sphere_sizes: list[int]
    sphere_torsion: list[int]
    sphere_law: list[int]
    per_period: dict[Word, int]
    comparisons: dict

    @property
    def ball_size(self) -> int:
        return sum(self.sphere_sizes)

    @property
    def torsion_count(self) -> int:
        """Nontrivial elements of finite order."""
        return sum(self.sphere_torsion)

    @property
    def torsion_density(self) -> float:
        return self.torsion_count / self.ball_size

    @property
    def law_count(self) -> int:
        """Elements with ``g**n == 1``, identity included."""
        return sum(self.sphere_law)

    @property
    def law_density(self) -> float:
        return self.law_count / self.ball_size

    def granularity(self) -> float:
        """Largest density contributed by a single period."""
        return max(self.per_period.values(), default=0) / self.ball_size

    def rows(self) -> list[dict]:
        return [
            {"j": j, "sphere": s, "torsion": t, "law": l}
            for j, (s, t, l) in enumerate(zip(self.sphere_sizes, self.sphere_torsion, self.sphere_law))
        ]

    def summary(self) -> dict:
        return {
            "radius": self.radius,
            "n": self.n,
            "regime_cap": self.regime_cap,
            "ball_size": self.ball_size,
            "torsion_count": self.torsion_count,
            "torsion_density": self.torsion_density,
            "law_count": self.law_count,
            "law_density": self.law_density,
            "granularity": self.granularity(),
            "comparisons": self.comparisons,
        }


def ball_census(p: Presentation, r: int, check_regime: bool = True, budget: int | None = None) -> BallReport:
    """Classify every element of the ball of radius ``r``."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    if check_regime and r > p.regime_cap:
        raise RegimeError(f"radius {r} exceeds the regime cap {p.regime_cap}")
    counter = Counter(resolve_budget(budget))
    m = p.alphabet.rank
    n = p.params.n
    sizes, tors, law = [], [], []
    per_period = {per.key: 0 for per in p.periods()}
    for j in range(r + 1):
        s = t = l = 0
        for w in iter_reduced_words(m, j):
            counter.tick()
            v = classify_torsion(w, p, check_regime=False)
            s += 1
            if v.kind == "torsion":
                t += 1
                per_period[conj_class_key(v.period)] += 1
            l += v.satisfies_law(n)
        sizes.append(s)
        tors.append(t)
        law.append(l)
    report = BallReport(r, n, p.regime_cap, sizes, tors, law, per_period, {})
    report.comparisons = _ball_comparisons(report, m)
    return report


def _ball_comparisons(rep: BallReport, m: int) -> dict:
    r = rep.radius
    base = 2 * m - 1
    rank = max((len(k) for k in rep.per_period), default=0)
    return {
        "growth": {
            "value": rep.ball_size,
            "bound": base ** (0.999 * r),
            "holds": rep.ball_size > base ** (0.999 * r),
            "hypotheses_ok": False,  # needs n large enough; not checkable
        },
        "single_period": {
            "value": max(rep.per_period.values(), default=0),
            "bound": base ** (0.6 * r),
            "holds": max(rep.per_period.values(), default=0) <= base ** (0.6 * r),
            "hypotheses_ok": False,  # needs m large enough
        },
        "finite_rank": {
            "value": rep.law_count,
            "bound": base ** (0.9 * r),
            "holds": rep.law_count < base ** (0.9 * r),
            "hypotheses_ok": rank < 0.1 * r and r > 10,
        },
    }


# ------------------------------------------------------------ density tuning


@dataclass
class TuneResult:
    presentation: Presentation
    log: list[dict]
    density: float
    target: float
    granularity: float
    reachable: bool


def tune_density(p: Presentation, r: int, q: float, tol: float = 0.0, budget: int | None = None) -> TuneResult:
    """Drop periods (longest first, then reverse canonical order) until the density is near ``q``.

    Drops continue while the density exceeds ``q + tol`` and each drop
    brings it closer to ``q``, so the final distance is at most half the
    largest single-period step unless ``q`` is above the starting density.
    Only periods that contribute to the ball of radius ``r`` are candidates;
    dropping a period removes exactly the ball elements classified through it.
    """
    if not 0 <= q <= 1:
        raise ValueError("target must lie in [0, 1]")
    rep = ball_census(p, r, budget=budget)
    size = rep.ball_size
    g = rep.granularity()
    count = rep.torsion_count
    log: list[dict] = []
    if q > rep.torsion_density + tol:
        return TuneResult(p, log, rep.torsion_density, q, g, False)
    order = sorted(
        (per for per in p.periods() if rep.per_period[per.key] > 0),
        key=lambda per: (per.rank, word_key(per.key)),
        reverse=True,
    )
    current = p
    for per in order:
        before = count / size
        after = (count - rep.per_period[per.key]) / size
        # stop once within tol, or when the next drop would move away from q
        if before - q <= tol or abs(after - q) >= abs(before - q):
            break
        count -= rep.per_period[per.key]
        current = current.without(per)
        log.append(
            {
                "dropped": format_word(per.word, p.alphabet),
                "rank": per.rank,
                "before": before,
                "after": count / size,
                "step": before - count / size,
            }
        )
    return TuneResult(current, log, count / size, q, g, True)
