"""Random walks: exact return probabilities on free groups, Monte Carlo torsion
estimates for presentations, convolution on finite groups and limit-point
analysis of probability sequences.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from ._runtime import Counter, RegimeError, resolve_budget, shard_map
from .presentations import Presentation, RadiusSchedule, classify_torsion, iter_period_classes
from .words import Word, free_reduce

BLOCK = 4096
EXACT_UP_TO = 64


# ------------------------------------------------------------ step distributions


@dataclass(frozen=True)
class StepDistribution:
    """Finitely supported probability measure; ``identity`` labels the group identity."""

    weights: tuple[tuple[Hashable, object], ...]
    identity: Hashable = 0

    def __post_init__(self):
        if not self.weights:
            raise ValueError("empty support")
        total = sum(w for _, w in self.weights)
        if any(w <= 0 for _, w in self.weights):
            raise ValueError("weights must be positive")
        if abs(float(total) - 1) > 1e-12:
            raise ValueError(f"weights sum to {float(total)}, not 1")
        labels = [g for g, _ in self.weights]
        if len(set(labels)) != len(labels):
            raise ValueError("repeated support label")

    @classmethod
    def from_mapping(cls, mapping: Mapping, identity: Hashable = 0) -> "StepDistribution":
        return cls(tuple(mapping.items()), identity)

    @classmethod
    def uniform(cls, labels: Iterable[Hashable], identity: Hashable = 0) -> "StepDistribution":
        labels = list(labels)
        w = Fraction(1, len(labels))
        return cls(tuple((g, w) for g in labels), identity)

    @classmethod
    def lazy_free(cls, m: int) -> "StepDistribution":
        """Uniform on ``{1, x1, X1, ..., xm, Xm}``."""
        return cls.uniform([0] + [s * g for g in range(1, m + 1) for s in (1, -1)])

    def as_dict(self) -> dict:
        return dict(self.weights)

    @property
    def support(self) -> list:
        return [g for g, _ in self.weights]

    @property
    def lazy(self) -> bool:
        return self.as_dict().get(self.identity, 0) > 0

    def symmetric(self, inv: Callable = lambda g: -g) -> bool:
        d = self.as_dict()
        return all(d.get(inv(g), 0) == w for g, w in d.items())


def generates_free_group(words: Iterable[Sequence[int]], m: int) -> bool:
    """Whether ``words`` generate all of ``F_m``, by folding their Stallings graph."""
    parent: list[int] = [0]

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def new_vertex() -> int:
        parent.append(len(parent))
        return len(parent) - 1

    pending: list[tuple[int, int, int]] = []
    for w in words:
        w = free_reduce(w)
        v = 0
        for i, l in enumerate(w):
            u = 0 if i == len(w) - 1 else new_vertex()
            pending.append((v, l, u))
            v = u
    # fold: union vertices reached from one vertex by the same label
    adj: dict[int, dict[int, set[int]]] = {}
    for v, l, u in pending:
        adj.setdefault(v, {}).setdefault(l, set()).add(u)
        adj.setdefault(u, {}).setdefault(-l, set()).add(v)
    changed = True
    while changed:
        changed = False
        merged: dict[int, dict[int, set[int]]] = {}
        for v, out in adj.items():
            rv = find(v)
            for l, targets in out.items():
                merged.setdefault(rv, {}).setdefault(l, set()).update(find(t) for t in targets)
        for v, out in merged.items():
            for l, targets in out.items():
                if len(targets) > 1:
                    it = iter(targets)
                    first = next(it)
                    for t in it:
                        parent[find(t)] = find(first)
                    changed = True
        adj = merged
    core = {find(v): {l: {find(t) for t in ts} for l, ts in out.items()} for v, out in adj.items()}
    # prune hanging trees away from the base point
    base = find(0)
    alive = set(core) | {base}
    while True:
        drop = [v for v in alive if v != base and sum(len(ts & alive) for ts in core.get(v, {}).values()) <= 1]
        if not drop:
            break
        alive -= set(drop)
    if alive != {base}:
        return False
    loops = {abs(l) for l, ts in core.get(base, {}).items() if base in ts}
    return loops >= set(range(1, m + 1))


# ------------------------------------------------------------ exact distance chain


@dataclass(frozen=True)
class DistanceChain:
    """Law of ``|X_r|`` for the lazy uniform walk on ``F_m``."""

    m: int

    def kernel(self, exact: bool = True):
        one = Fraction(1) if exact else 1.0
        q = one / (2 * self.m + 1)
        return {
            "up": (2 * self.m - 1) * q,
            "down": q,
            "stay": q,
            "up_from_0": 2 * self.m * q,
        }

    def step(self, dist: list, exact: bool = True) -> list:
        k = self.kernel(exact)
        out = [0 * k["stay"]] * (len(dist) + 1)
        for d, p in enumerate(dist):
            if not p:
                continue
            out[d] += p * k["stay"]
            if d == 0:
                out[1] += p * k["up_from_0"]
            else:
                out[d + 1] += p * k["up"]
                out[d - 1] += p * k["down"]
        return out


def exact_distance_distribution(m: int, r: int, exact: bool | None = None) -> list:
    """Distribution of ``|X_r|`` over ``0..r``; rational up to ``r = 64`` unless told otherwise."""
    if r < 0:
        raise ValueError("r must be non-negative")
    if exact is None:
        exact = r <= EXACT_UP_TO
    chain = DistanceChain(m)
    dist = [Fraction(1) if exact else 1.0]
    for _ in range(r):
        dist = chain.step(dist, exact)
    return dist


def return_probabilities(m: int, r_max: int, exact: bool = False) -> list:
    """``Pr(X_r = e)`` for ``r = 0..r_max``."""
    chain = DistanceChain(m)
    dist = [Fraction(1) if exact else 1.0]
    out = [dist[0]]
    for _ in range(r_max):
        dist = chain.step(dist, exact)
        out.append(dist[0])
    return out


def kesten_radius(m: int) -> float:
    """Spectral radius of the lazy uniform walk on ``F_m``."""
    return (1 + 2 * math.sqrt(2 * m - 1)) / (2 * m + 1)


@dataclass
class KestenReport:
    m: int
    r_max: int
    rho_hat: float
    root: float
    fitted: float
    holds: bool
    worst_ratio: float


def kesten_decay_check(m: int, r_max: int) -> KestenReport:
    """Check ``Pr(X_r = e) <= rho_hat**r`` for ``2 <= r <= r_max``.

    ``root`` is ``Pr(X_{r_max} = e) ** (1/r_max)``; ``fitted`` removes the
    ``r**-1.5`` prefactor by a least-squares fit over the second half of
    the range.
    """
    if r_max < 10:
        raise ValueError("r_max must be at least 10")
    rho = kesten_radius(m)
    probs = return_probabilities(m, r_max)
    ratios = [probs[r] / rho**r for r in range(2, r_max + 1)]
    rs = np.arange(r_max // 2, r_max + 1)
    y = np.log([probs[r] for r in rs]) + 1.5 * np.log(rs)
    slope = np.polyfit(rs, y, 1)[0]
    return KestenReport(
        m,
        r_max,
        rho,
        probs[r_max] ** (1 / r_max),
        float(math.exp(slope)),
        all(x <= 1 for x in ratios),
        max(ratios),
    )


def inequality3(rho: float, gamma: float, m: int) -> tuple[float, bool]:
    """``rho**(1 + 6 gamma) * (2m + 1)**(7 gamma)`` and whether it is below 1."""
    value = rho ** (1 + 6 * gamma) * (2 * m + 1) ** (7 * gamma)
    return value, value < 1


# ------------------------------------------------------------ Monte Carlo


def presentation_id(p: Presentation) -> str:
    blob = json.dumps(p.to_json(), sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class WalkReport:
    steps: int
    samples: int
    hits: int
    torsion_hits: int
    identity_hits: int
    indeterminate: int
    seed: int
    presentation: str
    flags: dict = field(default_factory=dict)

    @property
    def determinate(self) -> int:
        return self.samples - self.indeterminate

    @property
    def p_hat(self) -> float:
        """Estimate of ``Pr((X_r)**n == 1)``, identity included."""
        return self.hits / self.determinate if self.determinate else float("nan")

    @property
    def se(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.determinate) if self.determinate else float("nan")

    def summary(self) -> dict:
        return {
            "steps": self.steps,
            "samples": self.samples,
            "hits": self.hits,
            "p_hat": self.p_hat,
            "se": self.se,
            "torsion_hits": self.torsion_hits,
            "identity_hits": self.identity_hits,
            "indeterminate": self.indeterminate,
            "seed": self.seed,
            "presentation": self.presentation,
            "flags": self.flags,
        }


def _block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, block)))


def reduce_batch(steps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Freely reduce each row of letters (0 = identity); returns stacks and lengths."""
    b, r = steps.shape
    stack = np.zeros((b, max(r, 1)), dtype=np.int64)
    length = np.zeros(b, dtype=np.int64)
    rows = np.arange(b)
    for t in range(r):
        l = steps[:, t]
        top = stack[rows, np.maximum(length - 1, 0)]
        cancel = (length > 0) & (l != 0) & (top == -l)
        push = (l != 0) & ~cancel
        length -= cancel
        stack[rows[push], length[push]] = l[push]
        length += push
    return stack, length


def _letter_table(step: StepDistribution) -> tuple[np.ndarray, np.ndarray]:
    labels = np.array(step.support, dtype=np.int64)
    probs = np.array([float(w) for _, w in step.weights])
    return labels, probs / probs.sum()


def _walk_block(args) -> tuple[int, int, int, int, int]:
    p, step, r, count, seed, stream, block, cap, n = args
    rng = _block_rng(seed, stream, block)
    labels, probs = _letter_table(step)
    steps = labels[rng.choice(len(labels), size=(count, r), p=probs)] if r else np.zeros((count, 0), np.int64)
    stack, length = reduce_batch(steps)
    hits = torsion = ident = indet = 0
    cache: dict[Word, object] = {}
    no_periods = not p.index
    for i in range(count):
        ln = int(length[i])
        if ln == 0:
            hits += 1
            ident += 1
            continue
        if ln > cap:
            indet += 1
            continue
        if no_periods:
            continue
        w = tuple(int(x) for x in stack[i, :ln])
        v = cache.get(w)
        if v is None:
            v = cache[w] = classify_torsion(w, p, check_regime=False)
        if v.kind == "torsion":
            torsion += 1
        hits += v.satisfies_law(n)
    return count, hits, torsion, ident, indet


def _check_letters(step: StepDistribution, m: int) -> None:
    for g in step.support:
        if not isinstance(g, (int, np.integer)) or abs(int(g)) > m:
            raise ValueError(f"step support label {g!r} is not a letter of the alphabet")


def _walk_flags(step: StepDistribution, m: int) -> dict:
    gens = [(int(g),) for g in step.support if g != 0]
    generates = generates_free_group(gens, m)
    return {"lazy": step.lazy, "symmetric": step.symmetric(), "degenerate": not generates}


def sample_walk_torsion(
    p: Presentation,
    step: StepDistribution,
    r: int,
    N: int,
    seed: int,
    jobs: int = 1,
    allow_partial: bool = False,
    stream: int = 0,
) -> WalkReport:
    """Estimate ``Pr((X_r)**n == 1)`` from ``N`` trajectories of ``r`` steps.

    Trajectories are drawn in blocks of ``BLOCK`` with one seeded stream per
    block, so the result does not depend on ``jobs``.  Past the regime cap
    the walk is refused unless ``allow_partial`` is set, in which case
    endpoints longer than the cap are counted as indeterminate.
    """
    if N <= 0:
        raise ValueError("need at least one sample")
    if r < 0:
        raise ValueError("r must be non-negative")
    m = p.alphabet.rank
    _check_letters(step, m)
    cap = p.regime_cap
    if r > cap and not allow_partial:
        raise RegimeError(f"{r} steps exceed the regime cap {cap}")
    blocks = [(b, min(BLOCK, N - b * BLOCK)) for b in range(-(-N // BLOCK))]
    args = [(p, step, r, c, seed, stream, b, cap, p.params.n) for b, c in blocks]
    parts = shard_map(_walk_block, args, jobs)
    tot = [sum(col) for col in zip(*parts)]
    return WalkReport(r, tot[0], tot[1], tot[2], tot[3], tot[4], seed, presentation_id(p), _walk_flags(step, m))


@dataclass
class ProductWalkReport:
    joint: WalkReport
    first: WalkReport
    second: WalkReport
    first_steps: int

    @property
    def product(self) -> float:
        return self.first.p_hat * self.second.p_hat

    @property
    def se_product(self) -> float:
        a, b = self.first, self.second
        return math.sqrt((b.p_hat * a.se) ** 2 + (a.p_hat * b.se) ** 2)

    @property
    def combined_se(self) -> float:
        return math.hypot(self.joint.se, self.se_product)

    @property
    def deviation(self) -> float:
        return abs(self.joint.p_hat - self.product)

    @property
    def consistent(self) -> bool:
        """Joint estimate within 3 combined standard errors of the product of marginals."""
        se = self.combined_se
        if se == 0:
            return self.deviation == 0
        return self.deviation <= 3 * se

    def summary(self) -> dict:
        return {
            "first_steps": self.first_steps,
            "second_steps": self.second.steps,
            "joint": self.joint.p_hat,
            "joint_se": self.joint.se,
            "first": self.first.p_hat,
            "second": self.second.p_hat,
            "product": self.product,
            "combined_se": self.combined_se,
            "consistent": self.consistent,
        }


def _pair_block(args) -> tuple[int, int]:
    p, step, r1, r2, count, seed, stream, block, cap, n = args
    rng = _block_rng(seed, stream, block)
    labels, probs = _letter_table(step)
    laws = []
    for r in (r1, r2):
        steps = labels[rng.choice(len(labels), size=(count, r), p=probs)]
        stack, length = reduce_batch(steps)
        ok = np.zeros(count, dtype=bool)
        for i in range(count):
            ln = int(length[i])
            if ln == 0:
                ok[i] = True
            elif p.index:
                ok[i] = classify_torsion(tuple(int(x) for x in stack[i, :ln]), p, check_regime=False).satisfies_law(n)
        laws.append(ok)
    return count, int(np.sum(laws[0] & laws[1]))


def product_walk_torsion(
    p: Presentation,
    K: int,
    step: StepDistribution,
    r: int,
    N: int,
    seed: int,
    jobs: int = 1,
    first_factor: int | None = None,
) -> ProductWalkReport:
    """Walk ``Z_r = (X_{a r}, X'_r)`` with independent coordinates, ``a = 4 K**2`` by default.

    ``first_factor=1`` gives the square walk.  The marginals are estimated
    from separate streams, so the product of marginals and the joint
    estimate are independent.
    """
    if N <= 0:
        raise ValueError("need at least one sample")
    a = 4 * K * K if first_factor is None else first_factor
    r1 = a * r
    cap = p.regime_cap
    if r1 > cap:
        raise RegimeError(f"{r1} steps exceed the regime cap {cap}")
    _check_letters(step, p.alphabet.rank)
    blocks = [(b, min(BLOCK, N - b * BLOCK)) for b in range(-(-N // BLOCK))]
    args = [(p, step, r1, r, c, seed, 2, b, cap, p.params.n) for b, c in blocks]
    parts = shard_map(_pair_block, args, jobs)
    count = sum(c for c, _ in parts)
    hits = sum(h for _, h in parts)
    joint = WalkReport(r, count, hits, 0, 0, 0, seed, presentation_id(p), _walk_flags(step, p.alphabet.rank))
    first = sample_walk_torsion(p, step, r1, N, seed, jobs, stream=0)
    second = sample_walk_torsion(p, step, r, N, seed, jobs, stream=1)
    return ProductWalkReport(joint, first, second, r1)


# ------------------------------------------------------------ finite groups and TV


def tv_distance(mu: Mapping, nu: Mapping):
    """Half the L1 distance; missing labels count as zero."""
    labels = set(mu) | set(nu)
    return sum(abs(mu.get(g, 0) - nu.get(g, 0)) for g in labels) / 2


class FiniteGroup:
    """A finite group given by its elements, identity and multiplication."""

    def __init__(self, elements: Sequence[Hashable], identity: Hashable, mul: Callable, name: str = "group"):
        self.elements = list(elements)
        self.identity = identity
        self.mul = mul
        self.name = name

    @property
    def order(self) -> int:
        return len(self.elements)

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], identity: int = 0) -> "FiniteGroup":
        k = len(table)
        if any(len(row) != k for row in table):
            raise ValueError("multiplication table must be square")
        return cls(range(k), identity, lambda a, b: table[a][b], "table")

    def convolve(self, mu: Mapping, nu: Mapping) -> dict:
        out: dict = {}
        for a, pa in mu.items():
            for b, pb in nu.items():
                c = self.mul(a, b)
                out[c] = out.get(c, 0) + pa * pb
        return out


def cyclic_group(k: int) -> FiniteGroup:
    return FiniteGroup(range(k), 0, lambda a, b: (a + b) % k, f"Z/{k}")


def dihedral_group(k: int) -> FiniteGroup:
    """Symmetries of the ``k``-gon (order ``2k``); elements are ``(rotation, flip)``."""

    def mul(a, b):
        (r1, f1), (r2, f2) = a, b
        return ((r1 + (-r2 if f1 else r2)) % k, f1 ^ f2)

    return FiniteGroup([(r, f) for f in (0, 1) for r in range(k)], (0, 0), mul, f"D{k}")


def lazy_uniform(group: FiniteGroup, gens: Iterable[Hashable]) -> dict:
    support = [group.identity] + [g for g in gens if g != group.identity]
    w = Fraction(1, len(support))
    return {g: w for g in support}


class NotLazyError(ValueError):
    """The step distribution puts no mass on the identity."""


@dataclass
class TVCurve:
    values: list[Fraction]
    thresholds: dict
    envelope: dict

    def floats(self) -> list[float]:
        return [float(x) for x in self.values]

    def first_below(self, eps: float) -> int | None:
        for r, v in enumerate(self.values, start=1):
            if v < eps:
                return r
        return None

    def non_increasing_from(self, start: int) -> bool:
        vals = self.values[start - 1 :]
        return all(b <= a for a, b in zip(vals, vals[1:]))


def tv_decay_curve(group: FiniteGroup, mu: Mapping, r_max: int, thresholds: Sequence[float] = ()) -> TVCurve:
    """Exact ``d_TV(mu^{*(r+1)}, mu^{*r})`` for ``r = 1..r_max`` (index ``r - 1``)."""
    if mu.get(group.identity, 0) <= 0:
        raise NotLazyError("step distribution is not lazy")
    if r_max < 1:
        raise ValueError("r_max must be positive")
    cur = dict(mu)
    values = []
    for _ in range(r_max):
        nxt = group.convolve(cur, mu)
        values.append(tv_distance(nxt, cur))
        cur = nxt
    curve = TVCurve(values, {}, {})
    curve.thresholds = {str(t): curve.first_below(t) for t in thresholds}
    curve.envelope = chernoff_envelope_fit(curve.floats())
    return curve


def chernoff_envelope_fit(values: Sequence[float]) -> dict:
    """Fit ``2 exp(-c r^(1/3)) + 2K / r^(1/3)`` in log space; diagnostic only."""
    r = np.arange(1, len(values) + 1, dtype=float)
    v = np.asarray(values, dtype=float)
    mask = v > 0
    if mask.sum() < 2:
        return {"c": None, "K": None}
    best = None
    for c in np.linspace(0.05, 10, 200):
        a = 2 * np.exp(-c * np.cbrt(r[mask]))
        b = 2 / np.cbrt(r[mask])
        # least squares for K >= 0 on the residual, then log error
        K = max(0.0, float(np.dot(b, v[mask] - a) / np.dot(b, b)))
        model = a + K * b
        err = float(np.mean((np.log(model) - np.log(v[mask])) ** 2))
        if best is None or err < best[0]:
            best = (err, float(c), K)
    return {"c": best[1], "K": best[2], "log_mse": best[0]}


# ------------------------------------------------------------ limit points


@dataclass
class LimitReport:
    eps: float
    burn_in: int
    cells: list[int]
    low: float
    high: float
    gap: float
    max_late_step: float

    @property
    def steps_vanish(self) -> bool:
        """Late consecutive differences fit inside one grid cell."""
        return self.max_late_step <= self.eps

    @property
    def connected(self) -> bool:
        """Finite-sample analogue of a connected set of partial limits.

        Only claimed when the steps vanish; a sequence that keeps jumping
        (such as an alternating one) can fill a gap of any size.
        """
        return self.steps_vanish and self.gap <= 2 * self.eps + self.max_late_step

    def summary(self) -> dict:
        return {
            "eps": self.eps,
            "burn_in": self.burn_in,
            "occupied_cells": len(self.cells),
            "low": self.low,
            "high": self.high,
            "gap": self.gap,
            "max_late_step": self.max_late_step,
            "steps_vanish": self.steps_vanish,
            "connected": self.connected,
        }


def limit_point_analysis(seq: Sequence[float], eps: float, burn_in: int | None = None) -> LimitReport:
    """Occupied ``eps``-cells of the tail of ``seq`` and the largest distance between neighbours.

    ``gap`` is ``eps`` times the largest index difference between consecutive
    occupied cells (0 for a single cell); ``burn_in`` defaults to 1% of the
    sequence.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    seq = np.asarray(seq, dtype=float)
    if burn_in is None:
        burn_in = len(seq) // 100
    tail = seq[burn_in:]
    if len(tail) == 0:
        raise ValueError("empty tail")
    cells = sorted(set(np.floor(tail / eps + 1e-9).astype(np.int64).tolist()))
    gap = max((b - a for a, b in zip(cells, cells[1:])), default=0) * eps
    late = tail[len(tail) // 2 :]
    step = float(np.max(np.abs(np.diff(late)))) if len(late) > 1 else 0.0
    return LimitReport(eps, burn_in, cells, cells[0] * eps, (cells[-1] + 1) * eps, gap, step)


def schedule_surrogate_profile(radii: RadiusSchedule, length: int) -> list[float]:
    """Stand-in torsion probabilities driven by a radius schedule.

    The value relaxes toward 1 on torsion radii and toward 0 on free radii,
    moving at most ``1/sqrt(j+1)`` per step, so consecutive differences
    vanish as in a lazy walk.
    """
    a = 0.0
    out = []
    for j in range(length):
        target = 0.0 if radii.is_free(j) else 1.0
        s = 1 / math.sqrt(j + 1)
        a += max(-s, min(s, target - a))
        out.append(a)
    return out


def alternating_profile(length: int) -> list[float]:
    return [float(j % 2) for j in range(length)]


# ------------------------------------------------------------ formal words


def formal_endpoint_counts(m: int, R: int, budget: int | None = None) -> dict[Word, int]:
    """Number of formal words of length ``R`` reducing to each reduced word."""
    counter = Counter(resolve_budget(budget))
    letters = [0] + [s * g for g in range(1, m + 1) for s in (1, -1)]
    cur: dict[Word, int] = {(): 1}
    for _ in range(R):
        nxt: dict[Word, int] = {}
        for w, c in cur.items():
            counter.tick(len(letters))
            for l in letters:
                if l == 0:
                    v = w
                elif w and w[-1] == -l:
                    v = w[:-1]
                else:
                    v = w + (l,)
                nxt[v] = nxt.get(v, 0) + c
        cur = nxt
    return cur


def formal_word_bound_check(
    p: Presentation,
    r: int,
    R: int,
    rho: float | None = None,
    gamma: float | None = None,
    c: float = 1.0,
    budget: int | None = None,
) -> dict:
    """Exact finite/infinite-order counts among formal words of length ``R`` against the bound
    ``16 c R^5 (rho (2m+1))^((1+6 gamma) R) (2m+1)^(gamma R)``.
    """
    m = p.alphabet.rank
    if R > p.regime_cap:
        raise RegimeError(f"length {R} exceeds the regime cap {p.regime_cap}")
    rho = kesten_radius(m) if rho is None else rho
    gamma = p.params.gamma if gamma is None else gamma
    counts = formal_endpoint_counts(m, R, budget)
    finite = infinite = 0
    for w, cnt in counts.items():
        v = classify_torsion(w, p, check_regime=False)
        if v.kind == "free-surrogate":
            infinite += cnt
        else:
            finite += cnt
    bound = 16 * c * R**5 * (rho * (2 * m + 1)) ** ((1 + 6 * gamma) * R) * (2 * m + 1) ** (gamma * R)
    gap_ranks = range(r + 1, R + 1)
    no_periods = all(i > p.max_rank or not p.rank(i) for i in gap_ranks)
    no_simple = all(
        i <= p.max_rank and len(p.rank(i)) == sum(1 for _ in iter_period_classes(m, i, budget))
        for i in gap_ranks
    )
    ineq_value, ineq_ok = inequality3(rho, gamma, m)
    return {
        "m": m,
        "r": r,
        "R": R,
        "total": (2 * m + 1) ** R,
        "finite_order": finite,
        "infinite_order": infinite,
        "bound": bound,
        "finite_within_bound": finite <= bound,
        "infinite_within_bound": infinite <= bound,
        "small_target": (2 * m + 1) ** R / R if R else None,
        "hypotheses": {
            "gap_vacuous": R < r + 1,
            "length_ratio": R > 2 * r / gamma,
            "no_periods_in_gap": no_periods,
            "no_simple_in_gap": no_simple,
            "inequality3": ineq_ok,
            "inequality3_value": ineq_value,
        },
        "rho": rho,
        "gamma": gamma,
        "c": c,
    }
