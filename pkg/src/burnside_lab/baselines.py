"""Exact torsion statistics on virtually abelian groups with decidable normal forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from ._runtime import Counter, resolve_budget

Element = Hashable


class InfiniteDihedral:
    """``<s, t | s^2, t^2>``; elements are alternating strings over ``{s, t}``."""

    name = "Dinf"
    identity: Element = ""

    def generators(self) -> list[Element]:
        return ["s", "t"]

    def mul(self, a: str, b: str) -> str:
        while a and b and a[-1] == b[0]:
            a, b = a[:-1], b[1:]
        return a + b

    def inverse(self, a: str) -> str:
        return a[::-1]

    def is_torsion(self, a: str) -> bool:
        """Finite order: the identity and the reflections (odd length)."""
        return len(a) % 2 == 1 or not a

    def is_translation(self, a: str) -> bool:
        return len(a) % 2 == 0

    def to_json(self) -> dict:
        return {"type": "dihedral"}


class SemidirectProduct:
    """``Z^d x| Z/m`` with ``Z/m`` acting through the integer matrix ``action``.

    Elements are ``(v, k)`` with ``(v1, k1)(v2, k2) = (v1 + A^k1 v2, k1 + k2)``.
    With ``lattice="sum-zero"`` the translations are restricted to vectors
    whose coordinates sum to zero (used by the cyclic-permutation examples).
    """

    def __init__(self, action: Sequence[Sequence[int]], m: int, gens: Sequence[Element] | None = None, lattice: str = "full"):
        self.d = len(action)
        self.m = m
        self.lattice = lattice
        self.action = tuple(tuple(int(x) for x in row) for row in action)
        if any(len(row) != self.d for row in self.action):
            raise ValueError("action matrix must be square")
        self._powers = [self._identity_matrix()]
        for _ in range(1, m):
            self._powers.append(self._matmul(self.action, self._powers[-1]))
        if self._matmul(self.action, self._powers[-1]) != self._identity_matrix():
            raise ValueError("action matrix order does not divide m")
        self._gens = list(gens) if gens is not None else self._default_gens()
        self.name = f"Z^{self.d}xZ/{m}"

    def _identity_matrix(self):
        return tuple(tuple(int(i == j) for j in range(self.d)) for i in range(self.d))

    def _matmul(self, a, b):
        return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(self.d)) for j in range(self.d)) for i in range(self.d))

    def _apply(self, k: int, v: tuple) -> tuple:
        mat = self._powers[k % self.m]
        return tuple(sum(mat[i][j] * v[j] for j in range(self.d)) for i in range(self.d))

    def _default_gens(self) -> list[Element]:
        zero = (0,) * self.d
        gens = [(tuple(int(i == j) for j in range(self.d)), 0) for i in range(self.d)]
        if self.m > 1:
            gens.append((zero, 1))
        return gens

    @property
    def identity(self) -> Element:
        return ((0,) * self.d, 0)

    def generators(self) -> list[Element]:
        return list(self._gens)

    def mul(self, a, b):
        (v1, k1), (v2, k2) = a, b
        w = self._apply(k1, v2)
        return (tuple(x + y for x, y in zip(v1, w)), (k1 + k2) % self.m)

    def inverse(self, a):
        v, k = a
        kinv = (-k) % self.m
        w = self._apply(kinv, v)
        return (tuple(-x for x in w), kinv)

    def is_torsion(self, a) -> bool:
        """``(v, k)`` has finite order iff ``(v, k)^m`` is the identity translation."""
        v, k = a
        if k == 0:
            return not any(v)
        total = [0] * self.d
        for j in range(self.m):
            w = self._apply(j * k, v)
            total = [x + y for x, y in zip(total, w)]
        return not any(total)

    def is_translation(self, a) -> bool:
        return a[1] == 0

    def to_json(self) -> dict:
        return {"type": "semidirect", "m": self.m, "action": [list(r) for r in self.action], "lattice": self.lattice}


def dihedral_as_semidirect() -> SemidirectProduct:
    """``Z x| Z/2`` by negation, generated by the reflections ``s = (0, 1)`` and ``t = (1, 1)``."""
    return SemidirectProduct([[-1]], 2, gens=[((0,), 1), ((1,), 1)])


def cyclic_permutation_group(m: int) -> SemidirectProduct:
    """Sum-zero vectors of ``Z^m`` with ``Z/m`` permuting coordinates cyclically,
    generated by ``(e1 - e2, 0)`` and the rotation."""
    if m < 2:
        raise ValueError("need m >= 2")
    perm = [[int(j == (i - 1) % m) for j in range(m)] for i in range(m)]
    e = tuple(1 if i == 0 else (-1 if i == 1 else 0) for i in range(m))
    return SemidirectProduct(perm, m, gens=[(e, 0), ((0,) * m, 1)], lattice="sum-zero")


def group_from_json(data: dict):
    kind = data.get("type")
    if kind == "dihedral":
        return InfiniteDihedral()
    if kind == "dihedral-semidirect":
        return dihedral_as_semidirect()
    if kind == "cyclic-permutation":
        return cyclic_permutation_group(int(data["m"]))
    if kind == "semidirect":
        gens = data.get("gens")
        if gens is not None:
            gens = [(tuple(v), int(k)) for v, k in gens]
        return SemidirectProduct(data["action"], int(data["m"]), gens=gens)
    raise ValueError(f"unknown group type {kind!r}")


def symmetric_closure(G, gens: Iterable[Element]) -> list[Element]:
    out: list[Element] = []
    for g in gens:
        for h in (g, G.inverse(g)):
            if h not in out and h != G.identity:
                out.append(h)
    return out


# ------------------------------------------------------------ balls


def ball_layers(G, S: Sequence[Element], r: int, budget: int | None = None) -> list[list[Element]]:
    """Spheres ``0..r`` of the Cayley graph, by breadth-first search."""
    counter = Counter(resolve_budget(budget))
    S = symmetric_closure(G, S)
    seen = {G.identity}
    layers = [[G.identity]]
    for _ in range(r):
        nxt = []
        for g in layers[-1]:
            for s in S:
                counter.tick()
                h = G.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        layers.append(nxt)
    return layers


@dataclass
class DensityCurve:
    radii: list[int]
    ball: list[int]
    torsion: list[int]

    @property
    def density(self) -> list[float]:
        """Nontrivial torsion over ball size."""
        return [t / b for t, b in zip(self.torsion, self.ball)]

    @property
    def density_with_identity(self) -> list[float]:
        return [(t + 1) / b for t, b in zip(self.torsion, self.ball)]

    def rows(self) -> list[dict]:
        return [
            {"r": r, "ball": b, "torsion": t, "density": t / b, "density_with_identity": (t + 1) / b}
            for r, b, t in zip(self.radii, self.ball, self.torsion)
        ]


def ball_torsion_density(G, S: Sequence[Element], r: int, budget: int | None = None) -> DensityCurve:
    layers = ball_layers(G, S, r, budget)
    ball = tors = 0
    balls, torsion = [], []
    for j, layer in enumerate(layers):
        ball += len(layer)
        tors += sum(1 for g in layer if j > 0 and G.is_torsion(g))
        balls.append(ball)
        torsion.append(tors)
    return DensityCurve(list(range(r + 1)), balls, torsion)


@dataclass
class MNReport:
    c: float
    l: int
    holds: bool
    factorizes: bool
    counterexample: Element | None
    min_ratio: float | None
    worst_radius: int | None
    radii_checked: int

    def summary(self) -> dict:
        return {
            "c": self.c,
            "l": self.l,
            "holds": self.holds,
            "factorizes": self.factorizes,
            "counterexample": None if self.counterexample is None else repr(self.counterexample),
            "min_ratio": self.min_ratio,
            "worst_radius": self.worst_radius,
            "radii_checked": self.radii_checked,
        }


def mn_density_bound(
    G, S: Sequence[Element], M: Sequence[Element], in_N: Callable[[Element], bool], r: int, budget: int | None = None
) -> MNReport:
    """Verify ``G = M N`` on the ball of radius ``r`` and ``|N cap B(j)| / |B(j)| >= c`` for ``l <= j <= r``,
    where ``l`` is the largest norm in ``M`` and ``c = 1 / (|M| |B(l)|)``.
    """
    layers = ball_layers(G, S, r, budget)
    norm = {g: j for j, layer in enumerate(layers) for g in layer}
    M = list(dict.fromkeys(M))
    if not M:
        raise ValueError("M must be nonempty")
    missing = [g for g in M if g not in norm]
    if missing:
        raise ValueError(f"elements of M outside the ball of radius {r}: {missing!r}")
    l = max(norm[g] for g in M)
    ball_l = sum(len(layer) for layer in layers[: l + 1])
    c = 1 / (len(M) * ball_l)
    m_inv = [G.inverse(g) for g in M]
    counterexample = None
    for layer in layers:
        for g in layer:
            if not any(in_N(G.mul(h, g)) for h in m_inv):
                counterexample = g
                break
        if counterexample is not None:
            break
    ball = in_n = 0
    min_ratio = None
    worst = None
    for j, layer in enumerate(layers):
        ball += len(layer)
        in_n += sum(1 for g in layer if in_N(g))
        if j >= l:
            ratio = in_n / ball
            if min_ratio is None or ratio < min_ratio:
                min_ratio, worst = ratio, j
    factorizes = counterexample is None
    holds = factorizes and min_ratio is not None and min_ratio >= c
    return MNReport(c, l, holds, factorizes, counterexample, min_ratio, worst, max(0, r - l + 1))


# ------------------------------------------------------------ walks


@dataclass
class WalkCurve:
    probs: list[float]
    probs_with_identity: list[float]
    in_subgroup: list[float]
    leaked: float
    phi_ratio: float | None = None
    extra: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [
            {
                "r": r,
                "torsion": p,
                "torsion_with_identity": q,
                "in_translations": h,
                "upper_bound": 1 - h,
            }
            for r, (p, q, h) in enumerate(zip(self.probs, self.probs_with_identity, self.in_subgroup))
        ]


def walk_torsion_baseline(G, S: Sequence[Element], r_max: int, budget: int | None = None) -> WalkCurve:
    """Exact ``Pr(X_r is nontrivial torsion)`` for the lazy uniform walk on ``{e} + S``.

    The whole reachable set is kept, so nothing is truncated (``leaked`` is
    always 0).  ``in_subgroup`` is the probability of lying in the
    translation subgroup; one minus it bounds the torsion probability.
    """
    counter = Counter(resolve_budget(budget))
    S = symmetric_closure(G, S)
    steps = [G.identity] + S
    w = 1 / len(steps)
    dist = {G.identity: 1.0}
    tors_cache: dict = {}

    def torsion(g):
        t = tors_cache.get(g)
        if t is None:
            t = tors_cache[g] = G.is_torsion(g)
        return t

    probs, with_e, in_h = [], [], []
    for r in range(r_max + 1):
        if r:
            nxt: dict = {}
            for g, p in dist.items():
                counter.tick(len(steps))
                for s in steps:
                    h = G.mul(g, s)
                    nxt[h] = nxt.get(h, 0.0) + p * w
            dist = nxt
        pt = sum(p for g, p in dist.items() if g != G.identity and torsion(g))
        probs.append(pt)
        with_e.append(pt + dist.get(G.identity, 0.0))
        in_h.append(sum(p for g, p in dist.items() if G.is_translation(g)))
    phi = None
    if isinstance(G, SemidirectProduct):
        phi = _totient(G.m) / G.m
    return WalkCurve(probs, with_e, in_h, 0.0, phi)


def _totient(m: int) -> int:
    return sum(1 for k in range(1, m + 1) if math.gcd(k, m) == 1)
