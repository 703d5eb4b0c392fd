import math
import random

import pytest
from hypothesis import given, strategies as st

from burnside_lab._runtime import BudgetExceeded
from burnside_lab.baselines import (
    InfiniteDihedral,
    SemidirectProduct,
    ball_layers,
    ball_torsion_density,
    cyclic_permutation_group,
    dihedral_as_semidirect,
    group_from_json,
    mn_density_bound,
    symmetric_closure,
    walk_torsion_baseline,
)


# D_inf as affine maps x -> eps*x + a of the integers: s(x) = -x, t(x) = 1 - x
def affine_mul(f, g):
    (e1, a1), (e2, a2) = f, g
    # (f g)(x) = f(g(x)) with the right factor applied first, matching words read left to right
    return (e1 * e2, e1 * a2 + a1)


AFFINE_S = (-1, 0)
AFFINE_T = (-1, 1)


def affine_ball(r):
    ident = (1, 0)
    seen = {ident}
    layer = [ident]
    sizes = [1]
    torsion = [0]
    for _ in range(r):
        nxt = []
        for g in layer:
            for s in (AFFINE_S, AFFINE_T):
                h = affine_mul(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        layer = nxt
        sizes.append(sizes[-1] + len(nxt))
        torsion.append(torsion[-1] + sum(1 for e, a in nxt if e == -1))
    return sizes, torsion


def order_divides(G, g, k):
    h = G.identity
    for _ in range(k):
        h = G.mul(h, g)
    return h == G.identity


# ------------------------------------------------------------ infinite dihedral


@pytest.mark.parametrize("r", [0, 1, 2, 5, 10, 31])
def test_dihedral_ball_counts(r):
    dens = ball_torsion_density(InfiniteDihedral(), ["s", "t"], r)
    assert dens.ball[-1] == 2 * r + 1
    assert dens.torsion[-1] + 1 == 2 * math.ceil(r / 2) + 1


def test_dihedral_two_routes_agree():
    r = 60
    strings = ball_torsion_density(InfiniteDihedral(), ["s", "t"], r)
    semi = dihedral_as_semidirect()
    lattice = ball_torsion_density(semi, semi.generators(), r)
    sizes, tors = affine_ball(r)
    assert strings.ball == lattice.ball == sizes
    assert strings.torsion == lattice.torsion == tors


def test_dihedral_density_limit():
    dens = ball_torsion_density(InfiniteDihedral(), ["s", "t"], 2000)
    assert abs(dens.density[-1] - 0.5) < 1e-3
    walk = walk_torsion_baseline(InfiniteDihedral(), ["s", "t"], 400)
    assert abs(walk.probs[-1] - 0.5) < 1e-3
    assert abs(walk.probs[-1] - dens.density[-1]) < 1e-2
    assert walk.leaked == 0


def test_dihedral_walk_small_steps_by_hand():
    walk = walk_torsion_baseline(InfiniteDihedral(), ["s", "t"], 2)
    # one step: s or t with probability 2/3; two steps: odd words s, t with 2 * 2/9
    assert walk.probs[:3] == pytest.approx([0, 2 / 3, 4 / 9])
    assert walk.probs_with_identity[2] == pytest.approx(4 / 9 + 3 / 9)
    assert walk.in_subgroup[2] == pytest.approx(5 / 9)


def test_semidirect_walk_matches_dihedral():
    semi = dihedral_as_semidirect()
    a = walk_torsion_baseline(InfiniteDihedral(), ["s", "t"], 50).probs
    b = walk_torsion_baseline(semi, semi.generators(), 50).probs
    assert a == pytest.approx(b, abs=1e-12)


# ------------------------------------------------------------ other lattices


def test_free_abelian_has_no_torsion():
    G = SemidirectProduct([[1]], 1)
    dens = ball_torsion_density(G, G.generators(), 30)
    assert dens.ball[-1] == 61 and dens.torsion[-1] == 0
    assert walk_torsion_baseline(G, G.generators(), 20).probs[-1] == 0


def test_z2_inversion_torsion_matches_definition():
    G = SemidirectProduct([[-1, 0], [0, -1]], 2)
    for layer in ball_layers(G, G.generators(), 12):
        for g in layer:
            assert G.is_torsion(g) == order_divides(G, g, 2)
    dens = ball_torsion_density(G, G.generators(), 30)
    assert 0 < dens.density[-1] < 1


@pytest.mark.parametrize("m", [3, 4])
def test_cyclic_permutation_torsion_matches_definition(m):
    G = cyclic_permutation_group(m)
    for layer in ball_layers(G, G.generators(), 6):
        for g in layer:
            assert G.is_torsion(g) == order_divides(G, g, m)
            assert sum(g[0]) == 0


def test_cyclic_permutation_walk_reports_totient_ratio():
    G = cyclic_permutation_group(3)
    walk = walk_torsion_baseline(G, G.generators(), 10)
    assert walk.phi_ratio == pytest.approx(2 / 3)
    assert all(p <= 1 - h + 1e-12 for p, h in zip(walk.probs, walk.in_subgroup))


@pytest.mark.parametrize(
    "G",
    [dihedral_as_semidirect(), SemidirectProduct([[-1, 0], [0, -1]], 2), cyclic_permutation_group(3)],
    ids=["dihedral", "z2-inversion", "cyclic-perm-3"],
)
def test_group_axioms_on_random_triples(G):
    rng = random.Random(4)
    S = symmetric_closure(G, G.generators())

    def rand():
        g = G.identity
        for _ in range(rng.randint(0, 12)):
            g = G.mul(g, rng.choice(S))
        return g

    for _ in range(300):
        a, b, c = rand(), rand(), rand()
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
        assert G.mul(a, G.inverse(a)) == G.identity == G.mul(G.inverse(a), a)
        assert G.mul(a, G.identity) == a


@given(st.text(alphabet="st", max_size=12), st.text(alphabet="st", max_size=12), st.text(alphabet="st", max_size=12))
def test_dihedral_strings_associative(a, b, c):
    G = InfiniteDihedral()
    a, b, c = (_normal(x) for x in (a, b, c))
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))


def _normal(x):
    out = ""
    for ch in x:
        out = out[:-1] if out and out[-1] == ch else out + ch
    return out


def test_group_from_json_roundtrip():
    for G in (InfiniteDihedral(), SemidirectProduct([[-1]], 2)):
        H = group_from_json(G.to_json())
        assert type(H) is type(G)
    with pytest.raises(ValueError):
        group_from_json({"type": "nope"})
    with pytest.raises(ValueError):
        SemidirectProduct([[0, 1], [1, 0]], 3)


def test_ball_budget():
    with pytest.raises(BudgetExceeded):
        ball_layers(InfiniteDihedral(), ["s", "t"], 1000, budget=50)


# ------------------------------------------------------------ M N density bound


def test_mn_dihedral_line():
    G = InfiniteDihedral()
    rep = mn_density_bound(G, ["s", "t"], ["", "s"], G.is_translation, 2000)
    assert rep.factorizes and rep.holds
    assert rep.l == 1 and rep.c == pytest.approx(1 / 6)
    assert rep.min_ratio >= rep.c


def test_mn_dihedral_cosets():
    G = InfiniteDihedral()
    in_n = lambda g: len(g) % 2 == 0 and g != ""
    rep = mn_density_bound(G, ["s", "t"], ["", "st", "s", "t"], in_n, 2000)
    assert rep.factorizes and rep.holds and rep.c > 0


def test_mn_z2_inversion():
    G = SemidirectProduct([[-1, 0], [0, -1]], 2)
    e1, s = ((1, 0), 0), ((0, 0), 1)
    M = [G.identity, e1, s, G.mul(s, e1)]
    rep = mn_density_bound(G, G.generators(), M, lambda g: g[1] == 0 and any(g[0]), 30)
    assert rep.factorizes and rep.holds and rep.c > 0


def test_mn_trivial_m_fails_factorization():
    G = InfiniteDihedral()
    rep = mn_density_bound(G, ["s", "t"], [""], G.is_translation, 20)
    assert not rep.factorizes and not rep.holds and rep.counterexample == "s"


def test_mn_rejects_far_m():
    G = InfiniteDihedral()
    with pytest.raises(ValueError):
        mn_density_bound(G, ["s", "t"], ["", "stst"], G.is_translation, 2)
