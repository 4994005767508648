"""Cayley balls and divergence sampling.

Distance oracle: enumerate every word over basis ∪ {t} up to a length
bound, normalize it, and record the shortest spelling per element.
The BFS ball must reproduce exactly that table.
"""

import pytest

from fgrow.automorphisms import identity_automorphism, parse_automorphism
from fgrow.geometry import (
    BudgetExceededError,
    cayley_ball,
    divergence_estimate,
    free_times_z_ball_size,
)
from fgrow.mapping_torus import torus_group
from fgrow.words import basis

from helpers import torus_words

F = basis("a b")
GID = torus_group(identity_automorphism(F))
GPOLY = torus_group(parse_automorphism("a -> a\nb -> b a"))


def shortest_spellings(group, max_len):
    table = {}
    for letters in torus_words(2, max_len):
        e = group.normalize(letters)
        key = (e.w.letters, e.k)
        if key not in table or len(letters) < table[key]:
            table[key] = len(letters)
    return table


# -- exact balls -----------------------------------------------------------


def test_radius_zero():
    ball = cayley_ball(GID, 0)
    assert len(ball) == 1
    assert ball.element(0).is_identity()
    assert ball.sphere_sizes() == [1]


def test_identity_map_matches_product_formula():
    for r in range(7):
        ball = cayley_ball(GID, r)
        assert len(ball) == free_times_z_ball_size(2, r)
    assert free_times_z_ball_size(2, 8) == 26225


@pytest.mark.parametrize("group", [GID, GPOLY])
def test_distances_match_enumeration(group):
    r = 3
    oracle = shortest_spellings(group, r)
    ball = cayley_ball(group, r)
    assert len(ball) == len(oracle)
    for i in range(len(ball)):
        e = ball.element(i)
        key = (e.w.letters, e.k)
        assert ball.distance_by_index(i) == oracle[key]


def test_ball_lookup_helpers():
    ball = cayley_ball(GID, 3)
    t = GID.t()
    assert ball.contains(t) and ball.distance(t) == 1
    deep = GID.element("a b", 1)
    assert ball.distance(deep) == 3
    assert not ball.contains(GID.element("a b a b"))
    with pytest.raises(ValueError):
        ball.index_of(GID.element("a b a b"))
    sizes = ball.sphere_sizes()
    assert sizes[0] == 1 and sum(sizes) == len(ball)
    assert ball.ball_sizes() == [sum(sizes[: k + 1]) for k in range(len(sizes))]


def test_adjacency_is_unit_distance_and_symmetric():
    ball = cayley_ball(GPOLY, 3)
    gens = [GPOLY.element("a"), GPOLY.element("b"), GPOLY.t()]
    steps = [g for g in gens] + [g.inverse() for g in gens]
    for i in range(len(ball)):
        e = ball.element(i)
        for j in ball.neighbors(i):
            assert i in ball.neighbors(j)
            f = ball.element(j)
            assert any(e * s == f for s in steps)


def test_budget_is_all_or_nothing():
    with pytest.raises(BudgetExceededError):
        cayley_ball(GID, 4, max_vertices=50)
    assert len(cayley_ball(GID, 4, max_vertices=1000)) == 313


def test_distances_from_restriction():
    ball = cayley_ball(GID, 4)
    start = ball.sphere_indices(4)[0]
    free = ball.distances_from(start)
    fenced = ball.distances_from(start, min_level=2)
    for i, (d1, d2) in enumerate(zip(free, fenced)):
        assert d1 is not None
        if d2 is not None:
            assert d2 >= d1
        if ball.distance_by_index(i) < 2 and i != start:
            assert d2 is None


# -- divergence ------------------------------------------------------------


def test_divergence_sample_invariants():
    rep = divergence_estimate(GID, [2, 4], samples_per_radius=8, seed=5)
    assert rep.radii == (2, 4)
    for s in rep.samples:
        assert s.distance >= s.radius
        if s.detour is not None:
            assert s.detour >= s.distance
    assert rep.mean_at(4) is not None
    with pytest.raises(KeyError):
        rep.mean_at(3)


def test_divergence_radius_one_detour_is_distance():
    # the forbidden ball around the midpoint is empty at r = 1
    rep = divergence_estimate(GID, [1], samples_per_radius=6, seed=0)
    for s in rep.samples:
        assert s.detour == s.distance


def test_divergence_deterministic_per_seed():
    a = divergence_estimate(GID, [3, 4], samples_per_radius=6, seed=9)
    b = divergence_estimate(GID, [3, 4], samples_per_radius=6, seed=9)
    assert a == b


def test_divergence_fit_and_flags():
    rep = divergence_estimate(GID, [4, 6], samples_per_radius=12, seed=0)
    assert rep.exponent is not None and rep.residual is not None
    assert not rep.low_confidence
    assert "orderings" in rep.note
    only_small = divergence_estimate(GID, [2, 3], samples_per_radius=6, seed=0)
    assert only_small.exponent is None
    assert only_small.low_confidence


def test_divergence_reuses_supplied_ball():
    ball = cayley_ball(GID, 4)
    rep = divergence_estimate(GID, [4], samples_per_radius=6, seed=1, ball=ball)
    assert rep.samples
    with pytest.raises(ValueError):
        divergence_estimate(GID, [6], samples_per_radius=6, seed=1, ball=ball)
    with pytest.raises(ValueError):
        divergence_estimate(GID, [])
