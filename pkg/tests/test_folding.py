"""Folded subgroup graphs against brute-force enumeration.

The oracle for membership is bounded product enumeration over the
generators (helpers.bounded_products), which never touches the
folding code.
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from fgrow.folding import (
    StallingsGraph,
    conjugate_subgroup,
    double_coset_contains,
    full_group,
    intersect,
    is_invariant,
    stallings_graph,
    subgroup_equal,
    trivial_subgroup,
    witnessed_graph,
)
from fgrow.words import Word, basis, free_reduce, identity

from helpers import bounded_products, random_letters, reduce_letters

F = basis("a b")


def W(text: str) -> Word:
    return F.parse(text)


def graph(*gens: str) -> StallingsGraph:
    return stallings_graph(F, [W(g) for g in gens])


# -- frozen small examples -------------------------------------------------


def test_squares_and_b():
    g = graph("a a", "b")
    assert g.n_vertices == 2
    assert g.accepts(W("a a"))
    assert g.accepts(W("b"))
    assert g.accepts(W("a a b a a"))
    assert not g.accepts(W("a"))
    assert not g.accepts(W("a b"))
    assert g.rank() == 2
    assert g.index() is None


def test_index_two_subgroup():
    g = graph("a a", "b", "a b a'")
    assert g.index() == 2
    # Nielsen-Schreier: rank = 1 + index*(rank(F) - 1)
    assert g.rank() == 1 + 2 * (F.rank - 1)


def test_trivial_and_full():
    assert trivial_subgroup(F).accepts(identity(F))
    assert not trivial_subgroup(F).accepts(W("a"))
    assert full_group(F).index() == 1
    assert full_group(F).accepts(W("a b' a b"))


def test_canonical_form_is_generator_independent():
    assert graph("a", "b a b") == graph("b a b", "a")
    assert subgroup_equal(graph("a b", "a"), graph("b", "a"))
    assert graph("a") != graph("b")


def test_free_basis_roundtrip():
    g = graph("a a", "b a b")
    fb = g.free_basis()
    assert len(fb) == g.rank()
    for w in fb:
        assert g.accepts(w)
        expr = g.express_in_free_basis(w)
        assert expr is not None and len(expr) == 1
    assert g.express_in_free_basis(W("a")) is None


def test_conjugate_subgroup():
    g = conjugate_subgroup(graph("a"), W("b"))
    assert g.accepts(W("b a b'"))
    assert not g.accepts(W("a"))


def test_intersection_examples():
    assert subgroup_equal(intersect(graph("a"), graph("b")), trivial_subgroup(F))
    assert subgroup_equal(intersect(graph("a"), graph("a a")), graph("a a"))
    h = intersect(graph("a a", "b"), full_group(F))
    assert subgroup_equal(h, graph("a a", "b"))


def test_is_invariant():
    from fgrow.automorphisms import identity_automorphism, parse_automorphism

    ident = identity_automorphism(F)
    assert is_invariant(graph("a a", "b"), ident)
    swap = parse_automorphism("a -> b\nb -> a")
    assert not is_invariant(graph("a"), swap)
    assert is_invariant(graph("a b", "b a"), swap)


def test_double_coset():
    left = graph("a")
    right = graph("b")
    assert double_coset_contains(left, W("a b"), right, W("a a a b b"))
    assert not double_coset_contains(left, W("a b"), right, W("b a"))
    # empty s: plain product of the two subgroups
    assert double_coset_contains(left, identity(F), right, W("a b b"))
    assert not double_coset_contains(left, identity(F), right, W("b a"))


# -- enumeration oracle ----------------------------------------------------


@pytest.mark.parametrize("seed", range(4))
def test_membership_matches_enumeration(seed):
    rng = random.Random(seed)
    gens = [random_letters(rng, 2, rng.randint(1, 5)) for _ in range(rng.randint(1, 3))]
    g = stallings_graph(F, [Word(F, free_reduce(gl)) for gl in gens])
    members = bounded_products(gens, 6)
    for ls in members:
        assert g.accepts(Word(F, ls)), f"enumerated member rejected: {ls}"
    for _ in range(200):
        ls = random_letters(rng, 2, rng.randint(0, 7))
        w = Word(F, free_reduce(ls))
        if not g.accepts(w):
            assert w.letters not in members


@pytest.mark.parametrize("seed", range(3))
def test_double_coset_matches_enumeration(seed):
    rng = random.Random(seed)
    lg = [random_letters(rng, 2, rng.randint(1, 3)) for _ in range(2)]
    rg = [random_letters(rng, 2, rng.randint(1, 3)) for _ in range(2)]
    left = stallings_graph(F, [Word(F, free_reduce(ls)) for ls in lg])
    right = stallings_graph(F, [Word(F, free_reduce(ls)) for ls in rg])
    s = Word(F, random_letters(rng, 2, 2))
    products = {
        reduce_letters(l + s.letters + r)
        for l in bounded_products(lg, 3)
        for r in bounded_products(rg, 3)
    }
    hits = 0
    for _ in range(150):
        w = Word(F, random_letters(rng, 2, rng.randint(0, 5)))
        got = double_coset_contains(left, s, right, w)
        if w.letters in products:
            assert got, f"enumerated product rejected: {w}"
            hits += 1
        elif not got:
            assert w.letters not in products
    for ls in list(products)[:50]:
        assert double_coset_contains(left, s, right, Word(F, ls))


# -- witnessed graphs ------------------------------------------------------


def test_witnessed_expressions_evaluate_back():
    gens = [W("a a"), W("b a b")]
    wg = witnessed_graph(F, gens)
    rng = random.Random(7)
    for _ in range(100):
        expr = [rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(1, 6))]
        word = identity(F)
        for j in expr:
            word = word * (gens[abs(j) - 1] if j > 0 else gens[abs(j) - 1].inverse())
        got = wg.express(word)
        assert got is not None
        back = identity(F)
        for j in got:
            back = back * (gens[abs(j) - 1] if j > 0 else gens[abs(j) - 1].inverse())
        assert back == word


def test_witnessed_rejects_nonmembers():
    wg = witnessed_graph(F, [W("a a"), W("b")])
    assert wg.express(W("a")) is None
    assert wg.express(W("a a b")) is not None


@settings(max_examples=40)
@given(
    st.lists(
        st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=5),
        min_size=1,
        max_size=3,
    )
)
def test_witnessed_graph_agrees_with_plain_fold(gen_lists):
    gens = [Word(F, free_reduce(ls)) for ls in gen_lists]
    plain = stallings_graph(F, gens)
    wg = witnessed_graph(F, gens)
    assert subgroup_equal(wg.to_stallings(), plain)
