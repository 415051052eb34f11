from itertools import combinations

import pytest

from errors import ContextMismatchError, ResourceLimitError
from root_system import build
from weyl import (
    admissible_words,
    all_reduced_words,
    bruhat_leq,
    enumerate_group,
    extend_to_w0,
    from_word,
    identity,
    inverse,
    is_reduced_word_of_w0,
    longest,
    minimal_rep,
    multiply,
    parabolic_longest,
    parse_indices,
    parse_word,
    prefix_element,
    reflection,
    saturated_cosets,
)


@pytest.mark.parametrize("name, order", [("A1", 2), ("A2", 6), ("B2", 8), ("G2", 12), ("A3", 24), ("A4", 120)])
def test_group_orders(name, order):
    datum = build(name)
    elements = enumerate_group(datum)
    assert len(elements) == order
    assert elements[0] == identity(datum)
    assert elements[-1] == longest(datum)


@pytest.mark.parametrize("name", ["A2", "B3", "G2", "D4"])
def test_longest_element_negates_rho(name):
    datum = build(name)
    w0 = longest(datum)
    assert w0.act(datum.rho) == tuple(-c for c in datum.rho)
    assert w0.length == datum.n


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_group_law(name):
    datum = build(name)
    e = identity(datum)
    elements = enumerate_group(datum)
    assert len({w.key for w in elements}) == len(elements)
    for u in elements:
        assert u.act(datum.rho) == u.key
        assert multiply(u, inverse(u)) == e
        assert multiply(e, u) == u
        for v in elements:
            uv = multiply(u, v)
            assert uv.length <= u.length + v.length
            assert (uv.length - u.length - v.length) % 2 == 0
            assert uv == from_word(datum, u.word + v.word)
    assert from_word(datum, (0, 0)) == e


def test_words_parse_and_render():
    datum = build("A2")
    assert parse_indices("1,2,1") == (0, 1, 0)
    assert parse_indices("121") == (0, 1, 0)
    assert parse_indices("s1*s2") == (0, 1)
    assert parse_indices("e") == ()
    assert parse_word(datum, "s2*s1*s2").render() == "s1*s2*s1"
    assert longest(datum).word == (0, 1, 0)
    with pytest.raises(ContextMismatchError):
        parse_word(datum, "s3")


def _subword_ideal(w):
    datum = w.datum
    return {
        from_word(datum, [w.word[i] for i in positions])
        for k in range(w.length + 1)
        for positions in combinations(range(w.length), k)
    }


@pytest.mark.parametrize("name", ["A2", "B2", "A3"])
def test_bruhat_order_matches_subword_property(name):
    elements = enumerate_group(build(name))
    for w in elements:
        below = _subword_ideal(w)
        for u in elements:
            assert bruhat_leq(u, w) == (u in below)


def test_reduced_words_of_w0():
    assert all_reduced_words(longest(build("A2"))) == [(0, 1, 0), (1, 0, 1)]
    assert all_reduced_words(longest(build("B2"))) == [(0, 1, 0, 1), (1, 0, 1, 0)]
    assert len(all_reduced_words(longest(build("A3")))) == 16


def test_reduced_word_limit():
    with pytest.raises(ResourceLimitError):
        all_reduced_words(longest(build("A3")), limit=5)


def test_weyl_order_limit():
    with pytest.raises(ResourceLimitError):
        enumerate_group(build("A3"), limit=10)


def test_parabolic_cosets_of_a2():
    datum = build("A2")
    assert parabolic_longest(datum, {0}).render() == "s1"
    reps = saturated_cosets(datum, {0})
    assert [w.render() for w in reps] == ["s1", "s2*s1", "s1*s2*s1"]
    assert minimal_rep(longest(datum), {0}).render() == "s1*s2"
    assert len(saturated_cosets(datum, ())) == 6


@pytest.mark.parametrize("name", ["A2", "B2", "A3"])
def test_extend_to_w0(name):
    datum = build(name)
    for v in enumerate_group(datum):
        beta = extend_to_w0(v)
        assert is_reduced_word_of_w0(datum, beta)
        assert prefix_element(datum, beta, v.length) == v


@pytest.mark.parametrize("name", ["A2", "B2"])
def test_admissible_words_induce_the_prefix(name):
    datum = build(name)
    w0 = longest(datum)
    for w in enumerate_group(datum):
        words = admissible_words(w)
        assert words
        for beta in words:
            assert is_reduced_word_of_w0(datum, beta)
            assert prefix_element(datum, beta, w0.length - w.length) == multiply(w, w0)


def test_root_reflections_are_involutions():
    datum = build("G2")
    e = identity(datum)
    for alpha in datum.positive_roots:
        r = reflection(datum, alpha)
        assert multiply(r, r) == e
        assert r.act(alpha.coords) == (-alpha).coords
