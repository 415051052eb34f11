from fractions import Fraction

import pytest

from char_classes import (
    ChernTuple,
    chern_character,
    chern_classes_from_character,
    chern_context,
    direct_sum,
    sum_of_line_bundles,
    todd_class,
    trivial,
    universal_chern_character,
    universal_todd,
)
from exact_poly import GradedPoly, PolyContext, todd_series, trunc_exp
from manifold_models import projective_space


def test_chern_character_degree_four():
    c1, c2, c3, c4 = chern_context(4).gens()
    ch4 = universal_chern_character(4, 4).homogeneous(4)
    assert ch4 * 24 == c1 ** 4 - c1 * c1 * c2 * 4 + c1 * c3 * 4 + c2 * c2 * 2 - c4 * 4
    assert universal_chern_character(4, 4).constant_term() == 4


def test_todd_low_degrees():
    c1, c2, c3, c4 = chern_context(4).gens()
    td = universal_todd(4)
    assert td.homogeneous(1) == c1 / 2
    assert td.homogeneous(2) == (c1 * c1 + c2) / 12
    assert td.homogeneous(3) == c1 * c2 / 24
    assert td.homogeneous(4) == -(c1 ** 4 - c1 * c1 * c2 * 4 - c2 * c2 * 3 - c1 * c3 + c4) / 720


def test_rank_four_index_integrand():
    ctx = PolyContext(("c1", "c2", "c3", "c4", "t1", "t2", "t3", "t4"), 4, (1, 2, 3, 4, 1, 2, 3, 4))
    c1, c2, c3, c4, t1, t2, t3, t4 = ctx.gens()
    bundle = ChernTuple(4, (c1, c2, c3, c4), ctx.one())
    tangent = ChernTuple(4, (t1, t2, t3, t4), ctx.one())
    integrand = (chern_character(bundle, 4) * todd_class(tangent, 4)).homogeneous(4)
    expected = (
        -(t1 ** 4 - t1 * t1 * t2 * 4 - t2 * t2 * 3 - t1 * t3 + t4) / 180
        + c1 * t1 * t2 / 24
        + (c1 * c1 - c2 * 2) * (t1 * t1 + t2) / 24
        + (c1 ** 3 - c1 * c2 * 3 + c3 * 3) * t1 / 12
        + (c1 ** 4 - c1 * c1 * c2 * 4 + c1 * c3 * 4 + c2 * c2 * 2 - c4 * 4) / 24
    )
    assert integrand == expected


def test_line_bundle():
    ctx = PolyContext(("x",), 5)
    x = ctx.gen(0)
    line = ChernTuple(1, (x,), ctx.one())
    assert chern_character(line, 5) == trunc_exp(x)
    assert todd_class(line, 5) == GradedPoly(ctx, {(k,): c for k, c in enumerate(todd_series(5))})


def test_additivity_and_multiplicativity():
    ctx = PolyContext(("a", "b", "c"), 4)
    a, b, c = ctx.gens()
    left = sum_of_line_bundles([a, b], ctx.one())
    right = sum_of_line_bundles([c], ctx.one())
    total = direct_sum(left, right)
    assert total.rank == 3
    assert total.classes == sum_of_line_bundles([a, b, c], ctx.one()).classes
    assert chern_character(total, 4) == chern_character(left, 4) + chern_character(right, 4)
    assert chern_character(total, 4) == trunc_exp(a) + trunc_exp(b) + trunc_exp(c)
    assert todd_class(total, 4) == todd_class(left, 4) * todd_class(right, 4)


def test_line_bundles_on_p2():
    m = projective_space(2)
    h = m.gen("h")
    t = sum_of_line_bundles([h, h * 2], m.one())
    assert t.classes == (h * 3, m.gen("h2") * 2)
    zero = sum_of_line_bundles([m.zero(), m.zero()], m.one())
    assert all(not c for c in zero.classes)


def test_trivial_bundle():
    m = projective_space(3)
    t = trivial(3, m.one())
    assert chern_character(t, 3) == m.one() * 3
    assert t.c(0) == m.one()
    assert not t.c(2)


def test_character_round_trip_universal():
    ctx = chern_context(5)
    t = ChernTuple(5, tuple(ctx.gens()), ctx.one())
    ch = chern_character(t, 5)
    parts = [ch.homogeneous(k) for k in range(1, 6)]
    assert chern_classes_from_character(5, parts, ctx.one()).classes == t.classes


@pytest.mark.parametrize("rank", [1, 2, 3, 5])
def test_character_round_trip_random(rng, rank):
    ctx = PolyContext(("u", "v"), 5)
    u, v = ctx.gens()
    for _ in range(10):
        classes = []
        for k in range(1, rank + 1):
            classes.append(sum((u ** i * v ** (k - i) * rng.randint(-5, 5) for i in range(k + 1)), ctx.zero()))
        t = ChernTuple(rank, tuple(classes), ctx.one())
        ch = chern_character(t, 5)
        back = chern_classes_from_character(rank, [ch.homogeneous(k) for k in range(1, 6)], ctx.one())
        assert back.padded(5) == t.padded(5)


def test_todd_of_p3():
    m = projective_space(3)
    td = todd_class(m.tangent_chern(), 3)
    h, h2, h3 = m.gen("h"), m.gen("h2"), m.gen("h3")
    assert td == m.one() + h * 2 + h2 * Fraction(11, 6) + h3
