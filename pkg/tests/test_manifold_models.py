from fractions import Fraction

import pytest

from bgg import borel_ring
from char_classes import ChernTuple, chern_character, todd_class
from errors import HypothesisError, ModelParseError, ModelValidationError
from manifold_models import (
    dumps_model,
    flag_model,
    ingest,
    kunneth,
    parse_model,
    parse_tuple,
    projective_space,
    validate_generation,
)

P2_TEXT = """\
# the projective plane
name: P2
dim: 2
basis 0: 1
basis 1: h
basis 2: h2
mult: h * h = h2
integrate: h2 = 1
tangent: c1 = 3*h
tangent: c2 = 3*h2
h2basis: h
"""

NON_ASSOCIATIVE = """\
name: broken
dim: 3
basis 0: 1
basis 1: a, b
basis 2: p
basis 3: top
mult: a * a = p
mult: a * b = p
mult: a * p = top
integrate: top = 1
"""


def hilbert_polynomial(n, k):
    value = Fraction(1)
    for i in range(1, n + 1):
        value *= Fraction(k + i, i)
    return value


def test_projective_plane_file(tmp_path):
    path = tmp_path / "p2.model"
    path.write_text(P2_TEXT, encoding="utf-8")
    m = ingest(path)
    assert m.name == "P2"
    assert m.integrate(m.gen("h") ** 2) == 1
    assert m.tangent_chern().classes == (m.gen("h") * 3, m.gen("h2") * 3)
    assert not m.has_sq2()


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_dumped_models_parse_back(n):
    m = projective_space(n)
    assert parse_model(dumps_model(m)) == m


def test_projective_space_integrals():
    m = projective_space(4)
    h = m.gen("h")
    for k in range(4):
        assert m.integrate(h ** k) == 0
    assert m.integrate(h ** 4) == 1
    assert h ** 5 == 0


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_hilbert_polynomial_of_projective_space(n):
    m = projective_space(n)
    h = m.gen("h")
    td = todd_class(m.tangent_chern(), n)
    for k in range(-3, 6):
        line = ChernTuple(1, (h * k,), m.one())
        assert m.integrate(chern_character(line, n) * td) == hilbert_polynomial(n, k)


def test_non_associative_table_reports_a_witness():
    with pytest.raises(ModelValidationError) as exc:
        parse_model(NON_ASSOCIATIVE)
    assert exc.value.witness == ("a", "a", "b")


def test_unknown_field_is_rejected():
    with pytest.raises(ModelParseError) as exc:
        parse_model(P2_TEXT + "colour: red\n")
    assert exc.value.line_no == 12


def test_grading_violation():
    text = P2_TEXT.replace("mult: h * h = h2", "mult: h * h = h")
    with pytest.raises(ModelValidationError) as exc:
        parse_model(text)
    assert exc.value.witness == ("h", "h", "h")


def test_bad_basis_name():
    with pytest.raises(ModelParseError):
        parse_model(P2_TEXT.replace("basis 1: h", "basis 1: 2h"))


def test_missing_integral():
    with pytest.raises(ModelValidationError):
        parse_model(P2_TEXT.replace("integrate: h2 = 1\n", ""))


def test_generation_over_the_integers():
    validate_generation(projective_space(3))
    text = P2_TEXT.replace("mult: h * h = h2", "mult: h * h = 2*h2")
    with pytest.raises(HypothesisError):
        validate_generation(parse_model(text))


def test_product_of_projective_lines():
    m = kunneth(projective_space(1), projective_space(1))
    h1, h2 = m.gen("h_1"), m.gen("h_2")
    assert m.integrate(h1 * h2) == 1
    assert h1 * h1 == 0
    assert m.h2_basis == ("h_1", "h_2")
    c1, c2 = m.tangent_chern().classes
    assert c1 == h1 * 2 + h2 * 2
    assert m.integrate(c2) == 4
    validate_generation(m)


def test_product_carries_sq2():
    m = kunneth(projective_space(2), projective_space(1))
    assert m.dim == 3
    assert m.has_sq2()
    # Sq^2(h_1 h_2) = h_1^2 h_2 + h_1 h_2^2 = h2_1 h_2 mod 2
    assert m.sq2(m.gen("h_1") * m.gen("h_2")) == m.gen("h2_1_h_2")
    assert not m.sq2(m.gen("h2_1"))


def test_flag_manifolds():
    full = flag_model("A2")
    assert full.dim == 3
    assert full.name == "A2/P{}"
    partial = flag_model("A2", (0,))
    assert partial.dim == 2
    assert len(partial.h2_elements()) == 1
    x1, x2 = borel_ring(full.datum).gens()
    with pytest.raises(HypothesisError):
        partial.check_invariant(x1)
    assert partial.integrate(x2 * x2) == 1
    line = flag_model("A1")
    assert line.integrate(borel_ring(line.datum).gen(0)) == 1


def test_tuple_on_a_model():
    m = projective_space(3)
    t = parse_tuple("c1 = 4*h\nc2 = 6*h^2\nc3 = 4*h^3\n", m)
    assert t.rank == 3
    assert t.classes == m.tangent_chern().classes
    t = parse_tuple("rank: 2\nc1 = h  # comment\n", m)
    assert t.rank == 2
    assert t.classes == (m.gen("h"), m.zero())
    with pytest.raises(ModelParseError):
        parse_tuple("c2 = h", m)
    with pytest.raises(ModelParseError):
        parse_tuple("c1 = k", m)
    with pytest.raises(ModelParseError):
        parse_tuple("rank: 1\nc2 = h^2", m)


def test_tuple_on_a_flag():
    flag = flag_model("A2")
    x1, x2 = borel_ring(flag.datum).gens()
    t = parse_tuple("c1 = x1 + x2\nc2 = x1*x2\n", flag)
    assert t.classes == (x1 + x2, x1 * x2, flag.one() * 0)
    with pytest.raises(ModelParseError):
        parse_tuple("c2 = x1", flag)
    with pytest.raises(HypothesisError):
        parse_tuple("c1 = x1", flag_model("A2", (0,)))
