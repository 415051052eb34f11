from fractions import Fraction

import pytest

from errors import CartanTypeError
from root_system import CartanType, build, dominant, is_type_ac, pairing, weyl_dimension


@pytest.mark.parametrize(
    "name, rank, n_positive",
    [
        ("A1", 1, 1),
        ("A2", 2, 3),
        ("B2", 2, 4),
        ("G2", 2, 6),
        ("A3", 3, 6),
        ("A4", 4, 10),
        ("C3", 3, 9),
        ("D4", 4, 12),
        ("F4", 4, 24),
        ("E6", 6, 36),
        ("A1xC2", 3, 5),
    ],
)
def test_positive_root_counts(name, rank, n_positive):
    datum = build(name)
    assert datum.rank == rank
    assert datum.n == n_positive


def test_cartan_matrices():
    assert build("B2").cartan == ((2, -1), (-2, 2))
    assert build("G2").cartan == ((2, -3), (-1, 2))
    assert build("A2").cartan == ((2, -1), (-1, 2))


@pytest.mark.parametrize("text", ["B1", "Q2", "E9", "G3", "", "A0"])
def test_invalid_types(text):
    with pytest.raises(CartanTypeError):
        build(text)


def test_parse_products():
    ct = CartanType.parse("A1xC3")
    assert ct.rank == 4
    assert str(ct) == "A1xC3"


def test_simple_roots_are_cartan_columns():
    datum = build("B3")
    for i in range(datum.rank):
        for j in range(datum.rank):
            assert pairing(datum, datum.simple_roots[i].coords, datum.simple_roots[j]) == datum.cartan[j][i]


@pytest.mark.parametrize("name", ["A3", "B3", "C3", "G2", "F4"])
def test_roots_pair_to_two_with_their_coroots(name):
    datum = build(name)
    for alpha in datum.positive_roots:
        assert pairing(datum, alpha.coords, alpha) == 2
        assert pairing(datum, datum.rho, alpha) > 0


def test_highest_root_of_g2():
    assert build("G2").positive_roots[-1].root_coords == (3, 2)


def test_rho_in_root_coordinates():
    assert build("A2").to_root_basis((1, 1)) == (1, 1)
    assert build("B2").to_root_basis((1, 1)) == (Fraction(3, 2), 2)


@pytest.mark.parametrize(
    "name, weight, expected",
    [
        ("A1", (3,), 4),
        ("A2", (1, 0), 3),
        ("A2", (1, 1), 8),
        ("B2", (1, 0), 5),
        ("B2", (0, 1), 4),
        ("G2", (1, 0), 7),
        ("A3", (0, 1, 0), 6),
    ],
)
def test_weyl_dimension(name, weight, expected):
    assert weyl_dimension(build(name), weight) == expected


def test_dominant_representative():
    mu, applied = dominant(build("A2"), (-1, 0))
    assert mu == (0, 1)
    assert applied == (0, 1)


def test_type_ac():
    assert is_type_ac(CartanType.parse("A1xC2"))
    assert is_type_ac(CartanType.parse("B2"))
    assert not is_type_ac(CartanType.parse("B3"))
    assert not is_type_ac(CartanType.parse("G2"))
