import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invlim.atoms import QQ, ZZ, Cyclic, NotDivisible, Pruefer, QmodZ
from invlim.sums import (
    Element,
    ModuleShape,
    ShapeMismatch,
    direct_sum,
    elem_arith,
    elem_divide,
    power,
    random_element,
)

SHAPES = {
    "Z^2": ModuleShape.of(("f", ZZ, 2)),
    "Z/6+Z": ModuleShape.of(("c", Cyclic(6), 1), ("z", ZZ, 1)),
    "sum_omega Q/Z": ModuleShape.of(("f", QmodZ, None)),
    "Q+Z(2^inf)": ModuleShape.of(("q", QQ, 1), ("p", Pruefer(2), 1)),
    "Q^2+Z(3^inf)+(Q/Z)^omega": ModuleShape.of(("q", QQ, 2), ("p", Pruefer(3), 1), ("n", QmodZ, None)),
}
QZ = SHAPES["sum_omega Q/Z"]


def test_disjoint_supports_add_to_union():
    x = Element(QZ, {("f", 0): Fraction(1, 2)})
    y = Element(QZ, {("f", 5): Fraction(1, 3)})
    assert (x + y).support == [("f", 0), ("f", 5)]


def test_negation_and_torsion():
    x = Element(QZ, {("f", 0): Fraction(1, 2), ("f", 9): Fraction(2, 7)})
    assert (x + (-x)).is_zero() and len(x + (-x)) == 0
    assert elem_arith("scalar_mul", Element(QZ, {("f", 0): Fraction(1, 2)}), n=2).is_zero()


def test_worked_division():
    shape = ModuleShape.of(("f", QmodZ, 1), ("g", ZZ, 4))
    x = Element(shape, {("f", 0): Fraction(1, 2), ("g", 3): 10})
    assert elem_divide(5, x) == Element(shape, {("f", 0): Fraction(1, 10), ("g", 3): 2})
    assert elem_divide(3, shape.zero()).is_zero()
    with pytest.raises(NotDivisible) as info:
        elem_divide(2, Element(shape, {("g", 0): 1}))
    assert info.value.where == ("g", 0)


def test_random_element_contract():
    assert random_element(QZ, 7, 3, 10) == random_element(QZ, 7, 3, 10)
    assert random_element(QZ, 7, 0, 10).is_zero()
    # frozen regression value of the seeded generator
    assert random_element(QZ, 7, 3, 10) == Element(QZ, {("f", 17): Fraction(1, 6)})
    for seed in range(50):
        x = random_element(QZ, seed, 3, 10)
        assert len(x) <= 3 and all(v.denominator <= 10 for _, v in x.items())


def test_elements_are_canonical_and_sparse():
    x = Element(SHAPES["Z/6+Z"], {("c", 0): 8, ("z", 0): 0})
    assert x.items() == [(("c", 0), 2)]
    x.validate()
    with pytest.raises(IndexError):
        Element(SHAPES["Z^2"], {("f", 2): 1})
    with pytest.raises(KeyError):
        Element(SHAPES["Z^2"], {("g", 0): 1})
    with pytest.raises(ShapeMismatch):
        SHAPES["Z^2"].zero() + QZ.zero()


@pytest.mark.parametrize("name", sorted(SHAPES))
def test_module_laws_seeded(name):
    shape = SHAPES[name]
    rng = random.Random(name)
    for _ in range(500):
        x, y, z = (random_element(shape, rng, 4, 20) for _ in range(3))
        n, m = rng.randint(-9, 9), rng.randint(-9, 9)
        assert (x + y) + z == x + (y + z)
        assert x + y == y + x
        assert x + shape.zero() == x
        assert (x - x).is_zero()
        assert n * (x + y) == n * x + n * y
        assert (n + m) * x == n * x + m * x
        assert (n * m) * x == n * (m * x)
        for e in (x + y, n * x, -z):
            e.validate()


@pytest.mark.parametrize("name", sorted(SHAPES))
@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 12))
def test_division_iff_every_coordinate_divides(name, seed, n):
    shape = SHAPES[name]
    x = random_element(shape, seed, 4, 20)
    coordwise = True
    for c, v in x.items():
        try:
            shape.family(c[0]).atom.divide(n, v)
        except NotDivisible:
            coordwise = False
    try:
        y = x.divide(n)
    except NotDivisible:
        assert not coordwise
        return
    assert coordwise and n * y == x
    y.validate()


def test_json_round_trip():
    shape = SHAPES["Q^2+Z(3^inf)+(Q/Z)^omega"]
    for seed in range(30):
        x = random_element(shape, seed, 5, 30)
        assert Element.from_json(x.to_json()) == x
        assert Element.from_json(x.to_json(with_shape=False), shape) == x
    assert ModuleShape.from_json(shape.to_json()) == shape


def test_power_and_direct_sum_layout():
    base = ModuleShape.of(("a", QQ, 2))
    p = power(base, None, "N/")
    assert p.family("N/a[1]").extent is None
    d = direct_sum(("M/", base), ("x/", QZ))
    assert d.ids == ("M/a", "x/f")
