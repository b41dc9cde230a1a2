import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ as SZZ
from sympy.matrices.normalforms import invariant_factors

from invlim.atoms import QQ, Cyclic, Pruefer, QmodZ
from invlim.exact_arith import IntMatrix
from invlim.homs import apply
from invlim.hull import (
    FREE,
    build_injective_presentation,
    decompose,
    kernel_membership,
    presentation_from_json,
)
from invlim.sums import Element, random_element
from invlim.suites import random_kernel_element


def pres_of(rows, ngens):
    return build_injective_presentation(IntMatrix.from_rows(rows, len(rows[0]) if rows else 0), ngens)


def test_decompose_worked_examples():
    z = decompose(IntMatrix.zeros(1, 0), 1)
    assert (z.rank, z.invariant_factors) == (1, ())
    six = decompose(IntMatrix.from_rows([[6]]), 1)
    assert (six.rank, six.invariant_factors) == (0, (6,))
    assert [(p, k) for p, k, _ in six.prime_power_parts] == [(2, 1), (3, 1)]
    mixed = decompose(IntMatrix.from_rows([[2, 0], [0, 0]]), 2)
    assert (mixed.rank, mixed.invariant_factors) == (1, (2,))


def test_unit_factors_are_dropped():
    d = decompose(IntMatrix.from_rows([[1, 0], [0, 4]]), 2)
    assert d.invariant_factors == (4,) and d.rank == 0 and d.order == 4


def test_free_hull():
    pres = pres_of([[]], 1)
    assert [f.atom for f in pres.m_shape.families] == [QQ]
    assert [f.atom for f in pres.n_shape.families] == [QmodZ]
    assert apply(pres.f, Element(pres.m_shape, {(FREE, 0): Fraction(3, 2)})) == \
        Element(pres.n_shape, {(FREE, 0): Fraction(1, 2)})
    assert apply(pres.e, Element(pres.a_shape, {(FREE, 0): 5})) == Element(pres.m_shape, {(FREE, 0): 5})


def test_z6_hull_and_kernel_count():
    pres = pres_of([[6]], 1)
    assert [f.atom for f in pres.m_shape.families] == [Pruefer(2), Pruefer(3)]
    assert pres.m_shape == pres.n_shape
    grid = [Element(pres.m_shape, {("t0", 0): Fraction(a, 2), ("t1", 0): Fraction(b, 3)})
            for a in range(2) for b in range(3)]
    assert all(apply(pres.f, x).is_zero() for x in grid)
    wider = [Element(pres.m_shape, {("t0", 0): Fraction(a, 4), ("t1", 0): Fraction(b, 9)})
             for a in range(4) for b in range(9)]
    assert sum(apply(pres.f, x).is_zero() for x in wider) == 6


def test_z4_plus_z_hull():
    pres = pres_of([[4, 0], [0, 0]], 2)
    atoms = {f.atom for f in pres.m_shape.families}
    assert atoms == {Pruefer(2), QQ}
    rng = random.Random(0)
    for _ in range(300):
        x = Element(pres.m_shape, {(FREE, 0): Fraction(rng.randint(-40, 40), rng.randint(1, 16)),
                                   ("t0", 0): Fraction(rng.randrange(16), 16)})
        in_ker = apply(pres.f, x).is_zero()
        assert in_ker == (x[(FREE, 0)].denominator == 1 and (4 * x[("t0", 0)]).denominator == 1)


def test_kernel_membership_worked_examples():
    z = pres_of([[]], 1)
    assert kernel_membership(z, Element(z.m_shape, {(FREE, 0): 5})) == Element(z.a_shape, {(FREE, 0): 5})
    assert kernel_membership(z, Element(z.m_shape, {(FREE, 0): Fraction(1, 2)})) is None

    six = pres_of([[6]], 1)
    x = Element(six.m_shape, {("t0", 0): Fraction(1, 2), ("t1", 0): Fraction(1, 3)})
    a = kernel_membership(six, x)
    assert a is not None and apply(six.e, a) == x
    assert six.generators_of(a) == (5,)
    # enumeration over residues: r * e(generator) hits x only for r = 5
    g = apply(six.e, six.a_element((1,)))
    assert [r for r in range(6) if g.scale(r) == x] == [5]


presentations = st.integers(1, 3).flatmap(
    lambda n: st.integers(0, 3).flatmap(
        lambda m: st.lists(st.lists(st.integers(-60, 60), min_size=m, max_size=m), min_size=n, max_size=n)
        .map(lambda rows: (IntMatrix.from_rows(rows, m), n))))


@settings(max_examples=60, deadline=None)
@given(presentations, st.integers(0, 10**6))
def test_exactness_properties(pm, seed):
    mat, ngens = pm
    pres = build_injective_presentation(mat, ngens)
    rng = random.Random(seed)
    for fam in pres.m_shape.families + pres.n_shape.families:
        assert fam.atom.divisible
    for _ in range(20):
        a = random_element(pres.a_shape, rng, 3, 60)
        ea = apply(pres.e, a)
        assert ea.is_zero() == a.is_zero()
        assert apply(pres.f, ea).is_zero()
        assert pres.a_element(pres.generators_of(a)) == a
        k = random_kernel_element(pres, rng)
        back = kernel_membership(pres, k)
        assert back is not None and apply(pres.e, back) == k


@settings(max_examples=60, deadline=None)
@given(presentations)
def test_invariant_factors_match_sympy(pm):
    mat, ngens = pm
    dec = decompose(mat, ngens)
    if mat.cols:
        oracle = [abs(int(d)) for d in invariant_factors(Matrix(mat.tolist()), domain=SZZ)]
    else:
        oracle = []
    nonzero = [d for d in oracle if d]
    assert list(dec.invariant_factors) == [d for d in nonzero if d != 1]
    assert dec.rank == ngens - len(nonzero)


def test_generator_coordinates_respect_relations():
    # A = Z^2 / <(2, 4), (6, 8)>: relations map to zero, generators to the right classes
    pres = pres_of([[2, 6], [4, 8]], 2)
    assert pres.a_element((2, 4)).is_zero() and pres.a_element((6, 8)).is_zero()
    for v in itertools.product(range(-3, 4), repeat=2):
        a = pres.a_element(v)
        w = pres.generators_of(a)
        assert pres.a_element(w) == a


def test_exhaustive_order_small_groups():
    for rows in ([[2, 0], [0, 2]], [[8]], [[4, 0], [0, 6]], [[3, 6], [6, 3]], [[2, 0, 0], [0, 4, 0], [0, 0, 2]]):
        pres = pres_of(rows, len(rows))
        exp = pres.decomposition.exponent
        axes = []
        for fam in pres.m_shape.families:
            p, pe = fam.atom.modulus, 1
            while exp % (pe * p) == 0:
                pe *= p
            axes.append([((fam.fid, 0), Fraction(j, pe)) for j in range(pe)])
        count = sum(apply(pres.f, Element(pres.m_shape, dict(c))).is_zero() for c in itertools.product(*axes))
        assert count == pres.decomposition.order == abs(IntMatrix.from_rows(rows).det())


def test_presentation_json_forms():
    assert presentation_from_json({"ngens": 2})[1] == 2
    mat, n = presentation_from_json({"ngens": 1, "presentation": [["6"]]})
    assert (mat.tolist(), n) == ([[6]], 1)
    assert presentation_from_json([["2", "0"], ["0", "3"]])[1] == 2
    with pytest.raises(ValueError):
        presentation_from_json({"ngens": 2, "presentation": [["6"]]})
    with pytest.raises(ValueError):
        presentation_from_json("nope")


def test_atoms_in_a_shape():
    pres = pres_of([[12, 0], [0, 18]], 2)
    mods = sorted(f.atom.modulus for f in pres.a_shape.families)
    assert mods == [2, 3, 4, 9]
    assert all(f.atom == Cyclic(f.atom.modulus) for f in pres.a_shape.families)
