import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from invlim.atoms import (
    QQ,
    ZZ,
    Atom,
    AtomElement,
    AtomMismatch,
    Cyclic,
    NotDivisible,
    Pruefer,
    QmodZ,
    atom_arith,
    atom_divide,
    atom_embed,
    factorize,
    is_prime,
    prime_power,
)
from invlim.sums import random_value

ATOMS = [ZZ, Cyclic(6), Cyclic(8), QQ, QmodZ, Pruefer(2), Pruefer(3)]


def el(atom, v):
    return AtomElement(atom, v)


def test_worked_arithmetic():
    assert atom_arith("add", el(QmodZ, Fraction(2, 3)), el(QmodZ, Fraction(2, 3))).value == Fraction(1, 3)
    assert atom_arith("scalar_mul", el(Pruefer(2), Fraction(1, 4)), n=3).value == Fraction(3, 4)
    assert atom_arith("neg", el(Cyclic(6), -2)).value == 2
    assert (-el(Cyclic(6), 2)).value == 4


def test_worked_division():
    assert atom_divide(3, el(QQ, Fraction(1, 2))).value == Fraction(1, 6)
    assert atom_divide(2, el(QmodZ, Fraction(1, 3))).value == Fraction(1, 6)
    with pytest.raises(NotDivisible):
        atom_divide(2, el(Cyclic(6), 1))


def test_qmodz_division_witness_is_minimal():
    # brute force over representatives k/6
    sols = [Fraction(k, 6) for k in range(6) if QmodZ.canonical(2 * Fraction(k, 6)) == Fraction(1, 3)]
    assert QmodZ.divide(2, Fraction(1, 3)) == min(sols)


def test_cyclic_division_exhaustive():
    for d in range(2, 25):
        atom = Cyclic(d)
        for n in range(1, 13):
            for x in range(d):
                sols = [y for y in range(d) if (n * y) % d == x]
                if sols:
                    assert atom.divide(n, x) == sols[0]
                else:
                    with pytest.raises(NotDivisible):
                        atom.divide(n, x)


def test_embeddings():
    assert atom_embed("cyclic_into_pruefer", el(Cyclic(4), 1)) == el(Pruefer(2), Fraction(1, 4))
    assert atom_embed("reduce_Q_to_QmodZ", el(QQ, Fraction(3, 2))).value == Fraction(1, 2)
    assert atom_embed("reduce_Q_to_QmodZ", el(QQ, 7)).is_zero()
    assert atom_embed("pruefer_into_QmodZ", el(Pruefer(3), Fraction(2, 9))) == el(QmodZ, Fraction(2, 9))
    with pytest.raises(ValueError):
        atom_embed("cyclic_into_pruefer", el(Cyclic(6), 1))
    with pytest.raises(AtomMismatch):
        atom_embed("reduce_Q_to_QmodZ", el(ZZ, 1))


def test_cyclic_into_pruefer_additive_exhaustive():
    for pk in (2, 3, 4, 5, 7, 8, 9, 16, 25, 27):
        atom = Cyclic(pk)
        emb = {x: atom_embed("cyclic_into_pruefer", el(atom, x)) for x in range(pk)}
        assert len(set(emb.values())) == pk  # injective
        for x in range(pk):
            for y in range(pk):
                assert emb[x] + emb[y] == emb[(x + y) % pk]


def test_reduce_kernel_is_integers():
    rng = random.Random(3)
    for _ in range(200):
        q = Fraction(rng.randint(-50, 50), rng.randint(1, 6))
        assert atom_embed("reduce_Q_to_QmodZ", el(QQ, q)).is_zero() == (q.denominator == 1)


@pytest.mark.parametrize("atom", ATOMS, ids=str)
def test_group_laws_seeded(atom):
    rng = random.Random(str(atom))
    for _ in range(500):
        x, y, z = (el(atom, random_value(atom, rng, 30)) for _ in range(3))
        zero = el(atom, atom.zero())
        assert (x + y) + z == x + (y + z)
        assert x + y == y + x
        assert x + zero == x
        assert (x + (-x)).is_zero()
        assert atom.is_canonical((x + y).value)


@pytest.mark.parametrize("atom", ATOMS, ids=str)
@given(n=st.integers(1, 40), seed=st.integers(0, 10**6))
def test_division_is_sound(atom, n, seed):
    x = random_value(atom, random.Random(seed), 40)
    try:
        y = atom.divide(n, x)
    except NotDivisible:
        assert not atom.divisible
        return
    assert atom.is_canonical(y)
    assert atom.mul(n, y) == x


def test_divisibility_flags():
    assert [a.divisible for a in ATOMS] == [False, False, False, True, True, True, True]


def test_invalid_atoms():
    with pytest.raises(ValueError):
        Cyclic(1)
    with pytest.raises(ValueError):
        Pruefer(4)
    with pytest.raises(ValueError):
        Atom("nope")


def test_canonical_representatives():
    assert Pruefer(2).canonical(Fraction(-1, 4)) == Fraction(3, 4)
    with pytest.raises(ValueError):
        Pruefer(2).canonical(Fraction(1, 3))
    assert not QmodZ.is_canonical(Fraction(1))
    assert Cyclic(5).canonical(-1) == 4


def test_atom_json_round_trip():
    for atom in ATOMS:
        assert Atom.from_json(atom.to_json()) == atom
        v = random_value(atom, random.Random(1), 20)
        assert atom.value_from_json(atom.value_to_json(v)) == v
    assert Pruefer(2).to_json() == {"atom": "pruefer", "p": "2"}


def test_number_theory_helpers():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert prime_power(27) == (3, 3) and prime_power(12) is None and prime_power(1) is None
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
