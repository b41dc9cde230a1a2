from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ as SZZ
from sympy.matrices.normalforms import smith_normal_form

from invlim.exact_arith import IntMatrix, format_rational, parse_rational, snf


def matrices(max_dim=5, bound=30):
    return st.integers(0, max_dim).flatmap(
        lambda r: st.integers(0, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c),
                               min_size=r, max_size=r).map(lambda rows: IntMatrix.from_rows(rows, c))))


def check_snf(a):
    res = snf(a)
    assert res.u @ a @ res.v == res.s
    assert res.s.is_diagonal()
    d = res.diagonal
    assert all(x >= 0 for x in d)
    for x, y in zip(d, d[1:]):
        assert (y % x == 0) if x else y == 0
    assert abs(res.u.det()) == 1 and abs(res.v.det()) == 1
    return res


def test_rational_text_round_trip():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"
    with pytest.raises(ValueError):
        parse_rational("1/0")
    with pytest.raises(ValueError):
        parse_rational("0.5")


def test_snf_identity():
    i3 = IntMatrix.identity(3)
    res = snf(i3)
    assert (res.u, res.s, res.v) == (i3, i3, i3)


def test_snf_two_by_two():
    a = IntMatrix.from_rows([[2, 4], [6, 8]])
    res = check_snf(a)
    assert res.diagonal == [2, 4]
    assert res.diagonal[0] * res.diagonal[1] == abs(a.det()) == 8


def test_snf_zero():
    assert snf(IntMatrix.from_rows([[0]])).s == IntMatrix.from_rows([[0]])


def test_snf_empty_shapes():
    for r, c in [(0, 0), (0, 3), (3, 0)]:
        res = check_snf(IntMatrix.zeros(r, c))
        assert res.u == IntMatrix.identity(r) and res.v == IntMatrix.identity(c)


def test_snf_negative_pivot_absorbed():
    res = check_snf(IntMatrix.from_rows([[-5]]))
    assert res.diagonal == [5]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_laws_and_sympy_agreement(a):
    res = check_snf(a)
    assert snf(a) == res
    if a.rows and a.cols:
        oracle = smith_normal_form(Matrix(a.tolist()), domain=SZZ)
        want = [abs(oracle[i, i]) for i in range(min(a.rows, a.cols))]
        assert res.diagonal == want


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_det_matches_sympy(rows):
    assert IntMatrix.from_rows(rows).det() == Matrix(rows).det()


@settings(max_examples=60, deadline=None)
@given(matrices(max_dim=4))
def test_unimodular_inverse(a):
    u = snf(a).u
    assert u @ u.inverse_unimodular() == IntMatrix.identity(u.rows)


def test_matrix_json_round_trip():
    a = IntMatrix.from_rows([[1, -2], [10**30, 0]])
    assert IntMatrix.from_json(a.to_json()) == a
    with pytest.raises(ValueError):
        IntMatrix.from_json([[1, 2], [3]])
    with pytest.raises(ValueError):
        IntMatrix.from_json([[1.5]])
