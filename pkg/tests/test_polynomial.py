from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rashba_qes.polynomial import Poly

coeff_lists = st.lists(st.fractions(-20, 20, max_denominator=9), max_size=6)


def test_trimming_and_degree():
    assert Poly([1, 2, 0, 0]).degree == 1
    assert Poly([]).degree == -1
    assert Poly([0]) == Poly()


def test_arithmetic():
    x = Poly.x()
    p = (x - 1) * (x + 2)
    assert p == Poly([-2, 1, 1])
    assert p(Fraction(1, 2)) == Fraction(-5, 4)
    assert (x + 1) ** 3 == Poly([1, 3, 3, 1])
    assert 3 - x == Poly([3, -1])
    assert p.deriv() == Poly([1, 2])


def test_exact_division():
    x = Poly.x()
    assert ((x - 3) * (x * x + 1)).exact_div(x - 3) == x * x + 1
    with pytest.raises(ArithmeticError):
        (x * x + 1).exact_div(x - 3)
    with pytest.raises(ZeroDivisionError):
        x.divmod(Poly())


@given(coeff_lists, coeff_lists.filter(lambda c: Poly(c).degree >= 0))
def test_divmod_identity(a, b):
    A, B = Poly(a), Poly(b)
    q, r = A.divmod(B)
    assert q * B + r == A
    assert r.degree < B.degree


@given(coeff_lists, coeff_lists, st.fractions(-5, 5, max_denominator=7))
def test_evaluation_is_a_ring_map(a, b, x):
    A, B = Poly(a), Poly(b)
    assert (A * B)(x) == A(x) * B(x)
    assert (A - B)(x) == A(x) - B(x)
