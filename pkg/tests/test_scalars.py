from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from omspect.scalars import QuadScalar, is_square_free, qs

small = st.integers(-30, 30)
denoms = st.integers(1, 9)


def frac(n, d):
    return Fraction(n, d)


@st.composite
def scalars(draw, m=2):
    a = Fraction(draw(small), draw(denoms))
    b = Fraction(draw(small), draw(denoms))
    return QuadScalar(a, b, m)


def test_normalization_folds_trivial_radicands():
    assert qs(3, 0, 5) == qs(3)
    assert qs(3, 0, 5).m == 0
    assert qs(2, 1, 1) == qs(3)


def test_square_free_guard():
    with pytest.raises(ValueError):
        QuadScalar(1, 1, 8)
    assert is_square_free(2) and is_square_free(30)
    assert not is_square_free(12)


def test_mixed_radicands_rejected():
    with pytest.raises(ValueError):
        qs(1, 1, 2) + qs(1, 1, 3)
    # pure rationals combine with anything
    assert qs(1) + qs(0, 1, 3) == QuadScalar(1, 1, 3)


def test_pretty_printing():
    assert str(qs(1, -1, 2)) == "1-r"
    assert str(qs(0, 2, 2)) == "2*r"
    assert str(qs(Fraction(1, 2))) == "1/2"


@given(scalars(), scalars())
def test_field_ops_match_mpmath(x, y):
    mpmath.mp.dps = 60

    def val(q):
        # the strategy yields radicand 2, or 0 for pure rationals
        return mpmath.mpf(q.a.numerator) / q.a.denominator + \
            (mpmath.mpf(q.b.numerator) / q.b.denominator) * mpmath.sqrt(2)

    for exact, approx in [
        (x + y, val(x) + val(y)),
        (x - y, val(x) - val(y)),
        (x * y, val(x) * val(y)),
    ]:
        assert abs(val(exact) - approx) < mpmath.mpf("1e-40")


@given(scalars())
def test_sign_matches_mpmath(x):
    mpmath.mp.dps = 60
    v = mpmath.mpf(x.a.numerator) / x.a.denominator + \
        (mpmath.mpf(x.b.numerator) / x.b.denominator) * mpmath.sqrt(2)
    if abs(v) > mpmath.mpf("1e-40"):
        assert x.sign() == (1 if v > 0 else -1)
    else:
        assert x.sign() == 0


@given(scalars())
def test_inverse(x):
    if x:
        assert x * x.inverse() == qs(1)
    else:
        with pytest.raises(ZeroDivisionError):
            x.inverse()


@given(scalars(), scalars(), scalars())
def test_ring_axioms(x, y, z):
    assert (x + y) * z == x * z + y * z
    assert x * (y * z) == (x * y) * z
    assert x + (-x) == qs(0)


@given(scalars(), scalars())
def test_order_total_and_compatible(x, y):
    assert (x < y) + (x == y) + (y < x) == 1
    if x < y:
        assert x + qs(1) < y + qs(1)


def test_exact_irrational_comparisons():
    r = qs(0, 1, 2)
    assert qs(1) < r < qs(Fraction(3, 2))
    assert (r * r) == qs(2)
    assert qs(7, -5, 2) < qs(0)   # 7 < 5*sqrt(2)
    assert qs(8, -5, 2) > qs(0)   # 8 > 5*sqrt(2)
