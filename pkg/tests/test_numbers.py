import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricslag.numbers import QComplex, QuadSurd, arg_compare, cross, squarefree_split

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=30)
radicands = st.sampled_from([1, 2, 3, 5, 6, 7, 78, Fraction(1, 3), Fraction(8, 3)])


def test_squarefree_split():
    assert squarefree_split(12) == (2, 3)
    assert squarefree_split(78) == (1, 78)


def test_perfect_square_folds_to_rational():
    x = QuadSurd(1, 2, 9)
    assert x.is_rational and x == 7


def test_sqrt_of_fraction():
    r = QuadSurd.sqrt(Fraction(1, 3))
    assert r * r == Fraction(1, 3)
    assert str(r) == "1/3*sqrt(3)"


def test_golden_string():
    x = QuadSurd(10, -1, 78)
    assert str(x) == "10 - sqrt(78)"
    assert QuadSurd.parse("10 - sqrt(78)") == x
    assert x.sign() == 1
    assert (QuadSurd(9, -1, 78) - x).sign() == -1


@given(fracs, fracs, fracs, fracs, radicands)
def test_field_ops_match_floats(a, b, c, d, r):
    x, y = QuadSurd(a, b, r), QuadSurd(c, d, r)
    fx, fy = float(x), float(y)
    assert float(x + y) == pytest.approx(fx + fy, abs=1e-9)
    assert float(x * y) == pytest.approx(fx * fy, rel=1e-9, abs=1e-9)
    if y != 0:
        assert float(x / y) == pytest.approx(fx / fy, rel=1e-9, abs=1e-9)


@given(fracs, fracs, radicands)
def test_sign_is_exact(a, b, r):
    x = QuadSurd(a, b, r)
    exact = x.sign()
    # exact sign agrees with high-precision float unless the value is tiny
    if abs(float(x)) > 1e-9:
        assert exact == (1 if float(x) > 0 else -1)
    if exact == 0:
        assert x == 0


@given(fracs, fracs, radicands)
def test_parse_roundtrip(a, b, r):
    x = QuadSurd(a, b, r)
    assert QuadSurd.parse(str(x)) == x


@given(fracs, fracs, fracs, fracs)
@settings(max_examples=300)
def test_arg_compare_matches_cmath(a, b, c, d):
    z, w = QComplex(a, b), QComplex(c, d)
    if z == 0 or w == 0:
        return
    pz, pw = cmath.phase(complex(z)), cmath.phase(complex(w))
    # principal branch (-pi, pi]
    pz = math.pi if pz == -math.pi else pz
    pw = math.pi if pw == -math.pi else pw
    got = arg_compare(z, w)
    if abs(pz - pw) > 1e-12:
        assert got == (1 if pz > pw else -1)
    else:
        assert got == 0


def test_cross_is_imaginary_part_of_ratio_numerator():
    z, w = QComplex(1, 2), QComplex(-3, 1)
    assert float(cross(z, w)) == pytest.approx((complex(z).conjugate() * complex(w)).imag)


def test_times_i():
    z = QComplex(Fraction(1, 2), 3)
    assert complex(z.times_i(1)) == pytest.approx(1j * complex(z))
    assert complex(z.times_i(-1)) == pytest.approx(-1j * complex(z))
