from fractions import Fraction

import pytest
from mpmath import mp

from momentkit.errors import ConditioningError, CrossCheckFailure, InvalidPrecision, SchemaError
from momentkit.scalars import (
    INFINITY, Arithmetic, GaussianRational, PowerSeries, Surd, abs2, parse_complex,
    parse_scalar, surd,
)


def test_surd_products_collapse_to_rationals():
    root2 = surd(1, 2)
    assert isinstance(root2, Surd)
    assert root2 * root2 == 2
    assert isinstance(root2 * root2, Fraction)
    assert surd(Fraction(3), 4) == 6


def test_surd_sum_of_commensurable_roots():
    assert surd(1, 2) + surd(1, 8) == surd(3, 2)
    with pytest.raises(TypeError):
        surd(1, 2) + 1


def test_gaussian_rational_collapses_when_real():
    z = GaussianRational(1, 1)
    product = z * z.conjugate()
    assert product == 2
    assert isinstance(product, Fraction)
    assert z / z == 1
    assert abs2(GaussianRational(3, 4)) == 25


@pytest.mark.parametrize("text,expected", [
    ("3", Fraction(3)),
    ("-7/4", Fraction(-7, 4)),
    ("+2/6", Fraction(1, 3)),
])
def test_parse_scalar_rationals_are_exact(text, expected):
    value = parse_scalar(text)
    assert isinstance(value, Fraction)
    assert value == expected


def test_parse_scalar_decimal_is_float():
    value = parse_scalar("0.25", precision=128)
    assert hasattr(value, '_mpf_')
    assert value == mp.mpf('0.25')


def test_parse_scalar_rejects_garbage():
    with pytest.raises(SchemaError):
        parse_scalar("one half")


@pytest.mark.parametrize("text,re,im", [
    ("1+2i", 1, 2),
    ("-i", 0, -1),
    ("3/2-1/2i", Fraction(3, 2), Fraction(-1, 2)),
    ("2i", 0, 2),
])
def test_parse_complex_exact(text, re, im):
    value = parse_complex(text)
    assert isinstance(value, GaussianRational)
    assert (value.real, value.imag) == (re, im)


def test_parse_complex_real_only():
    assert parse_complex("5") == 5


def test_parse_complex_float_parts():
    value = parse_complex("1.5-2i")
    assert hasattr(value, '_mpc_')
    assert value.imag == -2


def test_arithmetic_rejects_low_precision():
    with pytest.raises(InvalidPrecision):
        Arithmetic(True, 32)


def test_promotion_is_one_way():
    exact = Arithmetic(True, 128)
    assert exact.promote(Fraction(1, 3)).exact
    assert not exact.promote(mp.mpf(1)).exact
    assert exact.promote(mp.mpf(1)).precision == 128


def test_render():
    exact = Arithmetic()
    assert exact.render(Fraction(2, 3)) == "2/3"
    assert exact.render(INFINITY) == "inf"
    assert exact.render(None) == "null"
    assert exact.render(GaussianRational(1, -2)) == "1-2i"
    assert Arithmetic(False, 64).mode == "float(64)"


def test_float_zero_test_is_relative():
    arith = Arithmetic(False, 128)
    with arith.workprec():
        tiny = mp.mpf(2) ** -120
        assert arith.is_zero(tiny, slack=16)
        assert not arith.is_zero(tiny, scale=mp.mpf(2) ** -100, slack=16)


def test_identity_check_tiers():
    arith = Arithmetic(False, 128)
    with arith.workprec():
        arith.check(mp.mpf(2) ** -120)
        arith.check(mp.mpf(2) ** -100, scale=mp.mpf(2) ** 20)
        with pytest.raises(CrossCheckFailure):
            arith.check(mp.mpf(2) ** -80, message="a_0^2 disagrees")
        with pytest.raises(ConditioningError) as info:
            arith.check(3 * mp.mpf(2) ** -22, message="a_0^2 disagrees", index=0)
    assert info.value.details['bits_lost'] == 107
    assert info.value.details['index'] == 0
    assert "107 of 128 bits lost" in info.value.message


def test_exact_identity_check_has_one_tier():
    exact = Arithmetic()
    exact.check(Fraction(0))
    exact.check_close(Fraction(1, 3), Fraction(2, 6))
    with pytest.raises(CrossCheckFailure):
        exact.check(Fraction(1, 10 ** 30))
    with pytest.raises(CrossCheckFailure):
        exact.check_close(Fraction(1, 3), Fraction(1, 3) + Fraction(1, 10 ** 30))


def test_close_check_is_relative_to_size():
    arith = Arithmetic(False, 128)
    with arith.workprec():
        big = mp.mpf(10) ** 40
        arith.check_close(big, big * (1 + mp.mpf(2) ** -120))
        with pytest.raises(ConditioningError):
            arith.check_close(big, big * (1 + mp.mpf(2) ** -30))


def test_power_series_inverse():
    geometric = PowerSeries([1, -1], 5).inverse()
    assert list(geometric.coeffs) == [1, 1, 1, 1, 1]
    assert all(isinstance(c, Fraction) for c in geometric.coeffs)


def test_power_series_division():
    z = PowerSeries.variable(4)
    f = 1 / (1 + z)
    assert list(f.coeffs) == [1, -1, 1, -1]
