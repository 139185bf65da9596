from fractions import Fraction

import pytest
from mpmath import mp

from momentkit.errors import NotExists, TooShort, UnsupportedShape
from momentkit.moments import generate
from momentkit.pade import PadeValue, _signed_monotone, pade_table, pade_value, taylor_match_check
from momentkit.scalars import Arithmetic

LAGUERRE_STIELTJES_AT_MINUS_ONE = 0.596347362323194


def test_friedrichs_staircase_value():
    seq = generate('laguerre', 4)
    assert pade_value(seq, 0, 1, 1).value == Fraction(1, 2)


def test_diagonal_staircase_value():
    # (1 + z) / (1 + 2z)
    seq = generate('laguerre', 4)
    cell = pade_value(seq, 1, 1, 1)
    assert cell.value == Fraction(2, 3)
    assert cell.ell == 1


def test_float_point_promotes():
    seq = generate('laguerre', 4)
    value = pade_value(seq, 0, 1, mp.mpf(1)).value
    assert abs(value - mp.mpf(0.5)) < mp.mpf(2) ** -200


@pytest.mark.parametrize("N,M,order", [(0, 1, 2), (1, 1, 3)])
def test_taylor_match_small(N, M, order):
    assert taylor_match_check(generate('laguerre', 4), N, M) == order


def test_taylor_match_shifted_shape():
    assert taylor_match_check(generate('laguerre', 10), 3, 1) >= 5


def test_taylor_match_reciprocal_shape():
    # denominator 1 + z - z^2
    assert taylor_match_check(generate('laguerre', 8), 0, 2) >= 3


def test_diagonal_does_not_exist_for_hermite(hermite):
    with pytest.raises(NotExists):
        pade_value(hermite, 1, 1, 1)


def test_shape_validation(laguerre):
    with pytest.raises(UnsupportedShape):
        pade_value(laguerre, 6, 1, 1, ell_max=3)
    with pytest.raises(TooShort):
        pade_value(laguerre, 7, 7, 1)


def test_table_brackets_stieltjes_transform():
    seq = generate('laguerre', 20)
    table = pade_table(seq, 1, 10, shapes=(-1, 0, 1))
    assert table.monotone == {-1: True, 0: True, 1: True}
    lower, upper = table.bracket
    assert lower <= LAGUERRE_STIELTJES_AT_MINUS_ONE <= upper
    assert table.warnings == []


def test_table_rejects_negative_point(laguerre):
    with pytest.raises(UnsupportedShape):
        pade_table(laguerre, -1, 3)


def test_table_needs_enough_moments(laguerre):
    with pytest.raises(TooShort):
        pade_table(laguerre, 1, 7)


def test_table_without_stieltjes_declaration(hermite):
    table = pade_table(hermite, Fraction(1, 2), 2)
    assert table.monotone == {0: None, 1: None}
    assert table.warnings
    assert [cell.exists for cell in table.rows[1]] == [False, True]


def test_table_rows(laguerre):
    table = pade_table(laguerre, 1, 2)
    rows = table.to_rows(Arithmetic(True))
    assert rows[0] == ['ell', 'N', 'M', 'value', 'exists']
    assert rows[1] == ['0', '0', '1', '1/2', 'true']
    assert table.to_dict(Arithmetic(True))["bracket"] == ["4/7", "8/13"]


def _cells(values):
    return [PadeValue(N - 1, N, 1, v) for N, v in enumerate(values, start=1)]


@pytest.mark.parametrize("values,expected", [
    ([Fraction(1, 2), Fraction(4, 7), Fraction(8, 13)], True),
    ([Fraction(1, 2), Fraction(1, 2), Fraction(8, 13)], False),
    ([Fraction(1, 2), Fraction(4, 7), Fraction(1, 2)], False),
])
def test_exact_monotonicity_is_strict(values, expected):
    assert _signed_monotone(_cells(values), 0, Arithmetic(True)) is expected


def test_exact_equal_steps_allowed_when_not_strict():
    values = [Fraction(1), Fraction(1), Fraction(1)]
    assert _signed_monotone(_cells(values), 0, Arithmetic(True), strict=False)
    assert _signed_monotone(_cells(values), 1, Arithmetic(True), strict=False)


def test_float_stalled_step_is_not_monotone():
    arith = Arithmetic(False, 128)
    with mp.workprec(128):
        v = mp.mpf('0.6')
        stalled = [v, v + v * mp.mpf(2) ** -126]
        moving = [v, v + mp.mpf(2) ** -40]
    assert not _signed_monotone(_cells(stalled), 0, arith)
    assert _signed_monotone(_cells(moving), 0, arith)


def test_table_at_origin_is_constant(laguerre):
    table = pade_table(laguerre, 0, 4)
    assert table.monotone == {0: True, 1: True}
    assert all(cell.value == 1 for cell in table.rows[0])


@pytest.mark.parametrize("x", [Fraction(1, 2), 1, 3])
def test_laguerre_rows_strictly_monotone(x):
    table = pade_table(generate('laguerre', 32), x, 15, shapes=(-1, 0, 1))
    assert table.monotone == {-1: True, 0: True, 1: True}
    assert table.warnings == []


@pytest.mark.parametrize("x", ['0.5', '1', '3'])
def test_lognormal_rows_strictly_monotone(x):
    seq = generate('lognormal', 32, precision=1024)
    with mp.workprec(1024):
        point = mp.mpf(x)
    table = pade_table(seq, point, 8)
    assert table.monotone == {0: True, 1: True}


def test_deep_bracket_is_tight():
    table = pade_table(generate('laguerre', 30), 1, 15)
    lower, upper = table.bracket
    assert lower <= LAGUERRE_STIELTJES_AT_MINUS_ONE <= upper
    assert upper - lower < Fraction(1, 1000)
