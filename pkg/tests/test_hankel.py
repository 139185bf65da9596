from fractions import Fraction

import pytest

from momentkit.errors import TooShort
from momentkit.hankel import Verdict, aux_dets, existence_check, hankel_dets
from momentkit.moments import Kind, even_embed, generate, normalize
from momentkit.scalars import Arithmetic


def test_hermite_determinants(hermite):
    report = hankel_dets(hermite, 3)
    assert report.h == [1, 1, 2]


def test_laguerre_determinants(laguerre):
    report = hankel_dets(laguerre, 3)
    assert report.h[1:] == [1, 4]
    assert report.s[1] == 2


def test_hermite_is_hamburger_only(hermite):
    report = existence_check(hermite)
    assert report.verdict is Verdict.HAMBURGER_OK
    assert report.first_s_failure is not None


def test_laguerre_is_stieltjes(laguerre):
    report = existence_check(laguerre)
    assert report.verdict is Verdict.STIELTJES_OK
    assert report.failing_index is None


def test_point_mass_is_degenerate():
    report = existence_check(normalize([1, 1, 1, 1]))
    assert report.verdict is Verdict.DEGENERATE
    assert report.failing_index == 2


def test_negative_determinant_is_not_hamburger():
    report = existence_check(normalize([1, 0, -1]))
    assert report.verdict is Verdict.NOT_HAMBURGER
    assert report.failing_index == 2


def test_declared_stieltjes_failing_s_test():
    seq = normalize([1, 0, 1, 0, 3], Kind.STIELTJES)
    report = existence_check(seq)
    assert report.verdict is Verdict.NOT_STIELTJES
    assert report.failing_index == 1


def test_even_embedding_stays_positive():
    embedded = even_embed(normalize([1, 1, 2], Kind.STIELTJES))
    assert hankel_dets(embedded, 3).h[2] > 0


def test_float_report_renders(lognormal):
    report = existence_check(lognormal)
    doc = report.to_dict(lognormal.arithmetic)
    assert doc['mode'] == 'float(256)'
    assert doc['verdict'] == 'stieltjes_ok'


def test_hankel_dets_needs_enough_moments(laguerre):
    with pytest.raises(TooShort):
        hankel_dets(laguerre, 8)


def test_aux_dets_laguerre():
    dets = aux_dets(generate('laguerre', 4), 2)
    assert dets.t[1] == 1
    assert dets.t[2] == 3
    assert dets.w[3] == -1
    assert dets.w[4] == -13
    assert dets.v[1] == 2
    assert dets.sum_P0_squared(1) == 2
    assert dets.sum_Q0_squared(1) == 1
    assert dets.sum_Q0_squared(2) == Fraction(13, 4)


def test_aux_dets_hermite_h_tilde(hermite):
    dets = aux_dets(hermite, 3)
    assert dets.h_tilde[1] == 0
    assert dets.h[0] == 1
    assert dets.t[0] == 0


def test_report_to_dict_renders_exact(laguerre):
    doc = existence_check(laguerre).to_dict(Arithmetic())
    assert doc['h'][:3] == ['1', '1', '4']
    assert doc['verdict'] == 'stieltjes_ok'
