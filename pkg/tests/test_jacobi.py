from fractions import Fraction

import pytest
from mpmath import mp

from momentkit.errors import KreinCornerUndefined, PoleHit, TooShort
from momentkit.jacobi import (
    Variant, eigensystem, kernel_residual, moments_from_jacobi, resolvent,
    ricatti_residual, sandwich, section, strip,
)
from momentkit.moments import generate
from momentkit.orthopoly import monic_values, recursion_coeffs
from momentkit.scalars import GaussianRational, PowerSeries, to_mp

# integral of e^{-t} / (1 + t) over [0, inf)
LAGUERRE_STIELTJES_AT_MINUS_ONE = 0.596347362323194


def test_friedrichs_section(laguerre_coeffs):
    sec = section(laguerre_coeffs, 3)
    assert sec.variant is Variant.F
    assert sec.diag == [1, 3, 5]
    assert sec.a2 == [1, 4]
    assert sec.alpha is None


def test_krein_section_laguerre(laguerre_coeffs):
    sec = section(laguerre_coeffs, 2, 'K')
    assert sec.alpha == 2
    assert sec.diag == [1, 1]
    assert sec.determinant() == 0


def test_krein_section_undefined_for_hermite(hermite_coeffs):
    with pytest.raises(KreinCornerUndefined):
        section(hermite_coeffs, 2, Variant.K)


def test_section_size_is_bounded(laguerre_coeffs):
    with pytest.raises(TooShort):
        section(laguerre_coeffs, laguerre_coeffs.N + 1)


def test_hermite_quadrature():
    coeffs = recursion_coeffs(generate('hermite', 4))
    quad = eigensystem(section(coeffs, 2))
    with mp.workprec(256):
        assert abs(quad.nodes[0] + 1) < mp.mpf(2) ** -120
        assert abs(quad.nodes[1] - 1) < mp.mpf(2) ** -120
        for w in quad.weights:
            assert abs(w - mp.mpf(1) / 2) < mp.mpf(2) ** -120


def test_krein_quadrature_has_node_at_zero(laguerre_coeffs):
    quad = eigensystem(section(laguerre_coeffs, 2, Variant.K))
    assert quad.nodes[0] == 0
    with mp.workprec(256):
        assert abs(quad.weights[0] - mp.mpf(1) / 2) < mp.mpf(2) ** -120
        assert abs(quad.nodes[1] - 2) < mp.mpf(2) ** -120


@pytest.mark.parametrize("variant", [Variant.F, Variant.K])
def test_quadrature_reproduces_moments(laguerre, laguerre_coeffs, variant):
    N = 5
    quad = eigensystem(section(laguerre_coeffs, N, variant))
    # F is exact through degree 2N - 1, K through 2N - 2
    top = 2 * N - 1 if variant is Variant.F else 2 * N - 2
    with mp.workprec(256):
        for k, value in enumerate(quad.moments(top)):
            exact = to_mp(laguerre.gamma[k])
            assert abs(value - exact) < mp.mpf(2) ** -100 * exact


def test_quadrature_to_dict(hermite_coeffs):
    doc = eigensystem(section(hermite_coeffs, 3)).to_dict()
    assert doc['variant'] == 'F'
    assert len(doc['nodes']) == len(doc['weights']) == 3


def test_resolvent_is_minus_q_over_p(hermite_coeffs):
    z = GaussianRational(1, 2)
    N = 4
    p, q = monic_values(hermite_coeffs, z, N)
    assert resolvent(section(hermite_coeffs, N), z) == -q[N] / p[N]


def test_resolvent_hermite_at_i(hermite_coeffs):
    assert resolvent(section(hermite_coeffs, 2), GaussianRational(0, 1)) == GaussianRational(0, Fraction(1, 2))


def test_resolvent_pole(hermite_coeffs):
    with pytest.raises(PoleHit):
        resolvent(section(hermite_coeffs, 2), 1)


def test_resolvent_power_series(laguerre_coeffs):
    series = resolvent(section(laguerre_coeffs, 2), PowerSeries.variable(4))
    assert isinstance(series, PowerSeries)


@pytest.mark.parametrize("variant", [Variant.F, Variant.K])
def test_ricatti_identity(laguerre_coeffs, variant):
    sec = section(laguerre_coeffs, 4, variant)
    assert ricatti_residual(sec, Fraction(-1, 3)) == 0
    assert ricatti_residual(sec, GaussianRational(2, 1)) == 0


def test_sandwich_brackets_stieltjes_transform(laguerre_coeffs):
    lower, upper = sandwich(laguerre_coeffs, 1, 1)
    assert lower == Fraction(1, 2)
    previous = (lower, upper)
    for N in range(1, 6):
        lower, upper = sandwich(laguerre_coeffs, 1, N)
        assert lower <= LAGUERRE_STIELTJES_AT_MINUS_ONE <= upper
        assert lower >= previous[0] and upper <= previous[1]
        previous = (lower, upper)


def test_kernel_residual_vanishes_for_krein_section(laguerre_coeffs):
    assert kernel_residual(section(laguerre_coeffs, 4, Variant.K)) < mp.mpf(2) ** -200
    assert kernel_residual(section(laguerre_coeffs, 4, Variant.F)) > mp.mpf(2) ** -10


def test_strip_laguerre(laguerre_coeffs):
    stripped = strip(laguerre_coeffs)
    assert list(stripped.b[:3]) == [3, 5, 7]
    assert list(stripped.a2[:3]) == [4, 9, 16]


def test_stripped_section_keeps_corner(laguerre_coeffs):
    sec = section(laguerre_coeffs, 3, Variant.K)
    inner = sec.stripped()
    assert inner.N == 2
    assert inner.corner == sec.corner


def test_moments_from_jacobi():
    hermite = recursion_coeffs(generate('hermite', 8))
    assert list(moments_from_jacobi(hermite, 8).gamma) == [1, 0, 1, 0, 3, 0, 15, 0, 105]
    laguerre = recursion_coeffs(generate('laguerre', 6))
    assert list(moments_from_jacobi(laguerre, 6).gamma) == [1, 1, 2, 6, 24, 120, 720]
    with pytest.raises(TooShort):
        moments_from_jacobi(laguerre, 7)


@pytest.mark.parametrize("family", ['hermite', 'laguerre'])
@pytest.mark.parametrize("N", [1, 4, 8, 12])
def test_friedrichs_quadrature_is_gaussian(family, N):
    seq = generate(family, 24)
    quad = eigensystem(section(recursion_coeffs(seq), N))
    with mp.workprec(256):
        assert all(w > 0 for w in quad.weights)
        assert abs(mp.fsum(quad.weights) - 1) < mp.mpf(2) ** -200
        for k, value in enumerate(quad.moments(2 * N - 1)):
            exact = to_mp(seq.gamma[k])
            assert abs(value - exact) < mp.mpf(2) ** -160 * max(1, abs(exact))


def test_krein_quadrature_stops_one_degree_early(laguerre_coeffs):
    moments = eigensystem(section(laguerre_coeffs, 3, Variant.K)).moments(5)
    with mp.workprec(256):
        assert abs(moments[4] - 24) < mp.mpf(2) ** -160 * 24
        assert abs(moments[5] - 120) > mp.mpf('1e-3')


@pytest.mark.parametrize("N", range(1, 6))
def test_friedrichs_nodes_interlace(laguerre_coeffs, N):
    inner = eigensystem(section(laguerre_coeffs, N)).nodes
    outer = eigensystem(section(laguerre_coeffs, N + 1)).nodes
    for k, x in enumerate(inner):
        assert outer[k] < x < outer[k + 1]
