from fractions import Fraction

import pytest
from mpmath import mp

from momentkit.errors import (
    CoincidentPoints, EmptyInput, LowerHalfPlanePoint, NonpositiveMass, NotStieltjes,
    OddShiftOnHamburger, SchemaError, TooShort, UnknownFamily,
)
from momentkit.jacobi import moments_from_jacobi, strip
from momentkit.moments import (
    Kind, even_embed, generate, index_shift, modified_moments, normalize,
    reciprocal_moments, shift_moments,
)
from momentkit.orthopoly import recursion_coeffs
from momentkit.scalars import GaussianRational, to_mp


def test_normalize_scales_by_gamma0():
    seq = normalize([2, 2, 4])
    assert list(seq.gamma) == [1, 1, 2]
    assert seq.exact


def test_normalize_keeps_normalized_input():
    assert list(normalize([1, 0, 1, 0, 3]).gamma) == [1, 0, 1, 0, 3]


def test_normalize_float_input():
    with mp.workprec(256):
        raw = [mp.exp(mp.mpf(1) / 4), mp.e, mp.exp(mp.mpf(9) / 4)]
        seq = normalize(raw, Kind.STIELTJES, precision=256)
        assert not seq.exact
        assert abs(seq.gamma[1] - mp.exp(mp.mpf(3) / 4)) < mp.mpf(2) ** -240
        assert abs(seq.gamma[2] - mp.exp(2)) < mp.mpf(2) ** -240


@pytest.mark.parametrize("raw,error", [
    ([], EmptyInput),
    ([0, 1], NonpositiveMass),
    ([-1, 2], NonpositiveMass),
])
def test_normalize_rejects(raw, error):
    with pytest.raises(error):
        normalize(raw)


def test_generate_hermite():
    seq = generate('hermite', 6)
    assert list(seq.gamma) == [1, 0, 1, 0, 3, 0, 15]
    assert seq.kind is Kind.HAMBURGER


def test_generate_laguerre():
    seq = generate('laguerre', 4)
    assert list(seq.gamma) == [1, 1, 2, 6, 24]
    assert seq.kind is Kind.STIELTJES


def test_generate_lognormal():
    seq = generate('lognormal', 2, precision=256)
    assert not seq.exact
    with mp.workprec(256):
        assert seq.gamma[0] == 1
        assert abs(seq.gamma[1] - mp.exp(mp.mpf(3) / 4)) < mp.mpf(2) ** -250
        assert abs(seq.gamma[2] / mp.exp(2) - 1) < mp.mpf(2) ** -250


def test_generate_rejects():
    with pytest.raises(UnknownFamily):
        generate('poisson', 4)
    with pytest.raises(TooShort):
        generate('hermite', 1)


def test_shift_moments():
    assert list(shift_moments(normalize([1, 0, 1]), 1).gamma) == [1, 1, 2]


def test_shift_by_zero_is_identity(hermite):
    assert shift_moments(hermite, 0).gamma == hermite.gamma


def test_shift_round_trip(laguerre):
    back = shift_moments(shift_moments(laguerre, Fraction(3, 2)), Fraction(-3, 2))
    assert back.gamma == laguerre.gamma


def test_index_shift():
    laguerre = generate('laguerre', 5)
    assert list(index_shift(laguerre, 1).gamma) == [1, 2, 6, 24, 120]
    hermite = generate('hermite', 6)
    assert list(index_shift(hermite, 2).gamma) == [1, 0, 3, 0, 15]


def test_odd_index_shift_needs_stieltjes(hermite):
    with pytest.raises(OddShiftOnHamburger):
        index_shift(hermite, 1)


def test_even_embed():
    seq = normalize([1, 1, 2], Kind.STIELTJES)
    embedded = even_embed(seq)
    assert list(embedded.gamma) == [1, 0, 1, 0, 2]
    assert embedded.kind is Kind.HAMBURGER
    assert list(even_embed(normalize([1], Kind.STIELTJES)).gamma) == [1]


def test_even_embed_needs_stieltjes(hermite):
    with pytest.raises(NotStieltjes):
        even_embed(hermite)


def test_reciprocal_moments_laguerre():
    stripped = reciprocal_moments(generate('laguerre', 4))
    assert list(stripped.gamma) == [1, 3, 13]


def test_reciprocal_moments_match_stripped_jacobi():
    seq = generate('laguerre', 8)
    via_series = reciprocal_moments(seq)
    via_jacobi = moments_from_jacobi(strip(recursion_coeffs(seq)), via_series.K)
    assert via_series.gamma == via_jacobi.gamma


def test_modified_moments_single_point(hermite):
    i = GaussianRational(0, 1)
    out = modified_moments(hermite, [i], [i])
    assert out.gamma[0] == 1
    assert out.gamma[2] == 0

    real_zeta = modified_moments(hermite, [i], [Fraction(3)])
    assert real_zeta.gamma[0] == 0
    assert real_zeta.gamma[2] == 1


def test_modified_moments_polynomial_part(hermite):
    out = modified_moments(hermite, [GaussianRational(0, 1)], [0])
    assert list(out.gamma[:5]) == [0, 0, 1, 0, 0]


def test_modified_moments_rejects(hermite):
    i = GaussianRational(0, 1)
    with pytest.raises(SchemaError):
        modified_moments(hermite, [i], [])
    with pytest.raises(LowerHalfPlanePoint):
        modified_moments(hermite, [GaussianRational(0, -1)], [0])
    with pytest.raises(CoincidentPoints):
        modified_moments(hermite, [i, i], [0, 0])


@pytest.mark.parametrize("z, zeta", [
    ((0, 1), (0, 1)),
    ((1, 2), (3, 0)),
    ((-1, 1), (1, -1)),
])
def test_float_modified_moments_match_exact(laguerre, z, zeta):
    exact = modified_moments(laguerre, [GaussianRational(*z)], [GaussianRational(*zeta)])
    with mp.workprec(256):
        floats = modified_moments(laguerre, [mp.mpc(*z)], [mp.mpc(*zeta)])
        assert floats.K == exact.K
        for got, want in zip(floats.gamma, exact.gamma):
            want = to_mp(want)
            assert abs(got - want) < mp.mpf(2) ** -200 * max(1, abs(want))


def test_digest_is_stable(laguerre):
    assert laguerre.digest() == generate('laguerre', 12).digest()
    assert laguerre.digest() != generate('laguerre', 11).digest()
