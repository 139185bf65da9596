"""Moment sequences, the named test families and sequence transforms."""

import hashlib
import json
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, Sequence, Tuple

from mpmath import mp

from .errors import (
    CoincidentPoints, DegenerateSequence, EmptyInput, LowerHalfPlanePoint,
    NonpositiveMass, NonRealResult, NotStieltjes, OddShiftOnHamburger,
    SchemaError, TooShort, UnknownFamily, UnsupportedShape,
)
from .scalars import (
    DEFAULT_PRECISION, Arithmetic, GaussianRational, conj, imag_part,
    real_part, to_mp,
)

logger = logging.getLogger(__name__)


class Kind(Enum):
    """Which moment problem the user claims the sequence belongs to."""
    HAMBURGER = "hamburger"
    STIELTJES = "stieltjes"
    UNKNOWN = "unknown"


FAMILIES = ('hermite', 'laguerre', 'lognormal')


@dataclass(frozen=True)
class MomentSequence:
    """Finite moment prefix gamma_0..gamma_K.

    Entries are Fractions (exact mode) or mpf values rounded to `precision`
    bits (float mode). Sequences built by `normalize` have gamma_0 = 1.
    """
    gamma: Tuple[Any, ...]
    kind: Kind = Kind.UNKNOWN
    label: str = ""
    precision: int = DEFAULT_PRECISION

    @property
    def K(self) -> int:
        return len(self.gamma) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(g, Fraction) for g in self.gamma)

    @property
    def arithmetic(self) -> Arithmetic:
        return Arithmetic(self.exact, self.precision)

    def __len__(self) -> int:
        return len(self.gamma)

    def __getitem__(self, n: int):
        return self.gamma[n]

    def rendered(self) -> List[str]:
        arith = self.arithmetic
        return [arith.render(g) for g in self.gamma]

    def to_document(self) -> Dict[str, Any]:
        """Moment-file document: strings only, so exact values survive."""
        doc: Dict[str, Any] = {'kind': self.kind.value, 'moments': self.rendered()}
        if self.label:
            doc['label'] = self.label
        return doc

    def digest(self) -> str:
        """SHA-256 of the canonical rendering."""
        payload = json.dumps({'kind': self.kind.value, 'mode': self.arithmetic.mode,
                              'moments': self.rendered()}, sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def normalize(raw: Sequence[Any], kind: Any = Kind.UNKNOWN, label: str = "",
              precision: int = DEFAULT_PRECISION) -> MomentSequence:
    """Divide by gamma_0 so the sequence describes a probability measure.

    Args:
        raw: Moments as ints, Fractions or mpmath/python floats.
        kind: Kind or its string value.
        label: Free text carried into reports.
        precision: Bits used when any entry is inexact.

    Returns:
        The normalized MomentSequence.
    """
    values = list(raw)
    if not values:
        raise EmptyInput("no moments given")
    for v in values:
        if isinstance(v, (GaussianRational, complex)) or hasattr(v, '_mpc_'):
            raise SchemaError("moments must be real", value=v)
    arith = Arithmetic(True, precision).promote(*values)
    with arith.workprec():
        values = arith.convert_all(values)
        g0 = values[0]
        if arith.sign(g0) <= 0:
            raise NonpositiveMass("gamma_0 must be positive", gamma_0=g0)
        gamma = tuple(v / g0 for v in values)
    return MomentSequence(gamma, Kind(kind), label, precision)


def generate(name: str, K: int, precision: int = DEFAULT_PRECISION) -> MomentSequence:
    """Moments gamma_0..gamma_K of a named family.

    hermite and laguerre are exact integers; lognormal is computed from its
    exact exponent ((k+1)^2 - 1)/4 at the requested precision.
    """
    if name not in FAMILIES:
        raise UnknownFamily(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}",
                            name=name)
    if K < 2:
        raise TooShort("generators need K >= 2", K=K)

    if name == 'hermite':
        gamma: List[Any] = [Fraction(1)]
        for n in range(1, K + 1):
            gamma.append(Fraction(0) if n % 2 else gamma[n - 2] * (n - 1))
        return MomentSequence(tuple(gamma), Kind.HAMBURGER, name, precision)

    if name == 'laguerre':
        gamma = [Fraction(1)]
        for n in range(1, K + 1):
            gamma.append(gamma[-1] * n)
        return MomentSequence(tuple(gamma), Kind.STIELTJES, name, precision)

    with mp.workprec(precision):
        gamma = [mp.exp(to_mp(Fraction(k * k + 2 * k, 4))) for k in range(K + 1)]
    return MomentSequence(tuple(gamma), Kind.STIELTJES, name, precision)


def shift_moments(seq: MomentSequence, c: Any) -> MomentSequence:
    """Moments of the measure translated by c (gamma_n(c) = E[(X + c)^n])."""
    arith = seq.arithmetic.promote(c)
    with arith.workprec():
        c = arith.convert(c)
        gamma = arith.convert_all(seq.gamma)
        powers = [arith.convert(1)]
        for _ in range(seq.K):
            powers.append(powers[-1] * c)
        shifted = []
        for n in range(seq.K + 1):
            acc = 0
            for j in range(n + 1):
                acc = acc + comb(n, j) * powers[j] * gamma[n - j]
            shifted.append(acc)
    # translation can move support off [0, inf); existence must be re-checked
    return MomentSequence(tuple(shifted), Kind.UNKNOWN, seq.label, seq.precision)


def index_shift(seq: MomentSequence, ell: int) -> MomentSequence:
    """gamma^(ell)_j = gamma_{j+ell} / gamma_ell."""
    if ell < 1:
        raise UnsupportedShape("index shift needs ell >= 1", ell=ell)
    if seq.K < ell + 2:
        raise TooShort(f"index shift by {ell} needs K >= {ell + 2}", K=seq.K, ell=ell)
    if ell % 2 and seq.kind is not Kind.STIELTJES:
        raise OddShiftOnHamburger("odd index shifts need a Stieltjes sequence",
                                  ell=ell, kind=seq.kind.value)
    arith = seq.arithmetic
    with arith.workprec():
        pivot = seq.gamma[ell]
        if arith.sign(pivot) <= 0:
            raise NonpositiveMass(f"gamma_{ell} must be positive", ell=ell)
        gamma = tuple(seq.gamma[j + ell] / pivot for j in range(seq.K - ell + 1))
    return MomentSequence(gamma, seq.kind, seq.label, seq.precision)


def even_embed(seq: MomentSequence) -> MomentSequence:
    """Hamburger sequence Gamma with Gamma_{2m} = gamma_m and odd moments zero."""
    if seq.kind is not Kind.STIELTJES:
        raise NotStieltjes("even embedding needs a Stieltjes sequence", kind=seq.kind.value)
    arith = seq.arithmetic
    with arith.workprec():
        zero = arith.convert(0)
        gamma: List[Any] = []
        for m, g in enumerate(seq.gamma):
            if m:
                gamma.append(zero)
            gamma.append(g)
    return MomentSequence(tuple(gamma), Kind.HAMBURGER, seq.label, seq.precision)


def reciprocal_moments(seq: MomentSequence) -> MomentSequence:
    """Moments of the problem with the first row and column of the Jacobi matrix removed.

    Read off the reciprocal of the series f(z) = sum (-1)^j gamma_j z^j:
    1/f(z) = 1 + gamma_1 z - a_0^2 z^2 sum_j (-1)^j gamma^(0)_j z^j.
    """
    if seq.K < 2:
        raise TooShort("reciprocal moments need K >= 2", K=seq.K)
    arith = seq.arithmetic
    with arith.workprec():
        kappa = [g if j % 2 == 0 else -g for j, g in enumerate(seq.gamma)]
        recip = [arith.convert(1)]
        for k in range(1, seq.K + 1):
            acc = 0
            for j in range(1, k + 1):
                acc = acc + kappa[j] * recip[k - j]
            recip.append(-acc)
        a0_sq = seq.gamma[2] - seq.gamma[1] * seq.gamma[1]
        if arith.is_zero(a0_sq, seq.gamma[2]):
            raise DegenerateSequence("a_0^2 = 0: one-point measure", index=0)
        gamma = []
        for j in range(seq.K - 1):
            value = recip[j + 2] / a0_sq
            gamma.append(-value if j % 2 == 0 else value)
    return MomentSequence(tuple(gamma), seq.kind, seq.label, seq.precision)


def _poly_mul(p: List[Any], q: List[Any]) -> List[Any]:
    out: List[Any] = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _poly_quotient(m: int, divisor: List[Any]) -> List[Any]:
    """Quotient of x^m by a monic polynomial (coefficients low to high)."""
    d = len(divisor) - 1
    if m < d:
        return []
    rem: List[Any] = [0] * m + [1]
    quot: List[Any] = [0] * (m - d + 1)
    for k in range(m - d, -1, -1):
        lead = rem[k + d]
        quot[k] = lead
        if lead != 0:
            for i, c in enumerate(divisor):
                rem[k + i] = rem[k + i] - lead * c
    return quot


def modified_moments(seq: MomentSequence, z: Sequence[Any], zeta: Sequence[Any]) -> MomentSequence:
    """Moments Gamma_m(z_1..z_n; zeta_1..zeta_n) for m = 0..K-2n.

    Gamma_m applies the moment functional to the polynomial part of
    x^m / prod |x - z_i|^2 and adds, for each pole, residue times zeta plus
    the same at the conjugate pole. The result is left unnormalized since
    Gamma_0 carries the data.
    """
    n = len(z)
    if len(zeta) != n:
        raise SchemaError("z and zeta must have the same length", z=len(z), zeta=n)
    if n == 0:
        return seq
    if seq.K < 2 * n:
        raise TooShort(f"{n} interpolation points need K >= {2 * n}", K=seq.K)
    arith = seq.arithmetic.promote(*z, *zeta)
    with arith.workprec():
        if arith.exact:
            zs = [GaussianRational.make(Fraction(real_part(p)), Fraction(imag_part(p)))
                  if isinstance(p, (int, Fraction)) else p for p in z]
            zetas = [arith.convert(w) for w in zeta]
        else:
            zs = [mp.mpc(to_mp(p)) for p in z]
            zetas = [mp.mpc(to_mp(w)) for w in zeta]
        gamma = arith.convert_all(seq.gamma)
        for i, p in enumerate(zs):
            if arith.sign(imag_part(p)) <= 0:
                raise LowerHalfPlanePoint(f"z[{i}] must lie in the upper half plane", index=i)
            for k in range(i):
                if p == zs[k]:
                    raise CoincidentPoints(f"z[{k}] and z[{i}] coincide", first=k, second=i)

        divisor: List[Any] = [1]
        for p in zs:
            re_p = real_part(p)
            divisor = _poly_mul(divisor, [abs_sq(p), -2 * re_p, 1])

        # residue of x^m / L(x) at a simple root r is r^m / L'(r)
        def derivative_at(r: Any) -> Any:
            acc = 0
            for k, c in enumerate(divisor[1:], start=1):
                acc = acc + k * c * r ** (k - 1)
            return acc

        poles = [(p, w) for p, w in zip(zs, zetas)] + [(conj(p), conj(w)) for p, w in zip(zs, zetas)]
        dL = [derivative_at(p) for p, _ in poles]

        out = []
        for m in range(seq.K - 2 * n + 1):
            quot = _poly_quotient(m, divisor)
            total: Any = 0
            for k, q in enumerate(quot):
                total = total + q * gamma[k]
            for (p, w), d in zip(poles, dL):
                total = total + (p ** m) / d * w
            im = imag_part(total)
            if not arith.is_zero(im, max(1, abs(to_mp(real_part(total)))), slack=24):
                raise NonRealResult(f"Gamma_{m} has a nonzero imaginary part", m=m)
            out.append(real_part(total) if not arith.exact else Fraction(real_part(total)))
    logger.debug("modified moments with %d points: %d values", n, len(out))
    return MomentSequence(tuple(out), Kind.UNKNOWN, seq.label, seq.precision)


def abs_sq(p: Any) -> Any:
    return real_part(p) * real_part(p) + imag_part(p) * imag_part(p)
