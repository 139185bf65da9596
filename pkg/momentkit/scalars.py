"""Scalar arithmetic shared by every module.

Two backends run side by side. Exact mode works over ``fractions.Fraction``
(plus ``GaussianRational`` for complex points and ``Surd`` for the square
roots that orthonormalization introduces). Float mode works over mpmath
``mpf``/``mpc`` at a fixed binary precision. An ``Arithmetic`` value is the
computation context that knows which backend is in force.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

from mpmath import mp

from .errors import ConditioningError, CrossCheckFailure, InvalidPrecision, SchemaError

DEFAULT_PRECISION = 256
MIN_PRECISION = 64

_RATIONAL_RE = re.compile(r'^[+-]?\d+(/\d+)?$')


def rational_sqrt(q: Fraction) -> Optional[Fraction]:
    """Square root of a rational if it is rational, else None."""
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def is_mp(value: Any) -> bool:
    return hasattr(value, '_mpf_') or hasattr(value, '_mpc_')


def is_exact(value: Any) -> bool:
    return isinstance(value, (int, Fraction, GaussianRational, Surd))


class GaussianRational:
    """Exact complex number re + i*im with rational parts.

    Arithmetic results with a zero imaginary part collapse to ``Fraction`` so
    real computations never carry a complex wrapper around.
    """

    __slots__ = ('re', 'im')

    def __init__(self, re: Any = 0, im: Any = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def make(re: Fraction, im: Fraction) -> Union[Fraction, 'GaussianRational']:
        if im == 0:
            return Fraction(re)
        return GaussianRational(re, im)

    @staticmethod
    def _coerce(other: Any) -> Optional['GaussianRational']:
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def conjugate(self) -> 'GaussianRational':
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.make(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.make(self.re * o.re - self.im * o.im,
                         self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError('GaussianRational division by zero')
        return self.make((self.re * o.re + self.im * o.im) / d,
                         (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result: Any = Fraction(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        return f'GaussianRational({self.re}, {self.im})'


class Surd:
    """Exact value coeff * sqrt(radicand) with a rational, non-square radicand.

    Orthonormal polynomial values are monic values divided by square roots of
    products of a_n^2; keeping the root symbolic lets products such as
    P_n(0)^2 or P_n(0) Q_n(0) come out as plain rationals.
    """

    __slots__ = ('coeff', 'radicand')

    def __init__(self, coeff: Any, radicand: Fraction):
        self.coeff = coeff
        self.radicand = radicand

    def to_mp(self):
        r = self.radicand
        return to_mp(self.coeff) * mp.sqrt(mp.mpf(r.numerator) / r.denominator)

    def square(self):
        return self.coeff * self.coeff * self.radicand

    def conjugate(self):
        return surd(self.coeff.conjugate(), self.radicand)

    @property
    def real(self):
        return surd(Fraction(self.coeff.real), self.radicand)

    @property
    def imag(self):
        return surd(Fraction(self.coeff.imag), self.radicand)

    def sign(self) -> int:
        c = self.coeff
        if isinstance(c, GaussianRational):
            raise TypeError('sign of a complex surd')
        return (c > 0) - (c < 0)

    def __mul__(self, other):
        if isinstance(other, Surd):
            return surd(self.coeff * other.coeff, self.radicand * other.radicand)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return surd(self.coeff * other, self.radicand)
        if is_mp(other):
            return self.to_mp() * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return surd(self.coeff / other.coeff, self.radicand / other.radicand)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return surd(self.coeff / other, self.radicand)
        if is_mp(other):
            return self.to_mp() / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return surd(other / (self.coeff * self.radicand), self.radicand)
        if is_mp(other):
            return other / self.to_mp()
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Surd):
            ratio = rational_sqrt(self.radicand / other.radicand)
            if ratio is None:
                raise TypeError('sum of incommensurable surds is not exact')
            return surd(self.coeff * ratio + other.coeff, other.radicand)
        if isinstance(other, (int, Fraction, GaussianRational)):
            if other == 0:
                return self
            raise TypeError('sum of a surd and a nonzero rational is not exact')
        if is_mp(other):
            return self.to_mp() + other
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.coeff, self.radicand)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __abs__(self):
        return Surd(abs(self.coeff), self.radicand)

    def __eq__(self, other):
        if isinstance(other, Surd):
            try:
                diff = self - other
            except TypeError:
                return False
            return not isinstance(diff, Surd) and diff == 0
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.coeff == 0 and other == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.square(), 'surd'))

    def __repr__(self):
        return f'Surd({self.coeff}, {self.radicand})'


def surd(coeff: Any, radicand: Any) -> Any:
    """Build coeff * sqrt(radicand), collapsing to a rational when possible."""
    radicand = Fraction(radicand)
    if radicand < 0:
        raise ValueError('negative radicand')
    if coeff == 0 or radicand == 0:
        return Fraction(0)
    root = rational_sqrt(radicand)
    if root is not None:
        return coeff * root
    return Surd(coeff, radicand)


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'INFINITY'


INFINITY = _Infinity()


def to_mp(value: Any):
    """Convert any scalar to mpmath at the current working precision."""
    if value is INFINITY:
        return value
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return mp.mpf(value)
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    if isinstance(value, GaussianRational):
        return mp.mpc(to_mp(value.re), to_mp(value.im))
    if isinstance(value, Surd):
        return value.to_mp()
    if isinstance(value, PowerSeries):
        return PowerSeries([to_mp(c) for c in value.coeffs], value.order)
    if hasattr(value, '_mpf_'):
        return +value
    if hasattr(value, '_mpc_'):
        return +value
    if isinstance(value, complex):
        return mp.mpc(value)
    return mp.mpf(value)


def real_part(value: Any):
    if isinstance(value, Surd):
        return value.real
    return value.real


def imag_part(value: Any):
    if isinstance(value, Surd):
        return value.imag
    return value.imag


def conj(value: Any):
    if isinstance(value, int):
        return value
    return value.conjugate()


def abs2(value: Any):
    """|value|^2 without a square root (exact for Surd and GaussianRational)."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value) ** 2
    if isinstance(value, GaussianRational):
        return value.abs2()
    if isinstance(value, Surd):
        c = value.coeff
        c2 = c.abs2() if isinstance(c, GaussianRational) else c * c
        return c2 * value.radicand
    return mp.re(value) ** 2 + mp.im(value) ** 2


def parse_scalar(text: str, precision: int = DEFAULT_PRECISION):
    """Parse an integer, p/q rational or decimal string.

    Rationals parse exactly; anything else parses as a float at the given
    precision.
    """
    text = str(text).strip()
    if _RATIONAL_RE.match(text):
        return Fraction(text)
    try:
        with mp.workprec(precision):
            return mp.mpf(text)
    except (ValueError, TypeError) as e:
        raise SchemaError(f'not a number: {text!r}', value=text) from e


def parse_complex(text: str, precision: int = DEFAULT_PRECISION):
    """Parse 'a', 'bi', 'a+bi' or 'a-bi' (parts as in parse_scalar)."""
    s = str(text).strip().replace(' ', '').replace('j', 'i')
    if not s.endswith('i'):
        return parse_scalar(s, precision)
    body = s[:-1]
    split = None
    for k in range(len(body) - 1, 0, -1):
        if body[k] in '+-' and body[k - 1] not in 'eE':
            split = k
            break
    if split is None:
        re_text, im_text = '0', body
    else:
        re_text, im_text = body[:split], body[split:]
    if im_text in ('', '+'):
        im_text = '1'
    elif im_text == '-':
        im_text = '-1'
    re_part = parse_scalar(re_text, precision)
    im_part = parse_scalar(im_text, precision)
    if isinstance(re_part, Fraction) and isinstance(im_part, Fraction):
        return GaussianRational.make(re_part, im_part)
    with mp.workprec(precision):
        return mp.mpc(to_mp(re_part), to_mp(im_part))


@dataclass(frozen=True)
class Arithmetic:
    """Computation context: exact rationals, or mpmath floats at `precision` bits."""

    exact: bool = True
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.precision < MIN_PRECISION:
            raise InvalidPrecision(
                f'precision must be at least {MIN_PRECISION} bits',
                precision=self.precision)

    @property
    def mode(self) -> str:
        return 'exact' if self.exact else f'float({self.precision})'

    @property
    def digits(self) -> int:
        """Decimal digits used when rendering floats."""
        return max(10, int(self.precision * math.log10(2)) - 3)

    def workprec(self):
        return mp.workprec(self.precision)

    def promote(self, *values: Any) -> 'Arithmetic':
        """Drop to float mode if any value is not exact."""
        if self.exact and all(is_exact(v) for v in values):
            return self
        return Arithmetic(False, self.precision)

    def convert(self, value: Any):
        if self.exact:
            if isinstance(value, (int, bool)):
                return Fraction(value)
            if not is_exact(value):
                raise TypeError(f'inexact value {value!r} in exact mode')
            return value
        return to_mp(value)

    def convert_all(self, values: Sequence[Any]) -> List[Any]:
        return [self.convert(v) for v in values]

    def sqrt(self, value: Any):
        if self.exact:
            return surd(Fraction(1), value)
        return mp.sqrt(to_mp(value))

    def tolerance(self, slack: int = 16):
        if self.exact:
            return 0
        return mp.mpf(2) ** (-(self.precision - slack))

    def is_zero(self, value: Any, scale: Any = 1, slack: int = 16) -> bool:
        if self.exact:
            return value == 0
        return abs(to_mp(value)) <= self.tolerance(slack) * abs(to_mp(scale))

    def close(self, x: Any, y: Any, slack: int = 16) -> bool:
        """Equality in exact mode, relative closeness (floor 1) in float mode."""
        if self.exact:
            return x == y
        a, b = to_mp(x), to_mp(y)
        scale = max(mp.mpf(1), abs(a), abs(b))
        return abs(a - b) <= self.tolerance(slack) * scale

    def conditioning_floor(self):
        """Relative misses looser than 2^-(precision/2) mean the input is ill conditioned."""
        return mp.mpf(2) ** (-(self.precision // 2))

    def check(self, miss: Any, scale: Any = 1, message: str = "identity check failed",
              slack: int = 16, **details: Any) -> None:
        """Verify that `miss` vanishes relative to `scale`.

        Exact mode needs miss == 0. Float mode passes at tolerance(slack),
        raises CrossCheckFailure up to the conditioning floor and
        ConditioningError beyond it.
        """
        if self.exact:
            if miss != 0:
                raise CrossCheckFailure(message, **details)
            return
        with self.workprec():
            m, s = abs(to_mp(miss)), abs(to_mp(scale))
            if m <= self.tolerance(slack) * s:
                return
            if m <= self.conditioning_floor() * s:
                raise CrossCheckFailure(message, miss=mp.nstr(m / s if s else m, 5), **details)
            lost = self.precision
            if s and m < s:
                lost += int(mp.floor(mp.log(m / s, 2)))
        raise ConditioningError(f"{message}: about {lost} of {self.precision} bits lost",
                                bits_lost=lost, precision=self.precision, **details)

    def check_close(self, x: Any, y: Any, message: str = "identity check failed",
                    slack: int = 16, **details: Any) -> None:
        """check() for x == y with the scale of close()."""
        if self.exact:
            if x != y:
                raise CrossCheckFailure(message, **details)
            return
        with self.workprec():
            a, b = to_mp(x), to_mp(y)
            self.check(a - b, max(mp.mpf(1), abs(a), abs(b)), message, slack, **details)

    def sign(self, value: Any) -> int:
        if isinstance(value, Surd):
            return value.sign()
        if self.exact:
            return (value > 0) - (value < 0)
        v = to_mp(value)
        return (v > 0) - (v < 0)

    def render(self, value: Any) -> str:
        """Deterministic string for reports: p/q in exact mode, fixed digits in float."""
        if value is None:
            return 'null'
        if value is INFINITY:
            return 'inf'
        if isinstance(value, (int, Fraction)):
            return str(Fraction(value))
        if isinstance(value, GaussianRational):
            sign = '+' if value.im >= 0 else '-'
            return f'{value.re}{sign}{abs(value.im)}i'
        if isinstance(value, Surd):
            return f'{value.coeff}*sqrt({value.radicand})'
        with self.workprec():
            if hasattr(value, '_mpc_'):
                re_s = mp.nstr(mp.re(value), self.digits)
                im = mp.im(value)
                sign = '+' if im >= 0 else '-'
                return f'{re_s}{sign}{mp.nstr(abs(im), self.digits)}i'
            return mp.nstr(to_mp(value), self.digits)


class PowerSeries:
    """Truncated power series sum_k coeffs[k] z^k + O(z^order).

    Padding and accumulators use the int 0 so the same code runs over
    Fraction and mpmath coefficients.
    """

    def __init__(self, coeffs: Sequence[Any], order: int):
        c = list(coeffs)[:order]
        c += [0] * (order - len(c))
        self.coeffs: Tuple[Any, ...] = tuple(c)
        self.order = order

    @classmethod
    def variable(cls, order: int) -> 'PowerSeries':
        return cls([0, 1], order)

    @classmethod
    def constant(cls, value: Any, order: int) -> 'PowerSeries':
        return cls([value], order)

    def _lift(self, other: Any) -> Optional['PowerSeries']:
        if isinstance(other, PowerSeries):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)) or is_mp(other):
            return PowerSeries.constant(other, self.order)
        return None

    def __getitem__(self, k: int):
        return self.coeffs[k]

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = min(self.order, o.order)
        return PowerSeries([self.coeffs[k] + o.coeffs[k] for k in range(n)], n)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)) or is_mp(other):
            return PowerSeries([c * other for c in self.coeffs], self.order)
        if not isinstance(other, PowerSeries):
            return NotImplemented
        n = min(self.order, other.order)
        out = []
        for k in range(n):
            acc = 0
            for j in range(k + 1):
                acc = acc + self.coeffs[j] * other.coeffs[k - j]
            out.append(acc)
        return PowerSeries(out, n)

    __rmul__ = __mul__

    def inverse(self) -> 'PowerSeries':
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError('power series with zero constant term')
        if isinstance(c0, int):
            c0 = Fraction(c0) if all(is_exact(c) for c in self.coeffs) else mp.mpf(c0)
        out = [1 / c0]
        for k in range(1, self.order):
            acc = 0
            for j in range(1, k + 1):
                acc = acc + self.coeffs[j] * out[k - j]
            out.append(-acc / c0)
        return PowerSeries(out, self.order)

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return self * other.inverse()
        if isinstance(other, (int, Fraction, GaussianRational)) or is_mp(other):
            return PowerSeries([c / other for c in self.coeffs], self.order)
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = PowerSeries.constant(1, self.order)
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        return f'PowerSeries({list(self.coeffs)}, order={self.order})'
