"""Finite Jacobi sections, their spectra and resolvents.

A Friedrichs section (variant F) is the leading N x N block of the Jacobi
matrix. A Krein section (variant K) replaces the last diagonal entry by
b_{N-1} - alpha_{N-1}, with alpha chosen so that 0 becomes an eigenvalue.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from mpmath import mp

from .errors import (
    ConvergenceFailure, CrossCheckFailure, KreinCornerUndefined, PoleHit, TooShort,
)
from .moments import Kind, MomentSequence
from .orthopoly import RecursionCoefficients, _monic_scale, monic_values
from .scalars import Arithmetic, PowerSeries, to_mp

logger = logging.getLogger(__name__)


class Variant(Enum):
    F = "F"
    K = "K"


@dataclass(frozen=True)
class JacobiSection:
    """N x N tridiagonal section with diagonal `diag` and squared off-diagonals `a2`."""
    N: int
    coeffs: RecursionCoefficients
    variant: Variant
    alpha: Optional[Any] = None

    @property
    def arithmetic(self) -> Arithmetic:
        return self.coeffs.arithmetic.promote(*([self.alpha] if self.alpha is not None else []))

    @property
    def diag(self) -> List[Any]:
        d = list(self.coeffs.b[:self.N])
        if self.variant is Variant.K:
            d[-1] = d[-1] - self.alpha
        return d

    @property
    def a2(self) -> List[Any]:
        return list(self.coeffs.a2[:self.N - 1])

    @property
    def corner(self) -> Any:
        return self.diag[-1]

    def determinant(self) -> Any:
        """det of the section by the three-term recurrence of leading minors."""
        d = self.diag
        a2 = self.a2
        arith = self.arithmetic
        with arith.workprec():
            prev: Any = 1
            cur: Any = d[0]
            for k in range(1, self.N):
                prev, cur = cur, d[k] * cur - a2[k - 1] * prev
            return cur

    def matrix(self) -> List[List[Any]]:
        """Dense float matrix at the coefficients' precision."""
        with mp.workprec(self.coeffs.precision):
            m = [[mp.mpf(0)] * self.N for _ in range(self.N)]
            for i, v in enumerate(self.diag):
                m[i][i] = to_mp(v)
            for i, v in enumerate(self.a2):
                m[i][i + 1] = m[i + 1][i] = mp.sqrt(to_mp(v))
            return m

    def stripped(self) -> 'JacobiSection':
        """The section with its first row and column removed (same corner)."""
        if self.N < 2:
            raise TooShort("stripping needs a section of size >= 2", N=self.N)
        return JacobiSection(self.N - 1, strip(self.coeffs), self.variant, self.alpha)

    def to_dict(self) -> Dict[str, Any]:
        arith = self.arithmetic
        return {
            'N': self.N,
            'variant': self.variant.value,
            'diag': [arith.render(v) for v in self.diag],
            'a2': [arith.render(v) for v in self.a2],
            'alpha': None if self.alpha is None else arith.render(self.alpha),
        }


@dataclass
class Quadrature:
    """Nodes lambda_1 < ... < lambda_N with positive weights."""
    nodes: List[Any]
    weights: List[Any]
    variant: Variant
    precision: int

    def moment(self, k: int) -> Any:
        with mp.workprec(self.precision):
            return mp.fsum(w * x ** k for x, w in zip(self.nodes, self.weights))

    def moments(self, K: int) -> List[Any]:
        return [self.moment(k) for k in range(K + 1)]

    def integrate(self, fn) -> Any:
        with mp.workprec(self.precision):
            return mp.fsum(w * fn(x) for x, w in zip(self.nodes, self.weights))

    def to_dict(self) -> Dict[str, Any]:
        arith = Arithmetic(False, self.precision)
        return {
            'variant': self.variant.value,
            'nodes': [arith.render(x) for x in self.nodes],
            'weights': [arith.render(w) for w in self.weights],
        }


def strip(coeffs: RecursionCoefficients) -> RecursionCoefficients:
    """Coefficients of the problem with the first row and column removed."""
    if coeffs.N < 2:
        raise TooShort("stripping needs N >= 2", N=coeffs.N)
    return RecursionCoefficients(coeffs.b[1:], coeffs.a2[1:], coeffs.precision)


def _krein_alpha(coeffs: RecursionCoefficients, N: int, arith: Arithmetic) -> Any:
    p0, _ = monic_values(coeffs, 0, N)
    for idx in (N - 1, N):
        if arith.is_zero(p0[idx], _monic_scale(coeffs, idx), slack=arith.precision // 2):
            raise KreinCornerUndefined(f"P_{idx}(0) = 0: no Krein section of size {N}",
                                       index=idx, N=N)
    return -p0[N] / p0[N - 1]


def section(coeffs: RecursionCoefficients, N: int, variant: Variant = Variant.F) -> JacobiSection:
    """Build the F or K section of size N.

    For K, alpha_{N-1} = -p_N(0) / p_{N-1}(0) in monic form. When b_N and
    a_{N-1}^2 are known the next corner relation
    (b_N - alpha_N) alpha_{N-1} = a_{N-1}^2 is verified.
    """
    variant = Variant(variant)
    if N < 1 or N > coeffs.N:
        raise TooShort(f"a section of size {N} needs {N} recursion coefficients",
                       N=N, available=coeffs.N)
    if variant is Variant.F:
        return JacobiSection(N, coeffs, variant)

    arith = coeffs.arithmetic
    with arith.workprec():
        alpha = _krein_alpha(coeffs, N, arith)
        if arith.sign(alpha) <= 0:
            logger.warning("alpha_%d = %s is not positive; the input is not a Stieltjes sequence",
                           N - 1, arith.render(alpha))
        if coeffs.N > N and coeffs.depth >= N:
            try:
                alpha_next = _krein_alpha(coeffs, N + 1, arith)
            except KreinCornerUndefined:
                alpha_next = None
            if alpha_next is not None:
                residual = (coeffs.b[N] - alpha_next) * alpha - coeffs.a2[N - 1]
                arith.check(residual, max(1, abs(to_mp(coeffs.a2[N - 1]))),
                            "Krein corners violate (b_N - alpha_N) alpha_(N-1) = a_(N-1)^2", 32,
                            N=N, residual=arith.render(residual))
    return JacobiSection(N, coeffs, variant, alpha)


def _char_values(diag: List[Any], a2: List[Any], z: Any) -> Tuple[Any, Any]:
    """Characteristic recurrence c_k, with second-kind companion e_k.

    c_N = det(z - T) in monic form; -e_N / c_N is the resolvent
    <delta_0, (T - z)^{-1} delta_0>.
    """
    c_prev: Any = 0
    c: Any = 1
    e_prev: Any = -1
    e: Any = 0
    for k, d in enumerate(diag):
        w = a2[k - 1] if k else 1
        shift = z - d
        c_prev, c = c, shift * c - w * c_prev
        e_prev, e = e, shift * e - w * e_prev
    return c, e


def _char_with_derivative(diag: List[Any], a2: List[Any], x: Any) -> Tuple[Any, Any, Any]:
    c_prev, c = mp.mpf(0), mp.mpf(1)
    dc_prev, dc = mp.mpf(0), mp.mpf(0)
    e_prev, e = mp.mpf(-1), mp.mpf(0)
    for k, d in enumerate(diag):
        w = a2[k - 1] if k else 1
        shift = x - d
        dc_prev, dc = dc, c + shift * dc - w * dc_prev
        c_prev, c = c, shift * c - w * c_prev
        e_prev, e = e, shift * e - w * e_prev
    return c, dc, e


def _char_scale(diag: List[Any], a2: List[Any], z: Any) -> Any:
    scale = mp.mpf(1)
    for k, d in enumerate(diag):
        scale *= abs(to_mp(z)) + abs(to_mp(d)) + (mp.sqrt(abs(to_mp(a2[k - 1]))) if k else 0)
    return scale


def _resolvent(diag: List[Any], a2: List[Any], z: Any, arith: Arithmetic) -> Any:
    if not diag:
        return 0
    if isinstance(z, PowerSeries):
        c, e = _char_values(diag, a2, z)
        return -e / c
    with arith.workprec():
        if not arith.exact:
            diag = [to_mp(v) for v in diag]
            a2 = [to_mp(v) for v in a2]
            z = to_mp(z)
        c, e = _char_values(diag, a2, z)
        if arith.is_zero(c, _char_scale(diag, a2, z), slack=arith.precision // 2):
            raise PoleHit(f"z = {arith.render(z)} is an eigenvalue of the section",
                          z=arith.render(z))
        return -e / c


def resolvent(sec: JacobiSection, z: Any) -> Any:
    """f_N(z) = <delta_0, (T_N - z)^{-1} delta_0>.

    For F this is -Q_N(z) / P_N(z); for K it is -N_N(z) / M_N(z). Exact when
    the section and z are exact; z may also be a PowerSeries.
    """
    if isinstance(z, PowerSeries):
        return _resolvent(sec.diag, sec.a2, z, sec.arithmetic)
    arith = sec.arithmetic.promote(z)
    return _resolvent(sec.diag, sec.a2, z, arith)


def _sturm_count(diag: List[Any], a2: List[Any], x: Any, tiny: Any) -> int:
    """Number of eigenvalues below x."""
    count = 0
    q = mp.mpf(1)
    for k, d in enumerate(diag):
        if k:
            q = (d - x) - a2[k - 1] / q
        else:
            q = d - x
        if q == 0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def eigensystem(sec: JacobiSection) -> Quadrature:
    """Nodes and weights of the section's spectral measure.

    Nodes are bracketed by Gershgorin bounds, isolated by Sturm-count
    bisection and polished with one guarded Newton step on the
    characteristic polynomial. Weights are residues e_N / c_N' and must
    agree with the Christoffel form 1 / sum_{j<N} P_j(lambda)^2.
    """
    precision = sec.coeffs.precision
    N = sec.N
    arith = Arithmetic(False, precision)
    with mp.workprec(precision):
        diag = [to_mp(v) for v in sec.diag]
        a2 = [to_mp(v) for v in sec.a2]
        a = [mp.sqrt(v) for v in a2]
        lo = min(diag[k] - (a[k] if k < N - 1 else 0) - (a[k - 1] if k else 0) for k in range(N))
        hi = max(diag[k] + (a[k] if k < N - 1 else 0) + (a[k - 1] if k else 0) for k in range(N))
        width = max(hi - lo, mp.mpf(1))
        lo, hi = lo - width * mp.mpf(2) ** -20, hi + width * mp.mpf(2) ** -20
        tol = mp.mpf(2) ** -(precision // 2 + 8)
        tiny = mp.mpf(2) ** -(precision - 8)
        max_iter = precision + 64 + int(mp.log(width + 1, 2))

        nodes: List[Any] = []
        for k in range(N):
            left, right = lo, hi
            for it in range(max_iter):
                mid = (left + right) / 2
                if _sturm_count(diag, a2, mid, tiny) > k:
                    right = mid
                else:
                    left = mid
                if right - left <= tol * max(1, abs(mid)):
                    break
            else:
                raise ConvergenceFailure(f"bisection did not isolate node {k + 1}", node=k + 1)
            logger.debug("node %d isolated after %d bisections", k + 1, it + 1)
            x = (left + right) / 2
            c, dc, _ = _char_with_derivative(diag, a2, x)
            if dc != 0:
                step = x - c / dc
                if left - tol <= step <= right + tol:
                    x = step
            nodes.append(x)

        for k in range(1, N):
            if nodes[k] - nodes[k - 1] <= tol * max(1, abs(nodes[k])):
                raise ConvergenceFailure(f"nodes {k} and {k + 1} did not separate", node=k)
        if sec.variant is Variant.K:
            k0 = min(range(N), key=lambda i: abs(nodes[i]))
            if abs(nodes[k0]) <= tol:
                nodes[k0] = mp.mpf(0)

        weights = []
        for k, x in enumerate(nodes):
            _, dc, e = _char_with_derivative(diag, a2, x)
            if dc == 0:
                raise ConvergenceFailure(f"node {k + 1} is not simple", node=k + 1)
            residue = e / dc
            christoffel = 1 / _sum_P_squared(diag, a, x)
            if residue <= 0:
                raise CrossCheckFailure(f"weight {k + 1} is not positive", node=k + 1,
                                        residue=mp.nstr(residue, 15))
            arith.check(residue - christoffel, christoffel,
                        f"weight {k + 1}: residue and Christoffel forms disagree", precision // 2,
                        node=k + 1, residue=mp.nstr(residue, 15),
                        christoffel=mp.nstr(christoffel, 15))
            weights.append(residue)
    return Quadrature(nodes, weights, sec.variant, precision)


def _sum_P_squared(diag: List[Any], a: List[Any], x: Any) -> Any:
    """sum_{j<N} P_j(x)^2 from the orthonormal recurrence on the section."""
    total = mp.mpf(1)
    P_prev, P = mp.mpf(0), mp.mpf(1)
    for j in range(len(diag) - 1):
        a_prev = a[j - 1] if j else 1
        P_prev, P = P, ((x - diag[j]) * P - a_prev * P_prev) / a[j]
        total += P * P
    return total


def moments_from_jacobi(coeffs: RecursionCoefficients, K: int) -> MomentSequence:
    """gamma_0..gamma_K = <delta_0, T^n delta_0>.

    Iterates v <- T' v from delta_0, T' being the tridiagonal matrix with
    subdiagonal 1 and superdiagonal a_n^2, similar to T with the same (0, 0)
    entries of every power. Needs K <= 2N - 1, or 2N when a_{N-1}^2 is known.
    """
    N = coeffs.N
    limit = 2 * N if coeffs.depth == N else 2 * N - 1
    if K < 0 or K > limit:
        raise TooShort(f"{N} recursion coefficients determine moments up to {limit}",
                       K=K, limit=limit)
    arith = coeffs.arithmetic
    size = N + 1 if coeffs.depth == N else N
    with arith.workprec():
        diag = arith.convert_all(list(coeffs.b) + [0] * (size - N))
        sup = arith.convert_all(coeffs.a2[:size - 1])
        v: List[Any] = [arith.convert(1)] + [arith.convert(0)] * (size - 1)
        gamma = [v[0]]
        for _ in range(K):
            w = []
            for i in range(size):
                acc = diag[i] * v[i]
                if i:
                    acc = acc + v[i - 1]
                if i + 1 < size:
                    acc = acc + sup[i] * v[i + 1]
                w.append(acc)
            v = w
            gamma.append(v[0])
    return MomentSequence(tuple(gamma), Kind.UNKNOWN, "", coeffs.precision)


def ricatti_residual(sec: JacobiSection, z: Any) -> Any:
    """-1/f_N(z) - (z - b_0 + a_0^2 f^(0)_{N-1}(z)); zero for every section."""
    arith = sec.arithmetic.promote(z)
    f = resolvent(sec, z)
    inner = resolvent(sec.stripped(), z) if sec.N > 1 else 0
    with arith.workprec():
        b0 = sec.diag[0]
        a0_sq = sec.a2[0] if sec.N > 1 else 0
        if not arith.exact:
            z, b0, a0_sq, f, inner = (to_mp(v) for v in (z, b0, a0_sq, f, inner))
        return -1 / f - (z - b0 + a0_sq * inner)


def sandwich(coeffs: RecursionCoefficients, x: Any, N: int) -> Tuple[Any, Any]:
    """(f-_N(-x), f+_N(-x)) bracketing the Stieltjes transform at -x, x > 0."""
    lower = resolvent(section(coeffs, N, Variant.F), -x)
    upper = resolvent(section(coeffs, N, Variant.K), -x)
    return lower, upper


def kernel_residual(sec: JacobiSection) -> Any:
    """max |T u| / |u| for u = (P_0(0), ..., P_{N-1}(0)); zero for a K section."""
    with mp.workprec(sec.coeffs.precision):
        m = sec.matrix()
        a = [mp.sqrt(to_mp(v)) for v in sec.a2]
        u = [mp.mpf(1)]
        P_prev = mp.mpf(0)
        for j in range(sec.N - 1):
            a_prev = a[j - 1] if j else 1
            nxt = (-m[j][j] * u[-1] - a_prev * P_prev) / a[j]
            P_prev = u[-1]
            u.append(nxt)
        norm = max(abs(v) for v in u)
        res = max(abs(mp.fsum(m[i][j] * u[j] for j in range(sec.N))) for i in range(sec.N))
        return res / norm
