"""Transfer matrices, the Nevanlinna matrix, Weyl disks and the Pick test.

Products and sums are built from monic values: P_n(0) P_n(z) is
p_n(0) p_n(z) / r_n, so every entry stays rational in exact mode.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

from mpmath import mp

from .errors import (
    CoincidentNodes, LowerHalfPlanePoint, NonHerglotzOutput,
    NonpositiveRadicand, SchemaError,
)
from .linalg import determinant, pivoted_ldl
from .orthopoly import RecursionCoefficients, monic_values, norms
from .scalars import (
    INFINITY, Arithmetic, GaussianRational, abs2, conj, imag_part, real_part, to_mp,
)

logger = logging.getLogger(__name__)

IDENTITY_SLACK = 24


@dataclass
class TransferMatrix:
    """Left product of (1 + (z - z0) S(j, z0)) for j = 0..depth, with z0 = 0."""
    entries: List[List[Any]]
    depth: int
    z: Any
    z0: Any = 0

    @property
    def det(self) -> Any:
        (a, b), (c, d) = self.entries
        return a * d - b * c


@dataclass
class NevanlinnaMatrix:
    """A, B, C, D truncated at depth N, evaluated at z."""
    A: Any
    B: Any
    C: Any
    D: Any
    z: Any
    N: int
    increment: Any
    arithmetic: Arithmetic

    @property
    def det(self) -> Any:
        return self.A * self.D - self.B * self.C

    def to_dict(self) -> Dict[str, Any]:
        r = self.arithmetic.render
        return {'z': r(self.z), 'N': self.N, 'A': r(self.A), 'B': r(self.B),
                'C': r(self.C), 'D': r(self.D), 'increment': r(self.increment)}


@dataclass
class WeylDisk:
    """Disk of possible Stieltjes-transform values at z, given depth N."""
    z: Any
    N: int
    center: Any
    radius_sq: Any
    radius: Any
    closed_form_radius: Any
    arithmetic: Arithmetic

    def boundary_distance(self, w: Any) -> Any:
        """|w - center| - radius (negative inside)."""
        with self.arithmetic.workprec():
            return mp.sqrt(to_mp(abs2(_sub(w, self.center)))) - to_mp(self.radius)

    def contains(self, w: Any, slack: int = IDENTITY_SLACK) -> bool:
        arith = self.arithmetic
        with arith.workprec():
            d2 = abs2(_sub(w, self.center))
            if arith.exact and not _is_float(w):
                return d2 <= self.radius_sq
            return to_mp(d2) <= to_mp(self.radius_sq) * (1 + arith.tolerance(slack))

    def to_dict(self) -> Dict[str, Any]:
        r = self.arithmetic.render
        return {'z': r(self.z), 'N': self.N, 'center': r(self.center),
                'radius': r(self.radius), 'closed_form_radius': r(self.closed_form_radius)}


@dataclass
class PickResult:
    n: int
    matrix: List[List[Any]]
    psd: bool
    det: Any
    degenerate: bool
    arithmetic: Arithmetic

    def to_dict(self) -> Dict[str, Any]:
        r = self.arithmetic.render
        return {'n': self.n, 'psd': self.psd, 'det': r(self.det),
                'degenerate': self.degenerate,
                'matrix': [[r(v) for v in row] for row in self.matrix]}


def _is_float(value: Any) -> bool:
    return hasattr(value, '_mpf_') or hasattr(value, '_mpc_') or isinstance(value, (float, complex))


def _sub(x: Any, y: Any) -> Any:
    if _is_float(x) or _is_float(y):
        return to_mp(x) - to_mp(y)
    return x - y


def _context(coeffs: RecursionCoefficients, z: Any) -> Arithmetic:
    return coeffs.arithmetic.promote(z)


def _prepare(coeffs: RecursionCoefficients, z: Any, arith: Arithmetic):
    if arith.exact:
        return coeffs, arith.convert(z)
    from .orthopoly import _as_float
    return _as_float(coeffs), to_mp(z)


def _factor_data(coeffs: RecursionCoefficients, n: int):
    """(P_j(0)^2, P_j(0) Q_j(0), Q_j(0)^2) for j = 0..n."""
    p0, q0 = monic_values(coeffs, 0, n)
    r = norms(coeffs, n)
    return [(p0[j] * p0[j] / r[j], p0[j] * q0[j] / r[j], q0[j] * q0[j] / r[j])
            for j in range(n + 1)]


def transfer(coeffs: RecursionCoefficients, n: int, z: Any) -> TransferMatrix:
    """Transfer matrix of depth n at z (n = -1 is the identity).

    Each factor 1 + z S(j, 0), S = [[-Q_j P_j, -Q_j^2], [P_j^2, P_j Q_j]] at 0,
    has determinant 1; the product's determinant is checked.
    """
    if n < -1 or n > coeffs.depth:
        raise SchemaError(f"transfer depth {n} outside -1..{coeffs.depth}", n=n)
    arith = _context(coeffs, z)
    with arith.workprec():
        coeffs, z = _prepare(coeffs, z, arith)
        one, zero = arith.convert(1), arith.convert(0)
        m = [[one, zero], [zero, one]]
        if n >= 0:
            for pp, pq, qq in _factor_data(coeffs, n):
                f = [[1 - z * pq, -z * qq], [z * pp, 1 + z * pq]]
                m = [[f[0][0] * m[0][0] + f[0][1] * m[1][0], f[0][0] * m[0][1] + f[0][1] * m[1][1]],
                     [f[1][0] * m[0][0] + f[1][1] * m[1][0], f[1][0] * m[0][1] + f[1][1] * m[1][1]]]
        result = TransferMatrix(m, n, z)
        det = result.det
        scale = max(abs(to_mp(v)) for row in m for v in row) ** 2
        arith.check(det - 1, max(1, scale),
                    f"transfer matrix of depth {n} has determinant {arith.render(det)}",
                    IDENTITY_SLACK, depth=n)
    return result


def abcd(coeffs: RecursionCoefficients, z: Any, N: int) -> NevanlinnaMatrix:
    """A, B, C, D at depth N from the transfer product, checked against the sums

    A = z sum Q_n(0) Q_n(z), B = -1 + z sum Q_n(0) P_n(z),
    C = 1 + z sum P_n(0) Q_n(z), D = z sum P_n(0) P_n(z), over n <= N.
    """
    T = transfer(coeffs, N, z)
    arith = _context(coeffs, z)
    with arith.workprec():
        coeffs, z = _prepare(coeffs, z, arith)
        (t00, t01), (t10, t11) = T.entries
        A, B, C, D = -t01, -t00, t11, t10

        p0, q0 = monic_values(coeffs, 0, N)
        pz, qz = monic_values(coeffs, z, N)
        r = norms(coeffs, N)
        sums = [0, 0, 0, 0]
        scale = mp.mpf(1)
        for n in range(N + 1):
            terms = (q0[n] * qz[n], q0[n] * pz[n], p0[n] * qz[n], p0[n] * pz[n])
            for k, t in enumerate(terms):
                sums[k] = sums[k] + t / r[n]
                scale = max(scale, abs(to_mp(sums[k] * z)))
        expected = (z * sums[0], -1 + z * sums[1], 1 + z * sums[2], z * sums[3])
        for name, got, want in zip('ABCD', (A, B, C, D), expected):
            arith.check(got - want, scale,
                        f"{name}: transfer product and series disagree at depth {N}",
                        IDENTITY_SLACK, entry=name)
        pp, _, qq = _factor_data(coeffs, N)[N]
        increment = abs(to_mp(z)) * to_mp(pp + qq)
    return NevanlinnaMatrix(A, B, C, D, z, N, increment, arith)


def alpha(coeffs: RecursionCoefficients, N: int) -> Any:
    """D'(0) at depth N: sum_{n<=N} P_n(0)^2."""
    arith = coeffs.arithmetic
    with arith.workprec():
        total: Any = 0
        for pp, _, _ in _factor_data(coeffs, N):
            total = total + pp
    return total


def f_map(m: NevanlinnaMatrix, w: Any) -> Any:
    """-(C w + A) / (D w + B); w = INFINITY gives -C/D. A zero denominator gives INFINITY."""
    arith = m.arithmetic
    with arith.workprec():
        A, B, C, D = m.A, m.B, m.C, m.D
        if w is INFINITY:
            num, den = -C, D
        else:
            if not arith.exact or _is_float(w):
                A, B, C, D, w = (to_mp(v) for v in (A, B, C, D, w))
            num, den = -(C * w + A), D * w + B
        scale = max(1, abs(to_mp(num)))
        if arith.exact and not _is_float(den):
            if den == 0:
                return INFINITY
        elif arith.is_zero(den, scale, slack=arith.precision // 2):
            return INFINITY
        return num / den


def section_parameter(coeffs: RecursionCoefficients, N: int) -> Any:
    """t = -Q_{N+1}(0) / P_{N+1}(0): at depth N this t gives the F section of size N + 1."""
    arith = coeffs.arithmetic
    with arith.workprec():
        p0, q0 = monic_values(coeffs, 0, N + 1)
        if arith.is_zero(p0[N + 1], max(1, abs(to_mp(q0[N + 1]))), slack=arith.precision // 2):
            return INFINITY
        return -q0[N + 1] / p0[N + 1]


def vonneumann_G(coeffs: RecursionCoefficients, t: Any, z: Any, N: int) -> Any:
    """Stieltjes transform of the solution with parameter t (real or INFINITY) at depth N."""
    m = abcd(coeffs, z, N)
    g = f_map(m, t)
    arith = m.arithmetic
    if g is INFINITY:
        return g
    with arith.workprec():
        if arith.sign(imag_part(m.z)) > 0:
            im = imag_part(g)
            if arith.exact and not _is_float(im):
                bad = im <= 0
            else:
                bad = to_mp(im) <= arith.tolerance(IDENTITY_SLACK) * abs(to_mp(g))
            if bad:
                raise NonHerglotzOutput(f"Im G = {arith.render(im)} is not positive",
                                        t=arith.render(t) if t is not INFINITY else 'inf')
    return g


def weyl_disk(coeffs: RecursionCoefficients, z: Any, N: int) -> WeylDisk:
    """Weyl disk at depth N: sum_{n<N} |Q_n(z) + w P_n(z)|^2 <= Im w / Im z.

    With a = sum |P_n|^2, c = sum |Q_n|^2 and b = sum P_n conj(Q_n) + i / (2 Im z)
    the disk is a|w + conj(b)/a|^2 <= |b|^2/a - c.
    """
    if N < 1:
        raise SchemaError("the Weyl disk needs N >= 1", N=N)
    arith = _context(coeffs, z)
    with arith.workprec():
        coeffs, z = _prepare(coeffs, z, arith)
        y = imag_part(z)
        if arith.sign(y) <= 0:
            raise LowerHalfPlanePoint("the Weyl disk needs Im z > 0", z=arith.render(z))
        pz, qz = monic_values(coeffs, z, N - 1)
        r = norms(coeffs, N - 1)
        if not arith.exact:
            pz, qz, r = ([to_mp(v) for v in vs] for vs in (pz, qz, r))
        a: Any = 0
        b: Any = 0
        c: Any = 0
        for n in range(N):
            a = a + abs2(pz[n]) / r[n]
            c = c + abs2(qz[n]) / r[n]
            b = b + pz[n] * conj(qz[n]) / r[n]
        if arith.exact:
            b = b + GaussianRational(0, 1 / (2 * y))
        else:
            b = b + mp.mpc(0, 1 / (2 * y))
        center = -conj(b) / a
        radius_sq = abs2(b) / (a * a) - c / a
        if arith.sign(radius_sq) <= 0:
            raise NonpositiveRadicand(f"Weyl radius^2 = {arith.render(radius_sq)} at depth {N}",
                                      N=N)
        radius = arith.sqrt(radius_sq)
        closed_form = 1 / (2 * y * a)
    logger.debug("weyl disk depth %d radius %s", N, arith.render(radius))
    return WeylDisk(z, N, center, radius_sq, radius, closed_form, arith)


def pick_matrix(z: Sequence[Any], w: Sequence[Any]) -> List[List[Any]]:
    """D_ij = (w_i - conj(w_j)) / (z_i - conj(z_j))."""
    return [[(wi - conj(wj)) / (zi - conj(zj)) for wj, zj in zip(w, z)] for wi, zi in zip(w, z)]


def pick_test(z: Sequence[Any], w: Sequence[Any], precision: int = 256) -> PickResult:
    """Positive semidefiniteness and determinant of the Pick matrix.

    The matrix is degenerate (det = 0) exactly when a single Herglotz
    rational function of degree <= n - 1 interpolates the data.
    """
    if len(z) != len(w) or not z:
        raise SchemaError("z and w must be nonempty and of equal length", z=len(z), w=len(w))
    arith = Arithmetic(True, precision).promote(*z, *w)
    with arith.workprec():
        zs = [_complexify(v, arith) for v in z]
        ws = [_complexify(v, arith) for v in w]
        for i, p in enumerate(zs):
            if arith.sign(imag_part(p)) <= 0:
                raise LowerHalfPlanePoint(f"z[{i}] must lie in the upper half plane", index=i)
            for k in range(i):
                if arith.is_zero(_sub(p, zs[k]), max(1, abs(to_mp(p)))):
                    raise CoincidentNodes(f"z[{k}] and z[{i}] coincide", first=k, second=i)
        m = pick_matrix(zs, ws)
        n = len(m)
        trace = sum((real_part(m[i][i]) for i in range(n)), 0)
        threshold = mp.mpf(2) ** -(arith.precision // 2) * abs(to_mp(trace))
        _, psd = pivoted_ldl(m, arith, threshold)
        det = real_part(determinant(m, arith)[0])
        if arith.exact:
            degenerate = det == 0
        else:
            degenerate = arith.is_zero(det, max(1, abs(to_mp(trace))) ** n, slack=arith.precision // 2)
    return PickResult(n, m, psd, det, degenerate, arith)


def _complexify(value: Any, arith: Arithmetic) -> Any:
    if arith.exact:
        v = arith.convert(value)
        if isinstance(v, GaussianRational):
            return v
        return GaussianRational(v, 0)
    return mp.mpc(to_mp(value))
