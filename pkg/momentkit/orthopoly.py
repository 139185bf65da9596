"""Recursion coefficients and the orthogonal polynomials of a moment sequence.

Values come in two flavours. Monic values p_n, q_n obey
p_{n+1} = (z - b_n) p_n - a_{n-1}^2 p_{n-1} and stay rational in exact mode;
the orthonormal P_n = p_n / sqrt(r_n), r_n = a_0^2 ... a_{n-1}^2, are
returned as ``Surd`` values in exact mode and as mpmath numbers otherwise.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

from mpmath import mp

from .errors import DegenerateSequence, TooShort, ZeroDenominator
from .linalg import determinant
from .moments import MomentSequence
from .scalars import DEFAULT_PRECISION, Arithmetic, surd, to_mp

logger = logging.getLogger(__name__)

# determinant cross-checks grow expensive quickly in exact mode
VERIFY_DEPTH = 12


@dataclass(frozen=True)
class RecursionCoefficients:
    """Jacobi parameters b_0..b_{N-1} and a_0^2..a_{depth-1}^2.

    ``depth`` is N - 1 or N: the last a^2 is known only when the moment
    prefix reaches gamma_{2N}.
    """
    b: Tuple[Any, ...]
    a2: Tuple[Any, ...]
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not self.b:
            raise TooShort("recursion coefficients need at least b_0")
        if len(self.a2) not in (len(self.b) - 1, len(self.b)):
            raise TooShort("need len(a2) in {len(b) - 1, len(b)}",
                           b=len(self.b), a2=len(self.a2))

    @property
    def N(self) -> int:
        return len(self.b)

    @property
    def depth(self) -> int:
        return len(self.a2)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.b + self.a2)

    @property
    def arithmetic(self) -> Arithmetic:
        return Arithmetic(self.exact, self.precision)

    def a(self, n: int) -> Any:
        """a_n as a Surd (exact) or mpf."""
        arith = self.arithmetic
        with arith.workprec():
            return arith.sqrt(self.a2[n])

    def truncate(self, N: int) -> 'RecursionCoefficients':
        """The first N rows: b_0..b_{N-1} and as many a^2 as are known."""
        if N < 1 or N > self.N:
            raise TooShort(f"cannot truncate {self.N} coefficients to {N}", N=N)
        return RecursionCoefficients(self.b[:N], self.a2[:min(N, self.depth)], self.precision)

    def to_dict(self) -> dict:
        arith = self.arithmetic
        return {'b': [arith.render(v) for v in self.b],
                'a2': [arith.render(v) for v in self.a2],
                'N': self.N}


@dataclass
class OrthoEval:
    """P_0(z)..P_N(z) and Q_0(z)..Q_N(z)."""
    z: Any
    P: List[Any]
    Q: List[Any]


@dataclass
class BorderedDeterminant:
    """S_n(z) and the radicand h_n h_{n+1}; P_n(z) = S_n(z) / sqrt(radicand)."""
    n: int
    z: Any
    S: Any
    radicand: Any
    value: Any


def recursion_coeffs(seq: MomentSequence, N: Optional[int] = None,
                     verify: bool = False) -> RecursionCoefficients:
    """Jacobi parameters by the Chebyshev algorithm on the moment functional.

    sigma_{k,l} = E[p_k(X) X^l] is updated along the three-term recurrence;
    sigma_{k,k} is the squared norm of p_k.

    Args:
        seq: Moment sequence gamma_0..gamma_K.
        N: Number of b coefficients; defaults to the largest with 2N - 1 <= K.
        verify: Cross-check against the Hankel determinant formulas.

    Returns:
        RecursionCoefficients with a_{N-1}^2 included when K >= 2N.
    """
    K = seq.K
    if N is None:
        N = (K + 1) // 2
    if N < 1 or 2 * N - 1 > K:
        raise TooShort(f"{N} recursion coefficients need K >= {2 * N - 1}", K=K, N=N)
    arith = seq.arithmetic
    slack = arith.precision // 2

    with arith.workprec():
        gamma = arith.convert_all(seq.gamma)
        prev: List[Any] = [0] * (K + 1)
        sigma: List[Any] = list(gamma)
        if arith.sign(sigma[0]) <= 0:
            raise DegenerateSequence("gamma_0 must be positive", index=0)
        alpha = sigma[1] / sigma[0]
        beta: Any = sigma[0]
        b = [alpha]
        a2: List[Any] = []
        last = N if 2 * N <= K else N - 1
        for k in range(1, last + 1):
            new: List[Any] = [0] * (K + 1)
            for l in range(k, K - k + 1):
                new[l] = sigma[l + 1] - alpha * sigma[l] - beta * prev[l]
            norm = new[k]
            scale = max(abs(to_mp(sigma[k + 1])), abs(to_mp(alpha * sigma[k])),
                        abs(to_mp(beta * prev[k])))
            if arith.is_zero(norm, scale, slack=slack):
                raise DegenerateSequence(f"p_{k} has zero norm: the measure has finite support",
                                         index=k)
            if arith.sign(norm) < 0:
                raise DegenerateSequence(f"p_{k} has negative norm: not a moment sequence",
                                         index=k)
            beta = norm / sigma[k - 1]
            a2.append(beta)
            if k < N:
                alpha = new[k + 1] / new[k] - sigma[k] / sigma[k - 1]
                b.append(alpha)
            prev, sigma = sigma, new
            logger.debug("recursion depth %d: a2=%s", k, arith.render(beta))

    coeffs = RecursionCoefficients(tuple(b), tuple(a2), seq.precision)
    if verify:
        _verify_with_determinants(seq, coeffs)
    return coeffs


def _verify_with_determinants(seq: MomentSequence, coeffs: RecursionCoefficients) -> None:
    from .hankel import aux_dets

    m = min(VERIFY_DEPTH, seq.K // 2)
    if m < 1:
        return
    dets = aux_dets(seq, m)
    arith = seq.arithmetic
    slack = 24
    with arith.workprec():
        for n in range(min(coeffs.depth, m)):
            expected = dets.h[n] * dets.h[n + 2] / (dets.h[n + 1] * dets.h[n + 1])
            arith.check_close(coeffs.a2[n], expected,
                              f"a_{n}^2 disagrees with h_n h_(n+2) / h_(n+1)^2", slack,
                              index=n, recurrence=arith.render(coeffs.a2[n]),
                              determinant=arith.render(expected))
        total: Any = 0
        for n in range(min(coeffs.N, m)):
            total = total + coeffs.b[n]
            expected = dets.h_tilde[n + 1] / dets.h[n + 1]
            arith.check_close(total, expected,
                              f"b_0 + ... + b_{n} disagrees with the determinant ratio", slack,
                              index=n)


def _require(coeffs: RecursionCoefficients, N: int, limit: int, what: str) -> None:
    if N < 0 or N > limit:
        raise TooShort(f"{what} to index {N} needs more recursion coefficients",
                       N=N, available=limit)


def monic_values(coeffs: RecursionCoefficients, z: Any, N: int) -> Tuple[List[Any], List[Any]]:
    """Monic p_0(z)..p_N(z) and q_0(z)..q_N(z) (needs N <= coeffs.N).

    z may be a scalar of either mode or a PowerSeries.
    """
    _require(coeffs, N, coeffs.N, "monic values")
    p_prev: Any = 0
    p: Any = 1
    q_prev: Any = -1
    q: Any = 0
    ps, qs = [p], [q]
    for n in range(N):
        a2_prev = coeffs.a2[n - 1] if n else 1
        shift = z - coeffs.b[n]
        p_prev, p = p, shift * p - a2_prev * p_prev
        q_prev, q = q, shift * q - a2_prev * q_prev
        ps.append(p)
        qs.append(q)
    return ps, qs


def norms(coeffs: RecursionCoefficients, N: int) -> List[Any]:
    """r_0..r_N with r_n = a_0^2 ... a_{n-1}^2."""
    r: List[Any] = [Fraction(1) if coeffs.exact else mp.mpf(1)]
    for n in range(N):
        r.append(r[-1] * coeffs.a2[n])
    return r


def _orthonormal(monic: Any, r: Any, arith: Arithmetic) -> Any:
    if arith.exact:
        return surd(monic / r, r)
    return to_mp(monic) / mp.sqrt(to_mp(r))


def evaluate(coeffs: RecursionCoefficients, z: Any, N: int) -> OrthoEval:
    """P_0(z)..P_N(z) and Q_0(z)..Q_N(z); needs N <= coeffs.depth.

    Exact coefficients with an exact z give Surd values; otherwise the
    orthonormal recurrence runs in mpmath at the coefficients' precision.
    """
    _require(coeffs, N, coeffs.depth, "orthonormal values")
    arith = coeffs.arithmetic.promote(z)
    with arith.workprec():
        if arith.exact:
            ps, qs = monic_values(coeffs, z, N)
            r = norms(coeffs, N)
            P = [_orthonormal(ps[n], r[n], arith) for n in range(N + 1)]
            Q = [_orthonormal(qs[n], r[n], arith) for n in range(N + 1)]
            return OrthoEval(z, P, Q)

        z = to_mp(z)
        a = [mp.sqrt(to_mp(v)) for v in coeffs.a2[:N]]
        P = [mp.mpf(1)]
        Q = [mp.mpf(0)]
        P_prev, Q_prev = mp.mpf(0), mp.mpf(-1)
        for n in range(N):
            a_prev = a[n - 1] if n else 1
            shift = z - to_mp(coeffs.b[n])
            P_next = (shift * P[-1] - a_prev * P_prev) / a[n]
            Q_next = (shift * Q[-1] - a_prev * Q_prev) / a[n]
            P_prev, Q_prev = P[-1], Q[-1]
            P.append(P_next)
            Q.append(Q_next)
        return OrthoEval(z, P, Q)


def eval_P(coeffs: RecursionCoefficients, z: Any, N: int) -> List[Any]:
    """First-kind values P_0(z)..P_N(z)."""
    return evaluate(coeffs, z, N).P


def eval_Q(coeffs: RecursionCoefficients, z: Any, N: int) -> List[Any]:
    """Second-kind values Q_0(z)..Q_N(z)."""
    return evaluate(coeffs, z, N).Q


def _monic_polynomials(coeffs: RecursionCoefficients, N: int, second_kind: bool) -> List[List[Any]]:
    prev: List[Any] = [-1] if second_kind else [0]
    cur: List[Any] = [0] if second_kind else [1]
    out = [cur]
    for n in range(N):
        a2_prev = coeffs.a2[n - 1] if n else 1
        nxt: List[Any] = [0] * (len(cur) + 1)
        for k, c in enumerate(cur):
            nxt[k + 1] = nxt[k + 1] + c
            nxt[k] = nxt[k] - coeffs.b[n] * c
        for k, c in enumerate(prev):
            nxt[k] = nxt[k] - a2_prev * c
        prev, cur = cur, nxt
        out.append(cur)
    return out


def polynomial_coefficients(coeffs: RecursionCoefficients, N: int,
                            kind: str = 'P') -> List[List[Any]]:
    """Monomial coefficients (low to high) of P_0..P_N or Q_0..Q_N.

    The vector for index n has length n + 1; the top entry of a Q vector is
    zero since deg Q_n = n - 1.
    """
    if kind not in ('P', 'Q'):
        raise ValueError("kind must be 'P' or 'Q'")
    _require(coeffs, N, coeffs.depth, "polynomial coefficients")
    arith = coeffs.arithmetic
    with arith.workprec():
        monic = _monic_polynomials(coeffs, N, kind == 'Q')
        r = norms(coeffs, N)
        return [[_orthonormal(c, r[n], arith) for c in row] for n, row in enumerate(monic)]


def wronskian(coeffs: RecursionCoefficients, z: Any, N: int) -> List[Any]:
    """a_{k-1} (Q_k P_{k-1} - Q_{k-1} P_k) for k = 1..N; every entry is 1."""
    values = evaluate(coeffs, z, N)
    arith = coeffs.arithmetic.promote(z)
    out = []
    with arith.workprec():
        for k in range(1, N + 1):
            cross = values.Q[k] * values.P[k - 1] - values.Q[k - 1] * values.P[k]
            out.append(coeffs.a(k - 1) * cross)
    return out


def eval_second_kind_by_integral(coeffs: RecursionCoefficients, seq: MomentSequence,
                                 z: Any, N: int) -> List[Any]:
    """Q_n(z) = E_X[(P_n(X) - P_n(z)) / (X - z)] for n = 0..N.

    With P_n = sum_k c_k x^k the divided difference of x^k contributes
    R_k(z) = sum_{j<k} gamma_j z^{k-1-j}, built by R_{k+1} = gamma_k + z R_k.
    """
    _require(coeffs, N, coeffs.depth, "second-kind values")
    if seq.K < N - 1:
        raise TooShort(f"Q_{N} by the moment functional needs K >= {N - 1}", K=seq.K, N=N)
    arith = coeffs.arithmetic.promote(z, *seq.gamma)
    with arith.workprec():
        z = arith.convert(z)
        gamma = arith.convert_all(seq.gamma[:max(N, 1)])
        R: List[Any] = [0]
        for k in range(N):
            R.append(gamma[k] + z * R[-1])
        monic = _monic_polynomials(coeffs, N, second_kind=False)
        r = norms(coeffs, N)
        out = []
        for n, row in enumerate(monic):
            acc: Any = 0
            for k, c in enumerate(row):
                acc = acc + c * R[k]
            out.append(_orthonormal(acc, r[n], arith))
    return out


def monic_MN(coeffs: RecursionCoefficients, z: Any, N: int) -> Tuple[Any, Any]:
    """Monic Krein-section polynomials m_N(z), n_N(z).

    m_N = p_N - p_N(0) p_{N-1} / p_{N-1}(0), and n_N the same with q.
    """
    if N < 1:
        raise TooShort("Krein polynomials need N >= 1", N=N)
    p0, _ = monic_values(coeffs, 0, N)
    if p0[N - 1] == 0:
        raise ZeroDenominator(f"P_{N - 1}(0) = 0", index=N - 1)
    ps, qs = monic_values(coeffs, z, N)
    ratio = p0[N] / p0[N - 1]
    return ps[N] - ratio * ps[N - 1], qs[N] - ratio * qs[N - 1]


def eval_MN(coeffs: RecursionCoefficients, z: Any, N: int) -> Tuple[Any, Any]:
    """Krein-section polynomials (M_N(z), N_N(z)); M_N(0) = 0.

    Raises ZeroDenominator when P_{N-1}(0) = 0.
    """
    _require(coeffs, N, coeffs.depth, "Krein polynomials")
    arith = coeffs.arithmetic.promote(z)
    with arith.workprec():
        if not arith.exact:
            coeffs = _as_float(coeffs)
            z = to_mp(z)
            p0, _ = monic_values(coeffs, 0, N)
            if arith.is_zero(p0[N - 1], _monic_scale(coeffs, N - 1), slack=arith.precision // 2):
                raise ZeroDenominator(f"P_{N - 1}(0) = 0", index=N - 1)
        m, n = monic_MN(coeffs, z, N)
        r = norms(coeffs, N)[N]
        return _orthonormal(m, r, arith), _orthonormal(n, r, arith)


def _as_float(coeffs: RecursionCoefficients) -> RecursionCoefficients:
    return RecursionCoefficients(tuple(to_mp(v) for v in coeffs.b),
                                 tuple(to_mp(v) for v in coeffs.a2), coeffs.precision)


def _monic_scale(coeffs: RecursionCoefficients, n: int) -> Any:
    """Size of the terms p_n(0) is built from, for relative zero tests."""
    scale = mp.mpf(1)
    for k in range(n):
        scale *= abs(to_mp(coeffs.b[k])) + mp.sqrt(abs(to_mp(coeffs.a2[k - 1] if k else 1)))
    return scale


def det_formula_P(seq: MomentSequence, n: int, z: Any) -> BorderedDeterminant:
    """P_n(z) from the bordered Hankel determinant.

    S_n(z) = det of rows [gamma_{i+j}]_{j<=n} for i < n closed by the row
    [1, z, ..., z^n]; P_n(z) = S_n(z) / sqrt(h_n h_{n+1}). Needs K >= 2n.
    """
    if n < 0 or seq.K < 2 * n:
        raise TooShort(f"the determinant formula for P_{n} needs K >= {2 * n}", K=seq.K, n=n)
    arith = seq.arithmetic.promote(z)
    with arith.workprec():
        z = arith.convert(z)
        gamma = arith.convert_all(seq.gamma)
        powers: List[Any] = [arith.convert(1)]
        for _ in range(n):
            powers.append(powers[-1] * z)
        rows = [[gamma[i + j] for j in range(n + 1)] for i in range(n)] + [powers]
        S = determinant(rows, arith)[0]
        h_n = determinant([[gamma[i + j] for j in range(n)] for i in range(n)], arith)[0]
        h_next = determinant([[gamma[i + j] for j in range(n + 1)] for i in range(n + 1)], arith)[0]
        radicand = h_n * h_next
        if arith.sign(radicand) <= 0:
            raise DegenerateSequence(f"h_{n} h_{n + 1} is not positive", index=n)
        value = _orthonormal(S, radicand, arith)
    return BorderedDeterminant(n, z, S, radicand, value)


def coefficients_from_lists(b: Sequence[Any], a2: Sequence[Any],
                            precision: int = DEFAULT_PRECISION) -> RecursionCoefficients:
    """RecursionCoefficients from raw lists, exact when every entry is."""
    arith = Arithmetic(True, precision).promote(*b, *a2)
    with arith.workprec():
        return RecursionCoefficients(tuple(arith.convert_all(b)), tuple(arith.convert_all(a2)),
                                     precision)
