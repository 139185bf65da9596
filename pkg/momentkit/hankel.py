"""Hankel determinants: the existence gate and the determinant oracles."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from mpmath import mp

from .errors import TooShort
from .linalg import determinant
from .moments import Kind, MomentSequence
from .scalars import Arithmetic, to_mp

logger = logging.getLogger(__name__)

# a float determinant is trusted to about p*log10(2) - log10(growth) digits
MIN_SIGNIFICANT_DIGITS = 10


class Verdict(Enum):
    HAMBURGER_OK = "hamburger_ok"
    STIELTJES_OK = "stieltjes_ok"
    DEGENERATE = "degenerate"
    NOT_STIELTJES = "not_stieltjes"
    NOT_HAMBURGER = "not_hamburger"


@dataclass
class HankelReport:
    """h_1..h_N and s_1..s_M with the verdict of the positivity test."""
    h: List[Any]
    s: List[Any]
    first_h_failure: Optional[int]
    first_s_failure: Optional[int]
    verdict: Verdict
    mode: str
    warnings: List[str] = field(default_factory=list)

    @property
    def failing_index(self) -> Optional[int]:
        if self.first_h_failure is not None:
            return self.first_h_failure
        if self.verdict is Verdict.NOT_STIELTJES:
            return self.first_s_failure
        return None

    def to_dict(self, arith: Arithmetic) -> Dict[str, Any]:
        return {
            'h': [arith.render(v) for v in self.h],
            's': [arith.render(v) for v in self.s],
            'first_h_failure': self.first_h_failure,
            'first_s_failure': self.first_s_failure,
            'verdict': self.verdict.value,
            'mode': self.mode,
            'warnings': list(self.warnings),
        }


@dataclass
class AuxDets:
    """Determinants feeding the closed-form identities.

    Lists are indexed by subscript: h[k] = h_k for k = 0..n+1, s[k] for
    k = 0..n, h_tilde[k] and t[k] and v[k] for k = 0..n, w[m] for
    m = 0..n+2, y[k] for k = 0..n-1. Empty determinants are 1; h_tilde[0]
    and t[0] are 0.
    """
    n: int
    h: List[Any]
    s: List[Any]
    h_tilde: List[Any]
    t: List[Any]
    v: List[Any]
    w: List[Any]
    y: List[Any]

    def sum_P0_squared(self, k: int) -> Any:
        """sum_{j<=k} P_j(0)^2 = v_k / h_{k+1}."""
        return self.v[k] / self.h[k + 1]

    def sum_Q0_squared(self, k: int) -> Any:
        """sum_{j<=k} Q_j(0)^2 = -w_{k+2} / h_{k+1}."""
        return -self.w[k + 2] / self.h[k + 1]

    def determinacy_ratio(self) -> Any:
        """y_{n-1} / h_{n+1}."""
        return self.y[self.n - 1] / self.h[self.n + 1]


def hankel_matrix(seq: MomentSequence, n: int, offset: int = 0) -> List[List[Any]]:
    """n x n matrix [gamma_{i+j+offset}]."""
    return [[seq.gamma[i + j + offset] for j in range(n)] for i in range(n)]


def _diagonal_scale(m: List[List[Any]]) -> Any:
    scale = mp.mpf(1)
    for i, row in enumerate(m):
        scale *= abs(to_mp(row[i]))
    return scale


def _checked_det(m: List[List[Any]], arith: Arithmetic, name: str,
                 warnings: List[str]) -> Any:
    value, growth = determinant(m, arith)
    if not arith.exact:
        digits = arith.precision * mp.log10(2) - mp.log10(max(growth, 1))
        if digits < MIN_SIGNIFICANT_DIGITS:
            msg = f"{name}: elimination growth {mp.nstr(growth, 5)} leaves < {MIN_SIGNIFICANT_DIGITS} digits"
            logger.warning(msg)
            warnings.append(msg)
    return value


def _classify(value: Any, m: List[List[Any]], arith: Arithmetic) -> int:
    """Sign of a determinant; 0 when numerically zero relative to its diagonal."""
    if arith.exact:
        return (value > 0) - (value < 0)
    with arith.workprec():
        if arith.is_zero(value, _diagonal_scale(m), slack=arith.precision // 2):
            return 0
        return (value > 0) - (value < 0)


def hankel_dets(seq: MomentSequence, N: int) -> HankelReport:
    """h_1..h_N, and s_j for every j <= N the prefix supports.

    Args:
        seq: Moment sequence.
        N: Largest Hankel order; needs 2N - 2 <= K.

    Returns:
        HankelReport with the verdict of the positivity test.
    """
    if N < 1 or 2 * N - 2 > seq.K:
        raise TooShort(f"h_{N} needs K >= {2 * N - 2}", K=seq.K, N=N)
    arith = seq.arithmetic
    warnings: List[str] = []
    h: List[Any] = []
    s: List[Any] = []
    first_h = first_s = None
    h_zero = False
    with arith.workprec():
        for j in range(1, N + 1):
            m = hankel_matrix(seq, j)
            value = _checked_det(m, arith, f"h_{j}", warnings)
            h.append(value)
            sign = _classify(value, m, arith)
            if sign <= 0 and first_h is None:
                first_h, h_zero = j, sign == 0
        for j in range(1, min(N, (seq.K + 1) // 2) + 1):
            m = hankel_matrix(seq, j, offset=1)
            value = _checked_det(m, arith, f"s_{j}", warnings)
            s.append(value)
            if _classify(value, m, arith) <= 0 and first_s is None:
                first_s = j

    if first_h is not None:
        verdict = Verdict.DEGENERATE if h_zero else Verdict.NOT_HAMBURGER
    elif first_s is None:
        verdict = Verdict.STIELTJES_OK
    elif seq.kind is Kind.STIELTJES:
        verdict = Verdict.NOT_STIELTJES
    else:
        verdict = Verdict.HAMBURGER_OK
    logger.debug("hankel_dets N=%d verdict=%s", N, verdict.value)
    return HankelReport(h, s, first_h, first_s, verdict, arith.mode, warnings)


def existence_check(seq: MomentSequence) -> HankelReport:
    """Run hankel_dets to the largest order the prefix supports."""
    return hankel_dets(seq, seq.K // 2 + 1)


def _bordered_t(seq: MomentSequence, n: int) -> List[List[Any]]:
    top = [0] + [seq.gamma[j] for j in range(n)]
    rows = [[seq.gamma[i + j] for j in range(n + 1)] for i in range(n)]
    return [top] + rows


def _w_matrix(seq: MomentSequence, m: int) -> List[List[Any]]:
    out = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == 0 and j == 0 or i == 0 and j == 1 or i == 1 and j == 0:
                row.append(0)
            elif i == 0:
                row.append(seq.gamma[j - 2])
            elif j == 0:
                row.append(seq.gamma[i - 2])
            else:
                row.append(seq.gamma[i + j - 2])
        out.append(row)
    return out


def aux_dets(seq: MomentSequence, n: int) -> AuxDets:
    """All auxiliary determinants up to index n (needs K >= 2n)."""
    if n < 1 or seq.K < 2 * n:
        raise TooShort(f"auxiliary determinants to index {n} need K >= {2 * n}",
                       K=seq.K, n=n)
    arith = seq.arithmetic

    def det(m: List[List[Any]]) -> Any:
        return determinant(m, arith)[0]

    with arith.workprec():
        zero = arith.convert(0)
        h = [det(hankel_matrix(seq, k)) for k in range(n + 2)]
        s = [det(hankel_matrix(seq, k, offset=1)) for k in range(n + 1)]
        h_tilde = [zero]
        for k in range(1, n + 1):
            m = [[seq.gamma[i + j] for j in range(k - 1)] + [seq.gamma[i + k]]
                 for i in range(k)]
            h_tilde.append(det(m))
        t = [-det(_bordered_t(seq, k)) for k in range(n + 1)]
        v = [det(hankel_matrix(seq, k, offset=2)) for k in range(n + 1)]
        w = [det(_w_matrix(seq, m)) for m in range(n + 3)]
        y = [det(hankel_matrix(seq, k, offset=4)) for k in range(n)]
    return AuxDets(n, h, s, h_tilde, t, v, w, y)
