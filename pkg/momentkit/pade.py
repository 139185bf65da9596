"""Padé approximants of the series sum_j (-1)^j gamma_j z^j.

Every staircase entry is computed from a Jacobi section, never from a
linear solve:

  [m-1, m]   <delta_0, (1 + z T_F)^{-1} delta_0> with the F section of size m
  [m, m]     the same with the K section of size m + 1
  [n, m]     with ell = n - m + 1 >= 2: polynomial part plus a shifted
             sequence's F or K entry
  [n, m]     with ell <= -1: the reciprocal series of the stripped problem

The linear-system construction survives only as the oracle inside
taylor_match_check.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .errors import (
    CrossCheckFailure, NotExists, PoleHit, TooShort, UnsupportedShape,
)
from .linalg import solve_rational
from .moments import Kind, MomentSequence, index_shift, reciprocal_moments
from .orthopoly import _monic_scale, monic_values, recursion_coeffs
from .scalars import Arithmetic, PowerSeries, to_mp

logger = logging.getLogger(__name__)

DEFAULT_ELL_MAX = 3


@dataclass
class PadeValue:
    """f^[N, M](z): numerator degree N, denominator degree M."""
    N: int
    M: int
    z: Any
    value: Any
    exists: bool = True

    @property
    def ell(self) -> int:
        return self.N - self.M + 1

    def to_dict(self, arith: Arithmetic) -> Dict[str, Any]:
        return {
            'N': self.N,
            'M': self.M,
            'z': arith.render(self.z),
            'value': arith.render(self.value) if self.exists else None,
            'exists': self.exists,
        }


@dataclass
class PadeTable:
    """Staircase values f^[N+ell-1, N](x) per ell and the final bracket."""
    x: Any
    N_max: int
    rows: Dict[int, List[PadeValue]]
    monotone: Dict[int, Optional[bool]]
    bracket: Tuple[Optional[Any], Optional[Any]]
    mode: str
    warnings: List[str] = field(default_factory=list)

    def to_dict(self, arith: Arithmetic) -> Dict[str, Any]:
        lower, upper = self.bracket
        return {
            'x': arith.render(self.x),
            'N_max': self.N_max,
            'mode': self.mode,
            'shapes': {
                str(ell): {
                    'values': [cell.to_dict(arith) for cell in cells],
                    'monotone': self.monotone[ell],
                }
                for ell, cells in sorted(self.rows.items())
            },
            'bracket': [None if lower is None else arith.render(lower),
                        None if upper is None else arith.render(upper)],
            'warnings': list(self.warnings),
        }

    def to_rows(self, arith: Arithmetic) -> List[List[str]]:
        """CSV rows: ell, N, M, value, exists."""
        out = [['ell', 'N', 'M', 'value', 'exists']]
        for ell, cells in sorted(self.rows.items()):
            for cell in cells:
                out.append([str(ell), str(cell.N), str(cell.M),
                            arith.render(cell.value) if cell.exists else '',
                            str(cell.exists).lower()])
        return out


def _lifter(arith: Arithmetic) -> Callable[[Any], Any]:
    if arith.exact:
        return lambda v: v
    return to_mp


def _continued_fraction(diag: Sequence[Any], a2: Sequence[Any], z: Any,
                        arith: Arithmetic) -> Any:
    """<delta_0, (1 + z T)^{-1} delta_0> for the tridiagonal T(diag, a2)."""
    lift = _lifter(arith)
    z2 = z * z
    g = 1 + z * lift(diag[-1])
    for i in range(len(diag) - 2, -1, -1):
        _check_pole(g, arith)
        g = 1 + z * lift(diag[i]) - z2 * lift(a2[i]) / g
    _check_pole(g, arith)
    return 1 / g


def _check_pole(g: Any, arith: Arithmetic) -> None:
    if isinstance(g, PowerSeries):
        return
    if arith.is_zero(g, slack=arith.precision // 2):
        raise PoleHit("the approximant has a pole at this point")


def _kappa(seq: MomentSequence, j: int, lift: Callable[[Any], Any]) -> Any:
    g = lift(seq.gamma[j])
    return -g if j % 2 else g


def _taylor(seq: MomentSequence, n: int, z: Any, lift: Callable[[Any], Any]) -> Any:
    total: Any = 0
    power: Any = 1
    for j in range(n + 1):
        total = total + _kappa(seq, j, lift) * power
        power = power * z
    return total


def _friedrichs_entry(seq: MomentSequence, m: int, z: Any, arith: Arithmetic) -> Any:
    coeffs = recursion_coeffs(seq, m)
    return _continued_fraction(coeffs.b[:m], coeffs.a2[:m - 1], z, arith)


def _diagonal_entry(seq: MomentSequence, m: int, z: Any, arith: Arithmetic) -> Any:
    """[m, m] from the K section of size m + 1; the corner needs no b_m."""
    if m == 0:
        return 1
    coeffs = recursion_coeffs(seq, m)
    seq_arith = seq.arithmetic
    with seq_arith.workprec():
        p0, _ = monic_values(coeffs, 0, m)
        if seq_arith.is_zero(p0[m], _monic_scale(coeffs, m), slack=seq_arith.precision // 2):
            raise NotExists(f"P_{m}(0) = 0: the diagonal approximant [{m}, {m}] does not exist",
                            N=m)
        corner = -coeffs.a2[m - 1] * p0[m - 1] / p0[m]
    diag = list(coeffs.b[:m]) + [corner]
    return _continued_fraction(diag, coeffs.a2[:m], z, arith)


def _tail(seq: MomentSequence, shift: int) -> MomentSequence:
    """gamma^(shift), also for prefixes shorter than index_shift accepts."""
    if seq.K >= shift + 2:
        return index_shift(seq, shift)
    arith = seq.arithmetic
    with arith.workprec():
        pivot = seq.gamma[shift]
        if arith.sign(pivot) <= 0:
            raise NotExists(f"gamma_{shift} is not positive", ell=shift)
        gamma = tuple(g / pivot for g in seq.gamma[shift:])
    return MomentSequence(gamma, seq.kind, seq.label, seq.precision)


def _staircase(seq: MomentSequence, n: int, m: int, z: Any, arith: Arithmetic) -> Any:
    lift = _lifter(arith)
    if m == 0:
        return _taylor(seq, n, z, lift)
    ell = n - m + 1
    if ell == 0:
        return _friedrichs_entry(seq, m, z, arith)
    if ell == 1:
        return _diagonal_entry(seq, m, z, arith)
    if ell >= 2:
        # an odd shift needs a Stieltjes sequence; otherwise reduce to a diagonal entry
        shift = ell if ell % 2 == 0 or seq.kind is Kind.STIELTJES else ell - 1
        tail = _tail(seq, shift)
        inner = _staircase(tail, n - shift, m, z, arith)
        head = _taylor(seq, shift - 1, z, lift)
        return head + _kappa(seq, shift, lift) * z ** shift * inner
    stripped = reciprocal_moments(seq)
    inner = _staircase(stripped, m - 2, n, z, arith)
    gamma1 = lift(seq.gamma[1])
    a0_sq = lift(seq.gamma[2]) - gamma1 * gamma1
    denom = 1 + gamma1 * z - a0_sq * z * z * inner
    _check_pole(denom, arith)
    return 1 / denom


def _validate_shape(seq: MomentSequence, N: int, M: int, ell_max: int) -> None:
    if N < 0 or M < 0:
        raise UnsupportedShape("degrees must be nonnegative", N=N, M=M)
    ell = N - M + 1
    if abs(ell) > ell_max and M > 0:
        raise UnsupportedShape(f"|ell| = {abs(ell)} exceeds ell_max = {ell_max}",
                               N=N, M=M, ell_max=ell_max)
    if seq.K < N + M:
        raise TooShort(f"[{N}, {M}] needs gamma_0..gamma_{N + M}", K=seq.K, N=N, M=M)


def pade_value(seq: MomentSequence, N: int, M: int, z: Any,
               ell_max: int = DEFAULT_ELL_MAX) -> PadeValue:
    """f^[N, M](z) via the spectral identities.

    Args:
        seq: Normalized moment sequence.
        N: Numerator degree.
        M: Denominator degree.
        z: Evaluation point (exact, mpmath, or a PowerSeries).
        ell_max: Largest |N - M + 1| accepted.

    Returns:
        PadeValue; raises NotExists when the diagonal gate fails.
    """
    _validate_shape(seq, N, M, ell_max)
    if isinstance(z, PowerSeries):
        arith = seq.arithmetic.promote(*z.coeffs)
    else:
        arith = seq.arithmetic.promote(z)
    with arith.workprec():
        point = z
        if not arith.exact:
            point = to_mp(z)
        elif not isinstance(z, PowerSeries):
            point = arith.convert(z)
        value = _staircase(seq, N, M, point, arith)
    return PadeValue(N, M, z, value)


def _denominator_oracle(seq: MomentSequence, N: int, M: int) -> Optional[List[Any]]:
    """beta_0..beta_M of B with B(0) = 1 from the Padé equations, or None."""
    kappa = [g if j % 2 == 0 else -g for j, g in enumerate(seq.gamma)]

    def k_at(i: int) -> Any:
        return kappa[i] if i >= 0 else 0

    rows = [[k_at(i - k) for k in range(1, M + 1)] for i in range(N + 1, N + M + 1)]
    rhs = [-k_at(i) for i in range(N + 1, N + M + 1)]
    if M == 0:
        return [1]
    solution = solve_rational(rows, rhs)
    if solution is None:
        return None
    return [1] + solution


def taylor_match_check(seq: MomentSequence, N: int, M: int,
                       ell_max: int = DEFAULT_ELL_MAX) -> int:
    """First Taylor order where f^[N, M] departs from the series.

    The spectral value is expanded as a power series through gamma_K and
    compared with kappa_j = (-1)^j gamma_j; K + 1 means no departure was
    seen. In exact mode the denominator from the Padé equations must
    reproduce the same expansion.
    """
    order = seq.K + 1
    arith = seq.arithmetic
    with arith.workprec():
        lift = _lifter(arith)
        z = PowerSeries([lift(0), lift(1)], order)
        series = pade_value(seq, N, M, z, ell_max).value
        if not isinstance(series, PowerSeries):
            series = PowerSeries.constant(series, order)
        matched = order
        for j in range(order):
            if not arith.close(series[j], _kappa(seq, j, lift), slack=arith.precision // 4):
                matched = j
                break

        if arith.exact:
            beta = _denominator_oracle(seq, N, M)
            if beta is None:
                raise CrossCheckFailure(f"the Padé equations for [{N}, {M}] are inconsistent "
                                        "but the spectral value exists", N=N, M=M)
            kappa = [_kappa(seq, j, lift) for j in range(order)]
            alpha = [sum((beta[k] * kappa[i - k] for k in range(min(i, M) + 1)), 0)
                     for i in range(N + 1)]
            oracle = PowerSeries(alpha, order) / PowerSeries(beta, order)
            for j in range(order):
                if oracle[j] != series[j]:
                    raise CrossCheckFailure(f"[{N}, {M}] spectral and linear-system expansions "
                                            f"differ at order {j}", N=N, M=M, order=j)
    logger.debug("[%d, %d] matches the series through order %d", N, M, matched - 1)
    return matched


def pade_table(seq: MomentSequence, x: Any, N_max: int, shapes: Sequence[int] = (0, 1),
               ell_max: int = DEFAULT_ELL_MAX) -> PadeTable:
    """Values f^[N+ell-1, N](x) for N <= N_max and each ell in `shapes`.

    (-1)^ell f^[N+ell-1, N](x) is strictly increasing in N for a Stieltjes
    sequence and x >= 0; the bracket [f^[N-1, N](x), f^[N, N](x)] is
    reported at N = N_max.
    """
    arith = seq.arithmetic.promote(x)
    with arith.workprec():
        if arith.sign(arith.convert(x)) < 0:
            raise UnsupportedShape("the table is evaluated at x >= 0", x=arith.render(x))
        # every approximant equals gamma_0 at x = 0
        positive = arith.sign(arith.convert(x)) > 0
    if N_max < 1:
        raise TooShort("N_max must be at least 1", N_max=N_max)
    for ell in shapes:
        if abs(ell) > ell_max:
            raise UnsupportedShape(f"|ell| = {abs(ell)} exceeds ell_max = {ell_max}", ell=ell)
        need = 2 * N_max + ell - 1
        if seq.K < max(need, 2 * N_max):
            raise TooShort(f"shape ell={ell} up to N={N_max} needs K >= {max(need, 2 * N_max)}",
                           K=seq.K, ell=ell, N_max=N_max)

    warnings: List[str] = []
    stieltjes = seq.kind is Kind.STIELTJES
    if not stieltjes:
        msg = "sequence not declared Stieltjes: monotonicity is not asserted"
        logger.warning(msg)
        warnings.append(msg)

    rows: Dict[int, List[PadeValue]] = {}
    monotone: Dict[int, Optional[bool]] = {}
    for ell in sorted(set(shapes)):
        cells = []
        for N in range(max(1, 1 - ell), N_max + 1):
            try:
                cells.append(pade_value(seq, N + ell - 1, N, x, ell_max))
            except NotExists:
                cells.append(PadeValue(N + ell - 1, N, x, None, exists=False))
        rows[ell] = cells
        monotone[ell] = _signed_monotone(cells, ell, arith, positive) if stieltjes else None
        if monotone[ell] is False:
            msg = f"ell={ell}: (-1)^ell f is not monotone in N"
            logger.warning(msg)
            warnings.append(msg)

    lower = pade_value(seq, N_max - 1, N_max, x, ell_max).value
    try:
        upper = pade_value(seq, N_max, N_max, x, ell_max).value
    except NotExists:
        upper = None
    return PadeTable(x, N_max, rows, monotone, (lower, upper), arith.mode, warnings)


def _signed_monotone(cells: List[PadeValue], ell: int, arith: Arithmetic,
                     strict: bool = True) -> bool:
    """(-1)^ell times the existing values increases (strictly unless `strict` is off).

    Float steps must clear the tolerance to count as strict.
    """
    values = [c.value for c in cells if c.exists]
    sign = -1 if ell % 2 else 1
    with arith.workprec():
        for prev, cur in zip(values, values[1:]):
            step = sign * (cur - prev)
            if arith.exact:
                if step < 0 or (strict and step == 0):
                    return False
                continue
            floor = arith.tolerance(arith.precision // 4) * max(1, abs(to_mp(cur)))
            if to_mp(step) <= floor if strict else to_mp(step) < -floor:
                return False
    return True
