"""Numerical evidence for determinacy and indeterminacy.

Nothing here proves anything: a finite prefix never decides a moment
problem. Every report carries its raw partial sums so the reader can judge
the trend.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from mpmath import mp

from .errors import (
    DegenerateSequence, InvalidDensity, NotStieltjes, SchemaError,
    TooShort,
)
from .moments import Kind, MomentSequence
from .orthopoly import (
    RecursionCoefficients, _monic_scale, monic_values, norms, recursion_coeffs,
)
from .scalars import Arithmetic, to_mp

logger = logging.getLogger(__name__)

CAUCHY_FRACTION = 1e-4
DIVERGENCE_RATIO = 10
TAIL_EXPONENT_GUARD = -1.25
MIN_FIT_POINTS = 4


class Determinacy(Enum):
    HAMBURGER_DETERMINATE = "hamburger_determinate"
    STIELTJES_DETERMINATE_HAMBURGER_INDETERMINATE = "stieltjes_determinate_hamburger_indeterminate"
    INDETERMINATE = "indeterminate"
    INCONCLUSIVE = "inconclusive"


@dataclass
class KreinParameters:
    """String parameters l_n, m_n (n >= 1) and their partial sums."""
    ell: List[Any]
    m: List[Any]
    arithmetic: Arithmetic

    @property
    def c(self) -> List[Any]:
        """Continued-fraction coefficients [m_1, l_1, m_2, l_2, ...]."""
        out: List[Any] = []
        for j, m in enumerate(self.m):
            out.append(m)
            if j < len(self.ell):
                out.append(self.ell[j])
        return out

    @property
    def L_partial(self) -> List[Any]:
        return _partial_sums(self.ell)

    @property
    def M_partial(self) -> List[Any]:
        return _partial_sums(self.m)

    def to_dict(self) -> Dict[str, Any]:
        r = self.arithmetic.render
        return {'ell': [r(v) for v in self.ell], 'm': [r(v) for v in self.m],
                'c': [r(v) for v in self.c]}


@dataclass
class CarlemanSums:
    """Partial sums of the Carleman series and the divergence verdicts."""
    hamburger: List[Any]
    stieltjes: Optional[List[Any]]
    hamburger_divergent: Optional[bool]
    stieltjes_divergent: Optional[bool]
    notes: List[str] = field(default_factory=list)


@dataclass
class DensityResult:
    integral_estimate: Any
    convergent: Optional[bool]
    tail_exponent: Optional[Any]
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'integral_estimate': mp.nstr(self.integral_estimate, 20),
            'convergent': self.convergent,
            'tail_exponent': None if self.tail_exponent is None else mp.nstr(self.tail_exponent, 10),
            'warnings': list(self.warnings),
        }


@dataclass
class DeterminacyReport:
    carleman_partials: List[Any]
    stieltjes_carleman_partials: Optional[List[Any]]
    L_partials: Optional[List[Any]]
    M_partials: Optional[List[Any]]
    verdict: Determinacy
    evidence: List[str]
    depth: int
    mode: str
    precision: int

    def to_dict(self) -> Dict[str, Any]:
        arith = Arithmetic(False, self.precision)

        def render(values: Optional[List[Any]]) -> Optional[List[str]]:
            return None if values is None else [arith.render(to_mp(v)) for v in values]

        return {
            'verdict': self.verdict.value,
            'evidence': list(self.evidence),
            'depth': self.depth,
            'mode': self.mode,
            'carleman_partials': render(self.carleman_partials),
            'stieltjes_carleman_partials': render(self.stieltjes_carleman_partials),
            'L_partials': render(self.L_partials),
            'M_partials': render(self.M_partials),
        }


def _partial_sums(values: Sequence[Any]) -> List[Any]:
    out: List[Any] = []
    total: Any = 0
    for v in values:
        total = total + v
        out.append(total)
    return out


# === Krein string parameters ===

def krein_parameters(coeffs: RecursionCoefficients, N: int) -> KreinParameters:
    """l_1..l_N and m_1..m_N (plus m_{N+1} when a_{N-1}^2 is known).

    m_n = P_{n-1}(0)^2 and l_n = -1 / (a_{n-1} P_n(0) P_{n-1}(0)); in monic
    form l_n = -r_{n-1} / (p_n(0) p_{n-1}(0)). The inverse map back to
    (b, a^2) is verified.
    """
    if N < 1 or N > coeffs.N:
        raise TooShort(f"{N} string parameters need {N} recursion coefficients",
                       N=N, available=coeffs.N)
    arith = coeffs.arithmetic
    with arith.workprec():
        p0, _ = monic_values(coeffs, 0, N)
        r = norms(coeffs, min(N, coeffs.depth))
        for n in range(N + 1):
            if arith.is_zero(p0[n], _monic_scale(coeffs, n), slack=arith.precision // 2):
                raise NotStieltjes(f"P_{n}(0) = 0: the sequence is not Stieltjes", index=n)
        ell = [-r[n - 1] / (p0[n] * p0[n - 1]) for n in range(1, N + 1)]
        m_count = N + 1 if coeffs.depth >= N else N
        m = [p0[n - 1] * p0[n - 1] / r[n - 1] for n in range(1, m_count + 1)]
        for n, v in enumerate(ell, start=1):
            if arith.sign(v) <= 0:
                raise NotStieltjes(f"l_{n} = {arith.render(v)} is not positive", index=n)
        params = KreinParameters(ell, m, arith)
        _verify_inverse(coeffs, params)
    return params


def coefficients_from_krein(ell: Sequence[Any], m: Sequence[Any],
                            precision: int = 256) -> RecursionCoefficients:
    """(b, a^2) from string parameters.

    b_n = (1/m_{n+1}) (1/l_n + 1/l_{n+1}) with 1/l_0 = 0, and
    a_n^2 = 1 / (l_{n+1}^2 m_{n+1} m_{n+2}).
    """
    if not ell or len(m) < len(ell):
        raise TooShort("need l_1..l_N and m_1..m_N", ell=len(ell), m=len(m))
    arith = Arithmetic(True, precision).promote(*ell, *m)
    with arith.workprec():
        ell = arith.convert_all(ell)
        m = arith.convert_all(m)
        b = []
        for n in range(len(ell)):
            inv_prev = 1 / ell[n - 1] if n else 0
            b.append((inv_prev + 1 / ell[n]) / m[n])
        a2 = [1 / (ell[n] * ell[n] * m[n] * m[n + 1]) for n in range(min(len(ell), len(m) - 1))]
    return RecursionCoefficients(tuple(b), tuple(a2), precision)


def _verify_inverse(coeffs: RecursionCoefficients, params: KreinParameters) -> None:
    back = coefficients_from_krein(params.ell, params.m, coeffs.precision)
    arith = coeffs.arithmetic
    for name, got, want in (('b', back.b, coeffs.b), ('a2', back.a2, coeffs.a2)):
        for n, (x, y) in enumerate(zip(got, want)):
            arith.check_close(x, y, f"{name}_{n} is not recovered from the string parameters",
                              arith.precision // 2, index=n)


def stieltjes_LM(coeffs: RecursionCoefficients, N: int,
                 seq: Optional[MomentSequence] = None) -> Tuple[List[Any], List[Any]]:
    """Partial sums L_1..L_N and M_1..M_N.

    L_N = -Q_N(0)/P_N(0) and M_N = sum_{j<N} P_j(0)^2. When `seq` is given
    they are checked against L_N s_N = t_N and M_N h_N = v_{N-1}.
    """
    params = krein_parameters(coeffs, N)
    L = params.L_partial[:N]
    M = params.M_partial[:N]
    if seq is not None:
        _verify_LM(seq, L, M, coeffs.arithmetic)
    return L, M


def _verify_LM(seq: MomentSequence, L: List[Any], M: List[Any], arith: Arithmetic) -> None:
    from .hankel import aux_dets

    n = min(10, seq.K // 2, len(L))
    if n < 1:
        return
    dets = aux_dets(seq, n)
    slack = arith.precision // 2
    with arith.workprec():
        for k in range(1, n + 1):
            arith.check_close(L[k - 1] * dets.s[k], dets.t[k], f"L_{k} s_{k} != t_{k}", slack, index=k)
            arith.check_close(M[k - 1] * dets.h[k], dets.v[k - 1], f"M_{k} h_{k} != v_{k - 1}", slack,
                              index=k)


# === Carleman ===

def _fit_divergence(partials: List[Any], terms: List[Any], ratio: float,
                    guard: float, notes: List[str], label: str) -> Optional[bool]:
    n_points = len(partials)
    if n_points < MIN_FIT_POINTS:
        notes.append(f"{label}: {n_points} terms are too few for a trend fit")
        return None
    xs = list(range(1, n_points + 1))
    best = None
    for name, g in (('log', mp.log), ('sqrt', mp.sqrt)):
        A = mp.matrix([[1, g(x)] for x in xs])
        y = mp.matrix(partials)
        coef, _ = mp.qr_solve(A, y)
        residuals = [partials[i] - coef[0] - coef[1] * g(xs[i]) for i in range(n_points)]
        rms = mp.sqrt(mp.fsum(r * r for r in residuals) / n_points)
        if best is None or rms < best[2]:
            best = (name, coef[1], rms)
    name, slope, rms = best

    half = xs[n_points // 2:]
    tail = [t for t in terms[n_points // 2:]]
    if any(t <= 0 for t in tail) or len(half) < 2:
        exponent = mp.mpf('-inf')
    else:
        A = mp.matrix([[1, mp.log(x)] for x in half])
        y = mp.matrix([mp.log(t) for t in tail])
        exponent = mp.qr_solve(A, y)[0][1]
    divergent = bool(slope > ratio * rms and exponent > guard)
    notes.append(f"{label}: best fit c1 + c2*{name}(N), c2 = {mp.nstr(slope, 6)}, "
                 f"residual = {mp.nstr(rms, 6)}, tail exponent = {mp.nstr(exponent, 6)}")
    return divergent


def carleman(seq: MomentSequence, N: Optional[int] = None,
             divergence_ratio: float = DIVERGENCE_RATIO,
             tail_exponent_guard: float = TAIL_EXPONENT_GUARD) -> CarlemanSums:
    """Partial sums of sum gamma_{2n}^{-1/(2n)} and sum gamma_n^{-1/(2n)}.

    Both series read the same prefix gamma_0..gamma_{2N}: N terms for the
    first, 2N for the second.

    The series is declared divergent when the partial sums grow like
    c1 + c2 g(N) with c2 above `divergence_ratio` times the fit residual and
    the terms decay no faster than N^`tail_exponent_guard`.
    """
    if N is None:
        N = seq.K // 2
    if N < 1 or 2 * N > seq.K:
        raise TooShort(f"Carleman sums to {N} need K >= {2 * N}", K=seq.K, N=N)
    notes: List[str] = []
    with mp.workprec(seq.precision):
        gamma = [to_mp(g) for g in seq.gamma]
        h_terms = []
        for n in range(1, N + 1):
            if gamma[2 * n] <= 0:
                raise DegenerateSequence(f"gamma_{2 * n} is not positive", index=2 * n)
            h_terms.append(gamma[2 * n] ** (-mp.mpf(1) / (2 * n)))
        h_partials = _partial_sums(h_terms)
        h_div = _fit_divergence(h_partials, h_terms, divergence_ratio, tail_exponent_guard,
                                notes, "hamburger")

        s_terms: Optional[List[Any]] = None
        s_partials = None
        s_div = None
        if all(g > 0 for g in gamma[1:2 * N + 1]):
            s_terms = [gamma[n] ** (-mp.mpf(1) / (2 * n)) for n in range(1, 2 * N + 1)]
            s_partials = _partial_sums(s_terms)
            s_div = _fit_divergence(s_partials, s_terms, divergence_ratio, tail_exponent_guard,
                                    notes, "stieltjes")
    return CarlemanSums(h_partials, s_partials, h_div, s_div, notes)


# === Krein density test ===

@dataclass(frozen=True)
class Density:
    """A bounded density F with 0 <= F <= 1: exp(-|x|^alpha) or a sampled table."""
    alpha: Optional[Any] = None
    table: Optional[Tuple[Tuple[Any, Any], ...]] = None

    @classmethod
    def exp_pow(cls, alpha: Any) -> 'Density':
        return cls(alpha=alpha)

    @classmethod
    def from_table(cls, points: Sequence[Tuple[Any, Any]]) -> 'Density':
        pts = tuple(sorted((to_mp(x), to_mp(f)) for x, f in points))
        if len(pts) < 2:
            raise SchemaError("a density table needs at least two points")
        return cls(table=pts)

    def neg_log(self) -> Callable[[Any], Any]:
        """x -> -ln F(x); piecewise linear in x between table points."""
        if self.alpha is not None:
            alpha = to_mp(self.alpha)
            return lambda x: abs(x) ** alpha
        values = []
        for x, f in self.table:
            if f > 1 or f < 0:
                raise InvalidDensity(f"F({mp.nstr(x, 10)}) = {mp.nstr(f, 10)} is outside [0, 1]",
                                     x=x)
            values.append((x, mp.inf if f == 0 else -mp.log(f)))

        def interpolate(x: Any) -> Any:
            if x <= values[0][0]:
                return values[0][1]
            for (x0, y0), (x1, y1) in zip(values, values[1:]):
                if x <= x1:
                    if mp.isinf(y0) or mp.isinf(y1):
                        return mp.inf
                    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            return values[-1][1]

        return interpolate

    @property
    def extent(self) -> Tuple[Any, Any]:
        if self.alpha is not None:
            return -mp.inf, mp.inf
        return self.table[0][0], self.table[-1][0]


def _breakpoints(lo: Any, hi: Any) -> List[Any]:
    pts = [lo]
    x = mp.mpf(1)
    while x < hi:
        if x > lo:
            pts.append(x)
        x *= 2
    pts.append(hi)
    return pts


def krein_density_test(density: Density, half_line: bool = False, cutoff: Any = 1e4,
                       tolerance: Any = 0.05, precision: int = 64) -> DensityResult:
    """Integral of -ln F against 1/(1+x^2) (or 1/((1+x) sqrt x) on [0, inf)).

    A finite integral means the density's moment problem is indeterminate.
    Convergence beyond the cutoff is judged from a power-law fit of the
    integrand's tail: an exponent within `tolerance` of -1 counts as
    logarithmic divergence.
    """
    warnings: List[str] = []
    with mp.workprec(precision):
        neg_log = density.neg_log()
        X = to_mp(cutoff)
        lo, hi = density.extent
        if half_line:
            lo = max(lo, mp.mpf(0))

            def kernel(x):
                return 1 / ((1 + x) * mp.sqrt(x))
        else:
            def kernel(x):
                return 1 / (1 + x * x)
        a, b = max(lo, -X), min(hi, X)

        def integrand(x):
            v = neg_log(x)
            if v < 0:
                raise InvalidDensity(f"F({mp.nstr(x, 10)}) > 1", x=x)
            return v * kernel(x)

        pieces = []
        if a < 0 < b:
            pieces += [list(reversed([-p for p in _breakpoints(mp.mpf(0), -a)])),
                       _breakpoints(mp.mpf(0), b)]
        else:
            pieces.append(_breakpoints(a, b) if a >= 0 else list(reversed([-p for p in _breakpoints(-b, -a)])))
        total = mp.fsum(mp.quad(integrand, piece) for piece in pieces)

        if total == 0:
            msg = "-ln F vanishes: F = 1 is not a probability density"
            logger.warning(msg)
            warnings.append(msg)
            return DensityResult(total, True, None, warnings)
        if mp.isinf(total) or mp.isnan(total):
            return DensityResult(mp.inf, False, None, warnings)

        side = b if b >= -a else -a
        sign = 1 if b >= -a else -1
        xs = [side * mp.mpf(2) ** (-k) for k in range(6, -1, -1)]
        values = [integrand(sign * x) for x in xs]
        if any(v <= 0 for v in values):
            msg = "integrand vanishes in the tail; no exponent fit"
            warnings.append(msg)
            return DensityResult(total, True, None, warnings)
        A = mp.matrix([[1, mp.log(x)] for x in xs])
        y = mp.matrix([mp.log(v) for v in values])
        exponent = mp.qr_solve(A, y)[0][1]
        if abs(exponent + 1) <= tolerance:
            convergent: Optional[bool] = False
            warnings.append("tail exponent near -1: logarithmic divergence")
        else:
            convergent = bool(exponent < -1)
    logger.debug("krein density integral %s, tail exponent %s",
                 mp.nstr(total, 10), mp.nstr(exponent, 6))
    return DensityResult(total, convergent, exponent, warnings)


# === Classification ===

def _cauchy(partials: Sequence[Any], fraction: float) -> bool:
    values = [to_mp(v) for v in partials]
    if len(values) < MIN_FIT_POINTS:
        return False
    start = len(values) - max(2, len(values) // 4)
    increments = [abs(values[i] - values[i - 1]) for i in range(start + 1, len(values))]
    return max(increments) < fraction * abs(values[-1])


def _pq_sums(coeffs: RecursionCoefficients, N: int) -> Tuple[List[Any], List[Any]]:
    arith = coeffs.arithmetic
    with arith.workprec():
        p0, q0 = monic_values(coeffs, 0, N)
        r = norms(coeffs, N)
        pp = _partial_sums([p0[n] * p0[n] / r[n] for n in range(N + 1)])
        qq = _partial_sums([q0[n] * q0[n] / r[n] for n in range(N + 1)])
    return pp, qq


def classify(seq: MomentSequence, N: Optional[int] = None,
             cauchy_fraction: float = CAUCHY_FRACTION,
             divergence_ratio: float = DIVERGENCE_RATIO,
             tail_exponent_guard: float = TAIL_EXPONENT_GUARD) -> DeterminacyReport:
    """Decision table over the available evidence.

    Carleman divergence gives hamburger_determinate. For Stieltjes input,
    L and M both Cauchy gives indeterminate and M Cauchy with L growing gives
    stieltjes_determinate_hamburger_indeterminate. For other input,
    sum P_n(0)^2 and sum Q_n(0)^2 both Cauchy gives indeterminate.
    Everything else is inconclusive.
    """
    from .hankel import Verdict, existence_check

    report = existence_check(seq)
    if report.verdict in (Verdict.DEGENERATE, Verdict.NOT_HAMBURGER):
        raise DegenerateSequence(f"existence check failed: {report.verdict.value}",
                                 index=report.failing_index)
    coeffs = recursion_coeffs(seq)
    depth = coeffs.N if N is None else N
    if depth > coeffs.N:
        raise TooShort(f"depth {depth} needs K >= {2 * depth - 1}", K=seq.K, N=depth)
    evidence: List[str] = []

    sums = carleman(seq, min(depth, seq.K // 2), divergence_ratio, tail_exponent_guard)
    evidence.extend(sums.notes)
    L = M = None
    stieltjes = seq.kind is Kind.STIELTJES or report.verdict is Verdict.STIELTJES_OK
    verdict = Determinacy.INCONCLUSIVE

    if sums.hamburger_divergent:
        verdict = Determinacy.HAMBURGER_DETERMINATE
        evidence.append("Carleman series on gamma_2n diverges")
    elif stieltjes and sums.stieltjes_divergent:
        verdict = Determinacy.HAMBURGER_DETERMINATE
        evidence.append("Carleman series on gamma_n diverges")

    if stieltjes:
        try:
            L, M = stieltjes_LM(coeffs, depth, seq)
        except NotStieltjes as e:
            evidence.append(f"string parameters unavailable: {e.message}")
            stieltjes = False
    if verdict is Determinacy.INCONCLUSIVE and stieltjes and L is not None:
        l_cauchy, m_cauchy = _cauchy(L, cauchy_fraction), _cauchy(M, cauchy_fraction)
        evidence.append(f"L partials Cauchy: {l_cauchy}; M partials Cauchy: {m_cauchy}")
        if l_cauchy and m_cauchy:
            verdict = Determinacy.INDETERMINATE
        elif m_cauchy:
            verdict = Determinacy.STIELTJES_DETERMINATE_HAMBURGER_INDETERMINATE
    elif verdict is Determinacy.INCONCLUSIVE and not stieltjes:
        pp, qq = _pq_sums(coeffs, min(depth, coeffs.depth))
        p_cauchy, q_cauchy = _cauchy(pp, cauchy_fraction), _cauchy(qq, cauchy_fraction)
        evidence.append(f"sum P_n(0)^2 Cauchy: {p_cauchy}; sum Q_n(0)^2 Cauchy: {q_cauchy}")
        if p_cauchy and q_cauchy:
            verdict = Determinacy.INDETERMINATE
    if verdict is Determinacy.INCONCLUSIVE:
        evidence.append("no criterion decided at this depth")
    logger.info("classify %s: %s at depth %d", seq.label or "sequence", verdict.value, depth)
    return DeterminacyReport(sums.hamburger, sums.stieltjes, L, M, verdict, evidence, depth,
                             seq.arithmetic.mode, seq.precision)
