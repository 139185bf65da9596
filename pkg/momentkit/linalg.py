"""Small dense linear algebra over either backend.

Matrices are lists of rows. Exact routines work over any field the scalar
layer provides (Fraction, GaussianRational); float routines use mpmath values
at the caller's working precision.
"""

from typing import Any, List, Optional, Sequence, Tuple

from mpmath import mp

from .scalars import Arithmetic, abs2, real_part, to_mp

Matrix = List[List[Any]]


def copy_matrix(m: Sequence[Sequence[Any]]) -> Matrix:
    return [list(row) for row in m]


def bareiss_determinant(m: Sequence[Sequence[Any]]) -> Any:
    """Fraction-free elimination; every division is exact."""
    a = copy_matrix(m)
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev: Any = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0 * a[0][0]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def lu_determinant(m: Sequence[Sequence[Any]]) -> Tuple[Any, Any]:
    """Determinant by partial-pivoting LU.

    Returns:
        (determinant, growth) where growth is max|U| / max|A|.
    """
    a = [[to_mp(x) for x in row] for row in m]
    n = len(a)
    if n == 0:
        return mp.mpf(1), mp.mpf(1)
    scale = max(abs(x) for row in a for x in row)
    if scale == 0:
        return mp.mpf(0), mp.mpf(1)
    biggest = scale
    det: Any = mp.mpf(1)
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            return mp.mpf(0), biggest / scale
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det = det * a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
                biggest = max(biggest, abs(a[i][j]))
    return det, biggest / scale


def determinant(m: Sequence[Sequence[Any]], arith: Arithmetic) -> Tuple[Any, Any]:
    """Determinant in the context's mode; growth is 1 in exact mode."""
    if arith.exact:
        return bareiss_determinant(m), 1
    with arith.workprec():
        return lu_determinant(m)


def form_rational(m: Matrix, t: Optional[List[Any]] = None) -> List[int]:
    """Row-echelon form in place; returns the free (pivotless) columns."""
    free_vars = []
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    piv_r = 0
    for piv_c in range(n_cols):
        for i_row in range(piv_r, n_rows):
            if m[i_row][piv_c] != 0:
                break
        else:
            free_vars.append(piv_c)
            continue
        if i_row != piv_r:
            m[piv_r], m[i_row] = m[i_row], m[piv_r]
            if t is not None:
                t[piv_r], t[i_row] = t[i_row], t[piv_r]
        fp = m[piv_r][piv_c]
        for r in range(piv_r + 1, n_rows):
            fr = m[r][piv_c]
            if fr == 0:
                continue
            frp = fr / fp
            for c in range(piv_c, n_cols):
                m[r][c] = m[r][c] - m[piv_r][c] * frp
            if t is not None:
                t[r] = t[r] - t[piv_r] * frp
        piv_r += 1
    return free_vars


def back_substitution_rational(m: Matrix, t: Optional[List[Any]], free_vars: List[int],
                               sol: List[Any]) -> Optional[List[Any]]:
    """Solve the echelon system; free variables keep their value in `sol`.

    Returns None when the system is inconsistent.
    """
    n_rows = len(m)
    n_cols = len(m[0]) if n_rows else 0
    rank = n_cols - len(free_vars)
    if t is not None:
        for r in range(rank, n_rows):
            if t[r] != 0:
                return None
    free = set(free_vars)
    piv_cols = [c for c in range(n_cols) if c not in free]
    for r in range(len(piv_cols) - 1, -1, -1):
        piv_c = piv_cols[r]
        s = 0 if t is None else -t[r]
        for c in range(piv_c + 1, n_cols):
            s = s + m[r][c] * sol[c]
        sol[piv_c] = -s / m[r][piv_c]
    return sol


def solve_rational(m: Sequence[Sequence[Any]], t: Sequence[Any]) -> Optional[List[Any]]:
    """Any exact solution of m x = t (free variables set to 0), or None."""
    a = copy_matrix(m)
    rhs = list(t)
    free_vars = form_rational(a, rhs)
    n_cols = len(a[0]) if a else 0
    return back_substitution_rational(a, rhs, free_vars, [0] * n_cols)


def pivoted_ldl(m: Sequence[Sequence[Any]], arith: Arithmetic, threshold: Any = 0) -> Tuple[List[Any], bool]:
    """Symmetric-pivoted LDL^H of a Hermitean matrix.

    Elimination takes the largest remaining diagonal entry as pivot and stops
    once it is at or below `threshold` (exactly zero in exact mode). The
    matrix is positive semidefinite iff the block left at that point
    vanishes.

    Returns:
        (pivots, psd). The determinant is the product of the pivots when all
        n pivots were taken, else zero.
    """
    a = copy_matrix(m)
    remaining = list(range(len(a)))
    pivots: List[Any] = []
    while remaining:
        k = max(remaining, key=lambda i: to_mp(real_part(a[i][i])))
        d = real_part(a[k][k])
        small = d <= 0 if arith.exact else to_mp(d) <= threshold
        if small:
            return pivots, _block_vanishes(a, remaining, arith, threshold)
        pivots.append(d)
        remaining.remove(k)
        for i in remaining:
            f = a[i][k] / d
            for j in remaining:
                a[i][j] = a[i][j] - f * a[k][j]
    return pivots, True


def _block_vanishes(a: Matrix, idx: List[int], arith: Arithmetic, threshold: Any) -> bool:
    for i in idx:
        for j in idx:
            if arith.exact:
                if a[i][j] != 0:
                    return False
            elif mp.sqrt(to_mp(abs2(a[i][j]))) > threshold:
                return False
    return True
