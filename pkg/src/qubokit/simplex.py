"""Dense two-phase tableau simplex with Bland's rule.

Solves  maximize c^T x  subject to  A x <= b  and per-variable bounds.
Free variables are split into positive parts, finite lower bounds are
shifted out, and upper bounds become extra rows, after which phase 1
drives artificial variables out of rows with negative right-hand sides.
Bland's smallest-index pivoting rule prevents cycling; optimality is
certified by nonnegative reduced costs (within tolerance).  Problem sizes
here are tens of rows, so a dense tableau is the simple, adequate choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularBasisError

_TOL = 1e-9
_PIVOT_TOL = 1e-11

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SimplexResult:
    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int


def _pivot(tableau: np.ndarray, basis: list[int], row: int, col: int) -> None:
    pivot = tableau[row, col]
    if abs(pivot) < _PIVOT_TOL:
        cond = float(np.linalg.cond(tableau[:-1, :-1])) if tableau.size else float("inf")
        raise SingularBasisError(
            f"pivot {pivot:.3e} below tolerance; tableau condition estimate {cond:.3e}"
        )
    tableau[row] /= pivot
    for r in range(tableau.shape[0]):
        if r != row and tableau[r, col] != 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _run_phase(tableau: np.ndarray, basis: list[int], ncols: int) -> tuple[str, int]:
    """Bland's rule iterations on the given tableau; objective in the last row."""
    iterations = 0
    while True:
        reduced = tableau[-1, :ncols]
        entering = -1
        for j in range(ncols):
            if reduced[j] < -_TOL:
                entering = j
                break
        if entering < 0:
            return STATUS_OPTIMAL, iterations
        ratios = []
        for r in range(tableau.shape[0] - 1):
            a = tableau[r, entering]
            if a > _PIVOT_TOL:
                ratios.append((tableau[r, -1] / a, basis[r], r))
        if not ratios:
            return STATUS_UNBOUNDED, iterations
        # Min ratio; ties broken by smallest basis index (Bland).
        ratios.sort(key=lambda t: (t[0], t[1]))
        _, _, row = ratios[0]
        _pivot(tableau, basis, row, entering)
        iterations += 1


def maximize(
    c: np.ndarray,
    a_ub: np.ndarray,
    b_ub: np.ndarray,
    bounds: list[tuple[float | None, float | None]],
) -> SimplexResult:
    """Maximize c^T x subject to A x <= b and the given variable bounds.

    bounds entries are (lower, upper) with None for unbounded sides.
    """
    c = np.asarray(c, dtype=float)
    a_ub = np.asarray(a_ub, dtype=float).reshape(-1, c.size)
    b_ub = np.asarray(b_ub, dtype=float)
    nvars = c.size
    if len(bounds) != nvars:
        raise ValueError("one bounds pair per variable required")

    # Standard-form surrogate variables: x_i = shift_i + plus_i - minus_i.
    col_plus = []
    col_minus = []
    shifts = np.zeros(nvars)
    for i, (lo, hi) in enumerate(bounds):
        if lo is not None:
            shifts[i] = lo
            col_plus.append(i)
            col_minus.append(None)
        elif hi is not None:
            # Only an upper bound: x = hi - w, w >= 0.
            shifts[i] = hi
            col_plus.append(None)
            col_minus.append(i)
        else:
            col_plus.append(i)
            col_minus.append(i)

    rows = [a_ub]
    rhs = [b_ub - a_ub @ shifts]
    for i, (lo, hi) in enumerate(bounds):
        if lo is not None and hi is not None:
            row = np.zeros(nvars)
            row[i] = 1.0
            rows.append(row[None, :])
            rhs.append(np.array([hi - lo]))
    a_full = np.vstack(rows)
    b_full = np.concatenate(rhs)

    ncols = 0
    plus_col = [-1] * nvars
    minus_col = [-1] * nvars
    for i in range(nvars):
        if col_plus[i] is not None:
            plus_col[i] = ncols
            ncols += 1
        if col_minus[i] is not None:
            minus_col[i] = ncols
            ncols += 1

    nrows = a_full.shape[0]
    a_std = np.zeros((nrows, ncols))
    c_std = np.zeros(ncols)
    for i in range(nvars):
        if plus_col[i] >= 0:
            a_std[:, plus_col[i]] += a_full[:, i]
            c_std[plus_col[i]] += c[i]
        if minus_col[i] >= 0:
            a_std[:, minus_col[i]] -= a_full[:, i]
            c_std[minus_col[i]] -= c[i]

    # Slacks, then artificials for rows whose rhs came out negative.
    sense = np.where(b_full < 0, -1.0, 1.0)
    a_std = a_std * sense[:, None]
    b_std = b_full * sense
    slack = np.eye(nrows) * sense[:, None]
    need_art = sense < 0
    n_art = int(np.count_nonzero(need_art))
    total = ncols + nrows + n_art
    tableau = np.zeros((nrows + 1, total + 1))
    tableau[:nrows, :ncols] = a_std
    tableau[:nrows, ncols:ncols + nrows] = slack
    tableau[:nrows, -1] = b_std
    basis: list[int] = []
    art_cols = []
    k = 0
    for r in range(nrows):
        if need_art[r]:
            col = ncols + nrows + k
            tableau[r, col] = 1.0
            basis.append(col)
            art_cols.append(col)
            k += 1
        else:
            basis.append(ncols + r)

    iterations = 0
    if n_art:
        # Phase 1: minimize the artificial sum.
        for col in art_cols:
            tableau[-1, col] = 1.0
        for r in range(nrows):
            if basis[r] in art_cols:
                tableau[-1] -= tableau[r]
        status, it = _run_phase(tableau, basis, total)
        iterations += it
        if status != STATUS_OPTIMAL or tableau[-1, -1] < -1e-7:
            return SimplexResult(STATUS_INFEASIBLE, None, None, iterations)
        # Pivot any lingering artificial out of the basis.
        for r in range(nrows):
            if basis[r] in art_cols:
                for j in range(ncols + nrows):
                    if abs(tableau[r, j]) > _PIVOT_TOL:
                        _pivot(tableau, basis, r, j)
                        break
        tableau[:, art_cols] = 0.0
        tableau[-1] = 0.0

    # Phase 2 objective (maximize => negate into the standard min row).
    tableau[-1, :] = 0.0
    tableau[-1, :ncols] = -c_std
    for r in range(nrows):
        col = basis[r]
        if tableau[-1, col] != 0.0:
            tableau[-1] -= tableau[-1, col] * tableau[r]
    status, it = _run_phase(tableau, basis, ncols + nrows)
    iterations += it
    if status == STATUS_UNBOUNDED:
        return SimplexResult(STATUS_UNBOUNDED, None, None, iterations)

    solution_std = np.zeros(total)
    for r in range(nrows):
        solution_std[basis[r]] = tableau[r, -1]
    x = shifts.copy()
    for i in range(nvars):
        if plus_col[i] >= 0:
            x[i] += solution_std[plus_col[i]]
        if minus_col[i] >= 0:
            x[i] -= solution_std[minus_col[i]]
    return SimplexResult(STATUS_OPTIMAL, x, float(c @ x), iterations)
