"""Dense two-phase simplex over floats or exact rationals.

Solves  maximize c.x  subject to equality rows, <= rows and x >= 0.
Bland's smallest-index rule on both the entering and the leaving choice
prevents cycling, so the search terminates even on degenerate programs.
Infeasible systems return a Farkas multiplier vector that verify_farkas
re-checks by direct arithmetic; in float mode all comparisons use a
feasibility tolerance, in exact mode every entry is a Fraction and the
tolerance is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

FEAS_TOL = 1e-9


class LPError(ValueError):
    pass


@dataclass
class LinearProgram:
    """maximize objective . x  with  eq rows A x = b, ub rows A x <= b, x >= 0."""

    n_vars: int
    objective: Sequence = None
    eq_rows: List = field(default_factory=list)  # (coeffs, rhs)
    ub_rows: List = field(default_factory=list)

    def __post_init__(self):
        if self.n_vars < 0:
            raise LPError("n_vars must be nonnegative")
        if self.objective is None:
            self.objective = [0] * self.n_vars
        self.objective = list(self.objective)
        if len(self.objective) != self.n_vars:
            raise LPError(
                f"objective has {len(self.objective)} entries, expected {self.n_vars}"
            )

    def _check(self, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) != self.n_vars:
            raise LPError(f"row has {len(coeffs)} entries, expected {self.n_vars}")
        return coeffs

    def add_eq(self, coeffs, rhs):
        self.eq_rows.append((self._check(coeffs), rhs))

    def add_ub(self, coeffs, rhs):
        self.ub_rows.append((self._check(coeffs), rhs))


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[object] = None
    x: Optional[tuple] = None
    farkas: Optional[tuple] = None  # multipliers, eq rows first then ub rows
    certificate_ok: Optional[bool] = None


def _standardize(lp: LinearProgram, conv):
    """All rows as equalities with slacks, b >= 0; returns (rows, b, flips)."""
    n = lp.n_vars
    n_ub = len(lp.ub_rows)
    rows = []
    rhs = []
    for coeffs, b in lp.eq_rows:
        rows.append([conv(v) for v in coeffs] + [conv(0)] * n_ub)
        rhs.append(conv(b))
    for k, (coeffs, b) in enumerate(lp.ub_rows):
        slack = [conv(0)] * n_ub
        slack[k] = conv(1)
        rows.append([conv(v) for v in coeffs] + slack)
        rhs.append(conv(b))
    flips = []
    for i, b in enumerate(rhs):
        if b < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -b
            flips.append(-1)
        else:
            flips.append(1)
    return rows, rhs, flips


def _conv_float(v):
    return float(v)


def _conv_exact(v):
    if isinstance(v, float):
        raise LPError("exact mode requires rational coefficients, got a float")
    return Fraction(v)


class _Tableau:
    def __init__(self, rows, rhs, n_struct, tol):
        self.m = len(rows)
        self.n_struct = n_struct  # structural columns: vars + slacks
        self.tol = tol
        # columns: structural, then one artificial per row, then rhs
        self.width = n_struct + self.m
        self.rows = []
        for i, row in enumerate(rows):
            zero = rhs[i] * 0
            art = [zero] * self.m
            art[i] = zero + 1
            self.rows.append(list(row) + art + [rhs[i]])
        self.basis = [n_struct + i for i in range(self.m)]
        self.obj = None  # set per phase, length width + 1

    def set_objective(self, costs):
        # reduced-cost row for maximization; obj[-1] tracks -(current value)
        zero = costs[0] * 0 if costs else 0
        self.obj = list(costs) + [zero]
        for i, col in enumerate(self.basis):
            f = self.obj[col]
            if f:
                row = self.rows[i]
                self.obj = [a - f * b for a, b in zip(self.obj, row)]

    def value(self):
        return -self.obj[-1]

    def pivot(self, r, c):
        row = self.rows[r]
        piv = row[c]
        self.rows[r] = row = [v / piv for v in row]
        for i in range(self.m):
            if i != r:
                f = self.rows[i][c]
                if f:
                    self.rows[i] = [a - f * b for a, b in zip(self.rows[i], row)]
        f = self.obj[c]
        if f:
            self.obj = [a - f * b for a, b in zip(self.obj, row)]
        self.basis[r] = c

    def run(self, allowed_cols, max_iters):
        """Bland's rule loop; returns 'optimal' or 'unbounded'."""
        for _ in range(max_iters):
            enter = -1
            for j in allowed_cols:
                if self.obj[j] > self.tol:
                    enter = j
                    break
            if enter < 0:
                return "optimal"
            leave = -1
            best = None
            for i in range(self.m):
                a = self.rows[i][enter]
                if a > self.tol:
                    ratio = self.rows[i][-1] / a
                    if (
                        best is None
                        or ratio < best - self.tol
                        or (abs(ratio - best) <= self.tol
                            and self.basis[i] < self.basis[leave])
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            self.pivot(leave, enter)
        raise LPError("simplex iteration limit exceeded")

    def solution(self, n_vars):
        x = [self.obj[0] * 0] * self.n_struct
        for i, col in enumerate(self.basis):
            if col < self.n_struct:
                x[col] = self.rows[i][-1]
        return tuple(x[:n_vars])


def simplex_solve(lp: LinearProgram, exact: bool = False) -> LPResult:
    """Two-phase simplex; in exact mode all arithmetic is over Fractions."""
    conv = _conv_exact if exact else _conv_float
    tol = Fraction(0) if exact else FEAS_TOL
    zero = conv(0)
    rows, rhs, flips = _standardize(lp, conv)
    n = lp.n_vars
    n_struct = n + len(lp.ub_rows)
    m = len(rows)
    tab = _Tableau(rows, rhs, n_struct, tol)
    max_iters = 5000 + 200 * (m + n_struct)

    # phase 1: drive the artificial variables to zero
    phase1_costs = [zero] * n_struct + [conv(-1)] * m
    tab.set_objective(phase1_costs)
    status = tab.run(range(n_struct + m), max_iters)
    if status != "optimal":  # cannot happen: phase-1 objective is bounded
        raise LPError("phase 1 reported unbounded")
    if tab.value() < -tol:
        # infeasible: extract Farkas multipliers from the artificial columns
        y_std = [conv(-1) - tab.obj[n_struct + i] for i in range(m)]
        y = tuple(f * v for f, v in zip(flips, y_std))
        ok = verify_farkas(lp, y, 0.0 if exact else FEAS_TOL, exact=exact)
        return LPResult(status="infeasible", farkas=y, certificate_ok=ok)

    # pivot any leftover artificial out of the basis; drop redundant rows
    for i in range(tab.m - 1, -1, -1):
        if tab.basis[i] >= n_struct:
            piv_col = -1
            for j in range(n_struct):
                if abs(tab.rows[i][j]) > tol:
                    piv_col = j
                    break
            if piv_col >= 0:
                tab.pivot(i, piv_col)
            else:
                del tab.rows[i]
                del tab.basis[i]
                tab.m -= 1

    # phase 2: the real objective; artificial columns stay banned from entry
    phase2_costs = [conv(v) for v in lp.objective] + [zero] * (tab.width - n)
    tab.set_objective(phase2_costs)
    status = tab.run(range(n_struct), max_iters)
    if status == "unbounded":
        return LPResult(status="unbounded")
    return LPResult(status="optimal", value=tab.value(), x=tab.solution(n))


def verify_farkas(lp: LinearProgram, y, tol: float = FEAS_TOL, exact: bool = False) -> bool:
    """Check a Farkas vector by direct arithmetic.

    With multipliers y ordered as (eq rows, ub rows), infeasibility follows
    when y >= 0 on the ub rows, y.A_j >= 0 for every variable column j, and
    y.b < 0: a feasible x >= 0 would force 0 <= y.Ax <= y.b < 0.
    """
    conv = _conv_exact if exact else _conv_float
    rows = [coeffs for coeffs, _ in lp.eq_rows] + [c for c, _ in lp.ub_rows]
    rhs = [b for _, b in lp.eq_rows] + [b for _, b in lp.ub_rows]
    if len(y) != len(rows):
        return False
    y = [conv(v) for v in y]
    n_eq = len(lp.eq_rows)
    # columns of the standardized system: structural variables...
    for j in range(lp.n_vars):
        col = sum(y[i] * conv(rows[i][j]) for i in range(len(rows)))
        if col < -tol:
            return False
    # ...and slack columns: multiplier of an ub row must be >= 0
    for i in range(n_eq, len(rows)):
        if y[i] < -tol:
            return False
    yb = sum(y[i] * conv(rhs[i]) for i in range(len(rows)))
    return yb < -tol
