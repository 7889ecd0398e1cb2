"""Exact rational linear and integer programming.

The core is a dense-tableau two-phase simplex over exact rationals with
native lower/upper variable bounds (bound flips instead of extra rows).
Bland's rule is the default pivot rule for its termination guarantee;
"dantzig" (largest reduced cost) is available behind a flag and falls
back to Bland after a run of degenerate pivots.  Integer programs are
solved by depth-first branch and bound on variable bounds, each node
relaxation solved exactly.

Every Optimal result is verified against its instance (exact residuals,
exact objective match) before being returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import FillprobeError, NodeBudgetError
from .rationals import Q, qstr

AT_LOWER = 0
AT_UPPER = 1
BASIC = 2

DEFAULT_NODE_BUDGET = 100_000


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class SolverError(FillprobeError):
    """Internal inconsistency; indicates a bug, not bad input."""


@dataclass(frozen=True)
class LinearProgram:
    """min c.x  subject to  A x = b,  x >= 0 (componentwise).

    ``rows`` holds A sparsely: one {column: coefficient} dict per row.
    """

    num_vars: int
    rows: tuple
    rhs: tuple
    objective: tuple

    def __post_init__(self):
        if len(self.rows) != len(self.rhs):
            raise ValueError("row/rhs length mismatch")
        if len(self.objective) != self.num_vars:
            raise ValueError("objective length must equal num_vars")
        for row in self.rows:
            for j in row:
                if not 0 <= j < self.num_vars:
                    raise ValueError(f"column {j} out of range")
        object.__setattr__(
            self, "rows",
            tuple({j: Q(v) for j, v in r.items()} for r in self.rows))
        object.__setattr__(self, "rhs", tuple(Q(v) for v in self.rhs))
        object.__setattr__(self, "objective", tuple(Q(v) for v in self.objective))

    @classmethod
    def make(cls, num_vars, rows, rhs, objective) -> "LinearProgram":
        return cls(num_vars, tuple(rows), tuple(rhs), tuple(objective))

    def to_json(self) -> str:
        coords = []
        for i, row in enumerate(self.rows):
            for j, v in sorted(row.items()):
                coords.append([i, j, qstr(v)])
        return json.dumps({
            "num_vars": self.num_vars,
            "constraints": coords,
            "rhs": [qstr(v) for v in self.rhs],
            "objective": [qstr(v) for v in self.objective],
        }, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    value: object = None
    witness: dict = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class _BoundedSimplex:
    """min c.x  s.t.  A x = b,  lower <= x <= upper (upper None = +inf)."""

    def __init__(self, rows, rhs, objective, lower, upper):
        self.m = len(rows)
        self.n = len(objective)
        self.rows = [{j: Q(v) for j, v in row.items()} for row in rows]
        self.rhs = [Q(v) for v in rhs]
        self.c = [Q(v) for v in objective]
        self.lower = [Q(v) for v in lower]
        self.upper = [None if u is None else Q(u) for u in upper]
        for j in range(self.n):
            if self.upper[j] is not None and self.upper[j] < self.lower[j]:
                raise ValueError("empty variable bound interval")
        self.pivots = 0

    # -- tableau helpers -------------------------------------------------

    def _basic_values(self):
        """Current basic variable values from the rhs column and the
        nonbasic variables sitting at nonzero bounds."""
        T, beta = self.T, []
        shift = [(j, self._nb_value(j)) for j in self.nonbasic_nonzero()]
        last = self.ncols
        for i in range(self.m):
            v = T[i][last]
            row = T[i]
            for j, val in shift:
                t = row[j]
                if t:
                    v -= t * val
            beta.append(v)
        return beta

    def _nb_value(self, j):
        return self.lower[j] if self.status[j] == AT_LOWER else self.upper[j]

    def nonbasic_nonzero(self):
        out = []
        for j in range(self.ncols):
            s = self.status[j]
            if s == BASIC:
                continue
            if (self.lower[j] if s == AT_LOWER else self.upper[j]) != 0:
                out.append(j)
        return out

    # -- main entry ------------------------------------------------------

    def solve(self, pivot_rule="bland"):
        zero = Q(0)
        m, n = self.m, self.n
        # initial nonbasic point: every structural variable at its lower bound
        self.status = [AT_LOWER] * n
        residual = list(self.rhs)
        for j in range(n):
            lj = self.lower[j]
            if lj:
                for i in range(m):
                    a = self.rows[i].get(j)
                    if a:
                        residual[i] -= a * lj
        signs = [1 if residual[i] >= 0 else -1 for i in range(m)]

        # columns: structural 0..n-1, artificial n..n+m-1, rhs at index ncols
        self.ncols = n + m
        T = []
        for i in range(m):
            row = [zero] * (self.ncols + 1)
            s = signs[i]
            for j, a in self.rows[i].items():
                row[j] = a if s > 0 else -a
            row[n + i] = Q(1)
            row[self.ncols] = self.rhs[i] if s > 0 else -self.rhs[i]
            T.append(row)
        self.T = T
        self.basis = [n + i for i in range(m)]
        self.lower.extend([zero] * m)
        self.upper.extend([None] * m)
        self.status.extend([BASIC] * m)
        self.banned = set()

        # phase 1: drive sum of artificials to zero
        D = [zero] * self.ncols
        for j in range(n):
            tot = zero
            for i in range(m):
                t = T[i][j]
                if t:
                    tot += t
            D[j] = -tot
        outcome = self._iterate(D, pivot_rule, phase=1)
        if outcome == "unbounded":
            raise SolverError("phase 1 reported an unbounded objective")
        infeas = zero
        beta = self._basic_values()
        for i in range(m):
            if self.basis[i] >= n:
                infeas += beta[i]
        if infeas > 0:
            return LPStatus.INFEASIBLE, None, None
        self._expel_artificials()

        # phase 2 on the real objective
        D = [zero] * self.ncols
        cB = {i: self.c[self.basis[i]] for i in range(self.m)
              if self.basis[i] < n and self.c[self.basis[i]]}
        for j in range(self.ncols):
            if self.status[j] == BASIC or j in self.banned:
                continue
            red = self.c[j] if j < n else zero
            for i, cost in cB.items():
                t = self.T[i][j]
                if t:
                    red -= cost * t
            D[j] = red
        outcome = self._iterate(D, pivot_rule, phase=2)
        if outcome == "unbounded":
            return LPStatus.UNBOUNDED, None, None

        values = [zero] * n
        beta = self._basic_values()
        for i in range(self.m):
            if self.basis[i] < n:
                values[self.basis[i]] = beta[i]
        for j in range(n):
            if self.status[j] != BASIC:
                values[j] = self._nb_value(j)
        obj = zero
        for j in range(n):
            if values[j] and self.c[j]:
                obj += self.c[j] * values[j]
        return LPStatus.OPTIMAL, values, obj

    def _expel_artificials(self):
        """Pivot zero-valued artificials out of the basis; drop rows that
        turn out redundant.  Artificials never re-enter."""
        n = self.n
        drop = []
        for i in range(self.m):
            if self.basis[i] < n:
                continue
            row = self.T[i]
            pivot_col = None
            for j in range(n):
                if self.status[j] != BASIC and row[j] and j not in self.banned \
                        and self.lower[j] != self.upper[j]:
                    pivot_col = j
                    break
            if pivot_col is None:
                drop.append(i)
            else:
                self._pivot(i, pivot_col, degenerate_entry=True)
        for i in reversed(drop):
            k = self.basis[i]
            self.status[k] = AT_LOWER
            self.banned.add(k)
            del self.T[i]
            del self.basis[i]
            self.m -= 1
        for j in range(n, self.ncols):
            self.banned.add(j)

    def _pivot(self, r, j, degenerate_entry=False):
        """Row operations making column j basic in row r."""
        T = self.T
        row_r = T[r]
        piv = row_r[j]
        if not piv:
            raise SolverError("zero pivot")
        if piv != 1:
            inv = 1 / piv
            T[r] = row_r = [v * inv if v else v for v in row_r]
        nz = [l for l, v in enumerate(row_r) if v]
        for i in range(self.m):
            if i == r:
                continue
            f = T[i][j]
            if f:
                row_i = T[i]
                for l in nz:
                    row_i[l] -= f * row_r[l]
        old = self.basis[r]
        self.basis[r] = j
        self.status[j] = BASIC
        if degenerate_entry:
            self.status[old] = AT_LOWER
        return old

    def _iterate(self, D, pivot_rule, phase):
        """Pivot until no improving nonbasic candidate remains."""
        zero = Q(0)
        n_total = self.ncols
        degenerate_run = 0
        forced_bland = pivot_rule == "bland"
        while True:
            entering, sigma = None, 0
            best_mag = zero
            for j in range(n_total):
                if self.status[j] == BASIC or j in self.banned:
                    continue
                if self.lower[j] == self.upper[j]:
                    continue
                d = D[j]
                if self.status[j] == AT_LOWER and d < 0:
                    mag, sg = -d, 1
                elif self.status[j] == AT_UPPER and d > 0:
                    mag, sg = d, -1
                else:
                    continue
                if forced_bland:
                    entering, sigma = j, sg
                    break
                if mag > best_mag:
                    entering, sigma, best_mag = j, sg, mag
            if entering is None:
                return "optimal"
            j, sg = entering, sigma

            beta = self._basic_values()
            # own-gap candidate: flip to the opposite bound
            limit = None
            leaving_row = None
            if self.upper[j] is not None:
                limit = self.upper[j] - self.lower[j]
            col_rows = [(i, self.T[i][j]) for i in range(self.m) if self.T[i][j]]
            for i, t in col_rows:
                k = self.basis[i]
                st = sg * t
                if st > 0:
                    cand = (beta[i] - self.lower[k]) / st
                    hits = AT_LOWER
                else:
                    if self.upper[k] is None:
                        continue
                    cand = (self.upper[k] - beta[i]) / (-st)
                    hits = AT_UPPER
                # ties: prefer a basis change over a flip, then the
                # smallest leaving variable index (Bland)
                if limit is None or cand < limit or (
                        cand == limit and (leaving_row is None
                                           or k < self.basis[leaving_row])):
                    limit = cand
                    leaving_row = i
                    leaving_to = hits
            if limit is None:
                return "unbounded"
            if limit == 0:
                degenerate_run += 1
                if not forced_bland and degenerate_run > 50 + self.m:
                    forced_bland = True
            else:
                degenerate_run = 0

            self.pivots += 1
            if leaving_row is None:
                # bound flip: no basis change
                self.status[j] = AT_UPPER if self.status[j] == AT_LOWER else AT_LOWER
                continue
            old = self.basis[leaving_row]
            self._pivot(leaving_row, j)
            self.status[old] = leaving_to
            if phase == 1 and old >= self.n:
                self.banned.add(old)
            # update the reduced-cost row
            f = D[j]
            if f:
                row_r = self.T[leaving_row]
                for l in range(n_total):
                    if row_r[l]:
                        D[l] -= f * row_r[l]
                D[j] = zero


def _verify_equalities(rows, rhs, values):
    for i, row in enumerate(rows):
        acc = Q(0)
        for j, a in row.items():
            v = values[j]
            if v:
                acc += a * v
        if acc != rhs[i]:
            raise SolverError(f"witness violates constraint {i}")


def solve_lp(lp: LinearProgram, *, pivot_rule: str = "bland") -> LPResult:
    """Exact optimum of a standard-form LP at a basic feasible solution."""
    simplex = _BoundedSimplex(list(lp.rows), list(lp.rhs), list(lp.objective),
                              [Q(0)] * lp.num_vars, [None] * lp.num_vars)
    outcome = simplex.solve(pivot_rule)
    status, values, obj = outcome
    if status is not LPStatus.OPTIMAL:
        return LPResult(status, pivots=simplex.pivots)
    _verify_equalities(lp.rows, lp.rhs, values)
    if any(v < 0 for v in values):
        raise SolverError("witness violates nonnegativity")
    check = Q(0)
    for j, cj in enumerate(lp.objective):
        if cj and values[j]:
            check += cj * values[j]
    if check != obj:
        raise SolverError("objective mismatch")
    witness = {j: v for j, v in enumerate(values) if v}
    return LPResult(LPStatus.OPTIMAL, obj, witness, simplex.pivots)


def _solve_bounded(lp: LinearProgram, lower, upper, pivot_rule):
    for lo, up in zip(lower, upper):
        if up is not None and up < lo:
            return LPStatus.INFEASIBLE, None, None, 0
    simplex = _BoundedSimplex(list(lp.rows), list(lp.rhs), list(lp.objective),
                              list(lower), list(upper))
    status, values, obj = simplex.solve(pivot_rule)
    return status, values, obj, simplex.pivots


def _is_integer(v) -> bool:
    return v.denominator == 1


def solve_ilp(lp: LinearProgram, integrality=None, *,
              node_budget: int = DEFAULT_NODE_BUDGET,
              pivot_rule: str = "bland") -> LPResult:
    """Branch and bound over exact LP relaxations.

    ``integrality``: per-variable mask; None means every variable.
    Branching picks the most-fractional variable and explores the floor
    branch first.  Exhausting the node budget raises NodeBudgetError
    carrying the best lower/upper bounds known.
    """
    if integrality is None:
        integrality = [True] * lp.num_vars
    if len(integrality) != lp.num_vars:
        raise ValueError("integrality mask length mismatch")

    root_lower = tuple([Q(0)] * lp.num_vars)
    root_upper = tuple([None] * lp.num_vars)
    stack = [(root_lower, root_upper, None)]
    incumbent_value = None
    incumbent = None
    nodes = 0
    total_pivots = 0
    root_unbounded = False

    while stack:
        lower, upper, parent_bound = stack.pop()
        nodes += 1
        if nodes > node_budget:
            open_bounds = [pb for (_, _, pb) in stack if pb is not None]
            if parent_bound is not None:
                open_bounds.append(parent_bound)
            lower_bound = min(open_bounds) if open_bounds else incumbent_value
            raise NodeBudgetError(
                f"branch-and-bound exceeded {node_budget} nodes",
                limit=node_budget, lower=lower_bound,
                upper=incumbent_value,
                witness=incumbent)
        status, values, obj, pivots = _solve_bounded(lp, lower, upper, pivot_rule)
        total_pivots += pivots
        if status is LPStatus.UNBOUNDED:
            if nodes == 1:
                root_unbounded = True
            break
        if status is not LPStatus.OPTIMAL:
            continue
        if incumbent_value is not None and obj >= incumbent_value:
            continue
        frac_var, frac_dist = None, Q(0)
        for j in range(lp.num_vars):
            if not integrality[j]:
                continue
            v = values[j]
            if _is_integer(v):
                continue
            f = v - math.floor(v)
            dist = min(f, 1 - f)
            if dist > frac_dist:
                frac_var, frac_dist = j, dist
        if frac_var is None:
            incumbent_value = obj
            incumbent = {j: v for j, v in enumerate(values) if v}
            continue
        v = values[frac_var]
        fl = Q(math.floor(v))
        ce = fl + 1
        up_branch = (tuple(max(lower[j], ce) if j == frac_var else lower[j]
                           for j in range(lp.num_vars)), upper, obj)
        new_upper = list(upper)
        cur_up = new_upper[frac_var]
        new_upper[frac_var] = fl if cur_up is None else min(cur_up, fl)
        down_branch = (lower, tuple(new_upper), obj)
        stack.append(up_branch)
        stack.append(down_branch)

    if root_unbounded:
        return LPResult(LPStatus.UNBOUNDED, pivots=total_pivots)
    if incumbent is None:
        return LPResult(LPStatus.INFEASIBLE, pivots=total_pivots)
    values = [Q(0)] * lp.num_vars
    for j, v in incumbent.items():
        values[j] = v
    _verify_equalities(lp.rows, lp.rhs, values)
    for j in range(lp.num_vars):
        if integrality[j] and not _is_integer(values[j]):
            raise SolverError("integral witness has a fractional entry")
        if values[j] < 0:
            raise SolverError("witness violates nonnegativity")
    return LPResult(LPStatus.OPTIMAL, incumbent_value, dict(incumbent), total_pivots)


def solve_minmax(rows, rhs, num_vars: int, free=None, *,
                 pivot_rule: str = "bland") -> LPResult:
    """min t  such that  A x = b  and |x_i| <= t for every variable.

    Variables flagged False in ``free`` are constrained to [0, t]
    instead.  Solved in homogenized form (maximize s with A z = s b and
    z in the unit box, where x = z/s and t = 1/s), which keeps the row
    count at the number of equations.
    """
    if free is None:
        free = [True] * num_vars
    if len(free) != num_vars:
        raise ValueError("free mask length mismatch")
    rows = [dict(r) for r in rows]
    rhs = [Q(v) for v in rhs]
    for row in rows:
        for j in row:
            if not 0 <= j < num_vars:
                raise ValueError(f"column {j} out of range")

    if all(v == 0 for v in rhs):
        return LPResult(LPStatus.OPTIMAL, Q(0), {})

    # columns: per free variable a split pair (pos, neg) each in [0,1],
    # per nonnegative variable a single column in [0,1]; plus s last.
    col_of = {}
    ncols = 0
    for j in range(num_vars):
        if free[j]:
            col_of[j] = (ncols, ncols + 1)
            ncols += 2
        else:
            col_of[j] = (ncols, None)
            ncols += 1
    s_col = ncols
    ncols += 1

    sim_rows = []
    for i, row in enumerate(rows):
        out = {}
        for j, a in row.items():
            a = Q(a)
            pos, neg = col_of[j]
            out[pos] = out.get(pos, Q(0)) + a
            if neg is not None:
                out[neg] = out.get(neg, Q(0)) - a
        if rhs[i]:
            out[s_col] = -rhs[i]
        sim_rows.append({j: v for j, v in out.items() if v})
    objective = [Q(0)] * ncols
    objective[s_col] = Q(-1)
    lower = [Q(0)] * ncols
    upper = [Q(1)] * ncols
    upper[s_col] = None

    simplex = _BoundedSimplex(sim_rows, rhs=[Q(0)] * len(rows),
                              objective=objective, lower=lower, upper=upper)
    status, values, obj = simplex.solve(pivot_rule)
    if status is LPStatus.UNBOUNDED:
        raise SolverError("homogenized min-max cannot be unbounded for nonzero rhs")
    if status is not LPStatus.OPTIMAL:
        return LPResult(status, pivots=simplex.pivots)
    s = -obj
    if s == 0:
        return LPResult(LPStatus.INFEASIBLE, pivots=simplex.pivots)
    t = 1 / s
    witness = {}
    for j in range(num_vars):
        pos, neg = col_of[j]
        z = values[pos] - (values[neg] if neg is not None else Q(0))
        if z:
            witness[j] = z * t
    xvals = [witness.get(j, Q(0)) for j in range(num_vars)]
    _verify_equalities(rows, rhs, xvals)
    for j, v in enumerate(xvals):
        mag = v if v >= 0 else -v
        if mag > t or (not free[j] and v < 0):
            raise SolverError("min-max witness violates its bound")
    return LPResult(LPStatus.OPTIMAL, t, witness, simplex.pivots)
