"""Bounded-variable primal simplex on a dense tableau.

Variables fixed by their bounds are folded into the right-hand side and never
enter the tableau.  Each inequality row gets a slack; every row also owns an
artificial column that is only ever basic during phase 1 (or when a redundant
equality keeps it basic at zero).  Pricing is Dantzig's rule until too many
degenerate pivots pile up, then Bland's rule for the rest of the solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .program import BinaryLinearProgram

FEAS_TOL = 1e-8
COST_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 50

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Basis:
    """Warm-start record: basic column keys and the structurals sitting at upper bound.

    Keys are ``("x", j)`` for variable j, ``("s", i)`` for the slack of row i
    and ``("a", i)`` for the artificial of row i.
    """
    basic: tuple
    at_upper: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray | None
    value: float
    basis: Basis | None = None
    iterations: int = 0
    warm: bool = False

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, M, b, lo, hi):
        self.M = M
        self.b = b
        self.lo = lo
        self.hi = hi
        self.m, self.N = M.shape
        self.x = lo.copy()
        self.upper = np.zeros(self.N, dtype=bool)
        self.is_basic = np.zeros(self.N, dtype=bool)
        self.basis = np.zeros(self.m, dtype=int)
        self.T = np.zeros((self.m, self.N))
        self.bland = False
        self.degenerate = 0
        self.iterations = 0
        self.since_refactor = 0

    def install(self, basic_cols) -> bool:
        """Factor the basis and compute basic values; False if singular."""
        basic_cols = np.asarray(basic_cols, dtype=int)
        B = self.M[:, basic_cols]
        try:
            if self.m and np.linalg.cond(B) > 1e12:
                return False
            self.T = np.linalg.solve(B, self.M) if self.m else np.zeros((0, self.N))
        except np.linalg.LinAlgError:
            return False
        self.basis = basic_cols.copy()
        self.is_basic[:] = False
        self.is_basic[basic_cols] = True
        self.upper[basic_cols] = False
        self._recompute_basic_values(B)
        return True

    def _recompute_basic_values(self, B=None):
        if not self.m:
            return
        if B is None:
            B = self.M[:, self.basis]
        nb = ~self.is_basic
        rhs = self.b - self.M[:, nb] @ self.x[nb]
        self.x[self.basis] = np.linalg.solve(B, rhs)

    def refactor(self):
        B = self.M[:, self.basis]
        self.T = np.linalg.solve(B, self.M)
        self._recompute_basic_values(B)
        self.since_refactor = 0

    def primal_feasible(self, tol=FEAS_TOL) -> bool:
        xb = self.x[self.basis]
        return bool(np.all(xb >= self.lo[self.basis] - tol) and np.all(xb <= self.hi[self.basis] + tol))

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        leaving = self.basis[r]
        self.is_basic[leaving] = False
        self.is_basic[j] = True
        self.basis[r] = j
        self.upper[j] = False
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def run(self, cost, max_iter, on_leave=None) -> str:
        """Primal simplex from a primal feasible basis."""
        cost_tol = COST_TOL * max(1.0, float(np.max(np.abs(cost))) if len(cost) else 1.0)
        bland_after = 5 * (self.m + self.N)
        while True:
            if self.iterations >= max_iter:
                raise RuntimeError(f"simplex exceeded {max_iter} iterations")
            d = cost - cost[self.basis] @ self.T if self.m else cost.copy()
            cand = (self.hi > self.lo) & ~self.is_basic & (
                (~self.upper & (d < -cost_tol)) | (self.upper & (d > cost_tol))
            )
            idx = np.flatnonzero(cand)
            if not len(idx):
                return OPTIMAL
            j = int(idx[0]) if self.bland else int(idx[np.argmax(np.abs(d[idx]))])
            direction = -1.0 if self.upper[j] else 1.0
            alpha = direction * self.T[:, j]
            xb = self.x[self.basis]
            lob = self.lo[self.basis]
            hib = self.hi[self.basis]
            limits = np.full(self.m, np.inf)
            dec = alpha > PIVOT_TOL
            inc = alpha < -PIVOT_TOL
            limits[dec] = (xb[dec] - lob[dec]) / alpha[dec]
            with np.errstate(invalid="ignore"):
                limits[inc] = (hib[inc] - xb[inc]) / (-alpha[inc])
            limits = np.maximum(limits, 0.0)
            flip = self.hi[j] - self.lo[j]
            r = -1
            theta = flip
            if self.m:
                best = float(np.min(limits))
                if best < flip:
                    ties = np.flatnonzero(limits <= best + 1e-12)
                    if self.bland:
                        r = int(ties[np.argmin(self.basis[ties])])
                    else:
                        r = int(ties[np.argmax(np.abs(alpha[ties]))])
                    theta = best
            if not np.isfinite(theta):
                return UNBOUNDED
            self.iterations += 1
            if theta <= 1e-12:
                self.degenerate += 1
                if self.degenerate > bland_after:
                    self.bland = True
            if self.m:
                self.x[self.basis] = xb - theta * alpha
            if r < 0:
                self.upper[j] = not self.upper[j]
                self.x[j] = self.hi[j] if self.upper[j] else self.lo[j]
                continue
            self.x[j] += direction * theta
            leaving = int(self.basis[r])
            to_upper = alpha[r] < 0
            self.x[leaving] = self.hi[leaving] if to_upper else self.lo[leaving]
            self.pivot(r, j)
            self.upper[leaving] = to_upper
            if on_leave is not None:
                on_leave(leaving)


def solve_lp(bp: BinaryLinearProgram, c_override=None, extra_bounds=None,
             warm_start: Basis | None = None, max_iter: int | None = None) -> LpSolution:
    """Minimize c.x over the rows of ``bp`` and its bounds (binary mask ignored).

    ``extra_bounds`` maps variable index to a value in [0, 1] that the variable
    is fixed to.  A ``warm_start`` basis that is singular or primal infeasible
    for this instance is ignored in favour of a cold start.
    """
    c = bp.c if c_override is None else np.asarray(c_override, dtype=float)
    lb = bp.lb.copy()
    ub = bp.ub.copy()
    for j, v in (extra_bounds or {}).items():
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"bound fixing {v} for variable {j} outside [0, 1]")
        lb[j] = ub[j] = v
    if np.any(lb > ub):
        return LpSolution(INFEASIBLE, None, np.inf)

    fixed = lb == ub
    free = np.flatnonzero(~fixed)
    x_full = lb.copy()
    b_eff = bp.b - bp.A[:, fixed] @ lb[fixed]
    m = bp.m
    ineq = [i for i, s in enumerate(bp.senses) if s != "="]
    k, q = len(free), len(ineq)

    M = np.zeros((m, k + q + m))
    M[:, :k] = bp.A[:, free]
    for col, i in enumerate(ineq):
        M[i, k + col] = 1.0 if bp.senses[i] == "<=" else -1.0
    M[:, k + q:] = np.eye(m)
    lo = np.concatenate([lb[free], np.zeros(q + m)])
    hi = np.concatenate([ub[free], np.full(q, np.inf), np.zeros(m)])
    cost2 = np.concatenate([c[free], np.zeros(q + m)])

    keys = [("x", int(j)) for j in free] + [("s", i) for i in ineq] + [("a", i) for i in range(m)]
    position = {key: p for p, key in enumerate(keys)}
    if max_iter is None:
        max_iter = 50 * (m + M.shape[1]) + 1000

    tab = _Tableau(M, b_eff, lo, hi)
    warm = False
    if warm_start is not None:
        warm = _try_warm(tab, warm_start, position)
    if not warm:
        feasible = _phase_one(tab, k, q, m, ineq, max_iter)
        if not feasible:
            return LpSolution(INFEASIBLE, None, np.inf, iterations=tab.iterations)

    status = tab.run(cost2, max_iter)
    if status != OPTIMAL:
        return LpSolution(status, None, -np.inf, iterations=tab.iterations, warm=warm)
    if m:
        tab._recompute_basic_values()
    xs = np.clip(tab.x[:k], lb[free], ub[free])
    x_full[free] = xs
    basis = Basis(
        basic=tuple(keys[p] for p in tab.basis),
        at_upper=frozenset(keys[p] for p in range(k) if not tab.is_basic[p] and tab.upper[p]),
    )
    return LpSolution(OPTIMAL, x_full, float(c @ x_full), basis, tab.iterations, warm)


def _try_warm(tab: _Tableau, ws: Basis, position) -> bool:
    if len(ws.basic) != tab.m or len(set(ws.basic)) != tab.m:
        return False
    try:
        cols = [position[key] for key in ws.basic]
    except KeyError:
        return False
    tab.x = tab.lo.copy()
    tab.upper[:] = False
    for key in ws.at_upper:
        p = position.get(key)
        if p is not None and np.isfinite(tab.hi[p]):
            tab.upper[p] = True
            tab.x[p] = tab.hi[p]
    if not tab.install(cols):
        return False
    if not tab.primal_feasible():
        return False
    return True


def _phase_one(tab: _Tableau, k, q, m, ineq, max_iter) -> bool:
    """Find a feasible basis, preferring slacks over artificials."""
    tab.x = tab.lo.copy()
    tab.upper[:] = False
    resid = tab.b - tab.M[:, :k] @ tab.x[:k]
    slack_of = {i: k + col for col, i in enumerate(ineq)}
    basic = []
    art = k + q
    for i in range(m):
        s = slack_of.get(i)
        if s is not None and tab.M[i, s] * resid[i] >= 0:
            basic.append(s)
        else:
            if resid[i] < 0:
                tab.M[i, art + i] = -1.0
            tab.hi[art + i] = np.inf
            basic.append(art + i)
    tab.install(basic)
    if not np.any(tab.basis >= art):
        return True

    def retire(col):
        if col >= art:
            tab.hi[col] = 0.0

    cost1 = np.zeros(tab.N)
    cost1[art:] = 1.0
    tab.run(cost1, max_iter, on_leave=retire)
    infeas = float(np.sum(tab.x[art:]))
    if infeas > 1e-7 * (1.0 + float(np.max(np.abs(tab.b), initial=0.0))):
        return False
    tab.hi[art:] = 0.0
    tab.x[art:] = 0.0
    # pivot zero-valued artificials out where a structural or slack can replace them
    for r in range(m):
        if tab.basis[r] < art:
            continue
        row = np.abs(tab.T[r, :art])
        row[tab.is_basic[:art]] = 0.0
        row[tab.hi[:art] <= tab.lo[:art]] = 0.0
        j = int(np.argmax(row)) if len(row) else 0
        if len(row) and row[j] > 1e-7:
            tab.pivot(r, j)
    tab.refactor()
    return True
