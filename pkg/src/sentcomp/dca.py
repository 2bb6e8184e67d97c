"""Exact-penalty DC reformulation of a binary program and the DCA iteration.

With a concave penalty p that vanishes exactly on binary points, the binary
program min c.x over K = {rows, bounds} becomes min F(x) = c.x + t p(x)
over K.  Writing t p = t g - t h with g, h convex gives F = G - H where
G = t g + indicator(K) and H = t h - c.x.  Each DCA step linearizes H at
the current point and minimizes the convex remainder over K.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError, InfeasibleError
from .program import BinaryLinearProgram, enumerate_feasible
from .simplex import Basis, solve_lp

PI = math.pi


class PenaltyKind(str, Enum):
    P1 = "p1"  # piecewise linear: sum min(x, 1 - x)
    P2 = "p2"  # quadratic: sum x (1 - x)
    P3 = "p3"  # trigonometric: sum sin^2(pi x)


def _mask(mask, n):
    return np.ones(n, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)


def penalty_value(kind, x, mask=None) -> float:
    kind = PenaltyKind(kind)
    x = np.asarray(x, dtype=float)
    xm = x[_mask(mask, len(x))]
    if kind is PenaltyKind.P1:
        return float(np.sum(np.minimum(xm, 1.0 - xm)))
    if kind is PenaltyKind.P2:
        return float(np.sum(xm * (1.0 - xm)))
    return float(np.sum(np.sin(PI * xm) ** 2))


def penalty_subgradient(kind, x, mask=None) -> np.ndarray:
    """An element u of the subdifferential of h, where p = g - h."""
    kind = PenaltyKind(kind)
    x = np.asarray(x, dtype=float)
    u = np.zeros_like(x)
    m = _mask(mask, len(x))
    xm = x[m]
    if kind is PenaltyKind.P1:
        u[m] = np.where(xm >= 0.5, 1.0, -1.0)
    elif kind is PenaltyKind.P2:
        u[m] = 2.0 * xm - 1.0
    else:
        u[m] = 2.0 * PI ** 2 * xm - PI * np.sin(2.0 * PI * xm)
    return u


def subgrad_h(kind, x, t: float, c, mask=None) -> np.ndarray:
    """y = -c + t u, a subgradient of H at x."""
    return -np.asarray(c, dtype=float) + t * penalty_subgradient(kind, x, mask)


def penalized_value(bp: BinaryLinearProgram, kind, t: float, x) -> float:
    return float(bp.c @ x) + t * penalty_value(kind, x, bp.binary)


@dataclass
class DcaConfig:
    t: float = 1e5
    eps1: float = 1e-6
    eps2: float = 1e-8
    max_iters: int = 200
    penalty: PenaltyKind = PenaltyKind.P2
    increase_t: bool = False
    t_max: float = 1e8
    fw_gap: float = 1e-7
    fw_max_iters: int = 500

    def __post_init__(self):
        self.penalty = PenaltyKind(self.penalty)
        if self.t <= 0 or self.eps1 <= 0 or self.eps2 <= 0 or self.max_iters < 1:
            raise ConfigurationError("t, tolerances and max_iters must be positive")


@dataclass
class DcaResult:
    x: np.ndarray
    F: float
    iterations: int
    trajectory: list[tuple[float, float]] = field(default_factory=list)  # (F, penalty) per iterate
    binary_feasible: bool = False
    t: float = 0.0
    lp_solves: int = 0
    converged: bool = False
    basis: Basis | None = None

    @property
    def values(self) -> list[float]:
        return [f for f, _ in self.trajectory]


def _frank_wolfe(bp, q, y, x_start, basis, cfg):
    """Minimize q * |x_mask|^2 - y.x over K with away steps; LP is the linear oracle."""
    mask = bp.binary
    lp_count = 0

    def grad(x):
        g = -y.copy()
        g[mask] += 2.0 * q * x[mask]
        return g

    sol = solve_lp(bp, c_override=grad(x_start), warm_start=basis)
    lp_count += 1
    if not sol.optimal:
        raise InfeasibleError("relaxation polytope is empty")
    basis = sol.basis
    x = sol.x.copy()
    active = {tuple(x): [x.copy(), 1.0]}
    for _ in range(cfg.fw_max_iters):
        g = grad(x)
        sol = solve_lp(bp, c_override=g, warm_start=basis)
        lp_count += 1
        basis = sol.basis
        s = sol.x
        gap = float(g @ (x - s))
        if gap <= cfg.fw_gap:
            break
        away_key = max(active, key=lambda k: float(g @ active[k][0]))
        v, wv = active[away_key]
        if gap >= float(g @ (v - x)) or wv >= 1.0 - 1e-12:
            d = s - x
            gmax = 1.0
            toward = True
        else:
            d = x - v
            gmax = wv / (1.0 - wv)
            toward = False
        curv = 2.0 * q * float(d[mask] @ d[mask])
        slope = float(g @ d)
        step = gmax if curv <= 0 else min(gmax, max(0.0, -slope / curv))
        if step <= 0:
            break
        x = x + step * d
        if toward:
            for k in active:
                active[k][1] *= 1.0 - step
            key = tuple(s)
            if key in active:
                active[key][1] += step
            else:
                active[key] = [s.copy(), step]
            if step >= 1.0 - 1e-12:
                active = {key: [s.copy(), 1.0]}
        else:
            for k in active:
                active[k][1] *= 1.0 + step
            active[away_key][1] -= step
            if active[away_key][1] <= 1e-12:
                del active[away_key]
    return x, basis, lp_count


def dca(bp: BinaryLinearProgram, cfg: DcaConfig | None = None, x0=None,
        warm_start: Basis | None = None) -> DcaResult:
    """Run DCA from x0 (inside the bounds, not necessarily on the rows).

    A step is taken only when it strictly improves the linearized objective
    over the current point; otherwise the current point is already a
    minimizer of the convex subproblem and the run stops.  This keeps the
    penalized values monotone and makes critical points fixed.
    """
    cfg = cfg or DcaConfig()
    kind = cfg.penalty
    x = np.asarray(bp.lb if x0 is None else x0, dtype=float).copy()
    t = cfg.t
    basis = warm_start
    lp_count = 0
    iterations = 0
    trajectory: list[tuple[float, float]] = []
    in_K = bp.in_relaxation(x)
    if in_K:
        trajectory.append((penalized_value(bp, kind, t, x), penalty_value(kind, x, bp.binary)))
    converged = False
    while True:
        while iterations < cfg.max_iters:
            y = subgrad_h(kind, x, t, bp.c, bp.binary)
            if kind is PenaltyKind.P3:
                q = t * PI ** 2
                x_new, basis, used = _frank_wolfe(bp, q, y, x, basis, cfg)
                lp_count += used

                def model(z):
                    return q * float(z[bp.binary] @ z[bp.binary]) - float(y @ z)
            else:
                sol = solve_lp(bp, c_override=-y, warm_start=basis)
                lp_count += 1
                if not sol.optimal:
                    raise InfeasibleError("relaxation polytope is empty")
                basis = sol.basis
                x_new = sol.x

                def model(z):
                    return -float(y @ z)
            iterations += 1
            if in_K and model(x_new) >= model(x) - 1e-12 * (1.0 + abs(model(x))):
                converged = True
                break
            F_old = trajectory[-1][0] if trajectory else None
            step = float(np.linalg.norm(x_new - x))
            x = x_new
            in_K = True
            F_new = penalized_value(bp, kind, t, x)
            trajectory.append((F_new, penalty_value(kind, x, bp.binary)))
            if step <= cfg.eps1 or (F_old is not None and abs(F_new - F_old) <= cfg.eps2):
                converged = True
                break
        if not (cfg.increase_t and penalty_value(kind, x, bp.binary) > 1e-6
                and t * 10 <= cfg.t_max and iterations < cfg.max_iters):
            break
        t *= 10
        converged = False
        trajectory = [(penalized_value(bp, kind, t, x), penalty_value(kind, x, bp.binary))]
    return DcaResult(
        x=x,
        F=penalized_value(bp, kind, t, x),
        iterations=iterations,
        trajectory=trajectory,
        binary_feasible=bp.feasible_binary(x) is not None,
        t=t,
        lp_solves=lp_count,
        converged=converged,
        basis=basis,
    )


def write_trajectory(result: DcaResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "F", "penalty"])
        for k, (f, p) in enumerate(result.trajectory):
            w.writerow([k, repr(f), repr(p)])


# -- penalty threshold diagnostics ------------------------------------------------

@dataclass
class ThresholdReport:
    """Diagnostic only: quantities of the exact-penalty threshold on a small instance."""
    relaxation_value: float
    binary_optimum: float
    min_positive_penalty: float
    threshold: float | None
    vertices: list[np.ndarray]


def polytope_vertices(bp: BinaryLinearProgram, max_work: int = 1_000_000) -> list[np.ndarray]:
    """Vertices of K by enumerating bases of the slack form."""
    fixed = bp.lb == bp.ub
    free = np.flatnonzero(~fixed)
    b = bp.b - bp.A[:, fixed] @ bp.lb[fixed]
    ineq = [i for i, s in enumerate(bp.senses) if s != "="]
    k = len(free)
    M = np.zeros((bp.m, k + len(ineq)))
    M[:, :k] = bp.A[:, free]
    for col, i in enumerate(ineq):
        M[i, k + col] = 1.0 if bp.senses[i] == "<=" else -1.0
    # drop linearly dependent rows; an inconsistent system has no vertices
    keep = []
    for i in range(bp.m):
        trial = keep + [i]
        if np.linalg.matrix_rank(M[trial]) == len(trial):
            keep.append(i)
    if keep and np.linalg.matrix_rank(np.column_stack([M[keep], b[keep]])) > len(keep):
        return []
    rest = [i for i in range(bp.m) if i not in keep]
    Mk, bk = M[keep], b[keep]
    r = len(keep)
    ncols = M.shape[1]
    work = math.comb(ncols, r) * 2 ** k
    if work > max_work:
        raise ValueError(f"vertex enumeration would need ~{work} trials")
    lo = np.concatenate([bp.lb[free], np.zeros(len(ineq))])
    hi = np.concatenate([bp.ub[free], np.full(len(ineq), np.inf)])
    seen = {}
    for basic in itertools.combinations(range(ncols), r):
        B = Mk[:, list(basic)]
        if r and abs(np.linalg.det(B)) < 1e-10:
            continue
        nonbasic = [j for j in range(ncols) if j not in basic]
        nb_struct = [j for j in nonbasic if j < k]
        for bits in itertools.product((0, 1), repeat=len(nb_struct)):
            z = np.zeros(ncols)
            for j, bit in zip(nb_struct, bits):
                z[j] = hi[j] if bit else lo[j]
            if r:
                z[list(basic)] = np.linalg.solve(B, bk - Mk[:, nonbasic] @ z[nonbasic])
            if np.any(z < lo - 1e-9) or np.any(z > hi + 1e-9):
                continue
            x = bp.lb.copy()
            x[free] = np.clip(z[:k], bp.lb[free], bp.ub[free])
            if rest and not bp.rows_satisfied(x, 1e-8):
                continue
            seen.setdefault(tuple(np.round(x, 9)), x)
    return [seen[key] for key in sorted(seen)]


def penalty_threshold_report(bp: BinaryLinearProgram, kind=PenaltyKind.P2,
                             max_binaries: int = 24) -> ThresholdReport:
    """Relaxation value, binary optimum, smallest positive vertex penalty and the
    resulting threshold (optimum - relaxation) / smallest penalty.

    The threshold is 0 when no vertex has positive penalty and None when
    the binary set is empty.
    """
    if int(np.sum(bp.binary & (bp.lb < bp.ub))) > max_binaries:
        raise ValueError("instance too large for threshold diagnostics")
    relax = solve_lp(bp)
    if not relax.optimal:
        raise InfeasibleError("relaxation polytope is empty")
    feas = enumerate_feasible(bp, max_binaries=max_binaries)
    best = min((bp.value(x) for x in feas), default=math.inf)
    verts = polytope_vertices(bp)
    pens = [penalty_value(kind, v, bp.binary) for v in verts]
    positive = [p for p in pens if p > 1e-12]
    m = min(positive) if positive else math.inf
    if not feas:
        thr = None
    elif math.isinf(m):
        thr = 0.0
    else:
        thr = max(0.0, (best - relax.value) / m)
    return ThresholdReport(relax.value, best, m, thr, verts)
