"""Branch-and-bound with DCA upper bounds, processing up to s nodes per round.

The root LP gives the first lower bound; s DCA runs from random starting
points seed the incumbent.  Each round takes up to s open nodes, solves their
LP relaxations, restarts DCA from the relaxation solution when the gap to the
incumbent is still large, and branches while the gap exceeds eps4.  Workers
share only the incumbent and the open list, both behind locks.
"""

from __future__ import annotations

import itertools
import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dca import DcaConfig, dca
from .errors import ConfigurationError
from .program import BinaryLinearProgram
from .simplex import Basis, solve_lp

log = logging.getLogger(__name__)

NODE_SELECTION = ("best_bound", "depth_first")
BRANCHING = ("closest_to_half", "max_infeasibility", "max_cost")
FRACTIONAL_TOL = 1e-6

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
NODE_LIMIT = "node_limit"


@dataclass
class SolverConfig:
    workers: int = 1
    eps3: float | None = None  # None: 1e-2 * (1 + |f_opt|)
    eps4: float = 1e-5
    node_selection: str = "best_bound"
    branching: str = "closest_to_half"
    seed: int = 0
    dca: DcaConfig = field(default_factory=DcaConfig)
    root_dca: bool = True
    node_dca: bool = True
    max_nodes: int | None = None

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigurationError("worker count must be at least 1")
        if self.node_selection not in NODE_SELECTION:
            raise ConfigurationError(f"node selection must be one of {NODE_SELECTION}")
        if self.branching not in BRANCHING:
            raise ConfigurationError(f"branching rule must be one of {BRANCHING}")
        if self.eps4 <= 0 or (self.eps3 is not None and self.eps3 < self.eps4):
            raise ConfigurationError("need 0 < eps4 <= eps3")

    def restart_gap(self, f_opt: float) -> float:
        if self.eps3 is not None:
            return self.eps3
        return 1e-2 * (1.0 + abs(f_opt)) if math.isfinite(f_opt) else 1e-2


class Incumbent:
    """Best binary-feasible point so far; updates only on strict improvement."""

    def __init__(self):
        self._lock = threading.Lock()
        self.x: np.ndarray | None = None
        self.value = math.inf
        self.history: list[float] = []

    def offer(self, x: np.ndarray, value: float) -> bool:
        with self._lock:
            if value < self.value:
                self.x = x.copy()
                self.value = value
                self.history.append(value)
                return True
            return False

    @property
    def f_opt(self) -> float:
        with self._lock:
            return self.value


@dataclass
class BnbNode:
    id: int
    fixings: dict[int, float]
    bound: float
    depth: int
    basis: Basis | None = None


@dataclass
class NodeOutcome:
    node: BnbNode
    children: list[BnbNode]
    action: str
    bound: float
    lp_solves: int = 0
    restarted: bool = False


@dataclass
class SolveStats:
    nodes: int = 0
    restarts: int = 0
    lp_solves: int = 0
    wall_time: float = 0.0
    root_bound: float = math.nan
    max_open: int = 0
    log: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "nodes": self.nodes, "restarts": self.restarts, "lp_solves": self.lp_solves,
            "wall_time": self.wall_time, "root_bound": self.root_bound, "max_open": self.max_open,
        }


@dataclass
class SolveResult:
    incumbent: Incumbent
    status: str
    stats: SolveStats
    lower_bound: float

    @property
    def x(self):
        return self.incumbent.x

    @property
    def value(self) -> float:
        return self.incumbent.value


def select_nodes(open_list: list[BnbNode], cfg: SolverConfig) -> list[BnbNode]:
    """Remove and return up to ``cfg.workers`` nodes in policy order."""
    if cfg.node_selection == "best_bound":
        order = sorted(open_list, key=lambda nd: (nd.bound, nd.id))
    else:
        order = sorted(open_list, key=lambda nd: -nd.id)
    chosen = order[:cfg.workers]
    ids = {nd.id for nd in chosen}
    open_list[:] = [nd for nd in open_list if nd.id not in ids]
    return chosen


def fractional_set(x, mask, fixings=None, tol: float = FRACTIONAL_TOL) -> np.ndarray:
    dist = np.minimum(np.abs(x), np.abs(1.0 - x))
    cand = np.asarray(mask, dtype=bool) & (dist > tol)
    if fixings:
        cand[list(fixings)] = False
    return np.flatnonzero(cand)


def choose_branch_variable(x, J, rule: str, c) -> int:
    if not len(J):
        raise ValueError("no fractional variable to branch on")
    xs = x[J]
    if rule == "closest_to_half":
        score = -np.abs(xs - 0.5)
    elif rule == "max_infeasibility":
        score = np.minimum(xs, 1.0 - xs)
    elif rule == "max_cost":
        score = np.abs(np.asarray(c)[J])
    else:
        raise ConfigurationError(f"unknown branching rule {rule!r}")
    return int(J[np.flatnonzero(score == score.max())[0]])


def branch(node: BnbNode, x, rule: str, c, mask, next_id: Callable[[], int],
           bound: float | None = None) -> tuple[BnbNode, BnbNode]:
    """Children fixing the chosen variable to 0 and to 1."""
    J = fractional_set(x, mask, node.fixings)
    j = choose_branch_variable(x, J, rule, c)
    b = node.bound if bound is None else bound
    return (
        BnbNode(next_id(), {**node.fixings, j: 0.0}, b, node.depth + 1, node.basis),
        BnbNode(next_id(), {**node.fixings, j: 1.0}, b, node.depth + 1, node.basis),
    )


def _offer(bp, incumbent, x) -> bool:
    y = bp.feasible_binary(x)
    if y is None:
        return False
    return incumbent.offer(y, bp.value(y))


def process_node(node: BnbNode, bp: BinaryLinearProgram, cfg: SolverConfig,
                 incumbent: Incumbent, next_id: Callable[[], int]) -> NodeOutcome:
    sol = solve_lp(bp, extra_bounds=node.fixings, warm_start=node.basis)
    lp = 1
    if not sol.optimal:
        return NodeOutcome(node, [], "prune", math.inf, lp)
    l = sol.value
    if l >= incumbent.f_opt:
        return NodeOutcome(node, [], "prune", l, lp)
    if bp.feasible_binary(sol.x) is not None:
        _offer(bp, incumbent, sol.x)
        return NodeOutcome(node, [], "incumbent", l, lp)
    actions = []
    restarted = False
    if cfg.node_dca and incumbent.f_opt - l > cfg.restart_gap(incumbent.f_opt):
        sub = bp.with_bounds(node.fixings)
        res = dca(sub, cfg.dca, sol.x, warm_start=sol.basis)
        lp += res.lp_solves
        restarted = True
        actions.append("restart")
        if res.binary_feasible:
            _offer(bp, incumbent, res.x)
    if incumbent.f_opt - l > cfg.eps4:
        child_node = BnbNode(node.id, node.fixings, l, node.depth, sol.basis)
        if len(fractional_set(sol.x, bp.binary, node.fixings)):
            children = list(branch(child_node, sol.x, cfg.branching, bp.c, bp.binary, next_id, l))
        else:
            children = _branch_near_binary(child_node, sol.x, bp, next_id, l)
        actions.append("branch" if children else "prune")
        return NodeOutcome(node, children, "+".join(actions), l, lp, restarted)
    actions.append("prune")
    return NodeOutcome(node, [], "+".join(actions), l, lp, restarted)


def _branch_near_binary(node, x, bp, next_id, bound):
    """Binary within tolerance yet infeasible once rounded: split on the least binary free variable."""
    dist = np.minimum(np.abs(x), np.abs(1.0 - x))
    dist[~bp.binary] = -1.0
    if node.fixings:
        dist[list(node.fixings)] = -1.0
    j = int(np.argmax(dist))
    if dist[j] <= 0:
        return []
    return [
        BnbNode(next_id(), {**node.fixings, j: 0.0}, bound, node.depth + 1, node.basis),
        BnbNode(next_id(), {**node.fixings, j: 1.0}, bound, node.depth + 1, node.basis),
    ]


def solve(bp: BinaryLinearProgram, cfg: SolverConfig | None = None,
          on_round: Callable[[list[float], float], None] | None = None) -> SolveResult:
    """Globally minimize c.x over binary points of the program.

    ``on_round`` is called before every round with the bounds of all open
    nodes and the incumbent value.
    """
    cfg = cfg or SolverConfig()
    start = time.perf_counter()
    stats = SolveStats()
    incumbent = Incumbent()
    counter = itertools.count(1)
    id_lock = threading.Lock()

    def next_id() -> int:
        with id_lock:
            return next(counter)

    def finish(status, lower):
        stats.wall_time = time.perf_counter() - start
        return SolveResult(incumbent, status, stats, lower)

    root = solve_lp(bp)
    stats.lp_solves += 1
    if not root.optimal:
        stats.log.append("0 0 inf prune")
        return finish(INFEASIBLE, math.inf)
    stats.root_bound = root.value
    if _offer(bp, incumbent, root.x):
        stats.log.append(f"0 0 {root.value!r} incumbent")
        return finish(OPTIMAL, root.value)

    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        if cfg.root_dca:
            rng = np.random.default_rng(cfg.seed)
            starts = [bp.lb + rng.random(bp.n) * (bp.ub - bp.lb) for _ in range(cfg.workers)]

            def run(x0):
                return dca(bp, cfg.dca, x0, warm_start=root.basis)

            runs = list(pool.map(run, starts)) if pool else [run(x0) for x0 in starts]
            for res in runs:
                stats.lp_solves += res.lp_solves
                stats.restarts += 1
                if res.binary_feasible:
                    _offer(bp, incumbent, res.x)

        root_node = BnbNode(0, {}, root.value, 0, root.basis)
        if incumbent.f_opt - root.value <= cfg.eps4:
            stats.log.append(f"0 0 {root.value!r} prune")
            return finish(OPTIMAL, root.value)
        if len(fractional_set(root.x, bp.binary)):
            open_list = list(branch(root_node, root.x, cfg.branching, bp.c, bp.binary, next_id))
        else:
            open_list = _branch_near_binary(root_node, root.x, bp, next_id, root.value)
        stats.log.append(f"0 0 {root.value!r} branch")
        stats.nodes = 1
        open_lock = threading.Lock()
        hit_limit = False

        while open_list:
            f_opt = incumbent.f_opt
            with open_lock:
                open_list[:] = [nd for nd in open_list if f_opt - nd.bound > cfg.eps4]
                if on_round is not None:
                    on_round([nd.bound for nd in open_list], f_opt)
                if not open_list:
                    break
                stats.max_open = max(stats.max_open, len(open_list))
                batch = select_nodes(open_list, cfg)
            if cfg.max_nodes is not None and stats.nodes >= cfg.max_nodes:
                with open_lock:
                    open_list.extend(batch)
                hit_limit = True
                break

            def work(node):
                return process_node(node, bp, cfg, incumbent, next_id)

            outcomes = list(pool.map(work, batch)) if pool else [work(nd) for nd in batch]
            for out in outcomes:
                stats.nodes += 1
                stats.lp_solves += out.lp_solves
                stats.restarts += int(out.restarted)
                stats.log.append(f"{out.node.id} {out.node.depth} {out.bound!r} {out.action}")
                with open_lock:
                    open_list.extend(out.children)
        lower = min((nd.bound for nd in open_list), default=incumbent.f_opt)
    finally:
        if pool is not None:
            pool.shutdown()

    for line in stats.log:
        log.debug(line)
    if hit_limit:
        return finish(NODE_LIMIT, lower)
    if incumbent.x is None:
        return finish(INFEASIBLE, math.inf)
    return finish(OPTIMAL, min(lower, incumbent.f_opt))
