"""Random binary programs with a known feasible point, and a solver benchmark."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .bnb import SolverConfig, solve
from .program import BinaryLinearProgram, enumerate_feasible

ORACLE_LIMIT = 24


def random_instance(rng: np.random.Generator, n_vars: int, n_rows: int) -> BinaryLinearProgram:
    """Integer rows built around a random binary point, so the binary set is nonempty.

    Inequalities get a random slack of 0..2 so not every row is tight.
    """
    A = rng.integers(-3, 4, size=(n_rows, n_vars)).astype(float)
    x0 = rng.integers(0, 2, size=n_vars).astype(float)
    senses = tuple(rng.choice(["=", "<=", ">="], size=n_rows))
    b = A @ x0
    for i, s in enumerate(senses):
        if s == "<=":
            b[i] += rng.integers(0, 3)
        elif s == ">=":
            b[i] -= rng.integers(0, 3)
    c = np.round(rng.normal(size=n_vars) * 10.0, 3)
    return BinaryLinearProgram.from_dense(c, A, senses, b)


def random_suite(count: int, n_vars: int, n_rows: int, seed: int = 0, vary: bool = False):
    """``count`` instances; with ``vary`` the sizes are drawn from [2, n_vars] x [1, n_rows]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        nv = int(rng.integers(2, n_vars + 1)) if vary else n_vars
        nr = int(rng.integers(1, n_rows + 1)) if vary else n_rows
        out.append(random_instance(rng, nv, nr))
    return out


@dataclass
class BenchRow:
    instance: int
    n_vars: int
    n_rows: int
    value: float
    seconds: float
    nodes: int
    brute_force: float | None
    agree: bool | None


def benchmark(instances, cfg: SolverConfig | None = None, eps: float = 1e-5) -> list[BenchRow]:
    cfg = cfg or SolverConfig()
    rows = []
    for k, bp in enumerate(instances):
        t0 = time.perf_counter()
        res = solve(bp, cfg)
        dt = time.perf_counter() - t0
        brute = agree = None
        if int(bp.binary.sum()) <= ORACLE_LIMIT:
            feas = enumerate_feasible(bp, max_binaries=ORACLE_LIMIT)
            brute = min((bp.value(x) for x in feas), default=float("inf"))
            agree = abs(res.value - brute) <= eps if feas else res.x is None
        rows.append(BenchRow(k, bp.n, bp.m, res.value, dt, res.stats.nodes, brute, agree))
    return rows
