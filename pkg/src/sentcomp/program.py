"""Binary linear programs: min c.x over rows and [0, 1] bounds.

Shared by the LP, DCA and branch-and-bound layers.  Rows are kept dense;
instances here have at most a few thousand columns and ~100 rows.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

SENSES = ("=", "<=", ">=")
BRUTE_FORCE_LIMIT = 16


@dataclass(frozen=True)
class BinaryLinearProgram:
    c: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    binary: np.ndarray
    names: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        n = len(self.c)
        m = len(self.b)
        if self.A.shape != (m, n):
            raise ValueError(f"A has shape {self.A.shape}, expected {(m, n)}")
        if len(self.senses) != m or any(s not in SENSES for s in self.senses):
            raise ValueError("one sense in {'=', '<=', '>='} per row")
        if self.lb.shape != (n,) or self.ub.shape != (n,) or self.binary.shape != (n,):
            raise ValueError("bounds and mask must have one entry per variable")
        if np.any(self.lb > self.ub) or np.any(self.lb < 0) or np.any(self.ub > 1):
            raise ValueError("bounds must satisfy 0 <= lb <= ub <= 1")

    @classmethod
    def from_dense(cls, c, A=None, senses=None, b=None, lb=None, ub=None, binary=None, names=()):
        c = np.asarray(c, dtype=float)
        n = len(c)
        A = np.zeros((0, n)) if A is None else np.atleast_2d(np.asarray(A, dtype=float)).reshape(-1, n)
        m = A.shape[0]
        b = np.zeros(0) if b is None else np.asarray(b, dtype=float).reshape(m)
        if senses is None:
            senses = ("=",) * m
        elif isinstance(senses, str):
            senses = (senses,) * m
        return cls(
            c=c, A=A, senses=tuple(senses), b=b,
            lb=np.zeros(n) if lb is None else np.asarray(lb, dtype=float),
            ub=np.ones(n) if ub is None else np.asarray(ub, dtype=float),
            binary=np.ones(n, dtype=bool) if binary is None else np.asarray(binary, dtype=bool),
            names=tuple(names),
        )

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def rows(self):
        """(coefficient map, sense, rhs) triples."""
        for i in range(self.m):
            nz = np.flatnonzero(self.A[i])
            yield {int(j): float(self.A[i, j]) for j in nz}, self.senses[i], float(self.b[i])

    def with_bounds(self, fixings: Mapping[int, float] | None = None, lb=None, ub=None) -> "BinaryLinearProgram":
        new_lb = self.lb.copy() if lb is None else np.asarray(lb, dtype=float).copy()
        new_ub = self.ub.copy() if ub is None else np.asarray(ub, dtype=float).copy()
        for j, v in (fixings or {}).items():
            new_lb[j] = new_ub[j] = v
        return replace(self, lb=new_lb, ub=new_ub)

    def with_rows(self, rows: Iterable[tuple[Mapping[int, float], str, float]]) -> "BinaryLinearProgram":
        rows = list(rows)
        extra = np.zeros((len(rows), self.n))
        for r, (coef, _, _) in enumerate(rows):
            for j, a in coef.items():
                extra[r, j] = a
        return replace(
            self,
            A=np.vstack([self.A, extra]),
            senses=self.senses + tuple(s for _, s, _ in rows),
            b=np.concatenate([self.b, [rhs for _, _, rhs in rows]]),
        )

    def with_objective(self, c) -> "BinaryLinearProgram":
        return replace(self, c=np.asarray(c, dtype=float))

    # -- feasibility --------------------------------------------------------

    def row_violation(self, x: np.ndarray) -> np.ndarray:
        """Per-row amount by which x misses the row (0 when satisfied)."""
        act = self.A @ x
        viol = np.zeros(self.m)
        for i, s in enumerate(self.senses):
            d = act[i] - self.b[i]
            if s == "=":
                viol[i] = abs(d)
            elif s == "<=":
                viol[i] = max(d, 0.0)
            else:
                viol[i] = max(-d, 0.0)
        return viol

    def rows_satisfied(self, x: np.ndarray, tol: float = 1e-8) -> bool:
        return bool(np.all(self.row_violation(x) <= tol * (1.0 + np.abs(self.b))))

    def in_bounds(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        return bool(np.all(x >= self.lb - tol) and np.all(x <= self.ub + tol))

    def in_relaxation(self, x: np.ndarray, tol: float = 1e-8) -> bool:
        return self.in_bounds(x, tol) and self.rows_satisfied(x, tol)

    def is_binary(self, x: np.ndarray, tol: float = 1e-6) -> bool:
        xm = x[self.binary]
        return bool(np.all(np.minimum(np.abs(xm), np.abs(1.0 - xm)) <= tol))

    def snap(self, x: np.ndarray) -> np.ndarray:
        y = np.array(x, dtype=float)
        y[self.binary] = np.round(y[self.binary])
        return y

    def feasible_binary(self, x: np.ndarray, tol: float = 1e-6, row_tol: float = 1e-8):
        """Snapped copy of x when it is binary within ``tol`` and feasible, else None."""
        if not self.is_binary(x, tol):
            return None
        y = self.snap(x)
        if not (self.in_bounds(y) and self.rows_satisfied(y, row_tol)):
            return None
        return y

    def value(self, x: np.ndarray) -> float:
        return float(self.c @ x)

    # -- text dump ----------------------------------------------------------

    def dump(self) -> str:
        names = self.names or tuple(f"x{j}" for j in range(self.n))

        def expr(coefs):
            parts = []
            for j, a in coefs:
                parts.append(f"{'+' if a >= 0 else '-'} {float(abs(a))!r} {names[j]}")
            return " ".join(parts) if parts else "0"

        lines = ["minimize", "  obj: " + expr([(j, self.c[j]) for j in np.flatnonzero(self.c)]), "subject to"]
        for i, (coef, s, rhs) in enumerate(self.rows):
            lines.append(f"  r{i}: {expr(sorted(coef.items()))} {s} {float(rhs)!r}")
        lines.append("bounds")
        for j in range(self.n):
            lines.append(f"  {float(self.lb[j])!r} <= {names[j]} <= {float(self.ub[j])!r}")
        lines.append("binary")
        lines.append("  " + " ".join(names[j] for j in np.flatnonzero(self.binary)))
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def load_dump(cls, text: str) -> "BinaryLinearProgram":
        section = None
        obj: list[tuple[float, str]] = []
        rows = []
        bounds: dict[str, tuple[float, float]] = {}
        order: list[str] = []
        binaries: set[str] = set()

        def terms(tokens):
            out = []
            if tokens == ["0"]:
                return out
            for k in range(0, len(tokens), 3):
                sign, a, name = tokens[k:k + 3]
                out.append(((-1.0 if sign == "-" else 1.0) * float(a), name))
            return out

        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line in ("minimize", "subject to", "bounds", "binary", "end"):
                section = line
                continue
            if section == "minimize":
                obj = terms(line.split(":", 1)[1].split())
            elif section == "subject to":
                body = line.split(":", 1)[1].split()
                rows.append((terms(body[:-2]), body[-2], float(body[-1])))
            elif section == "bounds":
                lo, _, name, _, hi = line.split()
                bounds[name] = (float(lo), float(hi))
                order.append(name)
            elif section == "binary":
                binaries.update(line.split())
        pos = {name: j for j, name in enumerate(order)}
        n = len(order)
        c = np.zeros(n)
        for a, name in obj:
            c[pos[name]] = a
        A = np.zeros((len(rows), n))
        for i, (coefs, _, _) in enumerate(rows):
            for a, name in coefs:
                A[i, pos[name]] = a
        return cls(
            c=c, A=A, senses=tuple(s for _, s, _ in rows),
            b=np.array([r for _, _, r in rows], dtype=float),
            lb=np.array([bounds[nm][0] for nm in order]),
            ub=np.array([bounds[nm][1] for nm in order]),
            binary=np.array([nm in binaries for nm in order], dtype=bool),
            names=tuple(order),
        )


def enumerate_feasible(bp: BinaryLinearProgram, max_binaries: int | None = 24) -> list[np.ndarray]:
    """Every binary point satisfying the rows and bounds.

    Up to ``BRUTE_FORCE_LIMIT`` free variables all assignments are tested
    directly.  Larger instances use a depth-first search with row-activity
    bound propagation, which is still exhaustive.  ``max_binaries`` guards the
    number of free variables; pass None to lift it.
    """
    if not np.all(bp.binary | (bp.lb == bp.ub)):
        raise ValueError("enumeration needs every free variable to be binary")
    lo = np.ceil(bp.lb - 1e-9)
    hi = np.floor(bp.ub + 1e-9)
    if np.any(lo > hi):
        return []
    free = np.flatnonzero(lo < hi)
    if max_binaries is not None and len(free) > max_binaries:
        raise ValueError(f"{len(free)} free binaries exceed the enumeration guard of {max_binaries}")
    base = np.where(lo == hi, lo, 0.0)
    if np.any((lo == hi) & (np.abs(bp.lb - lo) > 1e-9)):
        return []  # a variable fixed to a fractional value
    if len(free) <= BRUTE_FORCE_LIMIT:
        return _brute_force(bp, base, free)
    return _search(bp, base, free)


def _brute_force(bp, base, free):
    k = len(free)
    out = []
    const = bp.A @ base
    sub = bp.A[:, free]
    chunk = 1 << min(k, 14)
    total = 1 << k
    tol = 1e-9 * (1.0 + np.abs(bp.b))
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = ((codes[:, None] >> np.arange(k)) & 1).astype(float)
        act = bits @ sub.T + const
        ok = np.ones(len(codes), dtype=bool)
        for i, s in enumerate(bp.senses):
            d = act[:, i] - bp.b[i]
            if s == "=":
                ok &= np.abs(d) <= tol[i]
            elif s == "<=":
                ok &= d <= tol[i]
            else:
                ok &= d >= -tol[i]
        for row in bits[ok]:
            x = base.copy()
            x[free] = row
            out.append(x)
    return out


def _search(bp, base, free):
    A = bp.A
    b = bp.b
    tol = 1e-9 * (1.0 + np.abs(b))
    m = bp.m
    upper = [s in ("=", "<=") for s in bp.senses]
    lower = [s in ("=", ">=") for s in bp.senses]
    col_rows = {int(j): [(i, float(A[i, j])) for i in np.flatnonzero(A[:, j])] for j in free}
    row_cols = [[(int(j), float(A[i, j])) for j in free if A[i, j] != 0] for i in range(m)]

    const = A @ base
    min_act = const + np.array([sum(min(a, 0.0) for _, a in row_cols[i]) for i in range(m)])
    max_act = const + np.array([sum(max(a, 0.0) for _, a in row_cols[i]) for i in range(m)])
    value = {int(j): -1 for j in free}
    out = []

    def assign(j, v, mn, mx, val, queue):
        val[j] = v
        for i, a in col_rows[j]:
            mn[i] += a * v - min(a, 0.0)
            mx[i] += a * v - max(a, 0.0)
            queue.add(i)

    def propagate(mn, mx, val, queue):
        while queue:
            i = queue.pop()
            if upper[i] and mn[i] > b[i] + tol[i]:
                return False
            if lower[i] and mx[i] < b[i] - tol[i]:
                return False
            for j, a in row_cols[i]:
                if val[j] != -1:
                    continue
                span = abs(a)
                forced = None
                # raising the minimum by |a| breaks the upper side
                if upper[i] and mn[i] + span > b[i] + tol[i]:
                    forced = 0 if a > 0 else 1
                if lower[i] and mx[i] - span < b[i] - tol[i]:
                    need = 1 if a > 0 else 0
                    if forced is not None and forced != need:
                        return False
                    forced = need
                if forced is not None:
                    assign(j, forced, mn, mx, val, queue)
        return True

    def dfs(mn, mx, val):
        branch_on = next((j for j in val if val[j] == -1), None)
        if branch_on is None:
            x = base.copy()
            for j, v in val.items():
                x[j] = v
            if bp.rows_satisfied(x, 1e-9):
                out.append(x)
            return
        for v in (0, 1):
            mn2, mx2, val2 = mn.copy(), mx.copy(), dict(val)
            queue: set[int] = set()
            assign(branch_on, v, mn2, mx2, val2, queue)
            if propagate(mn2, mx2, val2, queue):
                dfs(mn2, mx2, val2)

    queue0 = set(range(m))
    if propagate(min_act, max_act, value, queue0):
        dfs(min_act, max_act, value)
    out.sort(key=lambda x: tuple(x))
    return out
