"""The trigram compression ILP: variables, objective, rows, decoding.

Words are numbered 1..n and index 0 stands for the start token.  A
compression is a subsequence s1 < ... < sL and is encoded by

* ``delta[i]``  word i is kept,
* ``alpha[i]``  word i is the first kept word,
* ``gamma[i, j, k]``  kept words i, j, k are consecutive (i may be 0),
* ``beta[i, j]``  kept words i, j are the last two (i may be 0).

By default alpha is substituted out via ``alpha[k] = delta[k] - sum_ij gamma[i, j, k]``;
rows ``alpha[k] >= 0`` keep the feasible set unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DecodeError, IntegrityError
from .ngram import NgramModel
from .program import BinaryLinearProgram
from .rules import Fix
from .tokens import START

SCORES = ("log", "raw")


def variable_count(n: int) -> int:
    """Size of the model with alpha kept as variables."""
    return (n ** 3 + 3 * n ** 2 + 14 * n) // 6


@dataclass
class CompressionIndexing:
    n: int
    eliminate_alpha: bool = True
    delta: dict[int, int] = field(default_factory=dict)
    alpha: dict[int, int] = field(default_factory=dict)
    beta: dict[tuple[int, int], int] = field(default_factory=dict)
    gamma: dict[tuple[int, int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError("a sentence needs at least one word")
        pos = 0
        for i in range(1, self.n + 1):
            self.delta[i] = pos
            pos += 1
        if not self.eliminate_alpha:
            for i in range(1, self.n + 1):
                self.alpha[i] = pos
                pos += 1
        for i, j in combinations(range(self.n + 1), 2):
            self.beta[i, j] = pos
            pos += 1
        for i, j, k in combinations(range(self.n + 1), 3):
            self.gamma[i, j, k] = pos
            pos += 1
        self.size = pos

    def names(self) -> tuple[str, ...]:
        out = [""] * self.size
        for i, p in self.delta.items():
            out[p] = f"d{i}"
        for i, p in self.alpha.items():
            out[p] = f"a{i}"
        for (i, j), p in self.beta.items():
            out[p] = f"b{i}_{j}"
        for (i, j, k), p in self.gamma.items():
            out[p] = f"g{i}_{j}_{k}"
        return tuple(out)

    def encode(self, subsequence: Sequence[int]) -> np.ndarray:
        """0/1 vector of a nonempty increasing subsequence of 1..n."""
        sel = list(subsequence)
        if not sel or sel != sorted(set(sel)) or sel[0] < 1 or sel[-1] > self.n:
            raise ValueError(f"not an increasing nonempty subsequence of 1..{self.n}: {sel}")
        x = np.zeros(self.size)
        for i in sel:
            x[self.delta[i]] = 1.0
        if self.alpha:
            x[self.alpha[sel[0]]] = 1.0
        chain = [0] + sel
        for t in range(len(chain) - 2):
            x[self.gamma[chain[t], chain[t + 1], chain[t + 2]]] = 1.0
        x[self.beta[chain[-2], chain[-1]]] = 1.0
        return x


@dataclass
class CompressionResult:
    selected: tuple[int, ...]
    tokens: tuple[str, ...]
    objective: float
    stats: dict = field(default_factory=dict)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


def length_bounds(rate: float, n: int) -> tuple[int, int]:
    """(l_low, l_up) for a target compression rate in (0, 1]."""
    if not 0.0 < rate <= 1.0:
        raise ConfigurationError(f"compression rate must lie in (0, 1], got {rate}")
    target = round(rate * n, 9)
    low = max(2, math.floor(target))
    return low, max(low, math.ceil(target))


def term_scores(tokens: Sequence[str], lm: NgramModel, score: str = "log"):
    """Per-term scores: start[k], trigram[i, j, k], end[i, j] (index 0 = start token)."""
    if score not in SCORES:
        raise ConfigurationError(f"score must be one of {SCORES}, got {score!r}")
    n = len(tokens)
    word = (START,) + tuple(tokens)
    f = math.log if score == "log" else float
    start = {k: f(lm.prob_start(word[k])) for k in range(1, n + 1)}
    tri = {(i, j, k): f(lm.prob_trigram(word[i], word[j], word[k]))
           for i, j, k in combinations(range(n + 1), 3)}
    end = {(i, j): f(lm.prob_end(word[i], word[j])) for i, j in combinations(range(n + 1), 2)}
    return start, tri, end


def build(tokens: Sequence[str], lm: NgramModel, len_bounds: tuple[int, int],
          fixing: Sequence[Fix] | None = None,
          phrase_spans: Sequence[tuple[int, Sequence[int]]] = (),
          score: str = "log", eliminate_alpha: bool = True):
    """Assemble the compression program; returns (program, indexing).

    Minimizing the program's objective maximizes the summed term scores of
    the chosen compression.  ``fixing`` pins kept/deleted words through their
    bounds; ``phrase_spans`` lists (introducing word, other words) pairs that
    must be kept or dropped together with their introducing word.
    """
    n = len(tokens)
    if n == 0:
        raise ConfigurationError("cannot compress an empty sentence")
    low, up = len_bounds
    if low < 1 or low > n:
        raise ConfigurationError(f"lower length bound {low} outside [1, {n}]")
    if up < low:
        raise ConfigurationError(f"length bounds ({low}, {up}) are inverted")
    if fixing is not None and len(fixing) != n:
        raise ConfigurationError("fixing must have one entry per word")

    idx = CompressionIndexing(n, eliminate_alpha)
    s_start, s_tri, s_end = term_scores(tokens, lm, score)
    N = idx.size
    c = np.zeros(N)
    for k in range(1, n + 1):
        if eliminate_alpha:
            c[idx.delta[k]] -= s_start[k]
        else:
            c[idx.alpha[k]] -= s_start[k]
    for (i, j, k), p in idx.gamma.items():
        c[p] -= s_tri[i, j, k]
        if eliminate_alpha:
            c[p] += s_start[k]
    for key, p in idx.beta.items():
        c[p] -= s_end[key]

    rows: list[tuple[dict[int, float], str, float]] = []

    def gammas_ending(k):
        return [p for (i, j, kk), p in idx.gamma.items() if kk == k]

    # one word begins the compression
    if eliminate_alpha:
        coef: dict[int, float] = {idx.delta[k]: 1.0 for k in range(1, n + 1)}
        for p in idx.gamma.values():
            coef[p] = coef.get(p, 0.0) - 1.0
        rows.append((coef, "=", 1.0))
    else:
        rows.append(({idx.alpha[k]: 1.0 for k in range(1, n + 1)}, "=", 1.0))
    # a kept word is first or ends a trigram
    for k in range(1, n + 1):
        coef = {idx.delta[k]: 1.0}
        for p in gammas_ending(k):
            coef[p] = -1.0
        if eliminate_alpha:
            rows.append((coef, ">=", 0.0))
        else:
            coef[idx.alpha[k]] = -1.0
            rows.append((coef, "=", 0.0))
    # a kept word is the middle of a trigram or the last word
    for j in range(1, n + 1):
        coef = {idx.delta[j]: 1.0}
        for (a, b, _), p in idx.gamma.items():
            if b == j:
                coef[p] = -1.0
        for (a, b), p in idx.beta.items():
            if b == j:
                coef[p] = -1.0
        rows.append((coef, "=", 0.0))
    # a kept word starts a trigram, or the final pair, or is the last word
    for i in range(1, n + 1):
        coef = {idx.delta[i]: 1.0}
        for (a, _, _), p in idx.gamma.items():
            if a == i:
                coef[p] = -1.0
        for (a, b), p in idx.beta.items():
            if a == i or b == i:
                coef[p] = -1.0
        rows.append((coef, "=", 0.0))
    # one pair ends the compression
    rows.append(({p: 1.0 for p in idx.beta.values()}, "=", 1.0))
    # length window
    length = {idx.delta[i]: 1.0 for i in range(1, n + 1)}
    rows.append((dict(length), ">=", float(low)))
    rows.append((dict(length), "<=", float(up)))
    # phrases hang on their introducing word
    for intro, members in phrase_spans:
        members = [j for j in members if j != intro]
        if not members:
            continue
        coef = {idx.delta[j]: 1.0 for j in members}
        coef[idx.delta[intro]] = -1.0
        rows.append((coef, ">=", 0.0))
        for j in members:
            rows.append(({idx.delta[intro]: 1.0, idx.delta[j]: -1.0}, ">=", 0.0))

    lb = np.zeros(N)
    ub = np.ones(N)
    if fixing is not None:
        dropped = set()
        for i, f in enumerate(fixing, start=1):
            f = Fix(f)
            if f is Fix.ONE:
                lb[idx.delta[i]] = 1.0
            elif f is Fix.ZERO:
                ub[idx.delta[i]] = 0.0
                dropped.add(i)
        if dropped:
            for key, p in list(idx.beta.items()) + list(idx.gamma.items()):
                if dropped.intersection(key):
                    ub[p] = 0.0

    A = np.zeros((len(rows), N))
    for r, (coef, _, _) in enumerate(rows):
        for p, a in coef.items():
            A[r, p] = a
    bp = BinaryLinearProgram(
        c=c, A=A, senses=tuple(s for _, s, _ in rows),
        b=np.array([rhs for _, _, rhs in rows], dtype=float),
        lb=lb, ub=ub, binary=np.ones(N, dtype=bool), names=idx.names(),
    )
    return bp, idx


def decode(x, idx: CompressionIndexing, tokens: Sequence[str],
           bp: BinaryLinearProgram | None = None, tol: float = 1e-6) -> CompressionResult:
    """Read the kept words off a binary solution and check its context variables."""
    x = np.asarray(x, dtype=float)
    if x.shape != (idx.size,):
        raise DecodeError(f"solution has {x.size} entries, expected {idx.size}")
    dist = np.minimum(np.abs(x), np.abs(1.0 - x))
    if np.any(dist > tol):
        bad = int(np.argmax(dist))
        raise DecodeError(f"coordinate {idx.names()[bad]} = {x[bad]} is not binary")
    snapped = np.round(x)
    selected = tuple(i for i in range(1, idx.n + 1) if snapped[idx.delta[i]] == 1.0)
    if not selected:
        raise IntegrityError("solution keeps no word")
    if not np.array_equal(idx.encode(selected), snapped):
        raise IntegrityError("context variables do not match the kept words")
    objective = float(-(bp.c @ snapped)) if bp is not None else math.nan
    return CompressionResult(selected, tuple(tokens[i - 1] for i in selected), objective)
