"""Token-overlap precision, recall and F-measure between two compressions."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class EvalReport:
    A: int  # tokens in both
    B: int  # reference only
    C: int  # candidate only
    P: float
    R: float
    F: float
    mu: float = 1.0
    compression_rate: float | None = None


def f_measure(P: float, R: float, mu: float = 1.0) -> float:
    denom = mu * mu * P + R
    if denom == 0:
        return 0.0
    return (mu * mu + 1.0) * P * R / denom


def fscore(candidate: Sequence[str], reference: Sequence[str], mu: float = 1.0,
           original: Sequence[str] | None = None) -> EvalReport:
    """Multiset overlap: case-sensitive, punctuation tokens count like words.

    Two empty sequences agree perfectly (F = 1); otherwise no overlap gives 0.
    """
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    cand, ref = Counter(candidate), Counter(reference)
    A = sum((cand & ref).values())
    B = sum(ref.values()) - A
    C = sum(cand.values()) - A
    if A == 0:
        both_empty = not candidate and not reference
        P = R = F = 1.0 if both_empty else 0.0
        if not both_empty:
            P = 0.0 if candidate else 1.0
            R = 0.0 if reference else 1.0
    else:
        P = A / (A + C)
        R = A / (A + B)
        F = f_measure(P, R, mu)
    rate = compression_rate(candidate, original) if original is not None else None
    return EvalReport(A, B, C, P, R, F, mu, rate)


def compression_rate(candidate: Sequence[str], original: Sequence[str]) -> float:
    if not original:
        raise ValueError("original sentence is empty")
    return len(candidate) / len(original)
