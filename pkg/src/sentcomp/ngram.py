"""Trigram language model with interpolated Kneser-Ney smoothing.

Sentences are padded as ``<s> w1 ... wn </s>``.  The highest order used by a
query works on raw counts; every lower order works on continuation counts
(the number of distinct left contexts a suffix was seen with).  The chain
ends in a uniform distribution over the vocabulary plus the end marker, so
every query returns a strictly positive value.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigurationError
from .tokens import END, MARKERS, START, check_tokens, tokenize

DEFAULT_DISCOUNT = 0.75
HEADER = "ngram-model v1 discount="


@dataclass
class NgramModel:
    discount: float
    counts: dict[int, Counter] = field(default_factory=dict)
    order: int = 3

    def __post_init__(self):
        if not 0.0 < self.discount < 1.0:
            raise ConfigurationError(f"discount must lie in (0, 1), got {self.discount}")
        for n in (1, 2, 3):
            self.counts.setdefault(n, Counter())
        self._index()

    def _index(self):
        uni, bi, tri = self.counts[1], self.counts[2], self.counts[3]
        self.vocabulary = frozenset(w for (w,) in uni if w not in MARKERS)
        self._n_outcomes = len(self.vocabulary) + 1  # words plus </s>

        # trigram contexts: total count and number of distinct followers
        self._tri_ctx = Counter()
        self._tri_types = Counter()
        for (u, v, w), c in tri.items():
            self._tri_ctx[u, v] += c
            self._tri_types[u, v] += 1

        # bigram contexts on raw counts (top order for P(w | <s>))
        self._bi_ctx = Counter()
        self._bi_types = Counter()
        for (v, w), c in bi.items():
            self._bi_ctx[v] += c
            self._bi_types[v] += 1

        # continuation counts N1+(. v w) for the middle order
        self._cont2 = Counter((v, w) for (_, v, w) in tri)
        self._cont2_ctx = Counter()
        self._cont2_types = Counter()
        for (v, w), c in self._cont2.items():
            self._cont2_ctx[v] += c
            self._cont2_types[v] += 1

        # continuation counts N1+(. w) for the lowest order
        self._cont1 = Counter(w for (_, w) in bi)
        self._cont1_total = sum(self._cont1.values())
        self._cont1_types = len(self._cont1)

    # -- raw estimates ------------------------------------------------------

    def count(self, *ngram: str) -> int:
        return self.counts[len(ngram)][tuple(ngram)]

    def mle(self, context: Sequence[str], word: str) -> float:
        """Unsmoothed ratio count(context + word) / count(context as a prefix)."""
        context = tuple(context)
        if len(context) == 1:
            total = self._bi_ctx[context[0]]
        elif len(context) == 2:
            total = self._tri_ctx[context]
        else:
            raise ValueError("context must hold one or two tokens")
        if total == 0:
            return 0.0
        return self.counts[len(context) + 1][context + (word,)] / total

    # -- smoothed levels ----------------------------------------------------

    def _p_uniform(self) -> float:
        return 1.0 / self._n_outcomes

    def _p_unigram(self, w: str) -> float:
        d = self.discount
        if self._cont1_total == 0:
            return self._p_uniform()
        head = max(self._cont1[w] - d, 0.0) / self._cont1_total
        backoff = d * self._cont1_types / self._cont1_total
        return head + backoff * self._p_uniform()

    def _p_bigram_cont(self, v: str, w: str) -> float:
        total = self._cont2_ctx[v]
        if total == 0:
            return self._p_unigram(w)
        d = self.discount
        head = max(self._cont2[v, w] - d, 0.0) / total
        backoff = d * self._cont2_types[v] / total
        return head + backoff * self._p_unigram(w)

    def _p_bigram_raw(self, v: str, w: str) -> float:
        total = self._bi_ctx[v]
        if total == 0:
            return self._p_unigram(w)
        d = self.discount
        head = max(self.counts[2][v, w] - d, 0.0) / total
        backoff = d * self._bi_types[v] / total
        return head + backoff * self._p_unigram(w)

    def _p_trigram(self, u: str, v: str, w: str) -> float:
        total = self._tri_ctx[u, v]
        if total == 0:
            return self._p_bigram_cont(v, w)
        d = self.discount
        head = max(self.counts[3][u, v, w] - d, 0.0) / total
        backoff = d * self._tri_types[u, v] / total
        return head + backoff * self._p_bigram_cont(v, w)

    # -- the three queries of the compression objective ---------------------

    def prob_start(self, w: str) -> float:
        """P(w | <s>) from the bigram level."""
        _check_word(w)
        return self._p_bigram_raw(START, w)

    def prob_trigram(self, w1: str, w2: str, w3: str) -> float:
        """P(w3 | w1, w2); ``w1`` may be the start marker."""
        if w1 != START:
            _check_word(w1)
        _check_word(w2)
        _check_word(w3)
        return self._p_trigram(w1, w2, w3)

    def prob_end(self, w1: str, w2: str) -> float:
        """P(</s> | w1, w2); ``w1`` may be the start marker."""
        if w1 != START:
            _check_word(w1)
        _check_word(w2)
        return self._p_trigram(w1, w2, END)

    def contexts(self) -> list[tuple[str, str]]:
        return sorted(self._tri_ctx)

    # -- persistence --------------------------------------------------------

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{HEADER}{self.discount!r}\n")
            for n in (1, 2, 3):
                for gram, c in sorted(self.counts[n].items()):
                    fh.write(f"{n}\t{' '.join(gram)}\t{c}\n")

    @classmethod
    def load(cls, path) -> "NgramModel":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if not header.startswith(HEADER):
                raise ConfigurationError(f"{path}: not an ngram model file")
            discount = float(header[len(HEADER):])
            counts: dict[int, Counter] = {1: Counter(), 2: Counter(), 3: Counter()}
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    n, gram, c = line.split("\t")
                    gram = tuple(gram.split(" "))
                    n = int(n)
                    if len(gram) != n or n not in counts:
                        raise ValueError
                    counts[n][gram] = int(c)
                except ValueError:
                    raise ConfigurationError(f"{path}:{lineno}: malformed count line") from None
        return cls(discount=discount, counts=counts)


def _check_word(w: str) -> None:
    if w in MARKERS:
        raise ValueError(f"sentence marker {w!r} is not a valid word query")


def train(corpus: Iterable[Sequence[str]], discount: float = DEFAULT_DISCOUNT) -> NgramModel:
    """Count 1/2/3-grams over padded sentences and wrap them in a model."""
    if not 0.0 < discount < 1.0:
        raise ConfigurationError(f"discount must lie in (0, 1), got {discount}")
    counts: dict[int, Counter] = defaultdict(Counter)
    n_sent = 0
    for sent in corpus:
        toks = check_tokens(sent)
        if not toks:
            continue
        n_sent += 1
        padded = (START,) + toks + (END,)
        for n in (1, 2, 3):
            for i in range(len(padded) - n + 1):
                counts[n][padded[i:i + n]] += 1
    if n_sent == 0:
        raise ConfigurationError("cannot train a language model on an empty corpus")
    return NgramModel(discount=discount, counts=dict(counts))


def read_corpus(path) -> list[tuple[str, ...]]:
    """One sentence per line, UTF-8; blank lines are skipped."""
    text = Path(path).read_text(encoding="utf-8")
    return [tokenize(line) for line in text.splitlines() if line.strip()]
