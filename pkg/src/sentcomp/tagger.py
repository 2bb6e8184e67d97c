"""Bigram HMM part-of-speech tagger over the closed label set.

Training tags may be Penn Treebank tags (mapped through ``PENN_MAP``) or the
closed labels themselves.  Probabilities use add-one smoothing; a known word
is restricted to the tags it was seen with, an unknown word gets the tag of
its shape.  Decoding is Viterbi in log space; ties resolve to the label
listed first in ``LEAF_TAGS``.
"""

from __future__ import annotations

import json
import logging
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigurationError

log = logging.getLogger(__name__)

# Row order of the label table; word-level tags first, phrase labels after.
LEAF_TAGS = (
    "ADJ", "ADV", "CC", "CD", "DT", "EX", "IN", "N", "P",
    "SYM", "TO", "V", "WDT", "WP", "WRB",
)
PHRASE_TAGS = (
    "ADJP", "ADVC", "ADVP", "ATTC", "CONJP", "NP", "OC", "PP",
    "QP", "S", "SBAR", "SC", "TOP", "VP",
)
TAGSET = frozenset(LEAF_TAGS + PHRASE_TAGS)

PENN_MAP = {
    "JJ": "ADJ", "JJR": "ADJ", "JJS": "ADJ",
    "RB": "ADV", "RBR": "ADV", "RBS": "ADV",
    "CC": "CC",
    "CD": "CD",
    "DT": "DT",
    "EX": "EX",
    "IN": "IN",
    "NN": "N", "NNP": "N", "NNPS": "N", "NNS": "N",
    # WP is listed under both P and WP; the dedicated WP row wins.
    "PRP": "P", "PRP$": "P", "WP$": "P",
    ".": "SYM", ",": "SYM", ":": "SYM", "!": "SYM", "?": "SYM", ";": "SYM",
    "TO": "TO",
    "MD": "V", "VB": "V", "VBD": "V", "VBG": "V", "VBN": "V", "VBP": "V", "VBZ": "V",
    "WDT": "WDT",
    "WP": "WP",
    "WRB": "WRB",
}

_PUNCT = re.compile(r"[^\w\s]+", re.UNICODE)


def map_tag(tag: str) -> str | None:
    """Closed-set label for a Penn tag (or a closed-set label), else None."""
    if tag in PENN_MAP:
        return PENN_MAP[tag]
    if tag in LEAF_TAGS:
        return tag
    return None


def shape_tag(word: str) -> str:
    if _PUNCT.fullmatch(word):
        return "SYM"
    if any(ch.isdigit() for ch in word):
        return "CD"
    return "N"


@dataclass
class TaggerModel:
    emissions: dict[str, Counter] = field(default_factory=dict)
    transitions: dict[str, Counter] = field(default_factory=dict)
    priors: Counter = field(default_factory=Counter)
    skipped: int = 0

    def __post_init__(self):
        self.tag_totals = {t: sum(self.emissions.get(t, Counter()).values()) for t in LEAF_TAGS}
        self.trans_totals = {t: sum(self.transitions.get(t, Counter()).values()) for t in LEAF_TAGS}
        self.words = frozenset(w for em in self.emissions.values() for w in em)
        self.n_sentences = sum(self.priors.values())

    def _log_trans(self, prev: str | None, tag: str) -> float:
        k = len(LEAF_TAGS)
        if prev is None:
            return math.log((self.priors[tag] + 1) / (self.n_sentences + k))
        c = self.transitions.get(prev, Counter())[tag]
        return math.log((c + 1) / (self.trans_totals[prev] + k))

    def _log_emit(self, tag: str, word: str) -> float:
        c = self.emissions.get(tag, Counter())[word]
        return math.log((c + 1) / (self.tag_totals[tag] + len(self.words) + 1))

    def _emission_row(self, word: str) -> list[float]:
        if word not in self.words and word.lower() in self.words:
            word = word.lower()
        if word in self.words:
            # a known word only takes tags it was seen with
            return [self._log_emit(t, word) if self.emissions.get(t, Counter())[word] else -math.inf
                    for t in LEAF_TAGS]
        forced = shape_tag(word)
        return [0.0 if t == forced else -math.inf for t in LEAF_TAGS]

    def tag(self, sentence: Sequence[str]) -> list[str]:
        if not sentence:
            return []
        k = len(LEAF_TAGS)
        emit = self._emission_row(sentence[0])
        score = [self._log_trans(None, t) + emit[i] for i, t in enumerate(LEAF_TAGS)]
        back: list[list[int]] = []
        trans = [[self._log_trans(p, t) for t in LEAF_TAGS] for p in LEAF_TAGS]
        for word in sentence[1:]:
            emit = self._emission_row(word)
            new, ptr = [], []
            for j in range(k):
                best, arg = -math.inf, 0
                for i in range(k):
                    s = score[i] + trans[i][j]
                    if s > best:
                        best, arg = s, i
                new.append(best + emit[j])
                ptr.append(arg)
            score = new
            back.append(ptr)
        last = max(range(k), key=lambda j: (score[j], -j))
        path = [last]
        for ptr in reversed(back):
            path.append(ptr[path[-1]])
        return [LEAF_TAGS[i] for i in reversed(path)]

    def to_json(self) -> dict:
        return {
            "emissions": {t: dict(c) for t, c in self.emissions.items()},
            "transitions": {t: dict(c) for t, c in self.transitions.items()},
            "priors": dict(self.priors),
            "skipped": self.skipped,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "TaggerModel":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls(
                emissions={t: Counter(c) for t, c in data["emissions"].items()},
                transitions={t: Counter(c) for t, c in data["transitions"].items()},
                priors=Counter(data["priors"]),
                skipped=data.get("skipped", 0),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigurationError(f"{path}: not a tagger model ({exc})") from None


def train_tagger(tagged_corpus: Iterable[Sequence[tuple[str, str]]]) -> TaggerModel:
    """Count emissions, tag bigrams and sentence-initial tags.

    Tokens whose tag has no closed-set label are dropped and counted in
    ``model.skipped``.
    """
    emissions: dict[str, Counter] = {}
    transitions: dict[str, Counter] = {}
    priors: Counter = Counter()
    skipped = kept = 0
    for sent in tagged_corpus:
        prev = None
        for word, tag in sent:
            label = map_tag(tag)
            if label is None:
                skipped += 1
                continue
            kept += 1
            emissions.setdefault(label, Counter())[word] += 1
            if prev is None:
                priors[label] += 1
            else:
                transitions.setdefault(prev, Counter())[label] += 1
            prev = label
    if kept == 0:
        raise ConfigurationError("tagged corpus has no token with a mappable tag")
    if skipped:
        log.warning("skipped %d tokens with unmapped tags", skipped)
    return TaggerModel(emissions, transitions, priors, skipped)


def parse_tagged_line(line: str) -> list[tuple[str, str]]:
    """``word/TAG word/TAG ...``; the last slash separates word and tag."""
    out = []
    for item in line.split():
        word, sep, tag = item.rpartition("/")
        if not sep or not word or not tag:
            raise ConfigurationError(f"malformed tagged token {item!r}")
        out.append((word, tag))
    return out


def read_tagged_corpus(path) -> list[list[tuple[str, str]]]:
    text = Path(path).read_text(encoding="utf-8")
    return [parse_tagged_line(line) for line in text.splitlines() if line.strip()]
