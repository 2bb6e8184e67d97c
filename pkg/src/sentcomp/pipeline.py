"""End-to-end compression: tokenize, optionally parse and fix words, build, solve, decode."""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import ngram
from .bnb import OPTIMAL, SolverConfig, solve
from .dca import PenaltyKind
from .errors import ConfigurationError, InfeasibleError
from .fscore import fscore
from .grammar import Production, generate_grammar, load_grammar, parse
from .ilp import CompressionResult, build, decode, length_bounds
from .rules import Fix, fix_deltas, label_tree, phrase_spans, sentence_trunk
from .tagger import TaggerModel, parse_tagged_line, train_tagger
from .tokens import tokenize

log = logging.getLogger(__name__)

MODELS = ("prob", "hybrid")


@dataclass
class PipelineConfig:
    model: str = "hybrid"
    rate: float = 0.7
    score: str = "log"
    penalty: PenaltyKind = PenaltyKind.P2
    solver: SolverConfig = field(default_factory=SolverConfig)
    lm_path: str | None = None
    tagger_path: str | None = None
    grammar_path: str | None = None
    include_preterminal: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigurationError(f"model must be one of {MODELS}, got {self.model!r}")
        if not 0.0 < self.rate <= 1.0:
            raise ConfigurationError(f"compression rate must lie in (0, 1], got {self.rate}")
        self.penalty = PenaltyKind(self.penalty)
        for p in (self.lm_path, self.tagger_path, self.grammar_path):
            if p is not None and not Path(p).is_file():
                raise ConfigurationError(f"no such file: {p}")


def _data_text(name: str) -> str:
    return resources.files("sentcomp").joinpath("data").joinpath(name).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def default_lm() -> ngram.NgramModel:
    """Language model trained on the small bundled corpus."""
    lines = _data_text("seed_corpus.txt").splitlines()
    return ngram.train(tokenize(s) for s in lines if s.strip())


@lru_cache(maxsize=1)
def default_tagger() -> TaggerModel:
    """Tagger trained on the small bundled Penn-tagged corpus."""
    lines = _data_text("seed_tagged.txt").splitlines()
    return train_tagger(parse_tagged_line(s) for s in lines if s.strip())


class Compressor:
    """Holds the loaded models for repeated compression."""

    def __init__(self, cfg: PipelineConfig, lm: ngram.NgramModel | None = None,
                 tagger: TaggerModel | None = None, templates: Sequence[Production] | None = None):
        self.cfg = cfg
        if lm is None:
            lm = ngram.NgramModel.load(cfg.lm_path) if cfg.lm_path else default_lm()
        if tagger is None:
            tagger = TaggerModel.load(cfg.tagger_path) if cfg.tagger_path else default_tagger()
        if templates is None:
            templates = load_grammar(cfg.grammar_path)
        self.lm = lm
        self.tagger = tagger
        self.templates = list(templates)

    def solver_config(self) -> SolverConfig:
        s = self.cfg.solver
        return replace(s, dca=replace(s.dca, penalty=self.cfg.penalty))

    def analyse(self, tokens: Sequence[str], tags: Sequence[str] | None = None):
        """(tree, fixing, spans) for the hybrid model, or None when the sentence has no parse."""
        if tags is None:
            tags = self.tagger.tag(tokens)
        grammar = generate_grammar(tags, tokens, self.templates)
        trees = parse(grammar, tokens, tags, mode="first")
        if not trees:
            return None
        tree = trees[0]
        fixing = fix_deltas(label_tree(tree), self.cfg.include_preterminal)
        return tree, fixing, phrase_spans(tree)

    def compress(self, sentence: str | Sequence[str], tags: Sequence[str] | None = None,
                 model: str | None = None) -> CompressionResult:
        t0 = time.perf_counter()
        tokens = tokenize(sentence) if isinstance(sentence, str) else tuple(sentence)
        n = len(tokens)
        if n < 2:
            raise ConfigurationError("a sentence needs at least two tokens to be compressed")
        model = model or self.cfg.model
        low, up = length_bounds(self.cfg.rate, n)
        if low > n:
            raise ConfigurationError(f"sentence of {n} tokens cannot reach {low} kept words")
        stats: dict = {"model": model, "length_bounds": (low, up)}
        fixing = None
        spans: list = []
        if model == "hybrid":
            analysis = self.analyse(tokens, tags)
            if analysis is None:
                log.warning("no parse for %r; falling back to the probabilistic model", " ".join(tokens))
                stats["fallback"] = True
                stats["warning"] = "no parse; solved with the probabilistic model"
                stats["model"] = "prob"
            else:
                tree, fixing, spans = analysis
                stats["parse"] = str(tree)
                stats["fixing"] = [f.value for f in fixing]
                stats["trunk"] = sentence_trunk(fixing, tokens)
                kept = sum(f is Fix.ONE for f in fixing)
                if kept > up:
                    raise InfeasibleError(
                        f"{kept} words are fixed by the parse but the rate allows at most {up}; "
                        "raise the compression rate"
                    )
        bp, idx = build(tokens, self.lm, (low, up), fixing, spans, score=self.cfg.score)
        res = solve(bp, self.solver_config())
        if res.status != OPTIMAL or res.x is None:
            raise InfeasibleError(
                f"no compression of {low}..{up} words satisfies the constraints; raise the compression rate"
            )
        out = decode(res.x, idx, tokens, bp)
        stats.update(res.stats.as_dict())
        stats["variables"] = bp.n
        stats["rows"] = bp.m
        stats["seconds"] = time.perf_counter() - t0
        out.stats = stats
        return out


def compress(sentence: str, cfg: PipelineConfig | None = None) -> CompressionResult:
    return Compressor(cfg or PipelineConfig()).compress(sentence)


# -- evaluation -------------------------------------------------------------------

def read_gold(path) -> tuple[list[tuple[str, str]], int]:
    """Rows of (original, reference) and the number of malformed rows skipped."""
    pairs, skipped = [], 0
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0].strip() or not cols[1].strip():
                skipped += 1
                continue
            pairs.append((cols[0], cols[1]))
    return pairs, skipped


REPORT_FIELDS = ("model", "rate", "sentences", "solved", "failed", "mean_P", "mean_R", "mean_F",
                 "mean_time", "mean_rate", "mean_reference_rate")
SENTENCE_FIELDS = ("model", "rate", "index", "original", "reference", "candidate", "P", "R", "F",
                   "seconds", "status")


def _mean(xs):
    return sum(xs) / len(xs) if xs else math.nan


def evaluate(gold_file, cfg: PipelineConfig, models: Sequence[str] | None = None,
             rates: Sequence[float] | None = None, csv_path=None, mu: float = 1.0,
             compressor: Compressor | None = None) -> dict:
    """Compress every gold sentence per (model, rate) and average P/R/F and time.

    Sentences that fail (no feasible compression or bad input) are counted in
    ``failed`` and left out of the means.
    """
    pairs, skipped = read_gold(gold_file)
    if not pairs:
        raise ConfigurationError(f"{gold_file}: no usable gold rows")
    models = list(models or [cfg.model])
    rates = list(rates or [cfg.rate])
    base = compressor or Compressor(cfg)
    summary, per_sentence = [], []
    for model in models:
        for rate in rates:
            comp = Compressor(replace(cfg, model=model, rate=rate), base.lm, base.tagger, base.templates)
            P, R, F, T, CR, RR = [], [], [], [], [], []
            failed = 0
            for k, (orig, ref) in enumerate(pairs):
                ref_toks = tokenize(ref)
                orig_toks = tokenize(orig)
                t0 = time.perf_counter()
                try:
                    res = comp.compress(orig_toks)
                    status = "ok"
                    cand = res.tokens
                except (InfeasibleError, ConfigurationError) as exc:
                    status = f"failed: {exc}"
                    cand = None
                dt = time.perf_counter() - t0
                row = {"model": model, "rate": rate, "index": k, "original": orig, "reference": ref,
                       "candidate": "", "P": "", "R": "", "F": "", "seconds": f"{dt:.6f}", "status": status}
                if cand is None:
                    failed += 1
                else:
                    rep = fscore(cand, ref_toks, mu)
                    P.append(rep.P)
                    R.append(rep.R)
                    F.append(rep.F)
                    T.append(dt)
                    CR.append(len(cand) / len(orig_toks))
                    RR.append(len(ref_toks) / len(orig_toks))
                    row.update(candidate=" ".join(cand), P=f"{rep.P:.6f}", R=f"{rep.R:.6f}", F=f"{rep.F:.6f}")
                per_sentence.append(row)
            summary.append({
                "model": model, "rate": rate, "sentences": len(pairs), "solved": len(F), "failed": failed,
                "mean_P": _mean(P), "mean_R": _mean(R), "mean_F": _mean(F), "mean_time": _mean(T),
                "mean_rate": _mean(CR), "mean_reference_rate": _mean(RR),
            })
    if csv_path is not None:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=SENTENCE_FIELDS)
            w.writeheader()
            w.writerows(per_sentence)
    return {"rows": summary, "skipped": skipped, "sentences": per_sentence}


def format_report(report: dict) -> str:
    lines = ["\t".join(REPORT_FIELDS)]
    for row in report["rows"]:
        vals = []
        for f in REPORT_FIELDS:
            v = row[f]
            vals.append(f"{v:.6f}" if isinstance(v, float) and f != "rate" else str(v))
        lines.append("\t".join(vals))
    return "\n".join(lines)
