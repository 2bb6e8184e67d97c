import csv

import pytest

from sentcomp import ngram
from sentcomp.errors import ConfigurationError, InfeasibleError
from sentcomp.grammar import Production, load_grammar
from sentcomp.ilp import length_bounds
from sentcomp.pipeline import (
    REPORT_FIELDS, SENTENCE_FIELDS, Compressor, PipelineConfig, evaluate, format_report, read_gold,
)
from sentcomp.rules import Fix
from sentcomp.tokens import tokenize

EXAMPLE = "This is an example to test sentence compression with MIP model ."
TRUNK = "This is an example to test sentence compression".split()
SENTENCES = [
    EXAMPLE,
    "The aim is to give councils control over the growth of homes .",
    "I shot an elephant in my pajamas .",
    "The man saw the dog with the telescope .",
]


@pytest.fixture(scope="module")
def comp():
    return Compressor(PipelineConfig())


def _is_subsequence(small, big):
    it = iter(big)
    return all(w in it for w in small)


def test_trunk_is_fixed_and_kept(comp):
    res = comp.compress(EXAMPLE)
    fixed = [w for w, f in zip(tokenize(EXAMPLE), res.stats["fixing"]) if f == Fix.ONE.value]
    assert fixed == TRUNK + ["."]
    assert _is_subsequence(TRUNK, res.tokens)


def test_rate_one_is_identity(comp):
    for s in SENTENCES:
        for model in ("prob", "hybrid"):
            res = Compressor(PipelineConfig(rate=1.0), comp.lm, comp.tagger).compress(s, model=model)
            assert res.tokens == tokenize(s)


def test_all_keep_grammar_ignores_lm(comp):
    keep_all = [Production(p.lhs, p.rhs, (1,) * len(p.rhs)) for p in load_grammar()]
    odd_lm = ngram.train([("compression", "MIP"), ("with", "This", "model")])
    toks = tokenize(EXAMPLE)
    c = Compressor(PipelineConfig(rate=0.95), odd_lm, comp.tagger, keep_all)
    assert length_bounds(0.95, len(toks))[1] == len(toks)
    assert c.compress(toks).tokens == toks


def test_hybrid_keeps_fixed_words_and_rate(comp):
    for rate in (0.7, 0.9):
        c = Compressor(PipelineConfig(rate=rate), comp.lm, comp.tagger)
        for s in SENTENCES:
            toks = tokenize(s)
            low, up = length_bounds(rate, len(toks))
            try:
                res = c.compress(toks)
            except InfeasibleError:
                continue
            assert low <= len(res.selected) <= up
            fixing = res.stats.get("fixing")
            if fixing:
                for i, f in enumerate(fixing, start=1):
                    if f == Fix.ONE.value:
                        assert i in res.selected
                    elif f == Fix.ZERO.value:
                        assert i not in res.selected


def test_fallback_equals_prob(comp):
    s = "Is this an example ?"
    hybrid = comp.compress(s)
    assert hybrid.stats["fallback"] and "warning" in hybrid.stats
    prob = comp.compress(s, model="prob")
    assert hybrid.selected == prob.selected


def test_errors(comp):
    with pytest.raises(ConfigurationError):
        comp.compress("Hi")
    with pytest.raises(InfeasibleError, match="raise the compression rate"):
        Compressor(PipelineConfig(rate=0.5), comp.lm, comp.tagger).compress(EXAMPLE)
    with pytest.raises(ConfigurationError):
        PipelineConfig(rate=0.0)
    with pytest.raises(ConfigurationError):
        PipelineConfig(model="neural")
    with pytest.raises(ConfigurationError):
        PipelineConfig(lm_path="/nonexistent/model")


def test_stats_fields(comp):
    st = comp.compress(EXAMPLE).stats
    for key in ("model", "length_bounds", "parse", "trunk", "nodes", "restarts", "lp_solves", "wall_time",
                "variables", "rows", "seconds"):
        assert key in st


def _gold(tmp_path, rows):
    p = tmp_path / "gold.tsv"
    p.write_text("".join(r + "\n" for r in rows), encoding="utf-8")
    return p


def test_evaluate_identity(tmp_path, comp):
    gold = _gold(tmp_path, [f"{EXAMPLE}\t{EXAMPLE}", "malformed row", ""])
    out = tmp_path / "per.csv"
    rep = evaluate(gold, PipelineConfig(rate=1.0), csv_path=out, compressor=comp)
    assert rep["skipped"] == 1
    row = rep["rows"][0]
    assert row["mean_F"] == 1.0 and row["solved"] == 1 and row["failed"] == 0
    assert set(row) == set(REPORT_FIELDS)
    lines = list(csv.DictReader(open(out, encoding="utf-8")))
    assert list(lines[0]) == list(SENTENCE_FIELDS) and lines[0]["status"] == "ok"
    assert format_report(rep).splitlines()[0].split("\t") == list(REPORT_FIELDS)


def test_evaluate_grid_and_failures(tmp_path, comp):
    gold = _gold(tmp_path, [f"{EXAMPLE}\t{' '.join(TRUNK)} .", f"{SENTENCES[3]}\tThe man saw the dog ."])
    rep = evaluate(gold, PipelineConfig(), models=["prob", "hybrid"], rates=[0.5, 0.9], compressor=comp)
    assert [(r["model"], r["rate"]) for r in rep["rows"]] == [
        ("prob", 0.5), ("prob", 0.9), ("hybrid", 0.5), ("hybrid", 0.9)]
    hybrid_half = rep["rows"][2]
    assert hybrid_half["failed"] >= 1  # the trunk alone exceeds half the sentence
    assert hybrid_half["solved"] + hybrid_half["failed"] == 2
    for r in rep["rows"]:
        assert r["solved"] == 0 or 0.0 <= r["mean_F"] <= 1.0


def test_evaluate_empty(tmp_path):
    with pytest.raises(ConfigurationError):
        evaluate(_gold(tmp_path, []), PipelineConfig())


def test_read_gold(tmp_path):
    pairs, skipped = read_gold(_gold(tmp_path, ["a b\ta", "x\t", "only", "c\td"]))
    assert pairs == [("a b", "a"), ("c", "d")] and skipped == 2
