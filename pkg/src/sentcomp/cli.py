"""Command-line entry point: ``sentcomp <command> ...``.

Exit codes: 0 success, 2 no feasible compression, 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import ngram
from .bench import benchmark, random_suite
from .bnb import SolverConfig
from .dca import DcaConfig, PenaltyKind
from .errors import ConfigurationError, GrammarError, InfeasibleError
from .grammar import CfgGrammar, generate_grammar, load_grammar, parse
from .pipeline import Compressor, PipelineConfig, default_tagger, evaluate, format_report
from .tagger import TaggerModel, parse_tagged_line, read_tagged_corpus, train_tagger
from .tokens import tokenize

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3

NODE_SELECT = {"best": "best_bound", "depth": "depth_first"}
BRANCH = {"half": "closest_to_half", "infeas": "max_infeasibility", "cost": "max_cost"}


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_model_paths(p, grammar=True, lm=True):
    if lm:
        p.add_argument("--lm", help="language model file (default: bundled demo model)")
    if grammar:
        p.add_argument("--grammar", help="grammar file (default: bundled statement grammar)")
    p.add_argument("--tagger", help="tagger model file (default: bundled demo tagger)")


def _add_compress_flags(p):
    _add_model_paths(p)
    p.add_argument("--rate", type=float, default=0.7)
    p.add_argument("--model", choices=("prob", "hybrid"), default="hybrid")
    p.add_argument("--score", choices=("log", "raw"), default="log")
    p.add_argument("--penalty", choices=("p1", "p2", "p3"), default="p2")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--t", type=float, default=1e5, help="penalty weight")
    p.add_argument("--t-increase", action="store_true", help="multiply t by 10 while DCA ends non-binary")
    p.add_argument("--eps3", type=float, default=None)
    p.add_argument("--eps4", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--node-select", choices=tuple(NODE_SELECT), default="best")
    p.add_argument("--branch", choices=tuple(BRANCH), default="half")
    p.add_argument("--stats", action="store_true", help="print solver statistics as JSON")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sentcomp", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-lm", help="train a trigram language model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--discount", type=float, default=ngram.DEFAULT_DISCOUNT)

    p = sub.add_parser("train-tagger", help="train the part-of-speech tagger")
    p.add_argument("--corpus", required=True, help="word/TAG lines")
    p.add_argument("--out", required=True)

    p = sub.add_parser("tag", help="tag a sentence")
    p.add_argument("--tagger")
    p.add_argument("--text", required=True)

    p = sub.add_parser("parse", help="parse a sentence with the compression grammar")
    _add_model_paths(p, lm=False)
    p.add_argument("--text", required=True, help="plain text, or word/TAG tokens with --pretagged")
    p.add_argument("--pretagged", action="store_true")
    p.add_argument("--all", action="store_true", help="print every parse, not just the first")

    p = sub.add_parser("compress", help="compress one sentence")
    _add_compress_flags(p)
    p.add_argument("--text", required=True)
    p.add_argument("--pretagged", action="store_true")

    p = sub.add_parser("evaluate", help="F-scores against a gold TSV (original, reference)")
    _add_compress_flags(p)
    p.add_argument("--gold", required=True)
    p.add_argument("--rates", type=_float_list, help="comma-separated rates (overrides --rate)")
    p.add_argument("--models", type=_str_list, help="comma-separated models (overrides --model)")
    p.add_argument("--csv", help="write per-sentence results here")
    p.add_argument("--mu", type=float, default=1.0)

    p = sub.add_parser("benchmark", help="solver against brute force on random binary programs")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--vars", type=int, default=12)
    p.add_argument("--rows", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--vary", action="store_true", help="draw sizes up to --vars/--rows")
    return ap


def _pipeline_config(args) -> PipelineConfig:
    solver = SolverConfig(
        workers=args.workers, eps3=args.eps3, eps4=args.eps4,
        node_selection=NODE_SELECT[args.node_select], branching=BRANCH[args.branch], seed=args.seed,
        dca=DcaConfig(t=args.t, penalty=PenaltyKind(args.penalty), increase_t=args.t_increase),
    )
    return PipelineConfig(
        model=args.model, rate=args.rate, score=args.score, penalty=args.penalty, solver=solver,
        lm_path=args.lm, tagger_path=args.tagger, grammar_path=args.grammar,
    )


def _load_tagger(path):
    return TaggerModel.load(path) if path else default_tagger()


def _tokens_and_tags(args):
    if getattr(args, "pretagged", False):
        pairs = parse_tagged_line(args.text)
        return tuple(w for w, _ in pairs), [t for _, t in pairs]
    return tokenize(args.text), None


def run(args) -> int:
    cmd = args.command
    if cmd == "train-lm":
        model = ngram.train(ngram.read_corpus(args.corpus), args.discount)
        model.save(args.out)
        print(f"trained on {model.count(ngram.START)} sentences, {len(model.vocabulary)} word types")
    elif cmd == "train-tagger":
        model = train_tagger(read_tagged_corpus(args.corpus))
        model.save(args.out)
        print(f"trained on {model.n_sentences} sentences, skipped {model.skipped} tokens")
    elif cmd == "tag":
        toks = tokenize(args.text)
        tags = _load_tagger(args.tagger).tag(toks)
        print(" ".join(f"{w}/{t}" for w, t in zip(toks, tags)))
    elif cmd == "parse":
        toks, tags = _tokens_and_tags(args)
        if tags is None:
            tags = _load_tagger(args.tagger).tag(toks)
        grammar: CfgGrammar = generate_grammar(tags, toks, load_grammar(args.grammar))
        trees = parse(grammar, toks, tags, mode="all" if args.all else "first")
        if not trees:
            print("no parse", file=sys.stderr)
            return EXIT_INFEASIBLE
        for tree in trees:
            print(tree)
    elif cmd == "compress":
        toks, tags = _tokens_and_tags(args)
        comp = Compressor(_pipeline_config(args))
        res = comp.compress(toks, tags)
        print(res.text)
        if args.stats:
            stats = {k: v for k, v in res.stats.items()}
            stats["objective"] = res.objective
            stats["selected"] = list(res.selected)
            print(json.dumps(stats, default=list, sort_keys=True))
    elif cmd == "evaluate":
        cfg = _pipeline_config(args)
        report = evaluate(args.gold, cfg, models=args.models, rates=args.rates, csv_path=args.csv, mu=args.mu)
        print(format_report(report))
        if report["skipped"]:
            print(f"skipped {report['skipped']} malformed rows", file=sys.stderr)
    elif cmd == "benchmark":
        suite = random_suite(args.instances, args.vars, args.rows, args.seed, vary=args.vary)
        rows = benchmark(suite, SolverConfig(workers=args.workers, seed=args.seed))
        print("instance\tvars\trows\tvalue\tseconds\tnodes\tbrute_force\tagree")
        for r in rows:
            print(f"{r.instance}\t{r.n_vars}\t{r.n_rows}\t{r.value!r}\t{r.seconds:.4f}\t{r.nodes}\t"
                  f"{r.brute_force!r}\t{r.agree}")
        checked = [r for r in rows if r.agree is not None]
        print(f"agreement {sum(r.agree for r in checked)}/{len(checked)}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigurationError, GrammarError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
