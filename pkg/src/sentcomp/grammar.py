"""Context-free grammars with per-child compression labels, and a parser.

A grammar file holds one production per line::

    VP -> V NP PP : 1 1 2
    DT -> "an"

The numbers after the colon are the compression labels of the right-hand
side symbols (0 delete, 1 keep, 2 let the optimizer decide).  They default
to all 1 when omitted.  Quoted symbols are terminals matched against words.

Parsing is top-down recursive descent, memoized on (symbol, span).  Parses
come back in depth-first order: alternatives are tried in production order,
leftmost symbol first, which is what a backtracking parser would find.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

from .errors import GrammarError

START_SYMBOL = "S"
MAX_PARSES = 64


def is_terminal(symbol: str) -> bool:
    return len(symbol) >= 2 and symbol[0] == symbol[-1] == '"'


def terminal(word: str) -> str:
    return f'"{word}"'


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple[str, ...]
    rule: tuple[int, ...]

    def __post_init__(self):
        if not self.rhs:
            raise GrammarError(f"empty right-hand side for {self.lhs}")
        if len(self.rule) != len(self.rhs):
            raise GrammarError(
                f"{self.lhs} -> {' '.join(self.rhs)}: {len(self.rule)} labels for {len(self.rhs)} symbols"
            )
        if any(r not in (0, 1, 2) for r in self.rule):
            raise GrammarError(f"compression labels must be 0, 1 or 2: {self.rule}")

    @property
    def is_lexical(self) -> bool:
        return len(self.rhs) == 1 and is_terminal(self.rhs[0])

    def __str__(self):
        return f"{self.lhs} -> {' '.join(self.rhs)} : {' '.join(map(str, self.rule))}"


@dataclass
class CfgGrammar:
    productions: list[Production]
    start: str = START_SYMBOL

    def __post_init__(self):
        self.by_lhs: dict[str, list[tuple[int, Production]]] = {}
        for i, p in enumerate(self.productions):
            self.by_lhs.setdefault(p.lhs, []).append((i, p))

    def nonterminals(self) -> set[str]:
        return set(self.by_lhs)

    def __str__(self):
        return "\n".join(map(str, self.productions))


def parse_production(line: str) -> Production:
    head, arrow, body = line.partition("->")
    if not arrow:
        raise GrammarError(f"missing '->' in {line!r}")
    lhs = head.strip()
    if not lhs or len(lhs.split()) != 1:
        raise GrammarError(f"bad left-hand side in {line!r}")
    symbols_part, colon, rule_part = body.rpartition(":")
    if not colon or '"' in rule_part:
        symbols_part, rule_part = body, ""
    rhs = tuple(symbols_part.split())
    if rule_part.strip():
        try:
            rule = tuple(int(tok) for tok in rule_part.split())
        except ValueError:
            raise GrammarError(f"bad compression labels in {line!r}") from None
    else:
        rule = (1,) * len(rhs)
    return Production(lhs, rhs, rule)


def parse_grammar_text(text: str) -> list[Production]:
    prods = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            prods.append(parse_production(line))
        except GrammarError as exc:
            raise GrammarError(f"line {lineno}: {exc}") from None
    return prods


def load_grammar(path=None) -> list[Production]:
    """Read a grammar file; with no path, the bundled statement grammar."""
    if path is None:
        text = resources.files("sentcomp").joinpath("data").joinpath("statements.grammar").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_grammar_text(text)


def generate_grammar(tags: Sequence[str], tokens: Sequence[str],
                     templates: Iterable[Production], start: str = START_SYMBOL) -> CfgGrammar:
    """Sentence-specific grammar: useful templates plus one lexical rule per token.

    A template survives when every symbol of its right-hand side can derive
    part of this sentence (an observed tag, a word of the sentence, or a
    nonterminal that itself survives).
    """
    if len(tags) != len(tokens):
        raise ValueError("tags and tokens differ in length")
    templates = list(templates)
    words = set(tokens)
    productive = set(tags) | {terminal(w) for w in words}
    changed = True
    while changed:
        changed = False
        for p in templates:
            if p.lhs not in productive and all(s in productive for s in p.rhs):
                productive.add(p.lhs)
                changed = True
    seen = set()
    prods = []
    for p in templates:
        if all(s in productive for s in p.rhs):
            key = (p.lhs, p.rhs)
            if key not in seen:
                seen.add(key)
                prods.append(p)
    for tag, word in zip(tags, tokens):
        key = (tag, (terminal(word),))
        if key not in seen:
            seen.add(key)
            prods.append(Production(tag, (terminal(word),), (1,)))
    return CfgGrammar(prods, start)


@dataclass
class ParseTree:
    label: str
    children: list["ParseTree"] = field(default_factory=list)
    leaf_index: int | None = None
    applied_rule: tuple[int, ...] = ()
    key: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list["ParseTree"]:
        if self.is_leaf:
            return [self]
        out = []
        for ch in self.children:
            out.extend(ch.leaves())
        return out

    def words(self) -> list[str]:
        return [leaf.label for leaf in self.leaves()]

    def subtrees(self, path: tuple[int, ...] = ()):
        """Yield (path, node) in preorder; a path is the child-index route."""
        yield path, self
        for i, ch in enumerate(self.children):
            yield from ch.subtrees(path + (i,))

    def __str__(self):
        if self.is_leaf:
            return self.label
        return f"({self.label} {' '.join(str(c) for c in self.children)})"

    def shape(self):
        """Nested (label, children) tuples, handy for structural comparison."""
        if self.is_leaf:
            return self.label
        return (self.label, tuple(c.shape() for c in self.children))


def tree_from_string(text: str) -> ParseTree:
    """Inverse of ``str(tree)`` without rule vectors; leaves get their indices."""
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0
    counter = [0]

    def read():
        nonlocal pos
        if toks[pos] != "(":
            word = toks[pos]
            pos += 1
            leaf = ParseTree(word, leaf_index=counter[0])
            counter[0] += 1
            return leaf
        pos += 1
        label = toks[pos]
        pos += 1
        children = []
        while toks[pos] != ")":
            children.append(read())
        pos += 1
        return ParseTree(label, children)

    tree = read()
    if pos != len(toks):
        raise ValueError("trailing input after tree")
    return tree


class _Parser:
    def __init__(self, grammar: CfgGrammar, tokens: Sequence[str], cap: int):
        self.g = grammar
        self.tokens = tuple(tokens)
        self.cap = cap
        self.memo: dict[tuple[str, int, int], list[ParseTree]] = {}
        self.active: set[tuple[str, int, int]] = set()
        self.seq_memo: dict = {}
        self._min_len = self._minimum_lengths()

    def _minimum_lengths(self) -> dict[str, int]:
        inf = 10 ** 9
        best = {nt: inf for nt in self.g.by_lhs}
        changed = True
        while changed:
            changed = False
            for p in self.g.productions:
                total = sum(1 if is_terminal(s) else best.get(s, inf) for s in p.rhs)
                if total < best[p.lhs]:
                    best[p.lhs] = total
                    changed = True
        return best

    def min_len(self, sym: str) -> int:
        if is_terminal(sym):
            return 1
        return self._min_len.get(sym, 10 ** 9)

    def parses(self, sym: str, i: int, j: int) -> list[ParseTree]:
        if is_terminal(sym):
            if j == i + 1 and self.tokens[i] == sym[1:-1]:
                return [ParseTree(self.tokens[i], leaf_index=i)]
            return []
        key = (sym, i, j)
        if key in self.memo:
            return self.memo[key]
        if key in self.active or self.min_len(sym) > j - i:
            return []
        self.active.add(key)
        found: list[ParseTree] = []
        for idx, prod in self.g.by_lhs.get(sym, ()):
            for kids in self.sequences(prod.rhs, i, j):
                sub = [k for kid in kids for k in kid.key]
                found.append(ParseTree(sym, list(kids), applied_rule=prod.rule, key=(idx, *sub)))
        self.active.discard(key)
        found.sort(key=lambda t: t.key)
        del found[self.cap:]
        self.memo[key] = found
        return found

    def sequences(self, rhs: tuple[str, ...], i: int, j: int) -> list[tuple[ParseTree, ...]]:
        """Child tuples covering [i, j), sorted by concatenated derivation key."""
        if len(rhs) == 1:
            return [(t,) for t in self.parses(rhs[0], i, j)]
        key = (rhs, i, j)
        if key in self.seq_memo:
            return self.seq_memo[key]
        rest_min = sum(self.min_len(s) for s in rhs[1:])
        out = []
        for m in range(i + self.min_len(rhs[0]), j - rest_min + 1):
            heads = self.parses(rhs[0], i, m)
            if not heads:
                continue
            for tail in self.sequences(rhs[1:], m, j):
                out.extend((h,) + tail for h in heads)
        out.sort(key=lambda kids: [k for kid in kids for k in kid.key])
        del out[self.cap:]
        self.seq_memo[key] = out
        return out


def parse(grammar: CfgGrammar, tokens: Sequence[str], tags: Sequence[str] | None = None,
          mode: str = "first", cap: int = MAX_PARSES) -> list[ParseTree]:
    """Parse ``tokens`` from the grammar's start symbol.

    ``mode="first"`` returns at most one tree (the depth-first winner);
    ``mode="all"`` returns up to ``cap`` trees in the same order.  An empty
    list means the sentence has no parse.  ``tags`` is accepted for symmetry
    with the pipeline; lexical productions already encode them.
    """
    if mode not in ("first", "all"):
        raise ValueError(f"unknown parse mode {mode!r}")
    if not tokens:
        return []
    p = _Parser(grammar, tokens, cap)
    trees = p.parses(grammar.start, 0, len(tokens))
    return trees[:1] if mode == "first" else list(trees)


def validate_tree(tree: ParseTree, grammar: CfgGrammar, tokens: Sequence[str]) -> None:
    """Raise ValueError unless the yield is ``tokens`` and every node is a production."""
    if tree.words() != list(tokens):
        raise ValueError("tree yield differs from the input tokens")
    if [leaf.leaf_index for leaf in tree.leaves()] != list(range(len(tokens))):
        raise ValueError("leaf indices are not consecutive")
    known = {(p.lhs, p.rhs) for p in grammar.productions}
    for _, node in tree.subtrees():
        if node.is_leaf:
            continue
        rhs = tuple(terminal(c.label) if c.is_leaf else c.label for c in node.children)
        if (node.label, rhs) not in known:
            raise ValueError(f"no production {node.label} -> {' '.join(rhs)}")
