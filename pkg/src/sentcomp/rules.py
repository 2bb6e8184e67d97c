"""Node labels from production rule vectors, and the word fixings they imply."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import GrammarError
from .grammar import ParseTree

PHRASE_LABELS = ("PP", "SBAR")


class Fix(str, Enum):
    ONE = "fixed_one"
    ZERO = "fixed_zero"
    FREE = "free"


@dataclass
class LabeledTree:
    tree: ParseTree
    node_labels: dict[tuple[int, ...], int]  # keyed by child-index path; root is ()

    def label_at(self, path: tuple[int, ...]) -> int:
        return self.node_labels[path]


def label_tree(tree: ParseTree) -> LabeledTree:
    """Root gets 1; every child gets its parent's rule entry at its position."""
    labels = {(): 1}
    for path, node in tree.subtrees():
        if node.is_leaf:
            continue
        if len(node.applied_rule) != len(node.children):
            raise GrammarError(
                f"node {node.label} has {len(node.children)} children but rule {node.applied_rule}"
            )
        for i, r in enumerate(node.applied_rule):
            labels[path + (i,)] = r
    return LabeledTree(tree, labels)


def _leaf_paths(tree: ParseTree):
    for path, node in tree.subtrees():
        if node.is_leaf:
            yield node.leaf_index, path


def leaf_path_labels(lt: LabeledTree, include_preterminal: bool = False) -> dict[int, list[int]]:
    """Labels met walking from each word up to the root.

    The word's own label and every phrase-level ancestor are included.  A
    preterminal (a tag node whose only child is the word) is skipped unless
    ``include_preterminal`` is set.
    """
    out = {}
    nodes = dict(lt.tree.subtrees())
    for idx, path in _leaf_paths(lt.tree):
        prefixes = [path[:k] for k in range(len(path) + 1)]
        if not include_preterminal and path and len(nodes[path[:-1]].children) == 1:
            prefixes.remove(path[:-1])
        out[idx] = [lt.node_labels[p] for p in prefixes]
    return out


def fix_deltas(lt: LabeledTree, include_preterminal: bool = False) -> list[Fix]:
    """Per word: any 0 on the path deletes it, all 1 keeps it, otherwise free."""
    paths = leaf_path_labels(lt, include_preterminal)
    fixing = []
    for idx in range(len(paths)):
        labels = paths[idx]
        if 0 in labels:
            fixing.append(Fix.ZERO)
        elif all(v == 1 for v in labels):
            fixing.append(Fix.ONE)
        else:
            fixing.append(Fix.FREE)
    return fixing


def sentence_trunk(fixing: Sequence[Fix], tokens: Sequence[str]) -> tuple[str, ...]:
    if len(fixing) != len(tokens):
        raise ValueError("fixing and tokens differ in length")
    return tuple(tok for tok, f in zip(tokens, fixing) if f is Fix.ONE)


def phrase_spans(tree: ParseTree, labels: Sequence[str] = PHRASE_LABELS) -> list[tuple[int, list[int]]]:
    """(introducing word, other words) for every PP/SBAR subtree, 1-based."""
    spans = []
    for _, node in tree.subtrees():
        if node.is_leaf or node.label not in labels:
            continue
        idx = [leaf.leaf_index + 1 for leaf in node.leaves()]
        if len(idx) > 1:
            spans.append((idx[0], idx[1:]))
    return spans
