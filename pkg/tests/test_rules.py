import copy

import pytest
from hypothesis import given, strategies as st

from sentcomp.errors import GrammarError
from sentcomp.grammar import ParseTree, generate_grammar, load_grammar, parse, parse_grammar_text
from sentcomp.rules import (
    Fix, fix_deltas, label_tree, leaf_path_labels, phrase_spans, sentence_trunk,
)
from sentcomp.tokens import tokenize

FIG3 = tokenize("This is an example to test sentence compression with MIP model .")
FIG3_TAGS = ["DT", "V", "DT", "N", "TO", "V", "N", "N", "IN", "N", "N", "SYM"]


def fig3_tree():
    g = generate_grammar(FIG3_TAGS, FIG3, load_grammar())
    return parse(g, FIG3, FIG3_TAGS)[0]


def leaf(word, i):
    return ParseTree(word, leaf_index=i)


def pre(tag, word, i):
    return ParseTree(tag, [leaf(word, i)], applied_rule=(1,))


def test_vp_rule_labels_children():
    vp = ParseTree("VP", [pre("V", "saw", 0), ParseTree("NP", [pre("N", "dogs", 1)], applied_rule=(1,)),
                          ParseTree("PP", [pre("IN", "with", 2), ParseTree("NP", [pre("N", "hats", 3)], applied_rule=(1,))],
                                    applied_rule=(1, 1))],
                   applied_rule=(1, 1, 2))
    lt = label_tree(vp)
    assert lt.label_at(()) == 1
    assert [lt.label_at((i,)) for i in range(3)] == [1, 1, 2]
    assert fix_deltas(lt) == [Fix.ONE, Fix.ONE, Fix.FREE, Fix.FREE]


def test_dt_np_rule_gives_two():
    np_ = ParseTree("NP", [pre("DT", "the", 0), ParseTree("NP", [pre("N", "dog", 1)], applied_rule=(1,))],
                    applied_rule=(2, 1))
    lt = label_tree(np_)
    assert lt.label_at((0,)) == 2
    # the 2 sits on the tag node directly above the word
    assert fix_deltas(lt, include_preterminal=True) == [Fix.FREE, Fix.ONE]
    assert fix_deltas(lt) == [Fix.ONE, Fix.ONE]


def test_rule_length_mismatch():
    bad = ParseTree("NP", [pre("N", "dog", 0)], applied_rule=(1, 1))
    with pytest.raises(GrammarError):
        label_tree(bad)


def test_zero_label_deletes_subtree():
    t = ParseTree("S", [ParseTree("NP", [pre("N", "a", 0), pre("N", "b", 1)], applied_rule=(1, 1)),
                        pre("SYM", ".", 2)], applied_rule=(0, 1))
    assert fix_deltas(label_tree(t)) == [Fix.ZERO, Fix.ZERO, Fix.ONE]


def test_preterminal_label_handling():
    # a rule vector entry on the tag node itself
    t = ParseTree("S", [ParseTree("ADVP", [pre("ADV", "now", 0)], applied_rule=(2,)), pre("V", "go", 1)],
                  applied_rule=(1, 1))
    lt = label_tree(t)
    assert leaf_path_labels(lt) == {0: [1, 1, 1], 1: [1, 1]}
    assert leaf_path_labels(lt, include_preterminal=True) == {0: [1, 1, 2, 1], 1: [1, 1, 1]}
    assert fix_deltas(lt) == [Fix.ONE, Fix.ONE]
    assert fix_deltas(lt, include_preterminal=True) == [Fix.FREE, Fix.ONE]


def test_statement_trunk():
    lt = label_tree(fig3_tree())
    fixing = fix_deltas(lt)
    trunk = sentence_trunk(fixing, FIG3)
    assert trunk == tokenize("This is an example to test sentence compression .")
    assert all(fixing[i] is not Fix.ONE for i in (8, 9, 10))


def test_trunk_edge_cases():
    toks = ("a", "b")
    assert sentence_trunk([Fix.FREE, Fix.FREE], toks) == ()
    assert sentence_trunk([Fix.ONE, Fix.ONE], toks) == toks
    with pytest.raises(ValueError):
        sentence_trunk([Fix.ONE], toks)


def test_all_one_grammar_fixes_everything():
    templates = [p.__class__(p.lhs, p.rhs, (1,) * len(p.rhs)) for p in load_grammar()]
    g = generate_grammar(FIG3_TAGS, FIG3, templates)
    fixing = fix_deltas(label_tree(parse(g, FIG3)[0]))
    assert fixing == [Fix.ONE] * len(FIG3)


def test_phrase_spans():
    spans = phrase_spans(fig3_tree())
    assert spans == [(9, [10, 11])]


def _internal_paths(tree):
    return [p for p, node in tree.subtrees() if not node.is_leaf and p]


def _random_tree(draw, depth, counter):
    if depth == 0 or draw(st.booleans()):
        i = counter[0]
        counter[0] += 1
        return ParseTree("T", [ParseTree(f"w{i}", leaf_index=i)], applied_rule=(draw(st.sampled_from([0, 1, 2])),))
    k = draw(st.integers(1, 3))
    kids = [_random_tree(draw, depth - 1, counter) for _ in range(k)]
    rule = tuple(draw(st.sampled_from([0, 1, 1, 2])) for _ in range(k))
    return ParseTree("X", kids, applied_rule=rule)


@st.composite
def random_trees(draw):
    counter = [0]
    return _random_tree(draw, 4, counter)


@given(random_trees(), st.data(), st.booleans())
def test_relabel_one_to_two_never_creates_fixed_one_from_zero(tree, data, include_pre):
    lt = label_tree(tree)
    before = fix_deltas(lt, include_pre)
    ones = [p for p, v in lt.node_labels.items() if v == 1 and p]
    if not ones:
        return
    path = data.draw(st.sampled_from(ones))
    lt2 = copy.deepcopy(lt)
    lt2.node_labels[path] = 2
    after = fix_deltas(lt2, include_pre)
    for b, a in zip(before, after):
        if b is Fix.ZERO:
            assert a is Fix.ZERO
        if a is Fix.ONE:
            assert b is Fix.ONE


@given(random_trees())
def test_fixing_depends_only_on_path_multiset(tree):
    lt = label_tree(tree)
    paths = leaf_path_labels(lt)
    fixing = fix_deltas(lt)
    for i, labels in paths.items():
        expected = Fix.ZERO if 0 in labels else Fix.ONE if set(labels) == {1} else Fix.FREE
        assert fixing[i] is expected
        shuffled = sorted(labels)
        assert (Fix.ZERO if 0 in shuffled else Fix.ONE if set(shuffled) == {1} else Fix.FREE) is expected
