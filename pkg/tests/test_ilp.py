import math
from itertools import combinations

import numpy as np
import pytest

from sentcomp import ngram
from sentcomp.errors import ConfigurationError, DecodeError, IntegrityError
from sentcomp.ilp import CompressionIndexing, build, decode, length_bounds, variable_count
from sentcomp.program import enumerate_feasible
from sentcomp.rules import Fix
from sentcomp.simplex import solve_lp
from sentcomp.tokens import START

from conftest import subsequences

WORDS = "the man saw the dog with the telescope".split() * 4


def sent(n):
    return WORDS[:n]


def test_count_formula_all_sizes(toy_lm):
    for n in range(1, 31):
        bp, idx = build(sent(n), toy_lm, (1, n), eliminate_alpha=False)
        assert bp.n == idx.size == (n ** 3 + 3 * n ** 2 + 14 * n) // 6
        bp2, _ = build(sent(n), toy_lm, (1, n))
        assert bp2.n == variable_count(n) - n


def test_index_ranges_by_hand():
    idx = CompressionIndexing(5, eliminate_alpha=False)
    assert idx.size == 45
    assert len(idx.gamma) == sum(1 for i in range(0, 4) for j in range(i + 1, 5) for k in range(j + 1, 6))
    assert len(idx.beta) == sum(1 for i in range(0, 5) for j in range(i + 1, 6))
    assert CompressionIndexing(5).size == 40


def test_hand_encoded_point_satisfies_rows(toy_lm):
    bp, idx = build(sent(3), toy_lm, (2, 3), eliminate_alpha=False)
    x = np.zeros(idx.size)
    x[idx.delta[1]] = x[idx.delta[3]] = 1
    x[idx.gamma[0, 1, 3]] = 1
    x[idx.beta[1, 3]] = 1
    x[idx.alpha[1]] = 1
    assert bp.rows_satisfied(x)
    np.testing.assert_array_equal(x, idx.encode([1, 3]))


def test_all_fixed_gives_identity(toy_lm):
    n = 5
    bp, idx = build(sent(n), toy_lm, (2, n), fixing=[Fix.ONE] * n)
    sols = enumerate_feasible(bp, max_binaries=None)
    assert len(sols) == 1
    assert decode(sols[0], idx, sent(n)).selected == (1, 2, 3, 4, 5)


def test_enumerate_three_words(toy_lm):
    bp, idx = build(sent(3), toy_lm, (2, 3))
    sols = enumerate_feasible(bp, max_binaries=None)
    got = sorted(decode(x, idx, sent(3)).selected for x in sols)
    assert got == [(1, 2), (1, 2, 3), (1, 3), (2, 3)]


def test_infeasible_length_is_empty(toy_lm):
    bp, _ = build(sent(3), toy_lm, (2, 3))
    tight = bp.with_rows([({p: 1.0 for p in range(3)}, ">=", 4.0)])
    assert enumerate_feasible(tight, max_binaries=None) == []


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_bijection_small(toy_lm, n):
    for low in range(2, n + 1):
        for up in range(low, n + 1):
            bp, idx = build(sent(n), toy_lm, (low, up))
            got = sorted(tuple(i for i in range(1, n + 1) if x[idx.delta[i]] == 1) for x in enumerate_feasible(bp, max_binaries=None))
            assert got == sorted(subsequences(n, low, up))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_alpha_elimination_preserves_points_and_values(toy_lm, n):
    full, fidx = build(sent(n), toy_lm, (2, n), eliminate_alpha=False)
    elim, eidx = build(sent(n), toy_lm, (2, n))
    a = {decode(x, fidx, sent(n)).selected: full.value(x) for x in enumerate_feasible(full, max_binaries=None)}
    b = {decode(x, eidx, sent(n)).selected: elim.value(x) for x in enumerate_feasible(elim, max_binaries=None)}
    assert a.keys() == b.keys()
    for k in a:
        assert a[k] == pytest.approx(b[k], abs=1e-12)


def _score(lm, toks, sel, log=True):
    f = math.log if log else float
    w = [START] + [toks[i - 1] for i in sel]
    total = f(lm.prob_start(w[1]))
    for t in range(2, len(w)):
        total += f(lm.prob_trigram(w[t - 2], w[t - 1], w[t]))
    total += f(lm.prob_end(w[-2], w[-1]))
    return total


@pytest.mark.parametrize("score", ["log", "raw"])
def test_objective_matches_direct_scoring(toy_lm, score):
    toks = sent(6)
    for elim in (True, False):
        bp, idx = build(toks, toy_lm, (1, 6), score=score, eliminate_alpha=elim)
        for sel in [(1,), (2, 5), (1, 2, 3), (1, 3, 4, 6), (1, 2, 3, 4, 5, 6)]:
            x = idx.encode(sel)
            assert bp.rows_satisfied(x)
            assert -bp.value(x) == pytest.approx(_score(toy_lm, toks, sel, score == "log"), abs=1e-10)


def test_presolve_zero_fixing(toy_lm):
    fixing = [Fix.FREE, Fix.ZERO, Fix.FREE, Fix.ONE]
    bp, idx = build(sent(4), toy_lm, (2, 3), fixing=fixing)
    assert bp.ub[idx.delta[2]] == 0 and bp.lb[idx.delta[4]] == 1
    for key, p in list(idx.gamma.items()) + list(idx.beta.items()):
        assert (bp.ub[p] == 0) == (2 in key)
    got = sorted(decode(x, idx, sent(4)).selected for x in enumerate_feasible(bp, max_binaries=None))
    assert got == [(1, 3, 4), (1, 4), (3, 4)]


def test_phrase_rows(toy_lm):
    bp, idx = build(sent(5), toy_lm, (2, 5), phrase_spans=[(3, [4, 5])])
    for x in enumerate_feasible(bp, max_binaries=None):
        sel = set(decode(x, idx, sent(5)).selected)
        if 3 in sel:
            assert sel & {4, 5}
        else:
            assert not sel & {4, 5}
    got = {decode(x, idx, sent(5)).selected for x in enumerate_feasible(bp, max_binaries=None)}
    assert (1, 2, 3, 5) in got and (1, 2, 3) not in got and (1, 4) not in got


def test_length_bounds():
    assert length_bounds(0.7, 12) == (8, 9)
    assert length_bounds(0.5, 10) == (5, 5)
    assert length_bounds(1.0, 7) == (7, 7)
    assert length_bounds(0.1, 5) == (2, 2)
    assert length_bounds(0.7, 10) == (7, 7)  # 0.7 * 10 is not exactly 7 in binary
    with pytest.raises(ConfigurationError):
        length_bounds(0.0, 5)


def test_build_errors(toy_lm):
    with pytest.raises(ConfigurationError):
        build([], toy_lm, (1, 1))
    with pytest.raises(ConfigurationError):
        build(sent(3), toy_lm, (4, 4))
    with pytest.raises(ConfigurationError):
        build(sent(3), toy_lm, (0, 2))
    with pytest.raises(ConfigurationError):
        build(sent(3), toy_lm, (2, 3), score="prob")


def test_decode_examples(toy_lm):
    toks = sent(6)
    bp, idx = build(toks, toy_lm, (2, 6))
    res = decode(idx.encode([2, 4, 5]), idx, toks, bp)
    assert res.selected == (2, 4, 5) and res.tokens == ("man", "the", "dog")
    assert res.objective == pytest.approx(-bp.value(idx.encode([2, 4, 5])))
    assert decode(idx.encode(range(1, 7)), idx, toks).tokens == tuple(toks)
    x = idx.encode([2, 4, 5])
    x[idx.delta[2]] = 0.4
    with pytest.raises(DecodeError):
        decode(x, idx, toks)
    y = idx.encode([2, 4, 5])
    y[idx.gamma[0, 1, 2]] = 1.0
    with pytest.raises(IntegrityError):
        decode(y, idx, toks)


def test_lp_relaxation_solves(toy_lm):
    bp, idx = build(sent(8), toy_lm, (4, 5))
    sol = solve_lp(bp)
    assert sol.status == "optimal"
    assert bp.in_relaxation(sol.x)
