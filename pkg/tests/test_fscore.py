import pytest
from hypothesis import given, strategies as st

from sentcomp.fscore import compression_rate, f_measure, fscore
from sentcomp.tokens import tokenize

REFERENCE = "The aim is to give councils control over the growth of homes ."
CANDIDATE = "aim is to give councils some control ."


def test_worked_pair():
    rep = fscore(tokenize(CANDIDATE), tokenize(REFERENCE))
    assert (rep.A, rep.B, rep.C) == (7, 6, 1)
    assert rep.P == pytest.approx(0.875, abs=1e-3)
    assert rep.R == pytest.approx(0.538, abs=1e-3)
    assert rep.F == pytest.approx(0.667, abs=1e-3)


def test_degenerate_cases():
    assert fscore([], []).F == 1.0
    assert fscore(["a"], []).F == 0.0
    assert fscore([], ["a"]).F == 0.0
    assert fscore(["a", "b"], ["c"]).F == 0.0
    same = fscore(["a", "b"], ["a", "b"])
    assert same.P == same.R == same.F == 1.0
    with pytest.raises(ValueError):
        fscore(["a"], ["a"], mu=-1)


def test_case_and_multiset():
    assert fscore(["The"], ["the"]).A == 0
    assert fscore(["a", "a", "b"], ["a", "b", "b"]).A == 2


def test_compression_rate():
    assert compression_rate(list("abcdefg"), list("abcdefghij")) == 0.7
    assert compression_rate(list("abc"), list("abc")) == 1.0
    assert compression_rate([], ["a"]) == 0.0
    assert fscore(["a"], ["a"], original=["a", "b"]).compression_rate == 0.5
    with pytest.raises(ValueError):
        compression_rate([], [])


words = st.lists(st.sampled_from(["a", "b", "c", "d", "."]), max_size=8)


@given(words, words)
def test_accounting_and_symmetry(cand, ref):
    r = fscore(cand, ref)
    assert r.A + r.C == len(cand) and r.A + r.B == len(ref)
    s = fscore(ref, cand)
    if r.A:
        assert (s.P, s.R) == (r.R, r.P)
    assert s.F == pytest.approx(r.F)
    assert 0 <= r.F <= 1


@given(st.floats(0.01, 1), st.floats(0.01, 1))
def test_mu_limits_and_monotonicity(P, R):
    if abs(P - R) < 1e-6:
        return
    lo, mid, hi = (f_measure(P, R, mu) for mu in (1e-3, 1.0, 1e3))
    assert lo == pytest.approx(P, abs=1e-4)
    assert hi == pytest.approx(R, abs=1e-4)
    assert (lo < mid < hi) if R > P else (lo > mid > hi)
