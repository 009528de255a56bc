from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagrange3.contfrac import (
    SIGMA,
    TAU,
    CFWord,
    U,
    alternate_form,
    canonicalize,
    cf_eval,
    cf_expand,
    classify,
    descendant,
    dribble_chain,
    dribble_endpoints,
    expansion_parities,
    fold,
    fold_signed,
    is_palindrome,
    iterate,
    lagrange_estimate,
    overlap_fraction,
    reverse,
    sigma,
    tau,
    v_words,
    word_machinery,
    word_properties,
)
from lagrange3.errors import CaseUnsupported, DivergentWord, RationalInput


def W(*terms):
    return CFWord.of(list(terms))


def test_expand():
    assert cf_expand(F(31, 75)) == W(0, 2, 2, 2, 1, 1, 2)
    assert cf_expand(F(3)) == W(3)
    # Euclid gives the form ending in a quotient > 1; the other form ends in 1
    assert cf_expand(F(5, 12)) == W(0, 2, 2, 2)
    assert alternate_form(cf_expand(F(5, 12))) == W(0, 2, 2, 1, 1)


def test_eval():
    assert cf_eval(W(0, 2, 2, 1, 1)) == F(5, 12)
    assert cf_eval(W(3)) == 3
    assert cf_eval(W(0, 2, 3, -2)) == F(5, 12)
    assert cf_eval(W(0, 2, -3, -2)) == F(7, 12)
    with pytest.raises(DivergentWord):
        cf_eval(W(0, 0))


def test_canonicalize_zero_rewrite():
    assert canonicalize(W(0, 2, 0, 3, 4)) == W(0, 5, 4)
    assert cf_eval(canonicalize(W(0, 2, 3, -2))) == F(5, 12)


def test_fold_examples():
    assert fold(W(0, 2), 3) == W(0, 2, 2, 1, 1)
    assert fold(W(0, 2, 2), 3) == W(0, 2, 2, 2, 1, 1, 2)
    assert fold(W(0, 2, 2, 2, 1, 1, 2), 3) == W(0, 2, 2, 2, 1, 1, 2, 2, 1, 1, 1, 1, 2, 2, 2)
    assert cf_eval(fold(W(0, 2, 2, 2, 1, 1, 2), 3)) == F(6976, 16875)
    assert fold_signed(W(0, 2), 3) == W(0, 2, 3, -2)


@settings(max_examples=1000, deadline=None)
@given(st.integers(2, 10**6), st.integers(0, 10**6), st.integers(2, 9))
def test_fold_lemma(q, p, m):
    r = F(p % q, q) + p // q
    if r.denominator == 1:
        return
    w = cf_expand(r)
    assert cf_eval(fold(w, m)) == r + F((-1) ** w.n, m * r.denominator**2)


def test_sigma_tau():
    assert sigma(F(1, 2), 3) == F(7, 12)
    assert tau(F(1, 2), 3) == F(5, 12)
    assert sigma(F(7, 12), 3) == F(253, 432) == iterate(F(1, 2), 3, 2, SIGMA)


def test_descendant():
    assert descendant(F(1, 2), 3, 2, SIGMA) == F(1, 2) + 3 * (F(1, 36) + F(1, 1296)) == F(253, 432)
    assert descendant(F(1, 2), 3, 1, TAU) == F(5, 12)
    assert descendant(F(2, 5), 3, 1, SIGMA) == F(31, 75)


@pytest.mark.parametrize("r", [F(1, 2), F(2, 5), F(5, 7), F(3, 11)])
@pytest.mark.parametrize("m", [2, 3, 5])
def test_descendant_matches_iterate(r, m):
    for k in range(1, 7):
        for d in (SIGMA, TAU):
            x = descendant(r, m, k, d)
            assert x == iterate(r, m, k, d)
            assert x.denominator == m ** (2**k - 1) * r.denominator ** (2**k)


def test_dribble_half():
    d = dribble_endpoints(F(1, 2), 3, 256)
    ctx = d.alpha.context
    # oracle: the series summed exactly well past the claimed precision
    s = F(1, 2) + 3 * sum(F(1, 6 ** (2**k)) for k in range(1, 9))
    assert abs(d.alpha - ctx.mpf(s.numerator) / s.denominator) < ctx.ldexp(1, -256)
    assert abs(float(d.alpha) - 0.58564993427175385) < 1e-16
    assert abs(float(d.beta) - 0.41435006572824615) < 1e-16
    assert d.alpha + d.beta == 1
    assert d.tail_bound_exponent <= -256


def test_dribble_chain_overlaps():
    chain = dribble_chain(F(1, 2), 3, 6, SIGMA)
    assert all(overlap_fraction(s, t) == F(1, 2) for s, t in zip(chain, chain[1:]))
    # right ends are the next descendants; alpha exceeds the exact K-term sum
    d = dribble_endpoints(F(1, 2), 3)
    assert all(s[1] < F(1, 2) + d.partial_sum for s in chain[: d.k_terms - 1])


def test_dribble_m1():
    assert dribble_endpoints(F(1, 3), 1).alpha > 1 / 3
    with pytest.raises(ValueError):
        dribble_endpoints(F(1), 1)


def test_cases():
    rec = word_machinery(F(2, 5), 3)
    assert (rec.case, rec.direction) == (1, SIGMA)
    assert rec.U == (2, 2, 1, 1) and rec.W == (2, 2, 1, 1)
    half = word_machinery(F(1, 2), 3)
    assert half.case == 5
    assert cf_eval(CFWord(0, half.U)) == tau(F(1, 2), 3)
    assert not is_palindrome(U(2, 3))
    assert [classify(cf_expand(r)) for r in (F(2, 5), F(3, 8), F(5, 7), F(3, 4), F(1, 2))] == [1, 2, 3, 4, 5]
    with pytest.raises(CaseUnsupported):
        word_machinery(F(2, 5), 1)


def test_v_words():
    assert v_words(F(2, 5), 3, 1).predicted == W(0, 2, 2, 2, 1, 1, 2)
    v2 = v_words(F(2, 5), 3, 2)
    assert v2.predicted == W(0, 2, 2, 2, 1, 1, 2, 2, 1, 1, 1, 1, 2, 2, 2)
    assert cf_eval(v2.predicted) == F(6976, 16875)
    assert len(v2.V) == 2 * len(v_words(F(2, 5), 3, 1).V) + 4


def test_word_properties_2_5():
    rep = word_properties(F(2, 5), 3, 10)
    assert rep.ok and not rep.U_palindrome
    assert [row["k"] for row in rep.rows] == list(range(1, 11))
    assert all(row["length"] == 2 ** (row["k"] - 1) * 8 - 4 for row in rep.rows)


def test_reverse_involution():
    w = (1, 2, 3, 4, 4)
    assert reverse(reverse(w)) == w


def test_word_corpus():
    seen = set()
    for q in range(2, 16):
        for p in range(1, q):
            r = F(p, q)
            if r.denominator != q:
                continue
            for m in (2, 3, 4):
                rep = word_properties(r, m, 5)
                assert rep.ok, (r, m)
                seen.add(rep.record.case)
    assert seen == {1, 2, 3, 4, 5}


def test_case3_odd_lengths():
    assert expansion_parities(F(5, 7), 3, 6, TAU) == [1] * 6


def test_lagrange_periodic():
    assert abs(lagrange_estimate([1] * 200, 40) - 5**0.5) < 1e-6
    assert abs(lagrange_estimate([2] * 200, 40) - 8**0.5) < 1e-6
    with pytest.raises(RationalInput):
        lagrange_estimate(F(5, 12))
    with pytest.raises(ValueError):
        lagrange_estimate([1] * 200, 5)


def test_lagrange_mpf():
    import mpmath

    ctx = mpmath.MPContext()
    ctx.prec = 1024
    est = lagrange_estimate(ctx.sqrt(2), 40, precision=1024)
    assert abs(est - 8**0.5) < 1e-6
