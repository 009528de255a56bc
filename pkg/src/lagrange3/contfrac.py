"""
Continued-fraction words and folding.

Folding drives the sigma/tau successors and their dribble endpoints, and the
successor-word recursion predicts the folded words.  A convergent-based
Lagrange value estimate sits at the end.

Words are tuples of integers.  A ``CFWord`` is [a0; a1, ..., an]; signed or
zero quotients may appear in intermediate words and are evaluated through
products of [[a, 1], [1, 0]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import CaseUnsupported, DivergentWord, RationalInput

SIGMA, TAU = "sigma", "tau"


@dataclass(frozen=True)
class CFWord:
    a0: int
    quotients: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "quotients", tuple(int(x) for x in self.quotients))
        object.__setattr__(self, "a0", int(self.a0))

    @classmethod
    def of(cls, terms):
        terms = list(terms)
        return cls(terms[0], tuple(terms[1:]))

    @classmethod
    def parse(cls, text):
        """'[0; 2, 2, 1, 1]', '0;2,2,1,1' or '0,2,2,1,1'."""
        body = text.strip().strip("[]").replace(";", ",")
        return cls.of(int(t) for t in body.split(",") if t.strip())

    @property
    def n(self):
        return len(self.quotients)

    @property
    def terms(self):
        return (self.a0,) + self.quotients

    @property
    def canonical(self):
        q = self.quotients
        return all(x >= 1 for x in q) and (not q or q[-1] > 1)

    @property
    def value(self):
        return cf_eval(self)

    def to_list(self):
        return list(self.terms)

    def __str__(self):
        if not self.quotients:
            return f"[{self.a0}]"
        return f"[{self.a0}; {', '.join(map(str, self.quotients))}]"


def _as_fraction(r):
    if isinstance(r, str):
        r = Fraction(r)
    return Fraction(r)


def cf_expand(r, parity=None) -> CFWord:
    """
    Regular expansion with last quotient > 1 (Euclid).  ``parity`` ('even' or
    'odd') asks for the form whose n has that parity, using the alternate
    ending [..., x - 1, 1] when needed.
    """
    r = _as_fraction(r)
    p, q = r.numerator, r.denominator
    terms = []
    while True:
        a, rem = divmod(p, q)
        terms.append(a)
        if rem == 0:
            break
        p, q = q, rem
    w = CFWord.of(terms)
    if parity is None or (w.n % 2 == 0) == (parity == "even"):
        return w
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    return alternate_form(w)


def alternate_form(w: CFWord) -> CFWord:
    """The other expansion of the same rational: [..., x] <-> [..., x - 1, 1]."""
    t = list(w.terms)
    if len(t) > 1 and t[-1] == 1:
        t[-2] += 1
        t.pop()
    else:
        t[-1] -= 1
        t.append(1)
    return CFWord.of(t)


def convergent_matrix(terms):
    """Product of [[a, 1], [1, 0]] over the terms: [[p_n, p_(n-1)], [q_n, q_(n-1)]]."""
    p, pp, q, qq = 1, 0, 0, 1
    for a in terms:
        p, pp = a * p + pp, p
        q, qq = a * q + qq, q
    return p, pp, q, qq


def cf_eval(w) -> Fraction:
    """Exact value of a (possibly signed) word."""
    terms = w.terms if isinstance(w, CFWord) else tuple(w)
    p, _, q, _ = convergent_matrix(terms)
    if q == 0:
        raise DivergentWord(f"{w} has zero denominator")
    return Fraction(p, q)


def canonicalize(w: CFWord) -> CFWord:
    """
    Collapse zeros ([..., x, 0, y, ...] -> [..., x + y, ...]), then fall back
    to re-expansion for any remaining sign, then merge a trailing 1.
    """
    t = list(w.terms)
    i = 1
    while i < len(t):
        if t[i] == 0:
            if i == len(t) - 1:
                # [..., x, 0] = [...]: x + 1/0 is infinite and drops out
                del t[i - 1 :]
                if not t:
                    raise DivergentWord(f"{w} has zero denominator")
            else:
                t[i - 1 : i + 2] = [t[i - 1] + t[i + 1]]
            i = max(1, i - 1)
        else:
            i += 1
    if any(x < 1 for x in t[1:]):
        return cf_expand(cf_eval(t))
    return cf_expand(cf_eval(t)) if len(t) > 1 and t[-1] == 1 else CFWord.of(t)


def reverse(word):
    return tuple(reversed(word))


def U(ell, m):
    """The word ell, m - 1, 1, ell - 1."""
    return (ell, m - 1, 1, ell - 1)


def fold_raw(w: CFWord, m) -> CFWord:
    """[a0; a1..an, m-1, 1, an - 1, a(n-1)..a1] without any clean-up."""
    if w.n < 1:
        raise ValueError("folding needs n >= 1")
    if m < 2:
        raise CaseUnsupported("folding needs m >= 2")
    q = w.quotients
    return CFWord(w.a0, q + (m - 1, 1, q[-1] - 1) + reverse(q[:-1]))


def fold(w: CFWord, m) -> CFWord:
    """
    Positive folded form, value p/q + (-1)^n/(m q^2); zero quotients (from
    a_n = 1) are collapsed, a trailing 1 is kept.
    """
    raw = fold_raw(w, m)
    if 0 not in raw.quotients:
        return raw
    t = list(raw.terms)
    i = 1
    while i < len(t) - 1:
        if t[i] == 0:
            t[i - 1 : i + 2] = [t[i - 1] + t[i + 1]]
        else:
            i += 1
    return CFWord.of(t)


def fold_signed(w: CFWord, m) -> CFWord:
    """Signed folded form [a0; a1..an, m, -an, ..., -a1] of the same value."""
    if w.n < 1:
        raise ValueError("folding needs n >= 1")
    q = w.quotients
    return CFWord(w.a0, q + (m,) + tuple(-x for x in reversed(q)))


def fold_delta(w: CFWord, m):
    """(-1)^n / (m q^2) for w = p/q."""
    q = cf_eval(w).denominator
    return Fraction((-1) ** w.n, m * q * q)


# -- successors ---------------------------------------------------------------


def sigma(r, m):
    r = _as_fraction(r)
    return r + Fraction(1, m * r.denominator**2)


def tau(r, m):
    r = _as_fraction(r)
    return r - Fraction(1, m * r.denominator**2)


def _step(direction):
    if direction in (SIGMA, "right", "+"):
        return SIGMA
    if direction in (TAU, "left", "-"):
        return TAU
    raise ValueError(f"unknown direction {direction!r}")


def descendant(r, m, k, direction=SIGMA):
    """p/q +- m * sum_{n=1..k} (mq)^(-2^n), the k-th sigma (tau) iterate."""
    if k < 1:
        raise ValueError("k must be >= 1")
    r = _as_fraction(r)
    mq = m * r.denominator
    total = sum(Fraction(1, mq ** (2**n)) for n in range(1, k + 1)) * m
    return r + total if _step(direction) == SIGMA else r - total


def iterate(r, m, k, direction=SIGMA):
    f = sigma if _step(direction) == SIGMA else tau
    r = _as_fraction(r)
    for _ in range(k):
        r = f(r, m)
    return r


def successor_word(w: CFWord, m, direction=SIGMA) -> CFWord:
    """Canonical expansion of sigma(w) or tau(w), by folding the form of matching parity."""
    want_even = _step(direction) == SIGMA
    form = w if (w.n % 2 == 0) == want_even else alternate_form(w)
    return canonicalize(fold(form, m))


# -- dribbles -----------------------------------------------------------------


@dataclass(frozen=True)
class Dribble:
    """Open interval (beta, alpha) with alpha - p/q = p/q - beta."""

    base: Fraction
    m: int
    alpha: object
    beta: object
    k_terms: int
    tail_bound: object
    partial_sum: Fraction = field(repr=False)
    precision: int = 256

    @property
    def tail_bound_exponent(self):
        """floor(log2(tail bound))."""
        return int(mpmath.floor(mpmath.log(self.tail_bound, 2)))

    def to_record(self):
        dps = int(self.precision * math.log10(2)) + 1
        return {
            "p": self.base.numerator,
            "q": self.base.denominator,
            "m": self.m,
            "alpha_decimal": mpmath.nstr(self.alpha, dps),
            "beta_decimal": mpmath.nstr(self.beta, dps),
            "k_terms": self.k_terms,
            "tail_bound_exponent": self.tail_bound_exponent,
        }


def dribble_endpoints(r, m, precision=256) -> Dribble:
    """
    alpha, beta = p/q +- m sum_{n>=1} (mq)^(-2^n).  The series is summed
    exactly to K terms; the tail is below m * 2 * (mq)^(-2^(K+1)) < 2^-precision.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    r = _as_fraction(r)
    mq = m * r.denominator
    if mq == 1:
        raise ValueError("m q = 1: the dribble series diverges")
    # smallest K with 2^(K+1) log2(mq) > precision + log2(2m)
    need = precision + math.log2(2 * m)
    K = 1
    while 2 ** (K + 1) * math.log2(mq) <= need:
        K += 1
    partial = m * sum(Fraction(1, mq ** (2**n)) for n in range(1, K + 1))
    ctx = mpmath.MPContext()
    ctx.prec = precision + 32
    tail = ctx.mpf(2 * m) / ctx.mpf(mq) ** (2 ** (K + 1))
    half = ctx.mpf(partial.numerator) / partial.denominator
    base = ctx.mpf(r.numerator) / r.denominator
    return Dribble(r, m, base + half, base - half, K, tail, partial, precision)


def shadow_endpoints(r, m):
    """Closed shadow [r - 1/(m q^2), r + 1/(m q^2)] of a reduced rational."""
    r = _as_fraction(r)
    rad = Fraction(1, m * r.denominator**2)
    return r - rad, r + rad


def dribble_chain(r, m, K, direction=SIGMA):
    """Shadows of r and its first K descendants in one direction."""
    out = [shadow_endpoints(r, m)]
    cur = _as_fraction(r)
    for _ in range(K):
        cur = sigma(cur, m) if _step(direction) == SIGMA else tau(cur, m)
        out.append(shadow_endpoints(cur, m))
    return out


def overlap_fraction(prev, nxt):
    """Length of the overlap of two shadows over the length of the second."""
    lo, hi = max(prev[0], nxt[0]), min(prev[1], nxt[1])
    return max(hi - lo, 0) / (nxt[1] - nxt[0])


# -- successor word machinery -------------------------------------------------

# case -> iteration direction used for its dribble endpoint
CASE_DIRECTION = {1: SIGMA, 2: TAU, 3: TAU, 4: SIGMA, 5: TAU}


def classify(w: CFWord):
    """Case 1-5 by (a1 > 1, parity of n, n = 1)."""
    if w.n < 1:
        raise CaseUnsupported("integers have no successor words (n = 0)")
    if w.n == 1:
        return 5
    a1, even = w.quotients[0], w.n % 2 == 0
    if a1 > 1:
        return 1 if even else 2
    return 3 if not even else 4


def decompose(w: CFWord):
    """
    Split canonical quotients as P, X, s with canonical(reverse(P)) = s:
    P = [s] when a1 > 1, P = [1, s - 1] when a1 = 1.  None if w does not end in s.
    """
    q = w.quotients
    if not q:
        return None
    P = (q[0],) if q[0] > 1 else q[:2]
    s = q[0] if q[0] > 1 else (q[1] + 1 if len(q) > 1 else None)
    if s is None or len(q) < len(P) + 1 or q[-1] != s:
        return None
    return P, q[len(P) : -1], s


@dataclass
class CaseRecord:
    rational: Fraction
    m: int
    word: CFWord
    case: int
    direction: str
    U_first: tuple  # U(a_n)
    U: tuple  # U(s), s the last quotient of every later word
    W: tuple  # w'' U(a_n) rev(w'') (or W' = w''' U(a_n) rev(w''') in Case 3)
    prefix: tuple
    k0: int
    V_start: tuple
    first_words: list

    def to_record(self):
        return {
            "rational": f"{self.rational.numerator}/{self.rational.denominator}",
            "m": self.m,
            "expansion": self.word.to_list(),
            "case": self.case,
            "direction": self.direction,
            "U_first": list(self.U_first),
            "U": list(self.U),
            "W": list(self.W),
            "prefix": list(self.prefix),
            "k0": self.k0,
        }


def word_machinery(r, m, max_start=4) -> CaseRecord:
    if m == 1:
        raise CaseUnsupported("m = 1: U(l) has a zero quotient; dribble endpoints stay available")
    if m < 1:
        raise ValueError("m must be >= 1")
    r = _as_fraction(r)
    w = cf_expand(r)
    case = classify(w)
    direction = CASE_DIRECTION[case]
    q = w.quotients
    an = q[-1]
    if case in (1, 2):
        W = q[1:-1] + U(an, m) + reverse(q[1:-1])
    elif case in (3, 4):
        inner = q[2:-1]
        W = inner + U(an, m) + reverse(inner)
    else:
        W = U(an, m)
    # walk the successor words by folding until the P X s shape appears with
    # X not a palindrome (later words then keep it: M is never a palindrome)
    words = []
    cur = w
    k0 = None
    for k in range(1, max_start + 1):
        cur = successor_word(cur, m, direction)
        words.append(cur)
        parts = decompose(cur)
        if parts is not None and not is_palindrome(parts[1]):
            k0 = k
            break
    if k0 is None:
        raise CaseUnsupported(f"no P X s decomposition within {max_start} steps for {r}")
    P, X, s = decompose(words[-1])
    return CaseRecord(r, m, w, case, direction, U(an, m), U(s, m), W, P, k0, X, words)


@dataclass
class VWords:
    record: CaseRecord
    k: int
    V: tuple  # V'_k
    predicted: CFWord
    middles: list  # M_j per step, each U or reverse(U)
    history: list  # V'_k0 .. V'_k


def v_words(r, m, k, record=None) -> VWords:
    """
    V'_k with V'_(j+1) = V'_j M_j reverse(V'_j), where M_j is U(s) when the
    current expansion already has the parity the direction needs and
    reverse(U(s)) when the alternate ending is folded.  Predicted expansion
    of the k-th iterate: [a0; P, V'_k, s].
    """
    rec = record or word_machinery(r, m)
    if k < rec.k0:
        raise CaseUnsupported(f"V'_k starts at k = {rec.k0} for this input")
    want_even = rec.direction == SIGMA
    P, s = rec.prefix, rec.U[0]
    V = rec.V_start
    hist, middles = [V], []
    for _ in range(rec.k0, k):
        n_total = len(P) + len(V) + 1
        M = rec.U if (n_total % 2 == 0) == want_even else reverse(rec.U)
        middles.append(M)
        V = V + M + reverse(V)
        hist.append(V)
    predicted = CFWord(rec.word.a0, P + V + (s,))
    return VWords(rec, k, V, predicted, middles, hist)


def is_palindrome(word):
    return tuple(word) == reverse(word)


def starts_with(word, prefix):
    return tuple(word[: len(prefix)]) == tuple(prefix)


@dataclass
class WordReport:
    record: CaseRecord
    K: int
    rows: list
    U_palindrome: bool

    @property
    def ok(self):
        return not self.U_palindrome and all(r["ok"] for r in self.rows)


def word_properties(r, m, K, verify_upto=6) -> WordReport:
    """
    Per k <= K: V'_k not a palindrome, the length law, the recursion, and
    V_(k+1) begins with V_k V'_(k-1) where V_k = V'_k M_k.  The literal
    form "begins with V_k V_(k-1)" is reported too; it needs M = reverse(M).
    For k <= ``verify_upto`` the predicted word is compared with Euclid's
    expansion of the closed-form descendant.
    """
    if K < 3:
        raise ValueError("K must be >= 3")
    rec = word_machinery(r, m)
    vw = v_words(r, m, K + 2, rec)
    hist, mids = vw.history, vw.middles
    k0 = rec.k0
    base_len = len(hist[0])
    rows = []
    for i, V in enumerate(hist):
        k = k0 + i
        if k > K:
            break
        row = {"k": k, "length": len(V), "palindrome": is_palindrome(V)}
        row["length_law"] = len(V) == 2 ** (k - k0) * (base_len + 4) - 4
        if i >= 1:
            row["recursion"] = V == hist[i - 1] + mids[i - 1] + reverse(hist[i - 1])
            V_k, V_next = V + mids[i], hist[i + 1] + mids[i + 1]
            row["prefix"] = starts_with(V_next, V_k + hist[i - 1])
            row["prefix_literal"] = starts_with(V_next, V_k + hist[i - 1] + mids[i - 1])
        if k <= verify_upto:
            pred = CFWord(rec.word.a0, rec.prefix + V + (rec.U[0],))
            row["matches_euclid"] = pred == cf_expand(descendant(rec.rational, m, k, rec.direction))
        checks = [not row["palindrome"], row["length_law"], row.get("recursion", True)]
        checks += [row.get("prefix", True), row.get("matches_euclid", True)]
        row["ok"] = all(checks)
        rows.append(row)
    return WordReport(rec, K, rows, is_palindrome(rec.U))


def expansion_parities(r, m, K, direction):
    """n mod 2 of the canonical expansions of the first K iterates."""
    out, cur = [], _as_fraction(r)
    for k in range(1, K + 1):
        cur = iterate(cur, m, 1, direction)
        out.append(cf_expand(cur).n % 2)
    return out


# -- Lagrange value estimate --------------------------------------------------


def _denominators(terms):
    """[q_-1, q_0, q_1, ...] for the terms a0, a1, ..."""
    qs = [0, 1]
    for a in terms[1:]:
        qs.append(a * qs[-1] + qs[-2])
    return qs


def _estimates_from_terms(terms, lo, hi, mp):
    """max of x_(n+1) + q_(n-1)/q_n for n in [lo, hi), x_(n+1) from the later terms."""
    qs = _denominators(terms)  # qs[n + 1] = q_n
    best = None
    for n in range(lo, hi):
        p, _, q, _ = convergent_matrix(terms[n + 1 :])
        est = mp.mpf(p) / q + mp.mpf(qs[n]) / qs[n + 1]
        best = est if best is None or est > best else best
    return best


def lagrange_estimate(x, window=40, tail=None, precision=256):
    """
    max of 1/(q_n^2 |x - p_n/q_n|) = x_(n+1) + q_(n-1)/q_n over ``window``
    consecutive convergents, a lower estimate of the Lagrange value.

    A CFWord is read as a prefix of an infinite expansion; its last ``tail``
    quotients only feed the complete quotients x_(n+1).  The default tail
    centres the window, balancing the error from short q_(n-1)/q_n history
    against the error from truncated x_(n+1).
    An mpf is expanded exactly (as the dyadic rational it is) and only the
    convergents with q_n q_(n+1) <= 2^(prec - 40)/|x| are trusted.
    """
    if window < 10:
        raise ValueError("window must be >= 10")
    ctx = mpmath.MPContext()
    ctx.prec = precision
    if isinstance(x, (Fraction, int, str)):
        raise RationalInput(f"{x} is rational; its expansion is finite")
    if isinstance(x, (CFWord, list, tuple)):
        terms = list(x.terms if isinstance(x, CFWord) else x)
        n_max = len(terms) - 1
        if tail is None:
            tail = n_max - window - (n_max - window) // 2
        if tail < 1 or n_max - tail - window < 1:
            raise RationalInput(f"{len(terms)} terms are too few for window {window} plus tail {tail}")
        return _estimates_from_terms(terms, n_max - tail - window, n_max - tail, ctx)
    prec = getattr(getattr(x, "context", None), "prec", precision)
    ctx.prec = max(precision, prec)
    man, exp = ctx.mpf(x).man_exp
    exact = Fraction(man) * Fraction(2) ** exp
    terms = list(cf_expand(exact).terms)
    qs = _denominators(terms)
    bound = Fraction(2 ** (prec - 40)) / max(abs(exact), 1)
    reliable = 0  # convergents n < reliable are trusted
    while reliable + 2 < len(qs) and qs[reliable + 1] * qs[reliable + 2] <= bound:
        reliable += 1
    if reliable < window:
        raise RationalInput(f"only {reliable} reliable convergents at {prec} bits (window {window})")
    return _estimates_from_terms(terms, reliable - window, reliable, ctx)
