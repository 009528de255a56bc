"""
Acceptance criteria 1-10.  Each test prints one PASS/FAIL line; run with
``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

import math
import random
import sys
import time
from fractions import Fraction as F

import pytest

from conftest import SETUP_SECONDS, float_triples
from lagrange3.contfrac import (
    SIGMA,
    TAU,
    cf_eval,
    cf_expand,
    dribble_chain,
    dribble_endpoints,
    fold,
    lagrange_estimate,
    overlap_fraction,
    word_properties,
)
from lagrange3.excision import mcshane_partial_sum, width_identity_residual
from lagrange3.group import build_group
from lagrange3.shadows import LEFT, RIGHT, chain_hull, excision_interval, overlap_certificates, overlaps, shadow_chain
from lagrange3.tree import enumerate_tree, heights_by_recurrence


@pytest.fixture
def report(capsys):
    start = time.perf_counter()

    def emit(n, ok, detail, budget, setup=()):
        elapsed = time.perf_counter() - start + sum(SETUP_SECONDS.get(k, 0) for k in setup)
        timed = elapsed < budget
        line = f"{'PASS' if ok and timed else 'FAIL'} criterion {n:>2}: {detail} [{elapsed:.1f}s / {budget}s]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
        assert timed, line

    return emit


def markoff_numbers(bound):
    """Every entry of a solution of x^2 + y^2 + z^2 = 3xyz whose largest entry is <= bound."""
    found = set()
    x = 1
    while 3 * x * x - x <= bound + 1:
        y = x
        while True:
            disc = 9 * x * x * y * y - 4 * (x * x + y * y)
            if disc >= 0:
                s = math.isqrt(disc)
                if s * s == disc and (3 * x * y + s) % 2 == 0:
                    z = (3 * x * y + s) // 2
                    if z > bound:
                        break
                    found.update((x, y, z, (3 * x * y - s) // 2))
                elif (3 * x * y + s) // 2 > bound:
                    break
            y += 1
        x += 1
    found.discard(0)
    return found


def test_c1_group_identities(report, modular):
    ok = modular.t2 @ modular.t1 @ modular.t0 == modular.s_a
    worst = 0
    for tr in float_triples(20):
        g = build_group(tr)
        worst = max(worst, g.product_residual())
    ok = ok and worst < tr.arith.mp.ldexp(1, -100)
    report(1, ok, f"T2T1T0 = S^a exact for (3,3,3); max residual over 20 float triples {float(worst):.1e} < 2^-100", 1)


def test_c2_markoff(report, modular):
    nodes = enumerate_tree(modular, 10)
    eq2 = all(n.fricke_residual() == 0 for n in nodes)
    achieved = {int(n.z) for n in nodes}
    # every Markoff number below the smallest depth-11 height is reached by depth 10
    deeper = {int(z) for p, _, _, z in heights_by_recurrence(modular, 11)} - achieved
    bound = min(10**6, min(deeper) - 1)
    brute = markoff_numbers(10**6)
    ok = (
        len(nodes) == 4094
        and eq2
        and {z for z in achieved if z <= 10**6} <= brute
        and {z for z in brute if z <= bound} == {z for z in achieved if z <= bound}
    )
    report(2, ok, f"4094 nodes satisfy x^2+y^2+z^2=3xyz; z-set = brute force up to {bound} ({len(brute)} Markoff numbers <= 1e6)", 10)


def test_c3_overlap_certificates(report, modular):
    mats = [modular.t1, modular.t2] + [n.E for n in enumerate_tree(modular, 6)]
    count, ok = 0, True
    for A in mats:
        for direction in (LEFT, RIGHT):
            certs = overlap_certificates(A, 3, 30, direction)
            ok = ok and all(c.holds() for c in certs)
            count += len(certs)
    report(3, ok, f"{count} exact certificates (k <= 30, both directions, {len(mats)} ellipses to depth 6)", 30)


def test_c4_shadow_chains(report, modular):
    ar = modular.arith
    iv = excision_interval(modular.t0, 3)
    ok, dist = True, {}
    for direction in (LEFT, RIGHT):
        chain = shadow_chain(modular.t0, 3, direction, 25)
        ok = ok and all(overlaps(s, t) for s, t in zip(chain, chain[1:]))
        ends = [chain_hull(chain[:k])[0 if direction == LEFT else 1] for k in range(1, 26)]
        step = (lambda u, v: v < u) if direction == LEFT else (lambda u, v: v > u)
        ok = ok and all(step(u, v) for u, v in zip(ends, ends[1:]))
        # hull stays inside the closed excision interval
        if direction == LEFT:
            ok = ok and iv.compare_left(ends[-1], ar) >= 0
            dist[direction] = ar.real(ends[-1]) - iv.left
        else:
            ok = ok and iv.compare_right(ends[-1], ar) <= 0
            dist[direction] = iv.right - ar.real(ends[-1])
    ok = ok and all(d < 1e-9 for d in dist.values())
    report(4, ok, f"exact overlaps, monotone hulls; endpoint gaps at k=25: {float(dist[LEFT]):.1e}, {float(dist[RIGHT]):.1e}", 5)


def test_c5_excision(report, modular, modular_history_15):
    rows = modular_history_15
    a = 3
    Ls = [r.remaining for r in rows]
    decreasing = all(x > y for x, y in zip(Ls, Ls[1:]))
    identity = max(abs(r.remaining - a * (1 - 2 * r.mcshane)) for r in rows)
    ok = len(rows) == 16 and decreasing and Ls[-1] < 1e-3 * a and identity < 1e-6 * a
    report(5, ok, f"disjoint at all d <= 15; L_d decreasing; L_15 = {float(Ls[-1]):.2e}; max |L_d - a(1-2S_d)| = {float(identity):.1e}", 60, setup=("nodes_15", "history_15"))


def test_c6_mcshane(report, modular):
    ar = modular.arith
    s15 = mcshane_partial_sum(modular, 15)
    zs = {z for _, _, _, z in heights_by_recurrence(modular, 15)}
    per_node = max(width_identity_residual(z, 3, ar) for z in zs)
    ok = abs(s15 - 0.5) < 2e-3 and per_node < ar.tol
    worst_float = 0
    for tr in float_triples(5, seed=7):
        g = build_group(tr)
        worst_float = max(worst_float, abs(mcshane_partial_sum(g, 15) - 0.5))
        zs = {z for _, _, _, z in heights_by_recurrence(g, 6)}
        ok = ok and all(width_identity_residual(z, g.a, g.arith) < g.arith.tol for z in zs)
    ok = ok and worst_float < 5e-3
    report(
        6,
        ok,
        f"|S_15 - 1/2| = {float(0.5 - s15):.1e} for (3,3,3), max {float(worst_float):.1e} over 5 float triples; "
        f"per-node width identity residual {float(per_node):.0e}",
        60,
    )


def test_c7_folding(report):
    rng = random.Random(1)
    checked = 0
    ok = True
    for _ in range(1000):
        q = rng.randint(2, 10**9)
        r = F(rng.randint(0, 10 * q), q)
        while r.denominator == 1:
            r += F(1, q)
        w = cf_expand(r)
        for m in range(2, 10):
            ok = ok and cf_eval(fold(w, m)) == r + F((-1) ** w.n, m * r.denominator**2)
            checked += 1
    report(7, ok, f"cf_eval(fold(w, m)) = r +- 1/(mq^2) exactly for {checked} (rational, m) pairs", 5)


WORD_CORPUS = [F(2, 5), F(3, 7), F(7, 19), F(3, 8), F(11, 30), F(5, 7), F(4, 7), F(3, 4), F(5, 8), F(1, 2), F(1, 3), F(13, 21)]


def test_c8_word_machinery(report):
    cases, literal_cases, rows = set(), set(), 0
    ok = True
    for r in WORD_CORPUS:
        n = cf_expand(r).n
        for m in (2, 3, 5):
            rep = word_properties(r, m, 12, verify_upto=6)
            rows += len(rep.rows)
            ok = ok and rep.ok and not rep.U_palindrome and rep.rows[-1]["k"] == 12
            ok = ok and all(row["matches_euclid"] for row in rep.rows if row["k"] <= 6)
            cases.add(rep.record.case)
            literal = all(row["length"] == 2 ** (row["k"] - 1) * (2 * n + 4) - 4 for row in rep.rows)
            if rep.record.case in (1, 2):
                ok = ok and literal
            if literal:
                literal_cases.add(rep.record.case)
    ok = ok and cases == {1, 2, 3, 4, 5}
    report(
        8,
        ok,
        f"{rows} (rational, m, k) rows over Cases {sorted(cases)}: Euclid match k <= 6, no palindromes, "
        f"doubling length law k <= 12 (2^(k-1)(2n+4)-4 literally in Cases {sorted(literal_cases)})",
        10,
    )


def test_c9_dribble(report):
    d = dribble_endpoints(F(1, 2), 3, 256)
    ctx = d.alpha.context
    # independent oracle: exact series summed past the requested precision
    s = F(1, 2) + 3 * sum(F(1, 6 ** (2**k)) for k in range(1, 9))
    oracle = ctx.mpf(s.numerator) / s.denominator
    # truncation tail plus rounding of the stored 288-bit value
    ok = abs(d.alpha - oracle) <= d.tail_bound + ctx.ldexp(1, -(ctx.prec - 1)) and d.tail_bound < ctx.ldexp(1, -256)
    ok = ok and abs(float(d.alpha) - 0.58564993427175385) < 1e-16
    ok = ok and d.alpha + d.beta == 1
    for direction in (SIGMA, TAU):
        chain = dribble_chain(F(1, 2), 3, 8, direction)
        ok = ok and all(overlap_fraction(u, v) == F(1, 2) for u, v in zip(chain, chain[1:]))
    report(9, ok, f"alpha(1/2, 3) = {ctx.nstr(d.alpha, 15)} within 2^{d.tail_bound_exponent}; symmetric about 1/2; consecutive descendant shadows overlap by exactly half", 1)


def test_c10_lagrange(report, modular):
    e5 = lagrange_estimate([1] * 200, 40)
    e8 = lagrange_estimate([2] * 200, 40)
    ok = abs(e5 - math.sqrt(5)) < 1e-6 and abs(e8 - math.sqrt(8)) < 1e-6

    import mpmath

    ctx = mpmath.MPContext()
    ctx.prec = 1024
    rng = random.Random(3)
    ellipses = [modular.t0, modular.t1, modular.t2] + [n.E for n in enumerate_tree(modular, 3)]
    hits = 0
    for _ in range(100):
        A = rng.choice(ellipses)
        chain = shadow_chain(A, 3, rng.choice((LEFT, RIGHT)), rng.randint(1, 12))
        s = chain[-1]
        u = F(rng.getrandbits(1000), 2**1000) * 2 - 1
        x = s.center + s.radius * u * F(999, 1000)
        point = ctx.mpf(x.numerator) / x.denominator
        if lagrange_estimate(point, 60, precision=1024) >= 3 - 0.05:
            hits += 1
    ok = ok and hits >= 95
    report(10, ok, f"sqrt5 err {float(abs(e5 - math.sqrt(5))):.0e}, sqrt8 err {float(abs(e8 - math.sqrt(8))):.0e}; {hits}/100 shadow points estimate >= 2.95", 10)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
