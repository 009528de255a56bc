"""
Iterated excision on one period [0, a).

I_T1 and I_T2 are excised first, then I_E for every node (E, F, G) of the
adjusted Fricke tree, all reduced modulo the translation x -> x + a.  The
excised intervals are pairwise disjoint, so the remaining length is
a - sum(widths) and equals a (1 - 2 S) with S the McShane partial sum over
the same geodesics, because w_a(z) = 2a / (1 + e^length).
"""

from __future__ import annotations

import csv
import io
import math

import mpmath
from dataclasses import dataclass, field
from fractions import Fraction

from gmpy2 import mpz

from .errors import DisjointnessViolation, NotHyperbolic
from .group import GroupData
from .scalar import is_rational, simplify
from .shadows import (
    LEFT,
    RIGHT,
    ExcisionInterval,
    excision_half_width,
    excision_interval,
    overlaps,
    shadow_chain,
)
from .tree import NU, enumerate_tree, exceptional_geodesics, heights_by_recurrence

DEPTH_CAP = 20
_LN2 = math.log(2)
S_VALUES = (0.5, 0.25, 0.1)
EPSILONS = (1e-2, 1e-4, 1e-6)


def tree_depth(path):
    """Number of lambda/rho moves below the root of the node's subtree."""
    return len(path) - path.count(NU)


@dataclass(frozen=True)
class Excised:
    label: str
    level: int
    depth: int
    interval: ExcisionInterval
    offset: object  # center reduced into [0, a)
    x: object = field(repr=False, default=None)  # offset as mpf


@dataclass
class PeriodicCover:
    period: object
    depth: int
    items: list
    excised: list
    remaining: list
    arith: object = field(repr=False)
    base: object = 0
    lengths: list = field(default_factory=list)  # accurate lengths of ``remaining``
    unresolved: int = 0  # adjacent pairs without a certified positive gap

    @property
    def excised_length(self):
        return sum((it.interval.width for it in self.items), self.arith.real(0))


def _mod(x, a, arith):
    if is_rational(x) and is_rational(a):
        return simplify(Fraction(x) % Fraction(a))
    r = arith.mp.fmod(arith.real(x), arith.real(a))
    return r + arith.real(a) if r < 0 else r


def _diff(u, v, arith):
    """u - v as mpf, subtracting exactly first when both are rational."""
    if is_rational(u) and is_rational(v):
        return arith.real(simplify(u - v))
    return arith.real(u) - arith.real(v)


def _exact_gap(c1, iv1, c2, iv2, arith):
    """
    (sign, value) of g = (c2 - c1) - h1 - h2 for rational data.

    With R = a - (c2 - c1) and h_i = a/2 - sqrt(Q_i), clearing denominators
    gives S g = sqrt(A) + sqrt(B) - C for integers A, B, C and S > 0; the
    sign and an accurate value follow from rationalizing twice.  Adjacent
    gaps at depth >= 8 routinely fall below 2^-256, so this cannot be left
    to floating point.
    """
    a = Fraction(iv1.a)
    an, ad = mpz(a.numerator), mpz(a.denominator)
    f1, f2 = Fraction(c1), Fraction(c2)
    p1, q1, p2, q2 = (mpz(v) for v in (f1.numerator, f1.denominator, f2.numerator, f2.denominator))
    rn = an * q1 * q2 - ad * (p2 * q1 - p1 * q2)
    rd = ad * q1 * q2
    g1, g2 = Fraction(iv1.gamma), Fraction(iv2.gamma)
    g1n, g2n = mpz(g1.numerator), mpz(g2.numerator)
    m1 = an * an * g1n * g1n - 4 * ad * ad * mpz(g1.denominator) ** 2
    m2 = an * an * g2n * g2n - 4 * ad * ad * mpz(g2.denominator) ** 2
    A = m1 * (g2n * rd) ** 2
    B = m2 * (g1n * rd) ** 2
    C = 2 * ad * g1n * g2n * rn
    mp = arith.mp
    scale = mp.mpf(2 * ad * g1n * g2n * rd)
    ra, rb = mp.sqrt(mp.mpf(A)), mp.sqrt(mp.mpf(B))
    if C <= 0:
        sign = 0 if (C == 0 and A == 0 and B == 0) else 1
        return sign, (ra + rb - mp.mpf(C)) / scale
    T = C * C - A - B
    if T < 0:
        return 1, (2 * ra * rb - mp.mpf(T)) / ((ra + rb + mp.mpf(C)) * scale)
    K = 4 * A * B - T * T
    sign = (K > 0) - (K < 0)
    value = mp.mpf(K) / ((2 * ra * rb + mp.mpf(T)) * (ra + rb + mp.mpf(C)) * scale)
    return sign, value


def gap(c1, iv1, c2, iv2, arith):
    """
    (sign, value) of the free space between the right end of the interval at
    c1 and the left end of the interval at c2.  A floating filter with an
    error bound settles wide gaps; narrow ones go to the exact route in exact
    mode.  In float mode a gap inside the rounding bound is unresolved and
    reported with sign 0.
    """
    d = _diff(c2, c1, arith)
    h1, h2 = iv1.half_width, iv2.half_width
    g = d - h1 - h2
    err = (abs(d) + h1 + h2 + 1) * arith.mp.ldexp(1, 40 - arith.precision)
    if abs(g) > err:
        return (1 if g > 0 else -1), g
    if arith.exact and is_rational(c1) and is_rational(c2) and is_rational(iv1.a):
        return _exact_gap(c1, iv1, c2, iv2, arith)
    return 0, arith.real(0)


def gap_sign(c1, iv1, c2, iv2, arith):
    return gap(c1, iv1, c2, iv2, arith)[0]


def _collect(group: GroupData, nodes):
    ar, a = group.arith, group.a
    items = []

    def add(label, level, depth, A):
        iv = excision_interval(A, a, ar)
        off = _mod(iv.center, a, ar)
        items.append(Excised(label, level, depth, iv, off, ar.real(off)))

    add("T1", -1, -1, group.t1)
    add("T2", -1, -1, group.t2)
    for node in nodes:
        add(node.path, node.level, tree_depth(node.path), node.E)
    return items


def adjacent_gaps(items, period, arith):
    """
    Gaps between cyclically adjacent intervals (``items`` sorted by offset),
    certifying pairwise disjoint interiors on R/aZ along the way.
    """
    n = len(items)
    violations = []
    for it in items:
        if not it.interval.width < arith.real(period):
            violations.append((it.label, it.label))
    gaps = []
    for i in range(n):
        cur, nxt = items[i], items[(i + 1) % n]
        c2 = nxt.offset + period if i == n - 1 else nxt.offset
        sign, value = gap(cur.offset, cur.interval, c2, nxt.interval, arith)
        if sign < 0:
            violations.append((cur.label, nxt.label))
        gaps.append(value if sign > 0 else arith.real(0))
    if violations:
        detail = ", ".join(f"{p!r}/{q!r}" for p, q in violations[:10])
        raise DisjointnessViolation(f"{len(violations)} overlapping excision pair(s): {detail}", violations)
    return gaps


def restrict(items, gaps, keep, arith):
    """
    Sub-family of a certified family with its gaps.  A gap of the subfamily
    is a sum of skipped widths and gaps, so no cancellation occurs.
    """
    n = len(items)
    idx = [i for i in range(n) if keep(items[i])]
    if not idx:
        return [], []
    sub_gaps = []
    for j, i in enumerate(idx):
        stop = idx[(j + 1) % len(idx)]
        span = stop - i if stop > i else stop - i + n
        acc = gaps[i]
        for k in range(i + 1, i + span):
            k %= n
            acc += items[k].interval.width + gaps[k]
        sub_gaps.append(acc)
    return [items[i] for i in idx], sub_gaps


def cover_from_items(items, period, depth, arith, gaps=None):
    """
    Sort, certify disjointness (unless ``gaps`` of an already certified,
    sorted family are supplied) and build the complement.  Neighbours that
    touch share an endpoint and leave no remaining interval.
    """
    ar = arith
    ra = ar.real(period)
    zero = ar.real(0)
    if gaps is None:
        items = sorted(items, key=lambda it: it.offset)
        gaps = adjacent_gaps(items, period, ar)
    n = len(items)

    # items are sorted, so only pieces split at the wrap point are out of order
    excised, head, tail = [], [], []
    for it in items:
        lo, hi = it.x - it.interval.half_width, it.x + it.interval.half_width
        if lo < 0:
            head.append((zero, hi))
            tail.append((lo + ra, ra))
        elif hi > ra:
            excised.append((lo, ra))
            head.append((zero, hi - ra))
        else:
            excised.append((lo, hi))
    excised = head + excised + tail

    pieces = []
    if n == 0:
        pieces.append((zero, ra, ra))
    for it, g in zip(items, gaps):
        if not g > 0:
            continue
        lo = it.x + it.interval.half_width
        if lo >= ra:
            lo -= ra
        if lo + g > ra:
            pieces += [(lo, ra, ra - lo), (zero, lo + g - ra, g - (ra - lo))]
        else:
            pieces.append((lo, lo + g, g))
    pieces.sort(key=lambda p: float(p[0]))
    remaining = [(lo, hi) for lo, hi, _ in pieces]
    lengths = [ln for _, _, ln in pieces]
    unresolved = sum(1 for g in gaps if not g > 0)
    return PeriodicCover(period, depth, items, excised, remaining, ar, lengths=lengths, unresolved=unresolved)


def build_excision(group: GroupData, depth: int, nodes=None) -> PeriodicCover:
    """Cover with I_T1, I_T2 and I_E for every tree node to ``depth``."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if nodes is None:
        nodes = enumerate_tree(group, depth)
    else:
        nodes = [n for n in nodes if tree_depth(n.path) <= depth]
    return cover_from_items(_collect(group, nodes), group.a, depth, group.arith)


def remaining_length(cover: PeriodicCover):
    return cover.arith.mp.fsum(cover.lengths)


def s_sum(cover: PeriodicCover, s):
    """Sum of (remaining interval length)^s."""
    if not 0 < s <= 1:
        raise ValueError("need 0 < s <= 1")
    if s == 1:
        return float(remaining_length(cover))
    # double precision is plenty for a trend report; ln^s via the binary exponent
    # so that lengths below the double range do not need mpf powers
    return math.fsum(math.exp(s * (math.log(ln.man) + ln.exp * _LN2)) for ln in cover.lengths)


def covering_number(cover: PeriodicCover, eps):
    """N(eps) = sum of ceil(len_i / eps) over remaining intervals."""
    mp = cover.arith.mp
    eps = mp.mpf(eps)
    return sum(1 if ln <= eps else int(mp.ceil(ln / eps)) for ln in cover.lengths)


# -- McShane bookkeeping -------------------------------------------------------


def mcshane_term(z, a, arith):
    """1 / (1 + e^length) for the geodesic of trace a z."""
    if not a * z > 2:
        raise NotHyperbolic(f"a z = {a * z} <= 2")
    t = arith.real(a) * arith.real(z) / 2
    e_len = (t + arith.mp.sqrt(t * t - 1)) ** 2  # e^length, length = 2 arccosh(t)
    return 1 / (1 + e_len)


def geodesic_heights(group: GroupData, depth: int, nodes=None):
    """z-values of the two exceptional geodesics and every node to ``depth``."""
    zs = [g.z for g in exceptional_geodesics(group)]
    if nodes is None:
        # heights alone do not need the matrices
        zs.extend(z for _, _, _, z in heights_by_recurrence(group, depth))
    else:
        zs.extend(n.z for n in nodes if tree_depth(n.path) <= depth)
    return zs


def mcshane_partial_sum(group: GroupData, depth: int, nodes=None):
    ar = group.arith
    return ar.mp.fsum(mcshane_term(z, group.a, ar) for z in geodesic_heights(group, depth, nodes))


def width_identity_residual(z, a, arith):
    """|w_a(z) - 2a/(1 + e^length)| relative to w_a(z)."""
    w = 2 * excision_half_width(z, a, arith)
    rhs = 2 * arith.real(a) * mcshane_term(z, a, arith)
    return abs(w - rhs) / w


# -- ordering ------------------------------------------------------------------


@dataclass
class OrderingReport:
    checked: int = 0
    skipped: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def _lookup_key(gamma, center, a, arith):
    if arith.exact:
        return (gamma, _mod(center, a, arith))
    digits = max(10, arith.precision // 8)
    rc = _mod(center, a, arith)
    if abs(rc - arith.real(a)) < arith.tol:
        rc = arith.real(0)
    return (arith.mp.nstr(arith.real(gamma), digits), arith.mp.nstr(rc, digits))


def ordering_checks(group: GroupData, depth: int, nodes=None) -> OrderingReport:
    """
    For every non-root node (E, F, G): I_E sits strictly between the excised
    I_{S^-a G S^a} and I_F, inside their gap, whose length equals
    F(oo) + r_a(y) - (G(oo) - r_a(x)) and is at least w_a(z); both flanks are
    excised at a smaller level.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    ar, a = group.arith, group.a
    if nodes is None:
        nodes = enumerate_tree(group, depth)
    level_of = {}
    for name, A in (("T1", group.t1), ("T2", group.t2)):
        level_of[_lookup_key(A.gamma, ar.div(A.alpha, A.gamma), a, ar)] = -1
    for n in nodes:
        level_of.setdefault(_lookup_key(n.E.gamma, ar.div(n.E.alpha, n.E.gamma), a, ar), n.level)

    rep = OrderingReport()
    mp = ar.mp
    for n in nodes:
        if not n.path:
            rep.skipped.append(n.path)
            continue
        rep.checked += 1
        G_left = group.s_inv @ n.G @ group.s_a
        flank_l = excision_interval(G_left, a, ar)
        flank_r = excision_interval(n.F, a, ar)
        mid = excision_interval(n.E, a, ar)
        problems = []
        if gap_sign(flank_l.center, flank_l, mid.center, mid, ar) < 0:
            problems.append("overlaps left flank")
        if gap_sign(mid.center, mid, flank_r.center, flank_r, ar) < 0:
            problems.append("overlaps right flank")
        if not (flank_l.center < mid.center < flank_r.center):
            problems.append("not between flanks")
        # ambient gap between the flanks
        r_x = mp.sqrt(ar.real(a) ** 2 / 4 - 1 / ar.real(n.x) ** 2)
        r_y = mp.sqrt(ar.real(a) ** 2 / 4 - 1 / ar.real(n.y) ** 2)
        g_center = ar.div(n.G.alpha, n.G.gamma)
        f_center = ar.div(n.F.alpha, n.F.gamma)
        ambient = _diff(f_center, g_center, ar) + r_x + r_y
        gap = _diff(flank_r.center, flank_l.center, ar) - flank_l.half_width - flank_r.half_width
        if not ar.eq(ambient, gap):
            problems.append(f"ambient length {ambient} != flank gap {gap}")
        if mid.width > ambient * (1 + ar.tol):
            problems.append("width exceeds ambient length")
        for flank, label in ((G_left, "S^-a G S^a"), (n.F, "F")):
            lvl = level_of.get(_lookup_key(flank.gamma, ar.div(flank.alpha, flank.gamma), a, ar))
            if lvl is None:
                problems.append(f"flank {label} never excised")
            elif not lvl < n.level:
                problems.append(f"flank {label} excised at level {lvl} >= {n.level}")
        if problems:
            rep.violations.append((n.path, problems))
    return rep


# -- reports -------------------------------------------------------------------


@dataclass
class DepthRow:
    depth: int
    remaining: object
    mcshane: object
    s_sums: dict
    covering: dict
    identity_residual: object
    identity_ok: bool
    intervals: int


def excision_history(group: GroupData, max_depth: int, nodes=None, identity_tol=1e-6):
    """One DepthRow per depth 0..max_depth, sharing a single enumeration."""
    if not 0 <= max_depth <= DEPTH_CAP:
        raise ValueError(f"depth must be in [0, {DEPTH_CAP}]")
    ar, a = group.arith, group.a
    if nodes is None:
        nodes = enumerate_tree(group, max_depth)
    items = sorted(_collect(group, nodes), key=lambda it: it.offset)
    gaps = adjacent_gaps(items, a, ar)
    terms = {}
    rows = []
    # coarsen from the deepest family down so each level costs its own size
    for d in range(max_depth, -1, -1):
        items, gaps = restrict(items, gaps, lambda it: it.depth <= d, ar)
        cover = cover_from_items(items, a, d, ar, gaps=gaps)
        L = remaining_length(cover)
        S = ar.mp.fsum(_term(it, a, ar, terms) for it in items)
        resid = abs(L - ar.real(a) * (1 - 2 * S))
        rows.append(
            DepthRow(
                depth=d,
                remaining=L,
                mcshane=S,
                s_sums={s: s_sum(cover, s) for s in S_VALUES},
                covering={e: covering_number(cover, e) for e in EPSILONS},
                identity_residual=resid,
                identity_ok=bool(resid < identity_tol * ar.real(a)),
                intervals=len(items),
            )
        )
    return rows[::-1]


def _term(item, a, arith, cache):
    key = item.label
    if key not in cache:
        cache[key] = mcshane_term(item.interval.gamma, a, arith)
    return cache[key]


def history_csv(rows, arith) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["depth", "intervals", "L_d", "S_d"]
    head += [f"s_sum_{s}" for s in S_VALUES]
    head += [f"N_{e:g}" for e in EPSILONS]
    head += ["identity_residual", "identity"]
    w.writerow(head)
    for r in rows:
        w.writerow(
            [r.depth, r.intervals, _num(r.remaining), _num(r.mcshane)]
            + [_num(r.s_sums[s], 12) for s in S_VALUES]
            + [r.covering[e] for e in EPSILONS]
            + [_num(r.identity_residual, 5), "PASS" if r.identity_ok else "FAIL"]
        )
    return buf.getvalue()


def _num(x, digits=20):
    """Fixed notation down to 1e-6, scientific below."""
    return mpmath.nstr(mpmath.mpf(x) if isinstance(x, float) else x, digits, min_fixed=-6, max_fixed=math.inf) if x else "0"


# -- SVG -----------------------------------------------------------------------


def figure_shadows(cover: PeriodicCover, chain_length=3, max_level=2):
    """(label, direction, k, Shadow) for the chains of the low-level excised elliptics."""
    ar, a = cover.arith, cover.period
    out = []
    for it in cover.items:
        if it.level > max_level:
            continue
        A = it.interval.source
        shift = simplify(it.offset - it.interval.center)
        for direction in (LEFT, RIGHT):
            for k, s in enumerate(shadow_chain(A, a, direction, chain_length, ar), start=1):
                moved = type(s)(simplify(s.center + shift), s.radius, s.gamma)
                out.append((it.label, direction, k, moved))
    return out


def shadows_csv(shadows, arith) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["source", "direction", "k", "center", "radius", "overlap_with_previous"])
    prev = None
    for label, direction, k, s in shadows:
        ov = "" if k == 1 else str(overlaps(prev, s)).lower()
        w.writerow([label or "root", direction, k, arith.fmt(s.center), arith.fmt(s.radius), ov])
        prev = s
    return buf.getvalue()


def render_svg(cover: PeriodicCover, shadows, width=1000, height=420):
    """Static figure: the window [0, a), excised intervals and horocycle shadows."""
    ar = cover.arith
    a = float(ar.real(cover.period))
    margin = 30
    base = height - 40
    scale = (width - 2 * margin) / a
    X = lambda v: margin + float(v) * scale  # noqa: E731
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line class="axis" x1="{X(0):.3f}" y1="{base}" x2="{X(a):.3f}" y2="{base}" stroke="black"/>',
    ]
    for lo, hi in cover.excised:
        parts.append(
            f'<rect class="excised" x="{X(lo):.4f}" y="{base - 3}" width="{max(float(hi - lo) * scale, 0.01):.4f}" '
            f'height="6" fill="crimson" opacity="0.7"/>'
        )
    for label, direction, k, s in shadows:
        cx, r = float(ar.real(s.center)), float(ar.real(s.radius))
        parts.append(
            f'<g class="shadow" data-source="{label or "root"}" data-direction="{direction}" data-k="{k}">'
            f'<circle cx="{X(cx):.4f}" cy="{base - r * scale:.4f}" r="{r * scale:.4f}" fill="none" stroke="steelblue"/>'
            f'<line x1="{X(cx - r):.4f}" y1="{base + 8}" x2="{X(cx + r):.4f}" y2="{base + 8}" stroke="steelblue"/>'
            "</g>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
