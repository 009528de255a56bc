"""
Horocycle shadows and the chains of them that fill an excision interval.

The a-horocycle anchored at the parabolic point alpha/gamma projects to the
closed interval of radius 1/(a gamma^2) about alpha/gamma.  For an order-two
elliptic A, the shadows of N^k(oo) (N = A S^a, marching left) and of
M^k(oo) (M = A S^-a, marching right) overlap consecutively and fill the open
excision interval I_A of width a - sqrt(a^2 - 4/gamma^2).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import AnchoredAtInfinity, NotHyperbolic
from .mobius import Mobius, arith_for, mat_mul
from .scalar import compare_sqrt, format_scalar, is_rational, simplify

LEFT, RIGHT = "left", "right"


@dataclass(frozen=True)
class Shadow:
    center: object
    radius: object
    gamma: object

    @property
    def left(self):
        return simplify(self.center - self.radius)

    @property
    def right(self):
        return simplify(self.center + self.radius)


def shadow_of(v: Mobius, a, arith=None) -> Shadow:
    """Shadow of the a-horocycle anchored at v(oo) = alpha/gamma."""
    arith = arith or arith_for(v)
    if v.gamma == 0:
        raise AnchoredAtInfinity("v(oo) = oo has no shadow on the real line")
    g = v.gamma
    return Shadow(arith.div(v.alpha, g), arith.div(1, a * g * g), abs(g))


def shadow_at(center, gamma, a, arith) -> Shadow:
    return Shadow(center, arith.div(1, a * gamma * gamma), gamma)


def overlaps(s1: Shadow, s2: Shadow) -> bool:
    """Strict overlap of two shadows; identical centers count as overlapping."""
    lo, hi = (s1, s2) if s1.center <= s2.center else (s2, s1)
    if lo.center == hi.center:
        return True
    return lo.center + lo.radius > hi.center - hi.radius


# -- excision intervals ------------------------------------------------------


def _radicand(gamma, a, arith):
    """a^2/4 - 1/gamma^2, exact in exact mode."""
    return simplify(arith.div(a * a, 4) - arith.div(1, gamma * gamma))


def excision_half_width(gamma, a, arith):
    """a/2 - sqrt(a^2/4 - 1/gamma^2), evaluated without cancellation."""
    if a * gamma < 2:
        raise NotHyperbolic(f"a gamma = {a * gamma} < 2")
    inv_g2 = 1 / arith.real(gamma) ** 2
    ra = arith.real(a)
    return inv_g2 / (ra / 2 + arith.mp.sqrt(ra * ra / 4 - inv_g2))


def excision_width(gamma, a, arith):
    """w_a(gamma) = a - sqrt(a^2 - 4/gamma^2)."""
    return 2 * excision_half_width(gamma, a, arith)


@dataclass(frozen=True)
class ExcisionInterval:
    """Open interval (center - half_width, center + half_width)."""

    center: object
    half_width: object
    gamma: object
    a: object
    source: Mobius = None

    @property
    def width(self):
        return 2 * self.half_width

    @property
    def left(self):
        return self.center - self.half_width

    @property
    def right(self):
        return self.center + self.half_width

    def radicand(self, arith):
        return _radicand(self.gamma, self.a, arith)

    def compare_right(self, r, arith):
        """Sign of r - right endpoint; exact for rational r in exact mode."""
        if arith.exact and is_rational(r):
            half_a = arith.div(self.a, 2)
            return compare_sqrt(self.radicand(arith), simplify(half_a - (r - self.center)))
        return arith.sign(arith.real(r) - self.right)

    def compare_left(self, r, arith):
        """Sign of r - left endpoint; exact for rational r in exact mode."""
        if arith.exact and is_rational(r):
            half_a = arith.div(self.a, 2)
            return -compare_sqrt(self.radicand(arith), simplify(r - self.center + half_a))
        return arith.sign(arith.real(r) - self.left)


def _check_hyperbolic(A, a, arith):
    if not arith.is_zero(A.trace, scale=max(1, abs(A.alpha))):
        raise NotHyperbolic(f"{A} is not an order-two elliptic")
    if not a * A.gamma > 2:
        raise NotHyperbolic(f"A S^-a has |trace| = {a * A.gamma} <= 2")


def excision_interval(A: Mobius, a, arith=None) -> ExcisionInterval:
    arith = arith or arith_for(A)
    _check_hyperbolic(A, a, arith)
    center = arith.div(A.alpha, A.gamma)
    return ExcisionInterval(center, excision_half_width(A.gamma, a, arith), A.gamma, a, A)


# -- chains and certificates -------------------------------------------------


def _step_matrix(A: Mobius, a, direction):
    if direction not in (LEFT, RIGHT):
        raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")
    s = a if direction == LEFT else -a
    alpha, beta, gamma, delta = A.entries
    # A S^s = [[alpha, alpha s + beta], [gamma, gamma s + delta]]
    return (alpha, simplify(alpha * s + beta), gamma, simplify(gamma * s + delta))


def chain_powers(A: Mobius, a, direction, K):
    """Raw SL(2) powers N^1 .. N^K of N = A S^(+-a) as row-major tuples."""
    step = _step_matrix(A, a, direction)
    out = [step]
    for _ in range(K - 1):
        out.append(mat_mul(out[-1], step))
    return out


def shadow_chain(A: Mobius, a, direction, K, arith=None):
    """Shadows of N^k(oo), k = 1..K, with N = A S^a (left) or A S^-a (right)."""
    arith = arith or arith_for(A)
    _check_hyperbolic(A, a, arith)
    if K < 1:
        raise ValueError("K must be >= 1")
    chain = []
    for alpha, _, gamma, _ in chain_powers(A, a, direction, K):
        chain.append(Shadow(arith.div(alpha, gamma), arith.div(1, a * gamma * gamma), abs(gamma)))
    return chain


def chain_hull(chain):
    return min(s.left for s in chain), max(s.right for s in chain)


@dataclass(frozen=True)
class OverlapCertificate:
    """gamma_{k+1}^2 + gamma_k^2 - a' gamma gamma_k gamma_{k+1} = gamma^2 and
    alpha_{k+1} gamma_k - gamma_{k+1} alpha_k = -gamma, with a' = +a (left) or -a (right)."""

    k: int
    lhs: object
    rhs: object
    cross: object
    neg_gamma: object

    def holds(self, arith=None):
        if arith is None or arith.exact:
            return self.lhs == self.rhs and self.cross == self.neg_gamma
        return arith.eq(self.lhs, self.rhs) and arith.eq(self.cross, self.neg_gamma)


def overlap_certificates(A: Mobius, a, K, direction=LEFT, arith=None):
    """Certificates for k = 1..K from exact powers of N."""
    arith = arith or arith_for(A)
    _check_hyperbolic(A, a, arith)
    s = a if direction == LEFT else -a
    gamma = A.gamma
    powers = chain_powers(A, a, direction, K + 1)
    out = []
    for k in range(1, K + 1):
        ak, _, gk, _ = powers[k - 1]
        ak1, _, gk1, _ = powers[k]
        lhs = simplify(gk1 * gk1 + gk * gk - s * gamma * gk * gk1)
        cross = simplify(ak1 * gk - gk1 * ak)
        out.append(OverlapCertificate(k, lhs, simplify(gamma * gamma), cross, simplify(-gamma)))
    return out


def overlap_certificate(A: Mobius, a, k, direction=LEFT, arith=None) -> OverlapCertificate:
    if k < 1:
        raise ValueError("k must be >= 1")
    return overlap_certificates(A, a, k, direction, arith)[-1]


def chain_csv(chain, arith=None) -> str:
    """k, center, radius, overlap_with_previous -- one row per shadow."""
    fmt = arith.fmt if arith is not None else format_scalar
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "center", "radius", "overlap_with_previous"])
    prev = None
    for k, s in enumerate(chain, start=1):
        w.writerow([k, fmt(s.center), fmt(s.radius), "" if prev is None else str(overlaps(prev, s)).lower()])
        prev = s
    return buf.getvalue()
