"""Fricke triples and the signature (0; 2, 2, 2; oo) groups they generate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InvalidTriple,
    IrrationalCompletion,
    NonrealRoot,
    NoNormalizedCompletion,
)
from .mobius import INFINITY, Mobius, apply, fixed_point, translation
from .scalar import Arith, compare_sqrt, is_rational, simplify


@dataclass(frozen=True)
class FrickeTriple:
    a: object
    b: object
    c: object
    arith: Arith

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        residual = a * a + b * b + c * c - a * b * c
        if not self.arith.is_zero(residual, scale=max(1, abs(a * b * c))):
            raise InvalidTriple(f"a^2 + b^2 + c^2 - abc = {residual} for ({a}, {b}, {c})")

    @classmethod
    def of(cls, a, b, c, arith=None):
        arith = arith or Arith()
        return cls(arith.scalar(a), arith.scalar(b), arith.scalar(c), arith)

    @property
    def normalized(self):
        ar = self.arith
        le = lambda u, v: u <= v or ar.eq(u, v)  # noqa: E731
        a, b, c = self.a, self.b, self.c
        half_ab = ar.div(a * b, 2)
        return a > 2 and le(a, b) and le(b, c) and c < half_ab and not ar.eq(c, half_ab)

    def as_strings(self):
        return [self.arith.fmt(v) for v in (self.a, self.b, self.c)]


def fricke_complete(a, b, arith=None):
    """The c in [b, ab/2) with a^2 + b^2 + c^2 = abc, for given 2 < a <= b."""
    arith = arith or Arith()
    a, b = arith.scalar(a), arith.scalar(b)
    if not (a > 2 and b > 2 and a <= b):
        raise ValueError(f"need 2 < a <= b, got a={a}, b={b}")
    disc = simplify(a * a * b * b - 4 * (a * a + b * b))
    if disc < 0:
        raise NonrealRoot(f"discriminant {disc} < 0 for (a, b) = ({a}, {b})")
    # the larger root (ab + sqrt(D))/2 is >= ab/2, so only the smaller can qualify
    if arith.exact:
        fits = disc > 0 and compare_sqrt(disc, a * b - 2 * b) <= 0
        if not fits:
            raise NoNormalizedCompletion(f"no root of c^2 - {a * b}c + {a * a + b * b} in [{b}, {a * b}/2)")
        root = arith.sqrt(disc)
        if not is_rational(root):
            raise IrrationalCompletion(f"completion of ({a}, {b}) is irrational; use float mode")
        return simplify(Fraction(a * b - root) / 2)
    c = (a * b - arith.sqrt(disc)) / 2
    if arith.is_zero(disc) or (c < b and not arith.eq(c, b)):
        raise NoNormalizedCompletion(f"no root of c^2 - abc + a^2 + b^2 in [b, ab/2) for ({a}, {b})")
    return b if arith.eq(c, b) else c


@dataclass(frozen=True)
class GroupData:
    triple: FrickeTriple
    t0: Mobius
    t1: Mobius
    t2: Mobius
    s_a: Mobius

    @property
    def a(self):
        return self.triple.a

    @property
    def arith(self):
        return self.triple.arith

    @property
    def s_inv(self):
        return self.s_a.inverse()

    @property
    def generators(self):
        return (self.t0, self.t1, self.t2)

    def product_residual(self):
        """Max entry difference between T2 T1 T0 and +-S^a (0 in exact mode)."""
        prod = self.t2 @ self.t1 @ self.t0
        return min(max(abs(u - sign * v) for u, v in zip(prod.entries, self.s_a.entries)) for sign in (1, -1))


def _order_two(alpha, gamma, arith):
    beta = arith.div(-1 - alpha * alpha, gamma)
    return Mobius.make(alpha, beta, gamma, -alpha)


def build_group(triple: FrickeTriple) -> GroupData:
    ar = triple.arith
    a, b, c = triple.a, triple.b, triple.c
    t0 = Mobius.make(0, ar.div(-a, c), ar.div(c, a), 0)
    t1 = _order_two(ar.div(a, c), ar.div(b, a), ar)
    t2 = _order_two(simplify(a - ar.div(b, c)), 1, ar)
    group = GroupData(triple, t0, t1, t2, translation(a))
    prod = t2 @ t1 @ t0
    if not prod.close_to(group.s_a, ar):
        raise InvalidTriple(f"T2 T1 T0 = {prod} is not the translation by {a}")
    return group


def fundamental_hexagon(E, F, G, a, arith=None):
    """Vertices (oo, e, f, F(e), g, a + e) of the fundamental domain."""
    e = fixed_point(E, arith)
    f = fixed_point(F, arith)
    g = fixed_point(G, arith)
    return (INFINITY, e, f, apply(F, e), g, e + a)
