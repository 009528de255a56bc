"""
Determinant-one Mobius transformations in PSL(2, R).

Matrices are stored sign-canonicalized (gamma > 0, or gamma = 0 and alpha > 0),
so that exact equality of ``Mobius`` values is equality in the projective group.
Entries are ints/Fractions in exact mode or mpf values in float mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import NotElliptic
from .scalar import FLOAT, Arith, is_rational, simplify

_DEFAULT_FLOAT = None


def _div(x, y):
    if is_rational(x) and is_rational(y):
        return simplify(Fraction(x) / Fraction(y))
    return x / y


def mat_mul(m, n):
    """Raw 2x2 product of row-major 4-tuples, no sign normalisation."""
    a, b, c, d = m
    e, f, g, h = n
    return (
        simplify(a * e + b * g),
        simplify(a * f + b * h),
        simplify(c * e + d * g),
        simplify(c * f + d * h),
    )


@dataclass(frozen=True, slots=True)
class Mobius:
    alpha: object
    beta: object
    gamma: object
    delta: object

    @classmethod
    def make(cls, alpha, beta, gamma, delta):
        """Build the canonical projective representative."""
        if gamma < 0 or (gamma == 0 and alpha < 0):
            alpha, beta, gamma, delta = -alpha, -beta, -gamma, -delta
        return cls(simplify(alpha), simplify(beta), simplify(gamma), simplify(delta))

    @classmethod
    def from_entries(cls, entries):
        return cls.make(*entries)

    @property
    def entries(self):
        return (self.alpha, self.beta, self.gamma, self.delta)

    @property
    def trace(self):
        return simplify(self.alpha + self.delta)

    @property
    def det(self):
        return simplify(self.alpha * self.delta - self.beta * self.gamma)

    def __matmul__(self, other):
        return Mobius.from_entries(mat_mul(self.entries, other.entries))

    def inverse(self):
        return Mobius.make(self.delta, -self.beta, -self.gamma, self.alpha)

    def close_to(self, other, arith=None):
        """Projective equality up to the arith tolerance; in float mode a
        rounded gamma can keep the sign normalization from matching."""
        arith = arith or arith_for(self, other)
        if all(arith.eq(u, v) for u, v in zip(self.entries, other.entries)):
            return True
        return all(arith.eq(u, -v) for u, v in zip(self.entries, other.entries))

    def to_list(self, arith=None):
        arith = arith or arith_for(self)
        return [arith.fmt(v) for v in self.entries]

    def __repr__(self):
        return "Mobius([[{}, {}], [{}, {}]])".format(*map(_short, self.entries))


def _short(v):
    if is_rational(v):
        return str(v)
    return str(float(v))


def arith_for(*matrices):
    """Exact context for rational entries, a default float context otherwise."""
    global _DEFAULT_FLOAT
    if all(is_rational(v) for m in matrices for v in m.entries):
        return Arith()
    if _DEFAULT_FLOAT is None:
        _DEFAULT_FLOAT = Arith(FLOAT)
    return _DEFAULT_FLOAT


def identity():
    return Mobius(1, 0, 0, 1)


def translation(t):
    """z -> z + t."""
    return Mobius.make(1, t, 0, 1)


def mul(*ms):
    out = ms[0]
    for m in ms[1:]:
        out = out @ m
    return out


def inv(m):
    return m.inverse()


def conjugate(m, by):
    """by . m . by^-1"""
    return by @ m @ by.inverse()


def classify(m, arith=None):
    arith = arith or arith_for(m)
    t = abs(m.trace)
    if arith.eq(t, 2):
        return "parabolic"
    return "elliptic" if t < 2 else "hyperbolic"


# -- points ----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Point:
    """A point of the closed upper half-plane; ``y == 0`` marks a real boundary point."""

    x: object
    y: object = 0

    @property
    def height(self):
        return self.y

    @property
    def is_boundary(self):
        return self.y == 0

    def __add__(self, t):
        return Point(simplify(self.x + t), self.y)


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "INFINITY"

    is_boundary = True


INFINITY = _Infinity()

PointLike = Union[Point, _Infinity]


def apply(m: Mobius, p: PointLike) -> PointLike:
    """Fractional-linear action on the upper half-plane and its boundary."""
    a, b, c, d = m.entries
    if p is INFINITY:
        return INFINITY if c == 0 else Point(_div(a, c), 0)
    x, y = p.x, p.y
    if y == 0:
        den = c * x + d
        if den == 0:
            return INFINITY
        return Point(_div(a * x + b, den), 0)
    # (a z + b)/(c z + d) with z = x + iy and ad - bc = 1
    den = (c * x + d) ** 2 + (c * y) ** 2
    re = (a * x + b) * (c * x + d) + a * c * y * y
    return Point(_div(re, den), _div(y * m.det, den))


def fixed_point(m: Mobius, arith=None) -> Point:
    """Upper half-plane fixed point (alpha + i)/gamma of an order-two elliptic."""
    arith = arith or arith_for(m)
    if not arith.is_zero(m.trace, scale=max(1, abs(m.alpha))):
        raise NotElliptic(f"trace {m.trace} is not zero")
    if m.gamma == 0:
        raise NotElliptic("order-two elliptic with gamma = 0")
    return Point(_div(m.alpha, m.gamma), _div(1, m.gamma))
