"""
Scalar arithmetic in two modes.

``exact``  -- values are ``int`` / ``fractions.Fraction``; equality is exact.
``float``  -- values are mpmath ``mpf`` numbers at a fixed binary precision,
              compared with a tolerance of 2**(-precision/2) by default.

Irrational quantities (square roots, arccosh, exp) are always produced as
``mpf`` at the context precision, also in exact mode.  A context owns its own
``mpmath.MPContext`` so that the global mpmath precision is never touched.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import isqrt

import mpmath
from mpmath.libmp import repr_dps, to_str

DEFAULT_PRECISION = int(os.environ.get("LAGRANGE3_PRECISION", "256"))

EXACT = "exact"
FLOAT = "float"


def simplify(x):
    """Collapse an integral Fraction to int (keeps big-int products cheap)."""
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def is_rational(x):
    return isinstance(x, (int, Fraction))


def rational_sqrt(q):
    """Exact square root of a non-negative rational, or None if irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return simplify(Fraction(rn, rd))
    return None


def compare_sqrt(q, r):
    """Sign of sqrt(q) - r for rationals q >= 0 and r, decided exactly."""
    if q < 0:
        raise ValueError("square root of a negative rational")
    if r < 0:
        return 1
    rr = r * r
    return (q > rr) - (q < rr)


def compare_sqrt_sum(q1, q2, r):
    """Sign of sqrt(q1) + sqrt(q2) - r for rationals, decided exactly."""
    if r <= 0:
        return 0 if (r == 0 and q1 == 0 and q2 == 0) else 1
    # sqrt(q1) + sqrt(q2) vs r  <=>  2 sqrt(q1 q2) vs r^2 - q1 - q2
    t = r * r - q1 - q2
    if t < 0:
        return 1
    lhs = 4 * q1 * q2
    rhs = t * t
    return (lhs > rhs) - (lhs < rhs)


class Arith:
    """A scalar context: mode tag plus precision for irrational values."""

    def __init__(self, mode=EXACT, precision=None, tolerance=None):
        if mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown scalar mode {mode!r}")
        self.mode = mode
        self.precision = int(precision or DEFAULT_PRECISION)
        self.mp = mpmath.MPContext()
        self.mp.prec = self.precision
        if tolerance is None:
            tolerance = self.mp.ldexp(1, -(self.precision // 2))
        self.tol = self.mp.mpf(tolerance)

    def __repr__(self):
        return f"Arith({self.mode!r}, precision={self.precision})"

    @property
    def exact(self):
        return self.mode == EXACT

    # -- construction -------------------------------------------------

    def scalar(self, value):
        """Convert user input (str, int, Fraction, float, mpf) to the mode's type."""
        if self.exact:
            if isinstance(value, str):
                value = parse_scalar(value, self)
            if isinstance(value, (int, Fraction)):
                return simplify(Fraction(value))
            if isinstance(value, float):
                return simplify(Fraction(value))
            raise TypeError(f"exact mode needs a rational value, got {value!r}")
        if isinstance(value, str):
            value = parse_scalar(value, self)
        return self.real(value)

    def real(self, value):
        """An mpf approximation of any scalar at the context precision."""
        if isinstance(value, Fraction):
            return self.mp.mpf(value.numerator) / value.denominator
        return self.mp.mpf(value)

    def div(self, x, y):
        if self.exact:
            return simplify(Fraction(x) / Fraction(y))
        return x / y

    def sqrt(self, value):
        if self.exact and is_rational(value):
            root = rational_sqrt(value)
            if root is not None:
                return root
        return self.mp.sqrt(self.real(value))

    # -- comparison ---------------------------------------------------

    def is_zero(self, value, scale=1):
        if is_rational(value):
            return value == 0
        return abs(value) <= self.tol * scale

    def eq(self, x, y):
        if is_rational(x) and is_rational(y):
            return x == y
        scale = max(1, abs(self.real(x)), abs(self.real(y)))
        return abs(self.real(x) - self.real(y)) <= self.tol * scale

    def sign(self, value):
        if self.is_zero(value):
            return 0
        return 1 if value > 0 else -1

    # -- serialisation ------------------------------------------------

    def fmt(self, value):
        return format_scalar(value, self.precision)


def format_scalar(value, precision=DEFAULT_PRECISION):
    """``num/den`` for rationals, ``<decimal>@<bits>`` for mpf values."""
    if isinstance(value, (int, Fraction)):
        q = Fraction(value)
        return f"{q.numerator}/{q.denominator}"
    mpf_value = value if hasattr(value, "_mpf_") else mpmath.mpf(value)
    return f"{to_str(mpf_value._mpf_, repr_dps(precision))}@{precision}"


def parse_scalar(text, arith=None):
    """Inverse of :func:`format_scalar`; also accepts plain decimals."""
    text = text.strip()
    if "@" in text:
        digits, bits = text.split("@", 1)
        ctx = mpmath.MPContext()
        ctx.prec = int(bits)
        value = ctx.mpf(digits)
        if arith is not None and not arith.exact:
            return arith.mp.mpf(value)
        return value
    if arith is not None and not arith.exact:
        if "/" in text:
            num, den = text.split("/", 1)
            return arith.mp.mpf(int(num)) / int(den)
        return arith.mp.mpf(text)
    return simplify(Fraction(text))
