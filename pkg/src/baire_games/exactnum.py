"""Exact points of the two carrier spaces.

The line carrier is ``[0, 1]`` with points drawn from the quadratic field
Q(sqrt 2); the Cantor carrier is ``{0,1}^N`` with eventually periodic points.
Every metric comparison made by the game engines goes through this module and
is decided without floating point.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "QuadPoint",
    "CantorPoint",
    "Ball",
    "Order",
    "DomainError",
    "Point",
    "as_quad",
    "parse_point",
    "format_point",
    "dist",
    "cmp_dist",
    "ball_subset",
    "step_bound_ok",
    "in_carrier",
    "carrier_of",
    "rational_between",
    "dyadic_floor",
    "SQRT2",
    "HALF_SQRT2",
]

Rational = Union[int, Fraction]


class DomainError(ValueError):
    """Raised when an operation receives points from the wrong space or range."""


class Order(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class QuadPoint:
    """The number ``a + b*sqrt(2)`` with rational ``a`` and ``b``.

    Instances double as exact values of catalog functions, so the class
    carries field arithmetic, exact ordering and an exact floor.
    """

    __slots__ = ("a", "b")

    def __init__(self, a: Rational = 0, b: Rational = 0):
        object.__setattr__(self, "a", a if type(a) is Fraction else _frac(a))
        object.__setattr__(self, "b", b if type(b) is Fraction else _frac(b))

    def __setattr__(self, name, value):
        raise AttributeError("QuadPoint is immutable")

    def __reduce__(self):
        return (QuadPoint, (self.a, self.b))

    # -- structure -------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b = self.a, self.b
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with 2 b^2 (never equal, sqrt 2 is irrational)
        return sa if a * a > 2 * b * b else sb

    def conjugate(self) -> "QuadPoint":
        return QuadPoint(self.a, -self.b)

    def floor(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        d = self.a.denominator * self.b.denominator
        big_a = self.a.numerator * self.b.denominator
        big_b = self.b.numerator * self.a.denominator
        s = math.isqrt(2 * big_b * big_b)
        # sqrt(2 B^2) lies strictly between s and s + 1
        if big_b > 0:
            return (big_a + s) // d
        return (big_a - s - 1) // d

    # -- arithmetic ------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "QuadPoint | None":
        if isinstance(other, QuadPoint):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadPoint(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadPoint(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadPoint(-self.a, -self.b)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadPoint(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadPoint(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.b == 0:
            if o.a == 0:
                raise ZeroDivisionError("division by zero")
            return QuadPoint(self.a / o.a, self.b / o.a)
        norm = o.a * o.a - 2 * o.b * o.b
        return self * o.conjugate() / norm

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = QuadPoint(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- comparison ------------------------------------------------------
    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare QuadPoint with {type(other).__name__}")
        if not self.b and not o.b:
            return (self.a > o.a) - (self.a < o.a)
        return (self - o).sign()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __str__(self):
        return format_point(self)

    def __repr__(self):
        return f"QuadPoint({format_point(self)!r})"


SQRT2 = QuadPoint(0, 1)
HALF_SQRT2 = QuadPoint(0, Fraction(1, 2))


def as_quad(x) -> QuadPoint:
    if isinstance(x, QuadPoint):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadPoint(x)
    if isinstance(x, str):
        p = parse_point(x)
        if not isinstance(p, QuadPoint):
            raise DomainError(f"{x!r} is not a line point")
        return p
    raise TypeError(f"cannot convert {type(x).__name__} to QuadPoint")


def _primitive_root(word: str) -> str:
    n = len(word)
    for k in range(1, n + 1):
        if n % k == 0 and word[:k] * (n // k) == word:
            return word[:k]
    return word


@dataclass(frozen=True)
class CantorPoint:
    """Eventually periodic binary sequence ``preamble + period^inf``.

    Construction canonicalizes: the period is reduced to its primitive root
    and rotated backwards into the preamble as far as possible, so two
    instances are equal iff they denote the same sequence.
    """

    preamble: str
    period: str

    def __post_init__(self):
        pre, per = self.preamble, self.period
        if not per or set(pre + per) - {"0", "1"}:
            raise DomainError(f"bad Cantor point {pre!r}:{per!r}")
        per = _primitive_root(per)
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1] + per[:-1]
        object.__setattr__(self, "preamble", pre)
        object.__setattr__(self, "period", per)

    def bit(self, i: int) -> str:
        if i < len(self.preamble):
            return self.preamble[i]
        return self.period[(i - len(self.preamble)) % len(self.period)]

    def prefix(self, n: int) -> str:
        return "".join(self.bit(i) for i in range(n))

    @property
    def eventually_zero(self) -> bool:
        return self.period == "0"

    def first_disagreement(self, other: "CantorPoint") -> int | None:
        """Least index where the sequences differ, ``None`` if equal."""
        if self == other:
            return None
        horizon = max(len(self.preamble), len(other.preamble)) + math.lcm(
            len(self.period), len(other.period)
        )
        for i in range(horizon):
            if self.bit(i) != other.bit(i):
                return i
        raise AssertionError("canonical forms differ but sequences agree")  # pragma: no cover

    def binary_value(self) -> Fraction:
        """The real number ``sum bit_i 2^-(i+1)``."""
        pre, per = self.preamble, self.period
        head = Fraction(int(pre, 2), 2 ** len(pre)) if pre else Fraction(0)
        tail = Fraction(int(per, 2), 2 ** len(per) - 1)
        return head + tail / 2 ** len(pre)

    def __str__(self):
        return f"{self.preamble}:{self.period}"


Point = Union[QuadPoint, CantorPoint]


def carrier_of(p) -> str:
    if isinstance(p, QuadPoint):
        return "line"
    if isinstance(p, CantorPoint):
        return "cantor"
    raise DomainError(f"not a point: {p!r}")


def in_carrier(p, carrier: str) -> bool:
    if carrier == "cantor":
        return isinstance(p, CantorPoint)
    if carrier == "line":
        return isinstance(p, QuadPoint) and 0 <= p <= 1
    raise DomainError(f"unknown carrier {carrier!r}")


# -- literals ----------------------------------------------------------------

_RAT = r"[+-]?\d+(?:/\d+)?"
_RAT_RE = re.compile(rf"^{_RAT}$")
_CANTOR_RE = re.compile(r"^([01]*):([01]+)$")


def _parse_rational(s: str) -> Fraction:
    if not _RAT_RE.match(s):
        raise DomainError(f"bad rational literal {s!r}")
    if "/" in s and int(s.split("/")[1]) == 0:
        raise DomainError(f"zero denominator in {s!r}")
    return Fraction(s)


def parse_point(text: str) -> Point:
    """Parse ``p/q``, ``p/q+r/s*sqrt2`` or ``pre:period`` literals."""
    s = "".join(text.split())
    m = _CANTOR_RE.match(s)
    if m:
        return CantorPoint(m.group(1), m.group(2))
    if "sqrt2" not in s:
        return QuadPoint(_parse_rational(s))
    if not s.endswith("sqrt2") or s.count("sqrt2") != 1:
        raise DomainError(f"bad quadratic literal {text!r}")
    head = s[: -len("sqrt2")]
    if head.endswith("*"):
        head = head[:-1]
        if not head or head[-1] in "+-":
            raise DomainError(f"bad quadratic literal {text!r}")
    split = max(head.rfind("+"), head.rfind("-"))
    if split > 0:
        a_txt, b_txt = head[:split], head[split:]
    else:
        a_txt, b_txt = "", head
    a = _parse_rational(a_txt) if a_txt else Fraction(0)
    if b_txt in ("", "+"):
        b = Fraction(1)
    elif b_txt == "-":
        b = Fraction(-1)
    else:
        b = _parse_rational(b_txt)
    return QuadPoint(a, b)


def _fmt_coeff(b: Fraction) -> str:
    if b == 1:
        return "sqrt2"
    if b == -1:
        return "-sqrt2"
    return f"{b}*sqrt2"


def format_point(p) -> str:
    if isinstance(p, CantorPoint):
        return str(p)
    if isinstance(p, (int, Fraction)):
        return str(Fraction(p))
    if not isinstance(p, QuadPoint):
        raise TypeError(f"cannot format {type(p).__name__}")
    if p.b == 0:
        return str(p.a)
    if p.a == 0:
        return _fmt_coeff(p.b)
    tail = _fmt_coeff(p.b)
    return f"{p.a}{tail}" if tail.startswith("-") else f"{p.a}+{tail}"


# -- metric --------------------------------------------------------------------

def dist(p: Point, q: Point):
    """Exact distance: a QuadPoint on the line, a Fraction in Cantor space."""
    if isinstance(p, QuadPoint) and isinstance(q, QuadPoint):
        return abs(p - q)
    if isinstance(p, CantorPoint) and isinstance(q, CantorPoint):
        n = p.first_disagreement(q)
        return Fraction(0) if n is None else Fraction(1, 2**n)
    raise DomainError("distance between points of different spaces")


def cmp_dist(p: Point, q: Point, r) -> Order:
    """Order of ``d(p, q)`` against the nonnegative bound ``r``."""
    if r < 0:
        raise DomainError("negative distance bound")
    if isinstance(p, QuadPoint) and isinstance(q, QuadPoint):
        s = (abs(p - q) - r).sign()
        return Order(s)
    if isinstance(p, CantorPoint) and isinstance(q, CantorPoint):
        n = p.first_disagreement(q)
        d = Fraction(0) if n is None else Fraction(1, 2**n)
        return Order((d > r) - (d < r))
    raise DomainError("distance between points of different spaces")


def step_bound_ok(prev: Point, nxt: Point, n: int) -> bool:
    """True iff ``d(prev, nxt) <= 2^-n``."""
    if n < 0:
        raise DomainError("round index must be nonnegative")
    return cmp_dist(prev, nxt, Fraction(1, 2**n)) is not Order.GT


# -- balls -----------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    """Open or closed ball in one of the carriers (intersected with it)."""

    center: Point
    radius: Fraction
    closed: bool = False

    def __post_init__(self):
        r = _frac(self.radius) if not isinstance(self.radius, Fraction) else self.radius
        if r <= 0:
            raise DomainError("ball radius must be positive")
        object.__setattr__(self, "radius", r)

    @property
    def carrier(self) -> str:
        return carrier_of(self.center)

    def contains(self, p: Point) -> bool:
        if carrier_of(p) != self.carrier:
            raise DomainError("membership across spaces")
        if self.carrier == "line" and not in_carrier(p, "line"):
            return False
        o = cmp_dist(self.center, p, self.radius)
        return o is Order.LT or (self.closed and o is Order.EQ)

    def interval(self):
        """``(lo, hi, lo_closed, hi_closed)`` of the ball clamped to [0, 1]."""
        if self.carrier != "line":
            raise DomainError("interval view of a Cantor ball")
        lo = self.center - self.radius
        hi = self.center + self.radius
        lo_closed = hi_closed = self.closed
        if lo.sign() < 0:
            lo, lo_closed = QuadPoint(0), True
        if hi > 1:
            hi, hi_closed = QuadPoint(1), True
        return lo, hi, lo_closed, hi_closed

    def cylinder(self) -> str:
        """Common prefix of all members of a Cantor ball."""
        if self.carrier != "cantor":
            raise DomainError("cylinder view of a line ball")
        k = 0
        while True:
            scale = Fraction(1, 2**k)
            if scale < self.radius or (self.closed and scale == self.radius):
                break
            k += 1
        return self.center.prefix(k)

    @property
    def diameter_bound(self) -> Fraction:
        return 2 * self.radius


def _interval_subset(a, b) -> bool:
    alo, ahi, alc, ahc = a
    blo, bhi, blc, bhc = b
    c = (alo - blo).sign()
    if c < 0 or (c == 0 and alc and not blc):
        return False
    c = (ahi - bhi).sign()
    if c > 0 or (c == 0 and ahc and not bhc):
        return False
    return True


def ball_subset(inner: Ball, outer: Ball) -> bool:
    """Exact inclusion of balls as subsets of their carrier."""
    if inner.carrier != outer.carrier:
        raise DomainError("ball inclusion across spaces")
    if inner.carrier == "line":
        return _interval_subset(inner.interval(), outer.interval())
    return inner.cylinder().startswith(outer.cylinder())


# -- helpers ---------------------------------------------------------------------

def rational_between(lo, hi) -> Fraction:
    """A dyadic rational strictly inside ``(lo, hi)``."""
    lo, hi = as_quad(lo), as_quad(hi)
    width = hi - lo
    if width.sign() <= 0:
        raise DomainError("empty interval")
    if lo.is_rational and hi.is_rational:
        mid = (lo.a + hi.a) / 2
        return mid
    k = 0
    while Fraction(1, 2**k) >= width:
        k += 1
    scale = 2**k
    return Fraction((lo * scale).floor() + 1, scale)


def dyadic_floor(v) -> Fraction:
    """Exact value if rational, else the largest power of two not above it.

    Used to turn quadratic gauge values into rational radii.  Monotone on the
    rationals and on the irrationals separately, not across the two: 1/6 stays
    1/6 while the larger sqrt2/6 drops to 1/8.
    """
    v = as_quad(v)
    if v.sign() <= 0:
        raise DomainError("dyadic_floor of a nonpositive value")
    if v.is_rational:
        return v.a
    k = 0
    if v >= 1:
        while v >= 2 ** (k + 1):
            k += 1
        return Fraction(2**k)
    while v < Fraction(1, 2**k):
        k += 1
    return Fraction(1, 2**k)
