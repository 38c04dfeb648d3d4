"""Representable subsets of [0, 1] with the Baire property.

A :class:`RepSet` is ``(intervals minus an exceptional countable set) union
atoms``.  Measure, category and membership are exact.  The module also holds
:func:`refine_closed` for nested closed intervals and the lazy
:class:`NonMeasOracle` used to stand in for a non-measurable function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .exactnum import (
    Ball,
    DomainError,
    QuadPoint,
    as_quad,
    format_point,
    parse_point,
)

NON_MEAGER = "NonMeagerBP"
MEAGER = "MeagerBP"
RATIONALS = "Q"

UNION_SIGNS = ("∪", "U")


class SetSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Interval:
    lo: QuadPoint
    hi: QuadPoint
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, p: QuadPoint) -> bool:
        a = (p - self.lo).sign()
        b = (self.hi - p).sign()
        return (a > 0 or (a == 0 and self.lo_closed)) and (b > 0 or (b == 0 and self.hi_closed))

    @property
    def length(self) -> QuadPoint:
        return self.hi - self.lo

    def __str__(self) -> str:
        return ("[" if self.lo_closed else "(") + f"{format_point(self.lo)},{format_point(self.hi)}" + (
            "]" if self.hi_closed else ")")


def _excluded(p: QuadPoint, exc) -> bool:
    if exc is None:
        return False
    if exc == RATIONALS:
        return p.is_rational
    return p in exc


def _merge(intervals) -> tuple:
    """Sort, clip to [0,1], drop empties and merge overlapping or touching pieces."""
    zero, one = QuadPoint(0), QuadPoint(1)
    clipped = []
    for iv in intervals:
        lo, hi, lc, hc = iv.lo, iv.hi, iv.lo_closed, iv.hi_closed
        if lo < zero:
            lo, lc = zero, True
        if hi > one:
            hi, hc = one, True
        if lo < hi:
            clipped.append(Interval(lo, hi, lc, hc))
    clipped.sort(key=lambda iv: (iv.lo, not iv.lo_closed))
    out: list[Interval] = []
    for iv in clipped:
        if out:
            last = out[-1]
            touch = iv.lo < last.hi or (iv.lo == last.hi and (iv.lo_closed or last.hi_closed))
            if touch:
                if iv.hi > last.hi:
                    out[-1] = Interval(last.lo, iv.hi, last.lo_closed, iv.hi_closed)
                elif iv.hi == last.hi:
                    out[-1] = Interval(last.lo, last.hi, last.lo_closed, last.hi_closed or iv.hi_closed)
                continue
        out.append(iv)
    return tuple(out)


@dataclass(frozen=True)
class RepSet:
    """``(union of intervals minus exc) union atoms``; always normalized."""

    intervals: tuple = ()
    atoms: tuple = ()
    exc: object = None

    def __post_init__(self):
        exc = self.exc
        if exc is not None and exc != RATIONALS:
            exc = tuple(sorted(set(as_quad(p) for p in exc)))
            if not exc:
                exc = None
        ivs = []
        atoms = set(as_quad(a) for a in self.atoms)
        for iv in self.intervals:
            if not isinstance(iv, Interval):
                iv = Interval(as_quad(iv[0]), as_quad(iv[1]), *iv[2:])
            if iv.lo == iv.hi:
                if iv.lo_closed and iv.hi_closed and 0 <= iv.lo <= 1:
                    atoms.add(iv.lo)
            else:
                ivs.append(iv)
        merged = _merge(ivs)
        if not merged:
            exc = None
        kept = sorted(a for a in atoms if 0 <= a <= 1 and not (
            any(iv.contains(a) for iv in merged) and not _excluded(a, exc)))
        object.__setattr__(self, "intervals", merged)
        object.__setattr__(self, "atoms", tuple(kept))
        object.__setattr__(self, "exc", exc)

    def __contains__(self, p) -> bool:
        return member(self, p)

    def __str__(self) -> str:
        return format_repset(self)


def member(s: RepSet, p) -> bool:
    if isinstance(p, str):
        p = parse_point(p)
    if not isinstance(p, QuadPoint):
        return False
    if p in s.atoms:
        return True
    return any(iv.contains(p) for iv in s.intervals) and not _excluded(p, s.exc)


def measure(s: RepSet) -> QuadPoint:
    """Exact Lebesgue measure: the total interval length."""
    total = QuadPoint(0)
    for iv in s.intervals:
        total = total + iv.length
    return total


def classify_category(s: RepSet) -> str:
    return NON_MEAGER if s.intervals else MEAGER


def closure_contains(s: RepSet, p) -> bool:
    """Membership in the closure; removing a countable set never shrinks it."""
    p = as_quad(p)
    return p in s.atoms or any(iv.lo <= p <= iv.hi for iv in s.intervals)


def diameter(s: RepSet) -> QuadPoint:
    pts = [iv.lo for iv in s.intervals] + [iv.hi for iv in s.intervals] + list(s.atoms)
    if not pts:
        return QuadPoint(0)
    return max(pts) - min(pts)


def union(a: RepSet, b: RepSet) -> RepSet:
    if a.intervals and b.intervals and a.exc != b.exc:
        raise SetSyntaxError("union of sets with different exceptional sets is not representable")
    exc = a.exc if a.intervals else b.exc
    # atoms of the other operand may fall into the exception; keep them as atoms
    return RepSet(a.intervals + b.intervals, a.atoms + b.atoms, exc)


def subtract(s: RepSet, exc) -> RepSet:
    if s.intervals and s.exc is not None and s.exc != exc:
        raise SetSyntaxError("stacked exceptional sets are not representable")
    atoms = tuple(a for a in s.atoms if not _excluded(a, exc if exc == RATIONALS else tuple(exc)))
    return RepSet(s.intervals, atoms, exc)


def interval_set(lo, hi, lo_closed=True, hi_closed=True, exc=None) -> RepSet:
    return RepSet((Interval(as_quad(lo), as_quad(hi), lo_closed, hi_closed),), (), exc)


def with_atom(s: RepSet, p) -> RepSet:
    return RepSet(s.intervals, s.atoms + (as_quad(p),), s.exc)


def intersect_ball(s: RepSet, ball: Ball) -> RepSet:
    """``s`` intersected with an open or closed ball on the line."""
    lo, hi, lc, hc = ball.interval()
    ivs = []
    for iv in s.intervals:
        a, b = max(iv.lo, lo), min(iv.hi, hi)
        if a < b:
            alc = (iv.lo_closed if iv.lo == a else True) and (lc if lo == a else True)
            bhc = (iv.hi_closed if iv.hi == b else True) and (hc if hi == b else True)
            ivs.append(Interval(a, b, alc, bhc))
    atoms = tuple(p for p in s.atoms if ball.contains(p))
    return RepSet(tuple(ivs), atoms, s.exc)


# -- literal syntax ------------------------------------------------------------------------

def _format_exc(exc) -> str:
    if exc == RATIONALS:
        return "Q"
    return "{" + ",".join(format_point(p) for p in exc) + "}"


def format_repset(s: RepSet) -> str:
    body = "∪".join(str(iv) for iv in s.intervals)
    if s.exc is not None:
        body = f"{body}\\{_format_exc(s.exc)}"
    if not s.atoms:
        return body or "{}"
    atoms = "{" + ",".join(format_point(a) for a in s.atoms) + "}"
    if not body:
        return atoms
    if s.exc is not None or len(s.intervals) > 1:
        body = f"({body})"
    return f"{atoms}∪{body}"


class _Parser:
    def __init__(self, text: str):
        self.s = "".join(text.split())
        self.i = 0

    def peek(self) -> str:
        return self.s[self.i] if self.i < len(self.s) else ""

    def eat(self, ch: str):
        if self.peek() != ch:
            raise SetSyntaxError(f"expected {ch!r} at {self.i} in {self.s!r}")
        self.i += 1

    def point(self) -> QuadPoint:
        j = self.i
        while self.i < len(self.s) and self.s[self.i] not in ",)]}":
            self.i += 1
        try:
            p = parse_point(self.s[j:self.i])
        except ValueError as exc:
            raise SetSyntaxError(str(exc)) from None
        if not isinstance(p, QuadPoint):
            raise SetSyntaxError("set literals live on the line")
        return p

    def points(self) -> list:
        self.eat("{")
        out = []
        if self.peek() == "}":
            self.i += 1
            return out
        while True:
            out.append(self.point())
            if self.peek() == ",":
                self.i += 1
                continue
            self.eat("}")
            return out

    def expr(self) -> RepSet:
        s = self.term()
        while self.peek() in UNION_SIGNS and self.peek():
            self.i += 1
            s = union(s, self.term())
        if self.peek() == "\\":
            self.i += 1
            if self.peek() == "Q":
                self.i += 1
                s = subtract(s, RATIONALS)
            else:
                s = subtract(s, tuple(self.points()))
        return s

    def term(self) -> RepSet:
        c = self.peek()
        if c == "{":
            return RepSet((), tuple(self.points()))
        if c == "(" and self.i + 1 < len(self.s) and self.s[self.i + 1] in "([{":
            self.i += 1
            s = self.expr()
            self.eat(")")
            return s
        if c in "([":
            self.i += 1
            lo = self.point()
            self.eat(",")
            hi = self.point()
            close = self.peek()
            if close not in ")]":
                raise SetSyntaxError(f"unterminated interval in {self.s!r}")
            self.i += 1
            if hi < lo:
                raise SetSyntaxError("interval endpoints out of order")
            return RepSet((Interval(lo, hi, c == "[", close == "]"),))
        raise SetSyntaxError(f"unexpected {c!r} at {self.i} in {self.s!r}")


def parse_repset(text: str) -> RepSet:
    """Parse literals such as ``[0,1/4]∪(1/2,3/4)\\Q`` or ``{1/2}∪((0,1)\\Q)``."""
    p = _Parser(text)
    if not p.s:
        raise SetSyntaxError("empty set literal")
    s = p.expr()
    if p.i != len(p.s):
        raise SetSyntaxError(f"trailing input at {p.i} in {p.s!r}")
    return s


# -- closed refinements ----------------------------------------------------------------------

def _power_below(m: QuadPoint) -> Fraction:
    """Largest power of two strictly below ``m > 0``."""
    s = Fraction(1)
    while s >= m:
        s /= 2
    while 2 * s < m:
        s *= 2
    return s


def refine_closed(f: RepSet, forbidden, n: int) -> RepSet:
    """Closed subinterval of ``f`` of length < 1/(n+2) away from ``forbidden``.

    Uses the leftmost gap between forbidden points; the result keeps a
    positive margin from both ends of that gap unless the end is ``f``'s own
    unforbidden left endpoint.
    """
    if len(f.intervals) != 1 or f.atoms:
        raise DomainError("refine_closed needs a single closed interval")
    iv = f.intervals[0]
    if not (iv.lo_closed and iv.hi_closed) or iv.lo >= iv.hi:
        raise DomainError("refine_closed needs a closed interval of positive length")
    bad = sorted(set(as_quad(p) for p in forbidden if iv.lo <= as_quad(p) <= iv.hi))
    cuts = [iv.lo] + [p for p in bad if iv.lo < p < iv.hi] + [iv.hi]
    left, right = cuts[0], cuts[1]
    gap = right - left
    s = _power_below(min(gap, QuadPoint(Fraction(1, n + 2))))
    start = left + (s / 8 if left in bad else 0)
    out = interval_set(start, start + 3 * s / 4)
    _check_refinement(f, out, bad, n)
    return out


def _check_refinement(f: RepSet, out: RepSet, bad, n: int):
    o = out.intervals[0]
    if not (o.length.sign() > 0 and o.length < Fraction(1, n + 2)):
        raise AssertionError("refinement has the wrong length")
    if not (f.intervals[0].lo <= o.lo and o.hi <= f.intervals[0].hi):
        raise AssertionError("refinement left its parent")
    if any(o.lo <= p <= o.hi for p in bad):
        raise AssertionError("refinement touches a forbidden point")


def rationals_by_denominator() -> Iterator[Fraction]:
    """0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, ... each rational of [0,1] once."""
    yield Fraction(0)
    yield Fraction(1)
    q = 2
    while True:
        for p in range(1, q):
            if Fraction(p, q).denominator == q:
                yield Fraction(p, q)
        q += 1


# -- picking points --------------------------------------------------------------------------

def fresh_points(s: RepSet, avoid=(), want_rational: bool | None = None) -> Iterator[QuadPoint]:
    """Members of ``s`` not in ``avoid``: interval interiors first, then atoms.

    ``want_rational`` restricts to rationals (True) or irrationals (False).
    """
    from .catalog import interior_irrational, interior_rational

    avoid = set(avoid)
    for iv in s.intervals:
        kinds = [want_rational] if want_rational is not None else [False, True]
        for rational in kinds:
            if rational and s.exc == RATIONALS:
                continue
            lo, hi = iv.lo, iv.hi
            for _ in range(8):
                try:
                    p = QuadPoint(interior_rational(lo, hi, avoid)) if rational else interior_irrational(lo, hi, avoid)
                except Exception:
                    break
                if member(s, p) and p not in avoid:
                    yield p
                avoid.add(p)
                lo = p if rational else lo
                hi = hi if rational else p
    for a in s.atoms:
        if a not in avoid and (want_rational is None or a.is_rational == want_rational):
            yield a


# -- non-measurable stand-in ------------------------------------------------------------------

A_REQUEST = "A"
B_REQUEST = "B"
PLAIN = "plain"


@dataclass
class NonMeasOracle:
    """Lazy adversary: A-requests get value 1, B-requests 0, plain requests 1.

    Answers are memoized so repeated queries agree.  ``y`` and ``eps`` are the
    center value and scale of the witness interface on ``W = [0, 1]``.
    """

    memo: dict = field(default_factory=dict)
    log: list = field(default_factory=list)
    y: Fraction = Fraction(1)
    eps: Fraction = Fraction(1, 4)

    def eval(self, p, role: str = PLAIN) -> int:
        p = as_quad(p)
        if not 0 <= p <= 1:
            raise DomainError(f"{format_point(p)} is outside W")
        if p in self.memo:
            return self.memo[p]
        if role not in (A_REQUEST, B_REQUEST, PLAIN):
            raise ValueError(f"unknown request role {role!r}")
        v = 0 if role == B_REQUEST else 1
        self.memo[p] = v
        self.log.append((p, v, role))
        return v

    def value(self, p) -> QuadPoint:
        return QuadPoint(self.eval(p))

    def records(self) -> list:
        return [{"type": "oracle", "point": format_point(p), "value": v, "role": r} for p, v, r in self.log]

    @classmethod
    def from_records(cls, records) -> "NonMeasOracle":
        o = cls()
        for r in records:
            p = parse_point(r["point"])
            o.memo[p] = int(r["value"])
            o.log.append((p, int(r["value"]), r["role"]))
        return o


def oracle_eval(o: NonMeasOracle, p, role: str = PLAIN) -> int:
    return o.eval(p, role)
