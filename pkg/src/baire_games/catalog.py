"""Catalog of functions and families with exact evaluation and gauges.

Every entry knows its carrier, its classification, how to evaluate itself on
representable points, and (when it is Baire 1) an analytic family of
epsilon-gauges.  Families additionally expose an exact sup oracle
``gap_witness(u, v, eps)`` deciding whether some member separates ``u`` and
``v`` by at least ``eps``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .exactnum import (
    Ball,
    CantorPoint,
    DomainError,
    HALF_SQRT2,
    QuadPoint,
    as_quad,
    dist,
    dyadic_floor,
    format_point,
    in_carrier,
    parse_point,
    rational_between,
)

CONTINUOUS = "continuous"
BAIRE1 = "baire1"
NOT_BAIRE1 = "not_baire1"
BAIRE_MEASURABLE = "baire_measurable"
ADVERSARIAL_ORACLE = "adversarial_oracle"
EQUI_BAIRE1 = "equi_baire1"
NOT_EQUI_BAIRE1 = "not_equi_baire1"

ALL_RATIONALS = "rationals"


class ClassificationError(Exception):
    """An operation was requested for an entry of the wrong class."""


class WitnessError(RuntimeError):
    """A catalog witness failed to deliver its promised point (a catalog bug)."""


# -- regions ----------------------------------------------------------------------

def region_interval(region):
    """Normalize a line region to ``(lo, hi, lo_closed, hi_closed)`` inside [0, 1]."""
    if isinstance(region, Ball):
        return region.interval()
    lo, hi, lc, hc = region
    lo, hi = as_quad(lo), as_quad(hi)
    if lo.sign() < 0:
        lo, lc = QuadPoint(0), True
    if hi > 1:
        hi, hc = QuadPoint(1), True
    c = (hi - lo).sign()
    if c < 0 or (c == 0 and not (lc and hc)):
        raise DomainError("empty region")
    return lo, hi, lc, hc


def region_prefix(region) -> str:
    if isinstance(region, Ball):
        return region.cylinder()
    if isinstance(region, str):
        return region
    raise DomainError(f"not a Cantor region: {region!r}")


def _in_interval(p: QuadPoint, iv) -> bool:
    lo, hi, lc, hc = iv
    a = (p - lo).sign()
    b = (hi - p).sign()
    return (a > 0 or (a == 0 and lc)) and (b > 0 or (b == 0 and hc))


def interior_rational(lo, hi, avoid=()) -> Fraction:
    """A rational strictly inside ``(lo, hi)``, skipping points in ``avoid``."""
    lo, hi = as_quad(lo), as_quad(hi)
    a, b = lo, hi
    for _ in range(64):
        q = rational_between(a, b)
        if QuadPoint(q) not in avoid:
            return q
        b = QuadPoint(q)
    raise WitnessError("no fresh rational found")


def interior_irrational(lo, hi, avoid=()) -> QuadPoint:
    """An irrational strictly inside ``(lo, hi)``: ``lo + (hi-lo)*sqrt(2)/2*t``."""
    lo, hi = as_quad(lo), as_quad(hi)
    width = hi - lo
    if width.sign() <= 0:
        raise DomainError("empty interval")
    for k in range(1, 200):
        t = Fraction(1, k)
        p = lo + width * HALF_SQRT2 * t
        if not p.is_rational and p not in avoid and lo < p < hi:
            return p
    raise WitnessError("no fresh irrational found")


# -- line piecewise machinery --------------------------------------------------------

@dataclass(frozen=True)
class _Piece:
    lo: Fraction
    hi: Fraction
    v_lo: Fraction
    v_hi: Fraction

    @property
    def slope(self) -> Fraction:
        return (self.v_hi - self.v_lo) / (self.hi - self.lo)

    def at(self, x) -> QuadPoint:
        return self.v_lo + (as_quad(x) - self.lo) * self.slope


def _piece_index(pieces: Sequence[_Piece], x: QuadPoint) -> int:
    for i, p in enumerate(pieces[:-1]):
        if x < p.hi:
            return i
    return len(pieces) - 1


class _Piecewise:
    """Mixin for line functions that are affine between rational breakpoints."""

    carrier = "line"

    def _pieces(self) -> tuple[_Piece, ...]:  # pragma: no cover - abstract
        raise NotImplementedError

    def evaluate(self, p) -> QuadPoint:
        if not in_carrier(p, "line"):
            raise DomainError(f"{p!r} is outside [0,1]")
        ps = self._pieces()
        return ps[_piece_index(ps, p)].at(p)

    def jumps(self) -> tuple[Fraction, ...]:
        ps = self._pieces()
        return tuple(ps[i].lo for i in range(1, len(ps)) if ps[i - 1].v_hi != ps[i].v_lo)

    def max_slope(self) -> Fraction:
        return max(abs(p.slope) for p in self._pieces())

    def hard_points(self) -> tuple:
        return tuple(QuadPoint(p.lo) for p in self._pieces()[1:])

    def jump_at(self, x) -> Fraction:
        x = as_quad(x)
        ps = self._pieces()
        for i in range(1, len(ps)):
            if x == ps[i].lo:
                return abs(ps[i - 1].v_hi - ps[i].v_lo)
        return Fraction(0)

    def osc_interval(self, iv) -> QuadPoint:
        lo, hi, lc, hc = iv
        values = []
        ps = self._pieces()
        for i, p in enumerate(ps):
            last = i == len(ps) - 1
            a = lo if lo > p.lo else QuadPoint(p.lo)
            b = hi if hi < p.hi else QuadPoint(p.hi)
            if a < b:
                values += [p.at(a), p.at(b)]
            elif a == b and _in_interval(a, iv) and (a < p.hi or (last and a == p.hi)) and a >= p.lo:
                values.append(p.at(a))
        if len(values) < 2:
            return QuadPoint(0)
        return max(values) - min(values)

    def local_lipschitz(self, x):
        x = as_quad(x)
        if any(QuadPoint(j) == x for j in self.jumps()):
            return None
        return self.max_slope()

    def piecewise_gauge(self, eps: Fraction, x) -> Fraction:
        x = as_quad(x)
        delta = QuadPoint(1)
        for j in self.jumps():
            if x != j:
                delta = min(delta, abs(x - j))
        # round the eps-free part only, so the result stays monotone in eps
        out = dyadic_floor(delta)
        s = self.max_slope()
        if s > 0:
            out = min(out, eps / s)
        return out


# -- function entries -------------------------------------------------------------

@dataclass(frozen=True)
class Lipschitz(_Piecewise):
    """Continuous piecewise-affine map with declared Lipschitz bound ``slope``.

    Without knots the map is ``x -> slope * x``.
    """

    slope: Fraction
    knots: tuple = ()
    regularity = CONTINUOUS
    measurability = BAIRE_MEASURABLE
    exceptional = None

    def __post_init__(self):
        object.__setattr__(self, "slope", Fraction(self.slope))
        if self.slope <= 0:
            raise DomainError("Lipschitz slope must be positive")
        if self.knots:
            ks = tuple((Fraction(x), Fraction(y)) for x, y in self.knots)
            object.__setattr__(self, "knots", ks)
            if ks[0][0] != 0 or ks[-1][0] != 1 or any(a[0] >= b[0] for a, b in zip(ks, ks[1:])):
                raise DomainError("knots must increase from 0 to 1")
            if self.max_slope() > self.slope:
                raise DomainError("knots exceed the declared Lipschitz bound")

    def _pieces(self):
        if not self.knots:
            return (_Piece(Fraction(0), Fraction(1), Fraction(0), self.slope),)
        return tuple(_Piece(a[0], b[0], a[1], b[1]) for a, b in zip(self.knots, self.knots[1:]))

    @property
    def ident(self) -> str:
        if self.knots:
            return "lipschitz@" + str(self.slope) + "[" + ";".join(f"{x},{y}" for x, y in self.knots) + "]"
        return f"lipschitz@{self.slope}"

    def gauge_value(self, eps, x) -> Fraction:
        return Fraction(eps) / self.slope

    def local_lipschitz(self, x):
        return self.slope


@dataclass(frozen=True)
class StepIndicator(_Piecewise):
    """Characteristic function of ``[c, 1]``."""

    c: Fraction
    regularity = BAIRE1
    measurability = BAIRE_MEASURABLE

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        if not 0 < self.c < 1:
            raise DomainError("step location must lie in (0,1)")

    def _pieces(self):
        return (
            _Piece(Fraction(0), self.c, Fraction(0), Fraction(0)),
            _Piece(self.c, Fraction(1), Fraction(1), Fraction(1)),
        )

    @property
    def exceptional(self):
        return (QuadPoint(self.c),)

    @property
    def ident(self) -> str:
        return f"step@{self.c}"

    def gauge_value(self, eps, x) -> Fraction:
        x = as_quad(x)
        if x == self.c:
            return Fraction(1)
        return dyadic_floor(abs(x - self.c))


@dataclass(frozen=True)
class PiecewiseAffine(_Piecewise):
    """Affine on each ``[b_i, b_{i+1})``, right-continuous at breakpoints.

    ``pieces[i]`` holds the (left, right) end values on the i-th piece.
    """

    breakpoints: tuple
    pieces: tuple
    regularity = BAIRE1
    measurability = BAIRE_MEASURABLE

    def __post_init__(self):
        bps = tuple(Fraction(b) for b in self.breakpoints)
        pcs = tuple((Fraction(l), Fraction(r)) for l, r in self.pieces)
        if len(pcs) != len(bps) + 1:
            raise DomainError("need one piece more than breakpoints")
        if any(not 0 < b < 1 for b in bps) or any(a >= b for a, b in zip(bps, bps[1:])):
            raise DomainError("breakpoints must increase inside (0,1)")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)

    def _pieces(self):
        ends = (Fraction(0),) + self.breakpoints + (Fraction(1),)
        return tuple(_Piece(ends[i], ends[i + 1], l, r) for i, (l, r) in enumerate(self.pieces))

    @property
    def exceptional(self):
        return tuple(QuadPoint(j) for j in self.jumps())

    @property
    def ident(self) -> str:
        if self == PIECEWISE_SAMPLE:
            return "piecewise-sample"
        bps = ",".join(str(b) for b in self.breakpoints)
        pcs = ";".join(f"{l},{r}" for l, r in self.pieces)
        return f"piecewise[{bps}|{pcs}]"

    def gauge_value(self, eps, x) -> Fraction:
        return self.piecewise_gauge(Fraction(eps), x)


PIECEWISE_SAMPLE = PiecewiseAffine(
    (Fraction(1, 3), Fraction(2, 3)),
    ((Fraction(0), Fraction(1, 3)), (Fraction(1), Fraction(1, 2)), (Fraction(0), Fraction(1, 2))),
)


@dataclass(frozen=True)
class PowerMember:
    """``x -> x**n`` on [0, 1]."""

    n: int
    carrier = "line"
    regularity = CONTINUOUS
    measurability = BAIRE_MEASURABLE
    exceptional = None

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("power must be positive")

    @property
    def ident(self) -> str:
        return f"power@{self.n}"

    def evaluate(self, p) -> QuadPoint:
        if not in_carrier(p, "line"):
            raise DomainError(f"{p!r} is outside [0,1]")
        return p**self.n

    def hard_points(self):
        return ()

    def gauge_value(self, eps, x) -> Fraction:
        return Fraction(eps) / self.n

    def osc_interval(self, iv) -> QuadPoint:
        lo, hi, _, _ = iv
        return hi**self.n - lo**self.n

    def jump_at(self, x):
        return Fraction(0)

    def local_lipschitz(self, x):
        return Fraction(self.n)


@dataclass(frozen=True)
class DirichletQuad:
    """Indicator of the rationals on [0, 1]."""

    carrier = "line"
    regularity = NOT_BAIRE1
    measurability = BAIRE_MEASURABLE
    exceptional = ALL_RATIONALS
    ident = "dirichlet-quad"

    def evaluate(self, p) -> QuadPoint:
        if not in_carrier(p, "line"):
            raise DomainError(f"{p!r} is outside [0,1]")
        return QuadPoint(1 if p.is_rational else 0)

    def hard_points(self):
        return ()

    def osc_interval(self, iv) -> QuadPoint:
        lo, hi, _, _ = iv
        return QuadPoint(1 if lo < hi else 0)

    def jump_at(self, x):
        return Fraction(1)

    def local_lipschitz(self, x):
        return None


@dataclass(frozen=True)
class DirichletCantor:
    """Indicator of the eventually-zero sequences."""

    carrier = "cantor"
    regularity = NOT_BAIRE1
    measurability = BAIRE_MEASURABLE
    exceptional = None
    ident = "dirichlet-cantor"

    def evaluate(self, p) -> QuadPoint:
        if not isinstance(p, CantorPoint):
            raise DomainError(f"{p!r} is not a Cantor point")
        return QuadPoint(1 if p.eventually_zero else 0)

    def hard_points(self):
        return ()

    def osc_prefix(self, prefix: str) -> QuadPoint:
        return QuadPoint(1)

    def jump_at(self, x):
        return Fraction(1)

    def local_lipschitz(self, x):
        return None


@dataclass(frozen=True)
class CantorBinary:
    """Binary expansion value ``sum p_i 2^-(i+1)``; 1-Lipschitz."""

    carrier = "cantor"
    regularity = CONTINUOUS
    measurability = BAIRE_MEASURABLE
    exceptional = None
    ident = "cantor-binary"

    def evaluate(self, p) -> QuadPoint:
        if not isinstance(p, CantorPoint):
            raise DomainError(f"{p!r} is not a Cantor point")
        return QuadPoint(p.binary_value())

    def hard_points(self):
        return ()

    def gauge_value(self, eps, x) -> Fraction:
        return Fraction(eps)

    def osc_prefix(self, prefix: str) -> QuadPoint:
        return QuadPoint(Fraction(1, 2 ** len(prefix)))

    def jump_at(self, x):
        return Fraction(0)

    def local_lipschitz(self, x):
        return Fraction(1)


@dataclass(frozen=True)
class CantorBit:
    """The ``k``-th coordinate; locally constant."""

    k: int
    carrier = "cantor"
    regularity = CONTINUOUS
    measurability = BAIRE_MEASURABLE
    exceptional = None

    @property
    def ident(self) -> str:
        return f"cantor-bit@{self.k}"

    def evaluate(self, p) -> QuadPoint:
        if not isinstance(p, CantorPoint):
            raise DomainError(f"{p!r} is not a Cantor point")
        return QuadPoint(int(p.bit(self.k)))

    def hard_points(self):
        return ()

    def gauge_value(self, eps, x) -> Fraction:
        return Fraction(1, 2**self.k)

    def osc_prefix(self, prefix: str) -> QuadPoint:
        return QuadPoint(1 if self.k >= len(prefix) else 0)

    def jump_at(self, x):
        return Fraction(0)

    def local_lipschitz(self, x):
        return Fraction(0)


@dataclass(frozen=True)
class OracleFunction:
    """Stand-in for a non-measurable function; values come from a match oracle."""

    carrier = "line"
    regularity = NOT_BAIRE1
    measurability = ADVERSARIAL_ORACLE
    exceptional = None
    ident = "nonmeasurable-oracle"

    def evaluate(self, p) -> QuadPoint:
        raise ClassificationError("nonmeasurable-oracle is only evaluable through a match oracle")

    def hard_points(self):
        return ()


FuncSpec = (Lipschitz, StepIndicator, PiecewiseAffine, PowerMember, DirichletQuad,
            DirichletCantor, CantorBinary, CantorBit, OracleFunction)


def is_func(x) -> bool:
    return isinstance(x, FuncSpec)


def evaluate(f, p) -> QuadPoint:
    """Exact value of the catalog function ``f`` at ``p``."""
    if isinstance(p, str):
        p = parse_point(p)
    return f.evaluate(p)


# -- gauges ------------------------------------------------------------------------

def n_eps(eps) -> int:
    """``N_eps``: 1 for ``eps >= 1``, else the N with ``1/N <= eps < 1/(N-1)``."""
    eps = Fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if eps >= 1:
        return 1
    return math.ceil(1 / eps)


@dataclass(frozen=True)
class GaugeFamily:
    """``(eps, x) -> delta_eps(x)``, a positive rational."""

    fn: Callable
    carrier: str
    label: str
    monotone: bool = False
    shrink: bool = False

    def __call__(self, eps, x) -> Fraction:
        eps = Fraction(eps)
        if eps <= 0:
            raise DomainError("eps must be positive")
        d = self.fn(eps, x)
        if d <= 0:
            raise AssertionError(f"gauge {self.label} returned nonpositive {d}")
        return d


def normalize_gauges(g: GaugeFamily) -> GaugeFamily:
    """Monotone version: ``min{g(1/n, x) : n <= N_eps}``."""
    if g.monotone:
        # the minimum over a non-increasing prefix is its last element
        def fn(eps, x, g=g):
            return g(Fraction(1, n_eps(eps)), x)
    else:
        def fn(eps, x, g=g):
            return min(g(Fraction(1, n), x) for n in range(1, n_eps(eps) + 1))
    return GaugeFamily(fn, g.carrier, f"normalized({g.label})", monotone=True, shrink=g.shrink)


def shrink_gauges(g: GaugeFamily) -> GaugeFamily:
    """Monotone gauges with ``delta_{1/n} < 2^-n``: ``min(g(1/N), 2^-(N+1))``."""
    if not g.monotone:
        raise ClassificationError("shrink_gauges needs a monotone family; normalize first")

    def fn(eps, x, g=g):
        n = n_eps(eps)
        return min(g(Fraction(1, n), x), Fraction(1, 2 ** (n + 1)))

    return GaugeFamily(fn, g.carrier, f"shrunk({g.label})", monotone=True, shrink=True)


def constant_gauge(value, carrier="line") -> GaugeFamily:
    value = Fraction(value)
    return GaugeFamily(lambda eps, x: value, carrier, f"constant({value})", monotone=True)


def scaled_eps_gauge(carrier="line") -> GaugeFamily:
    return GaugeFamily(lambda eps, x: eps, carrier, "identity-eps", monotone=True)


def function_gauge(f) -> GaugeFamily:
    if f.regularity == NOT_BAIRE1:
        raise ClassificationError(f"{f.ident} is not Baire 1; it has no gauges")
    return GaugeFamily(f.gauge_value, f.carrier, f"gauge({f.ident})", monotone=True)


# -- families --------------------------------------------------------------------------

@dataclass(frozen=True)
class GapWitness:
    """A member and the exact value gap it realizes between two points."""

    member: object
    gap: QuadPoint


def _ordered(u, v):
    return (u, v) if u <= v else (v, u)


def _power_gap(u: QuadPoint, v: QuadPoint, k: int, cache: dict) -> QuadPoint:
    if k not in cache:
        cache[k] = v**k - u**k
    return cache[k]


def power_gap_profile(u, v):
    """Maximize ``v^n - u^n`` over integers ``n >= 1`` for ``0 <= u < v <= 1``.

    Returns ``(n, value, attained)``; for ``0 < u < v = 1`` the supremum 1 is
    not attained and ``n`` is ``None``.  Floats only locate the maximizer;
    unimodality of ``n -> v^n - u^n`` is certified with exact comparisons.
    """
    u, v = as_quad(u), as_quad(v)
    if not (0 <= u < v <= 1):
        raise DomainError("power_gap_profile needs 0 <= u < v <= 1")
    if v == 1:
        if u == 0:
            return 1, QuadPoint(1), True
        return None, QuadPoint(1), False
    if u == 0:
        return 1, v, True
    cache: dict = {}
    try:
        fu, fv = float(u), float(v)
        guess = math.log(math.log(fu) / math.log(fv)) / math.log(fv / fu)
        k = max(1, int(guess)) if math.isfinite(guess) else 1
    except (ValueError, ZeroDivisionError, OverflowError):
        k = 1
    k = min(k, 1 << 22)
    while True:
        here = _power_gap(u, v, k, cache)
        up = _power_gap(u, v, k + 1, cache)
        if up > here:
            k += 1
            continue
        if k > 1 and _power_gap(u, v, k - 1, cache) > here:
            k -= 1
            continue
        return k, here, True


def power_gap_reaching(u, v, eps):
    """Least-effort exponent ``n`` with ``|u^n - v^n| >= eps``, or ``None``."""
    u, v = _ordered(as_quad(u), as_quad(v))
    if u == v:
        return None
    eps = Fraction(eps)
    n, value, attained = power_gap_profile(u, v)
    if attained:
        return (n, value) if value >= eps else None
    # v == 1 > u > 0: 1 - u^n increases to 1
    if eps >= 1:
        return None
    k = 1
    while 1 - u**k < eps:
        k *= 2
    lo, hi = k // 2, k
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if 1 - u**mid >= eps:
            hi = mid
        else:
            lo = mid
    return hi, 1 - u**hi


class _Family:
    kind = "family"

    def hard_points(self):
        return ()

    def gap_witness(self, u, v, eps) -> GapWitness | None:  # pragma: no cover - abstract
        raise NotImplementedError

    def sup_gap(self, u, v) -> QuadPoint:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class PowerFamily(_Family):
    """All ``x^n``, ``n >= 1``, on [0, 1]."""

    carrier = "line"
    classification = EQUI_BAIRE1
    ident = "power-family"

    def hard_points(self):
        return (QuadPoint(1),)

    def gap_witness(self, u, v, eps):
        hit = power_gap_reaching(u, v, eps)
        if hit is None:
            return None
        n, gap = hit
        return GapWitness(PowerMember(n), gap)

    def sup_gap(self, u, v):
        u, v = _ordered(as_quad(u), as_quad(v))
        if u == v:
            return QuadPoint(0)
        return power_gap_profile(u, v)[1]

    def gauge_value(self, eps, x) -> Fraction:
        x = as_quad(x)
        eps = min(Fraction(eps), Fraction(1))
        if x == 1:
            return eps
        return dyadic_floor(eps * (1 - x))

    def common_gauge(self) -> GaugeFamily:
        return GaugeFamily(self.gauge_value, "line", "gauge(power-family)", monotone=True)

    def osc_region(self, region) -> QuadPoint:
        lo, hi, _, _ = region_interval(region)
        return self.sup_gap(lo, hi)

    def osc_point_exact(self, x) -> QuadPoint:
        return QuadPoint(1 if as_quad(x) == 1 else 0)

    def local_lipschitz(self, x):
        x = as_quad(x)
        if x == 1:
            return None
        # sup_n n t^(n-1) over t <= (1+x)/2 is finite; any finite bound certifies zero
        t = (1 + float(x)) / 2
        return Fraction(max(1.0, 1 / (math.e * (1 - t)) / t + 1)).limit_denominator(1000)


@dataclass(frozen=True)
class StepFamily(_Family):
    """All ``chi_[q,1]`` with rational ``q`` in (0, 1)."""

    carrier = "line"
    classification = NOT_EQUI_BAIRE1
    ident = "step-family"

    def hard_points(self):
        return (QuadPoint(Fraction(1, 2)),)

    def gap_witness(self, u, v, eps):
        u, v = _ordered(as_quad(u), as_quad(v))
        if u == v or Fraction(eps) > 1:
            return None
        return GapWitness(StepIndicator(rational_between(u, v)), QuadPoint(1))

    def sup_gap(self, u, v):
        return QuadPoint(0 if as_quad(u) == as_quad(v) else 1)

    def common_gauge(self):
        raise ClassificationError("step-family is not equi-Baire 1; it has no common gauges")

    def osc_region(self, region) -> QuadPoint:
        lo, hi, _, _ = region_interval(region)
        return QuadPoint(1 if lo < hi else 0)

    def osc_point_exact(self, x) -> QuadPoint:
        return QuadPoint(1)

    def local_lipschitz(self, x):
        return None

    def osc_witness(self) -> "OscWitness":
        return OscWitness("line", Fraction(1), _step_family_pick)


@dataclass(frozen=True)
class FiniteFamily(_Family):
    """A finite list of catalog functions sharing one carrier."""

    members: tuple

    def __post_init__(self):
        if not self.members:
            raise DomainError("empty family")
        if len({m.carrier for m in self.members}) != 1:
            raise DomainError("family members live on different carriers")

    @property
    def carrier(self):
        return self.members[0].carrier

    @property
    def ident(self):
        if len(self.members) == 1:
            return self.members[0].ident
        return "finite:" + "+".join(m.ident for m in self.members)

    @property
    def classification(self):
        if all(m.regularity != NOT_BAIRE1 for m in self.members):
            return EQUI_BAIRE1
        return NOT_EQUI_BAIRE1

    def hard_points(self):
        seen = []
        for m in self.members:
            for h in m.hard_points():
                if h not in seen:
                    seen.append(h)
        return tuple(seen)

    def gap_witness(self, u, v, eps):
        eps = Fraction(eps)
        best = None
        for m in self.members:
            gap = abs(m.evaluate(u) - m.evaluate(v))
            if gap >= eps and (best is None or gap > best.gap):
                best = GapWitness(m, gap)
        return best

    def sup_gap(self, u, v):
        return max(abs(m.evaluate(u) - m.evaluate(v)) for m in self.members)

    def gauge_value(self, eps, x):
        return min(function_gauge(m)(eps, x) for m in self.members)

    def common_gauge(self) -> GaugeFamily:
        if self.classification != EQUI_BAIRE1:
            raise ClassificationError(f"{self.ident} is not equi-Baire 1")
        return GaugeFamily(self.gauge_value, self.carrier, f"gauge({self.ident})", monotone=True)

    def osc_region(self, region) -> QuadPoint:
        if self.carrier == "line":
            iv = region_interval(region)
            return max(m.osc_interval(iv) for m in self.members)
        prefix = region_prefix(region)
        return max(m.osc_prefix(prefix) for m in self.members)

    def osc_point_exact(self, x) -> QuadPoint:
        return max(QuadPoint(m.jump_at(x)) for m in self.members)

    def local_lipschitz(self, x):
        bounds = [m.local_lipschitz(x) for m in self.members]
        if any(b is None for b in bounds):
            return None
        return max(bounds)

    def osc_witness(self) -> "OscWitness":
        bad = [m for m in self.members if m.regularity == NOT_BAIRE1]
        if not bad:
            raise ClassificationError(f"{self.ident} is equi-Baire 1; no oscillation witness")
        w = dense_pair_witness(bad[0])

        def pick(region, ref, rng, avoid=(), w=w, f=bad[0]):
            ref_val = f.evaluate(ref)
            a = w.pick_a(region, avoid)
            b = w.pick_b(region, avoid)
            ga, gb = abs(f.evaluate(a) - ref_val), abs(f.evaluate(b) - ref_val)
            return (f, a, ga) if ga >= gb else (f, b, gb)

        return OscWitness(self.carrier, Fraction(1) if isinstance(bad[0], (DirichletQuad, DirichletCantor)) else w.eps, pick)


FamilySpec = (PowerFamily, StepFamily, FiniteFamily)


def is_family(x) -> bool:
    return isinstance(x, FamilySpec)


def as_family(target):
    """View a function as the singleton family containing it."""
    if is_family(target):
        return target
    if is_func(target):
        return FiniteFamily((target,))
    raise TypeError(f"not a catalog entry: {target!r}")


def gauge_family(target) -> GaugeFamily:
    """The catalog's analytic gauge family for a function or family."""
    if is_family(target):
        return target.common_gauge()
    return function_gauge(target)


def gauge(target, eps, x) -> Fraction:
    if isinstance(x, str):
        x = parse_point(x)
    return gauge_family(target)(eps, x)


# -- witnesses -------------------------------------------------------------------------

@dataclass(frozen=True)
class DensePairWitness:
    """Perfect set P (a whole carrier), center value ``y0`` and ``eps``.

    ``pick_a(region)`` returns a point with value within ``eps`` of ``y0``;
    ``pick_b(region)`` one with value farther than ``2 eps``.
    """

    carrier: str
    y0: Fraction
    eps: Fraction
    _pick_a: Callable
    _pick_b: Callable
    function: object = None

    def _check(self, p, region, want_a: bool):
        if self.carrier == "line":
            if not _in_interval(p, region_interval(region)):
                raise WitnessError(f"pick {format_point(p)} left its region")
        elif not p.prefix(len(region_prefix(region))) == region_prefix(region):
            raise WitnessError(f"pick {format_point(p)} left its region")
        if self.function is not None:
            gap = abs(self.function.evaluate(p) - self.y0)
            ok = gap < self.eps if want_a else gap > 2 * self.eps
            if not ok:
                raise WitnessError(f"pick {format_point(p)} has the wrong value class")
        return p

    def pick_a(self, region, avoid=()):
        return self._check(self._pick_a(region, avoid), region, True)

    def pick_b(self, region, avoid=()):
        return self._check(self._pick_b(region, avoid), region, False)


def _line_pick_a(region, avoid=()):
    lo, hi, _, _ = region_interval(region)
    return QuadPoint(interior_rational(lo, hi, avoid))


def _line_pick_b(region, avoid=()):
    lo, hi, _, _ = region_interval(region)
    return interior_irrational(lo, hi, avoid)


def _cantor_pick_a(region, avoid=()):
    prefix = region_prefix(region)
    p = CantorPoint(prefix, "0")
    k = 0
    while p in avoid:
        k += 1
        p = CantorPoint(prefix + "0" * (k - 1) + "1", "0")
    return p


def _cantor_pick_b(region, avoid=()):
    prefix = region_prefix(region)
    p = CantorPoint(prefix, "01")
    k = 0
    while p in avoid:
        k += 1
        p = CantorPoint(prefix + "0" * k, "01")
    return p


def dense_pair_witness(f) -> DensePairWitness:
    if isinstance(f, DirichletQuad):
        return DensePairWitness("line", Fraction(1), Fraction(1, 4), _line_pick_a, _line_pick_b, f)
    if isinstance(f, DirichletCantor):
        return DensePairWitness("cantor", Fraction(1), Fraction(1, 4), _cantor_pick_a, _cantor_pick_b, f)
    if isinstance(f, OracleFunction):
        # values are assigned by the oracle on request; no value check here
        return DensePairWitness("line", Fraction(1), Fraction(1, 4), _line_pick_a, _line_pick_b, None)
    raise ClassificationError(f"{getattr(f, 'ident', f)!r} has no dense pair witness")


@dataclass(frozen=True)
class OscWitness:
    """Uniform lower bound ``eps`` on the equi-oscillation over the carrier.

    ``pick(region, ref, rng)`` returns ``(member, a, gap)`` with ``a`` in the
    region and ``|member(a) - member(ref)| = gap``.
    """

    carrier: str
    eps: Fraction
    _pick: Callable

    def pick(self, region, ref, rng, avoid=()):
        member, a, gap = self._pick(region, ref, rng, avoid)
        if self.carrier == "line" and not _in_interval(a, region_interval(region)):
            raise WitnessError("oscillation witness left its region")
        if abs(member.evaluate(a) - member.evaluate(ref)) != gap:
            raise WitnessError("oscillation witness misreported its gap")
        return member, a, gap


_PICK_FRACTIONS = tuple(Fraction(k, 16) for k in range(2, 15))


def _step_family_pick(region, ref, rng, avoid=()):
    lo, hi, _, _ = region_interval(region)
    ref = as_quad(ref)
    order = list(_PICK_FRACTIONS)
    rng.shuffle(order)
    for t in order:
        a = lo + (hi - lo) * t
        if a != ref and a not in avoid:
            q = rational_between(*_ordered(a, ref))
            return StepIndicator(q), a, QuadPoint(1)
    raise WitnessError("no separating point in region")


# -- oscillation ---------------------------------------------------------------------------

def osc_set(target, region) -> QuadPoint:
    """``sup{|f(u) - f(v)| : u, v in region, f in F}``, exact."""
    fam = as_family(target)
    return fam.osc_region(region)


def osc_point(target, x) -> QuadPoint:
    """Equi-oscillation at ``x``: the infimum of ``osc_set`` over balls at ``x``."""
    if isinstance(x, str):
        x = parse_point(x)
    fam = as_family(target)
    return fam.osc_point_exact(x)


@dataclass(frozen=True)
class OscEstimate:
    """Grid estimate of the oscillation at a point.

    ``scale_gap`` is the largest gap realized by grid pairs inside the
    finest ball; ``upper`` is a certified upper bound on ``osc_point``
    (zero when a local Lipschitz modulus exists), or ``None``.
    """

    scale_gap: QuadPoint
    upper: QuadPoint | None
    depth: int
    pair: tuple = ()

    @property
    def certified_zero(self) -> bool:
        return self.upper is not None and self.upper == 0


def _grid_points(x, h: Fraction, carrier: str):
    if carrier == "cantor":
        k = 0
        while Fraction(1, 2**k) >= h:
            k += 1
        prefix = x.prefix(k)
        return [x, CantorPoint(prefix, "0"), CantorPoint(prefix, "1"), CantorPoint(prefix, "01"),
                CantorPoint(prefix + "1", "0"), CantorPoint(prefix + "0", "1")]
    x = as_quad(x)
    pts = [x]
    for j in range(1, 8):
        for s in (1, -1):
            p = x + s * h * Fraction(j, 8)
            if 0 <= p <= 1:
                pts.append(p)
    for s in (1, -1):
        p = x + s * h * HALF_SQRT2 / 8
        if 0 <= p <= 1:
            pts.append(p)
    return pts


def estimate_osc_point(target, x, depth: int = 10) -> OscEstimate:
    """Refine balls ``B(x, 2^-k)`` for ``k <= depth`` and record the finest gap."""
    if isinstance(x, str):
        x = parse_point(x)
    fam = as_family(target)
    h = Fraction(1, 2**depth)
    pts = _grid_points(x, h, fam.carrier)
    best, pair = QuadPoint(0), (x, x)
    for i, u in enumerate(pts):
        for v in pts[i + 1:]:
            g = fam.sup_gap(u, v)
            if g > best:
                best, pair = g, (u, v)
    lip = fam.local_lipschitz(x)
    if lip is not None:
        upper = QuadPoint(0)
    else:
        try:
            upper = fam.osc_region(Ball(x, h))
        except (AttributeError, ClassificationError):
            upper = None
    return OscEstimate(best, upper, depth, pair)


# -- gauge checking -----------------------------------------------------------------------------

@dataclass(frozen=True)
class NoViolation:
    pairs: int


@dataclass(frozen=True)
class Counterexample:
    x0: object
    x1: object
    gap: QuadPoint
    member: object

    def reverify(self, target, g: GaugeFamily, eps) -> bool:
        d = dist(self.x0, self.x1)
        if not d < min(g(eps, self.x0), g(eps, self.x1)):
            return False
        return abs(self.member.evaluate(self.x0) - self.member.evaluate(self.x1)) >= Fraction(eps)


def _random_line_point(rng: random.Random) -> QuadPoint:
    if rng.random() < 0.7:
        return QuadPoint(Fraction(rng.randrange(0, 4097), 4096))
    while True:
        p = QuadPoint(Fraction(rng.randrange(-1024, 1025), 1024), Fraction(rng.randrange(-512, 513), 1024))
        if 0 <= p <= 1 and not p.is_rational:
            return p


def _random_cantor_point(rng: random.Random) -> CantorPoint:
    pre = "".join(rng.choice("01") for _ in range(rng.randrange(0, 14)))
    per = "".join(rng.choice("01") for _ in range(rng.randrange(1, 5)))
    return CantorPoint(pre, per)


def line_straddle_pairs(points, levels: int = 24) -> Iterator[tuple]:
    """Pairs ``(c - h, c + h)`` for ``h = 2^-k``, then one-sided pairs."""
    one = QuadPoint(1)
    zero = QuadPoint(0)
    for k in range(1, levels + 1):
        h = Fraction(1, 2**k)
        for c in points:
            yield max(zero, c - h), min(one, c + h)
    for k in range(1, levels + 1):
        h = Fraction(1, 2**k)
        for c in points:
            if c + h <= 1:
                yield c, c + h
            if c - h >= 0:
                yield c - h, c
            w = h * HALF_SQRT2
            if c - w >= 0 and c + w <= 1:
                yield c - w, c + w


def pair_sampler(target, g: GaugeFamily, eps, seed: int = 0) -> Iterator[tuple]:
    """Deterministic pair stream: breakpoint straddles, gauge-scaled pairs, uniform pairs."""
    fam = as_family(target)
    rng = random.Random(seed)
    eps = Fraction(eps)
    if fam.carrier == "line":
        hard = list(fam.hard_points()) + [QuadPoint(0), QuadPoint(1)]
        yield from line_straddle_pairs(hard)
        while True:
            x0 = _random_line_point(rng)
            if rng.random() < 0.8:
                d0 = g(eps, x0)
                t = Fraction(rng.randrange(1, 1024), 1024)
                off = d0 * t if rng.random() < 0.7 else d0 * t * HALF_SQRT2
                x1 = x0 + off if rng.random() < 0.5 else x0 - off
                if not 0 <= x1 <= 1:
                    x1 = x0 - (x1 - x0)
                    if not 0 <= x1 <= 1:
                        continue
            else:
                x1 = _random_line_point(rng)
            yield x0, x1
    else:
        base = CantorPoint("", "0")
        for k in range(0, 24):
            yield base, CantorPoint("0" * k + "1", "0")
        while True:
            x0 = _random_cantor_point(rng)
            if rng.random() < 0.8:
                d0 = g(eps, x0)
                m = 0
                while Fraction(1, 2**m) >= d0:
                    m += 1
                m += rng.randrange(0, 4)
                prefix = x0.prefix(m)
                tail = "".join(rng.choice("01") for _ in range(rng.randrange(0, 6)))
                x1 = CantorPoint(prefix + tail, rng.choice(["0", "1", "01", "011"]))
            else:
                x1 = _random_cantor_point(rng)
            yield x0, x1


def check_gauge(target, g: GaugeFamily, eps, sampler=None, budget: int = 10_000, seed: int = 0):
    """Search for ``d(x0,x1) < min(g(x0), g(x1))`` with a value gap ``>= eps``."""
    if budget < 1:
        raise DomainError("budget must be at least 1")
    eps = Fraction(eps)
    fam = as_family(target)
    pairs = sampler if sampler is not None else pair_sampler(target, g, eps, seed)
    tested = 0
    for x0, x1 in pairs:
        if tested >= budget:
            break
        tested += 1
        if x0 == x1:
            continue
        d = dist(x0, x1)
        if not d < g(eps, x0) or not d < g(eps, x1):
            continue
        w = fam.gap_witness(x0, x1, eps)
        if w is not None:
            cex = Counterexample(x0, x1, w.gap, w.member)
            if not cex.reverify(target, g, eps):  # pragma: no cover - would be an oracle bug
                raise AssertionError("counterexample failed re-verification")
            return cex
    return NoViolation(tested)


def check_monotone(g: GaugeFamily, points, eps_list) -> tuple | None:
    """First ``(x, eps, eps')`` with ``eps <= eps'`` but ``g(eps) > g(eps')``."""
    eps_sorted = sorted(Fraction(e) for e in eps_list)
    for x in points:
        vals = [g(e, x) for e in eps_sorted]
        for i in range(len(vals) - 1):
            if vals[i] > vals[i + 1]:
                return x, eps_sorted[i], eps_sorted[i + 1]
    return None


# -- registry ------------------------------------------------------------------------------------

DEFAULT_IDS = (
    "lipschitz@1",
    "lipschitz@2",
    "step@1/2",
    "power@5",
    "piecewise-sample",
    "dirichlet-quad",
    "dirichlet-cantor",
    "cantor-binary",
    "cantor-bit@2",
    "nonmeasurable-oracle",
    "power-family",
    "step-family",
    "finite:step@1/2+lipschitz@1",
)


def lookup(ident: str):
    """Resolve a catalog identifier such as ``step@1/2`` or ``power-family``."""
    ident = ident.strip()
    fixed = {
        "dirichlet-quad": DirichletQuad(),
        "dirichlet-cantor": DirichletCantor(),
        "cantor-binary": CantorBinary(),
        "nonmeasurable-oracle": OracleFunction(),
        "power-family": PowerFamily(),
        "step-family": StepFamily(),
        "piecewise-sample": PIECEWISE_SAMPLE,
    }
    if ident in fixed:
        return fixed[ident]
    try:
        if ident.startswith("finite:"):
            return FiniteFamily(tuple(lookup(p) for p in ident[len("finite:"):].split("+")))
        name, _, arg = ident.partition("@")
        if name == "lipschitz" and arg:
            return Lipschitz(Fraction(arg))
        if name == "step" and arg:
            return StepIndicator(Fraction(arg))
        if name == "power" and arg:
            return PowerMember(int(arg))
        if name == "cantor-bit" and arg:
            return CantorBit(int(arg))
    except (ValueError, ZeroDivisionError) as exc:
        raise KeyError(f"bad catalog id {ident!r}: {exc}") from None
    raise KeyError(f"unknown catalog id {ident!r}")


def describe(entry) -> dict:
    """Classification flags of an entry, as used in reports."""
    if is_family(entry):
        return {"id": entry.ident, "kind": "family", "carrier": entry.carrier,
                "classification": entry.classification}
    return {"id": entry.ident, "kind": "function", "carrier": entry.carrier,
            "regularity": entry.regularity, "measurability": entry.measurability}


def gauge_entries(carrier: str | None = None) -> list:
    """Every default entry that carries an analytic gauge family."""
    out = []
    for ident in DEFAULT_IDS:
        e = lookup(ident)
        if is_family(e):
            ok = e.classification == EQUI_BAIRE1
        else:
            ok = e.regularity != NOT_BAIRE1
        if ok and (carrier is None or e.carrier == carrier):
            out.append(e)
    return out
