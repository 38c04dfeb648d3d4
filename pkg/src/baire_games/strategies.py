"""Player strategies: the constructive ones and a baseline adversary suite.

Each strategy is a deterministic function of the validated history and the
match seed.  Identifiers such as ``gauge-ii``, ``ball-ii:step@1/2`` or
``walk-i@7`` are resolved by :func:`make_strategy`.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from . import catalog
from .arena import (
    BALL_KINDS,
    ConfigError,
    FAMILY_KINDS,
    KINDS,
    MatchState,
    SET_KINDS,
    STEP_KINDS,
)
from .exactnum import (
    Ball,
    CantorPoint,
    HALF_SQRT2,
    QuadPoint,
    as_quad,
    dist,
)
from .setalgebra import (
    A_REQUEST,
    B_REQUEST,
    RATIONALS,
    RepSet,
    fresh_points,
    intersect_ball,
    interval_set,
    member,
    rationals_by_denominator,
    refine_closed,
    with_atom,
)

POINT_KINDS = ("Gp", "GpF")
OPEN_KINDS = BALL_KINDS + SET_KINDS


class Strategy:
    ident = "strategy"
    side = "I"
    kinds: tuple = ()

    def start(self, state: MatchState) -> None:
        pass

    def move(self, state: MatchState):  # pragma: no cover - abstract
        raise NotImplementedError

    def declare_limit(self, state: MatchState):
        return None


def _gauge_source(state: MatchState, override):
    src = override if override is not None else state.target
    try:
        return catalog.gauge_family(src), src
    except catalog.ClassificationError as exc:
        raise ConfigError(str(exc)) from None


def _k_ball(x, n: int):
    """Closed ball of radius ``2^(-n+1)`` around ``x`` with its far extremes."""
    r = Fraction(2) ** (1 - n)
    if isinstance(x, CantorPoint):
        k = 0
        while Fraction(1, 2**k) > r:
            k += 1
        prefix = x.prefix(k)
        return Ball(x, r, closed=True), (CantorPoint(prefix, "0"), CantorPoint(prefix, "1")), Fraction(1, 2**k)
    lo = max(QuadPoint(0), x - r)
    hi = min(QuadPoint(1), x + r)
    return Ball(x, r, closed=True), (lo, hi), None


def _reach(xp, extremes, cyl_diam) -> QuadPoint:
    """Smallest radius ``D`` with ``K`` inside every open ball ``B(xp, r)``, ``r > D``."""
    if cyl_diam is not None:
        return QuadPoint(cyl_diam)
    lo, hi = extremes
    return max(abs(xp - lo), abs(xp - hi))


class GaugeII(Strategy):
    """Answer with a point x' of ``K_n`` whose gauge ball swallows ``K_n``.

    ``M_n`` is the greatest ``m < n`` admitting such a point; candidates are the
    history (newest first), the extremes of ``K_n`` and the catalog hard
    points.  Without any ``m`` the answer is ``x_n`` itself.
    """

    side = "II"
    kinds = ("G", "Gp", "GpF")

    def __init__(self, override=None):
        self.override = override
        self.ident = "gauge-ii" + (f":{override.ident}" if override is not None else "")

    def start(self, state):
        g, src = _gauge_source(state, self.override)
        self.gauge = catalog.normalize_gauges(g)
        self.hard = tuple(src.hard_points())
        self.last_m = None

    def choose(self, xs: list):
        n = len(xs) - 1
        x = xs[-1]
        if n < 2:
            self.last_m = None
            return x
        k, extremes, cyl = _k_ball(x, n)
        cands = []
        for c in itertools.chain(reversed(xs), extremes, self.hard):
            if c not in cands and k.contains(c):
                cands.append(c)
        best_m, best_x = 0, x
        for c in cands:
            reach = _reach(c, extremes, cyl)
            lo, hi = best_m, n - 1
            if lo >= hi or not self.gauge(Fraction(1, lo + 1), c) > reach:
                continue
            # greatest m in (lo, hi] with gauge(1/m, c) > reach; monotone in m
            lo += 1
            while lo < hi:
                mid = (lo + hi + 1) // 2
                if self.gauge(Fraction(1, mid), c) > reach:
                    lo = mid
                else:
                    hi = mid - 1
            if lo > best_m:
                best_m, best_x = lo, c
        self.last_m = best_m or None
        return best_x

    def move(self, state):
        xp = self.choose(state.xs)
        if state.kind == "G":
            return state.value(xp)
        return xp


class BallII(Strategy):
    """``U_n = B(x_n, g''(1/n, x_n)/2)`` with normalized, shrunk gauges."""

    side = "II"
    kinds = BALL_KINDS

    def __init__(self, override=None):
        self.override = override
        self.ident = "ball-ii" + (f":{override.ident}" if override is not None else "")

    def start(self, state):
        g, _ = _gauge_source(state, self.override)
        if g.carrier != state.target.carrier:
            raise ConfigError(f"{self.ident} gauges live on the {g.carrier}")
        self.gauge = catalog.shrink_gauges(catalog.normalize_gauges(g))

    def move(self, state):
        n = state.n - 1
        x = state.xs[-1]
        eps = Fraction(1, n) if n >= 1 else Fraction(1)
        return Ball(x, self.gauge(eps, x) / 2)


def _region_of(u, carrier: str):
    if isinstance(u, Ball):
        return u
    raise TypeError(u)


class DenseAlternationI(Strategy):
    """A-points at odd rounds, B-points at even rounds, inside II's last set.

    In step games each pick is confined to ``B(x_{n-1}, 2^-(n-1))``.
    """

    side = "I"
    kinds = ("G", "Gp", "Gpp")
    ident = "dense-i"

    def start(self, state):
        try:
            self.w = catalog.dense_pair_witness(state.target)
        except catalog.ClassificationError as exc:
            raise ConfigError(str(exc)) from None

    def _whole(self):
        if self.w.carrier == "line":
            return (QuadPoint(0), QuadPoint(1), True, True)
        return ""

    def move(self, state):
        n = state.n
        if n == 0:
            region = self._whole()
        elif state.kind in STEP_KINDS:
            region = Ball(state.xs[-1], Fraction(2) ** (1 - n))
        else:
            region = state.ys[-1]
        if self.w.carrier == "line" and isinstance(region, Ball):
            region = region.interval()
        return self.w.pick_a(region) if n % 2 == 1 else self.w.pick_b(region)


class EquiOscConstantI(Strategy):
    """Hold while II's last answer is already ``eps/3`` away; else jump."""

    side = "I"
    kinds = ("GpF",)
    ident = "equi-const-i"

    def start(self, state):
        try:
            self.w = state.target.osc_witness()
        except (catalog.ClassificationError, AttributeError) as exc:
            raise ConfigError(str(exc)) from None
        self.rng = state.rng("I")
        self.eps = self.w.eps

    def move(self, state):
        n = state.n
        if n == 0:
            return QuadPoint(Fraction(self.rng.randrange(256, 769), 1024))
        prev, reply = state.xs[-1], state.ys[-1]
        if state.target.gap_witness(reply, prev, self.eps / 3) is not None:
            return prev
        region = Ball(prev, Fraction(1, 2**n))
        _, a, gap = self.w.pick(region, reply, self.rng)
        if gap < 2 * self.eps / 3:
            raise catalog.WitnessError("oscillation pick below 2 eps/3")
        return a


class EquiOscOpenI(Strategy):
    """Jump inside II's ball to a point ``eps/3`` away from the last one."""

    side = "I"
    kinds = ("GppF",)
    ident = "equi-open-i"

    def start(self, state):
        try:
            self.w = state.target.osc_witness()
        except (catalog.ClassificationError, AttributeError) as exc:
            raise ConfigError(str(exc)) from None
        self.rng = state.rng("I")

    def move(self, state):
        if state.n == 0:
            return QuadPoint(Fraction(self.rng.randrange(256, 769), 1024))
        prev = state.xs[-1]
        _, a, gap = self.w.pick(state.ys[-1], prev, self.rng)
        if gap < self.w.eps / 3:
            raise catalog.WitnessError("oscillation pick below eps/3")
        return a


def _exceptional_set(target):
    exc = getattr(target, "exceptional", None)
    if target.measurability != catalog.BAIRE_MEASURABLE or exc == catalog.ALL_RATIONALS:
        return RATIONALS
    return exc


class ComeagerII(Strategy):
    """``U_n = {x_n} ∪ (B(a, r_n) ∩ G)`` with ``r_0 = 1`` and ``r_n = 1/n``."""

    side = "II"
    kinds = ("cGpp",)
    ident = "comeager-ii"

    def __init__(self, a=None):
        self.a = HALF_SQRT2 if a is None else as_quad(a)

    def start(self, state):
        self.exc = _exceptional_set(state.target)
        if not member(interval_set(0, 1, exc=self.exc), self.a):
            raise ConfigError("the anchor point must lie in the comeager set")

    def move(self, state):
        n = state.n - 1
        r = Fraction(1) if n == 0 else Fraction(1, n)
        g = interval_set(self.a - r, self.a + r, False, False, self.exc)
        return with_atom(g, state.xs[-1])

    def declare_limit(self, state):
        return self.a


class LusinII(Strategy):
    """``U_n = {x_n} ∪ (F_n \\ E)`` for nested closed ``F_n`` avoiding ``E``."""

    side = "II"
    kinds = ("mGpp",)
    ident = "lusin-ii"

    def start(self, state):
        self.exc = _exceptional_set(state.target)
        if self.exc == RATIONALS:
            self.enum = list(itertools.islice(rationals_by_denominator(), state.config.rounds + 2))
        else:
            self.enum = list(self.exc or ())
        self.closed: list[RepSet] = []

    def move(self, state):
        n = state.n - 1
        if n == 0:
            f = refine_closed(interval_set(0, 1), self.enum[:1], 0)
        else:
            f = refine_closed(self.closed[-1], self.enum[:n], n)
        self.closed.append(f)
        iv = f.intervals[0]
        body = interval_set(iv.lo, iv.hi, True, True, self.exc)
        return with_atom(body, state.xs[-1])

    def declare_limit(self, state):
        if not self.closed:
            return None
        iv = self.closed[-1].intervals[0]
        return iv.lo + (iv.hi - iv.lo) * HALF_SQRT2


class SigmaWitnessI(Strategy):
    """Fresh A-requests at even rounds and B-requests at odd rounds.

    For a function with a dense pair witness the requests become rational and
    irrational picks; otherwise any fresh member of II's set is used.
    """

    side = "I"
    kinds = SET_KINDS
    ident = "sigma-i"

    def start(self, state):
        self.oracle = state.oracle
        self.used: set = set()
        try:
            self.w = catalog.dense_pair_witness(state.target)
        except catalog.ClassificationError:
            self.w = None

    def _pick(self, region: RepSet, want_a: bool):
        if self.oracle is not None:
            for p in fresh_points(region, self.used):
                return p
        want_rational = want_a if self.w is not None else None
        for p in fresh_points(region, self.used, want_rational):
            return p
        for p in fresh_points(region, self.used):
            return p
        raise catalog.WitnessError("no fresh point in II's set")

    def move(self, state):
        n = state.n
        want_a = n % 2 == 0
        region = interval_set(0, 1) if n == 0 else state.ys[-1]
        p = self._pick(region, want_a)
        self.used.add(p)
        if self.oracle is not None:
            self.oracle.eval(p, A_REQUEST if want_a else B_REQUEST)
        return p


# -- baselines ------------------------------------------------------------------------------------------

def _random_limit(rng, carrier: str):
    if carrier == "cantor":
        pre = "".join(rng.choice("01") for _ in range(rng.randrange(0, 10)))
        per = "".join(rng.choice("01") for _ in range(rng.randrange(1, 4)))
        return CantorPoint(pre, per)
    if rng.random() < 0.25:
        while True:
            p = QuadPoint(Fraction(rng.randrange(-256, 513), 256), Fraction(rng.randrange(-128, 129), 256))
            if 0 <= p <= 1 and not p.is_rational:
                return p
    return QuadPoint(Fraction(rng.randrange(0, 4097), 4096))


def _near(limit, n: int, rng):
    """A point within ``2^(-n-1)`` of ``limit``."""
    if isinstance(limit, CantorPoint):
        prefix = limit.prefix(n + 1)
        tail = "".join(rng.choice("01") for _ in range(rng.randrange(0, 4)))
        return CantorPoint(prefix + tail, rng.choice(["0", "1", "01"]))
    off = Fraction(rng.randrange(0, 17), 16) / 2 ** (n + 1)
    p = limit + off if rng.random() < 0.5 else limit - off
    if not 0 <= p <= 1:
        p = limit - (p - limit)
    return p


def _open_walk_step(state, rng):
    """A random member of ``U_{n-1} ∩ B(x_{n-1}, 2^-n)``, or ``x_{n-1}``."""
    n, prev, region = state.n, state.xs[-1], state.ys[-1]
    ball = Ball(prev, Fraction(1, 2**n))
    if isinstance(region, Ball):
        if isinstance(prev, CantorPoint):
            k = max(len(region.cylinder()), len(ball.cylinder()))
            cand = _near(prev, k, rng)
            return cand if region.contains(cand) and ball.contains(cand) else prev
        lo1, hi1, _, _ = region.interval()
        lo2, hi2, _, _ = ball.interval()
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        t = Fraction(rng.randrange(1, 16), 16)
        cand = lo + (hi - lo) * t
        return cand if region.contains(cand) and ball.contains(cand) else prev
    part = intersect_ball(region, ball)
    if rng.random() < 0.5 or not part.intervals:
        return prev
    iv = part.intervals[rng.randrange(len(part.intervals))]
    t = Fraction(rng.randrange(1, 16), 16)
    cand = iv.lo + (iv.hi - iv.lo) * t
    if region.exc is not None and not member(region, cand):
        cand = iv.lo + (iv.hi - iv.lo) * HALF_SQRT2 * t
    return cand if member(region, cand) and ball.contains(cand) else prev


class WalkI(Strategy):
    """Random walk toward a limit fixed in advance, which it declares.

    In open-set games it wanders inside II's sets with shrinking steps and
    declares its last point.
    """

    side = "I"
    kinds = KINDS

    def __init__(self, seed: int | None = None):
        self.seed = seed
        self.ident = "walk-i" + (f"@{seed}" if seed is not None else "")

    def start(self, state):
        base = state.config.seed if self.seed is None else self.seed * 1_000_003 + state.config.seed
        self.rng = random.Random(base)
        self.limit = _random_limit(self.rng, state.target.carrier)

    def move(self, state):
        n = state.n
        if state.kind in STEP_KINDS:
            return _near(self.limit, n, self.rng)
        if n == 0:
            return _near(self.limit, 0, self.rng)
        return _open_walk_step(state, self.rng)

    def declare_limit(self, state):
        if state.kind in STEP_KINDS:
            return self.limit
        return state.xs[-1] if state.xs else None


class AdversarialWalkI(Strategy):
    """Alternate sides of a hard point with shrinking offsets; declare it."""

    side = "I"
    kinds = STEP_KINDS
    ident = "adv-walk-i"

    def start(self, state):
        self.rng = state.rng("I", 5)
        hard = [h for h in state.target.hard_points() if isinstance(h, QuadPoint)]
        if state.target.carrier == "cantor":
            self.c = CantorPoint("", "0")
        else:
            self.c = hard[0] if hard else QuadPoint(Fraction(1, 2))
        self.theta = Fraction(self.rng.randrange(1, 17), 16)

    def move(self, state):
        n = state.n
        if isinstance(self.c, CantorPoint):
            return CantorPoint("0" * (n + 1) + "1", "0")
        s = self.theta / 2 ** (n + 1)
        up = n % 2 == 0
        p = self.c + s if up else self.c - s
        if not 0 <= p <= 1:
            p = self.c - s if up else self.c + s
        return p

    def declare_limit(self, state):
        return self.c


class ConstI(Strategy):
    """Walk briefly, then stay put from a seeded round at most ``R/2``."""

    side = "I"
    kinds = KINDS
    ident = "const-i"

    def start(self, state):
        self.rng = state.rng("I", 3)
        self.stop = self.rng.randrange(0, state.config.rounds // 2 + 1)
        self.limit = _random_limit(self.rng, state.target.carrier)

    def move(self, state):
        n = state.n
        if n == 0:
            return _near(self.limit, 0, self.rng)
        if n >= self.stop or state.kind not in STEP_KINDS:
            return state.xs[-1]
        return _near(self.limit, n, self.rng)


class EchoII(Strategy):
    side = "II"
    kinds = ("G", "Gp", "GpF")
    ident = "echo-ii"

    def move(self, state):
        x = state.xs[-1]
        return state.value(x) if state.kind == "G" else x


class GreedyII(EchoII):
    ident = "greedy-ii"
    kinds = ("G",)


class ConstantII(Strategy):
    """Ignore I: a fixed point, the value 0, or the whole carrier."""

    side = "II"
    kinds = KINDS
    ident = "constant-ii"

    def move(self, state):
        x = state.xs[-1]
        if state.kind == "G":
            return QuadPoint(0)
        if state.kind in POINT_KINDS:
            return CantorPoint("", "0") if isinstance(x, CantorPoint) else QuadPoint(Fraction(1, 2))
        if state.kind in BALL_KINDS:
            return Ball(x, Fraction(2))
        return with_atom(interval_set(0, 1), x)


class CenterBallII(Strategy):
    """Balls of fixed radius 1/4 around I's point."""

    side = "II"
    kinds = BALL_KINDS
    ident = "center-ball-ii"

    def move(self, state):
        return Ball(state.xs[-1], Fraction(1, 4))


STRATEGY_IDS = (
    "gauge-ii", "ball-ii", "dense-i", "equi-const-i", "equi-open-i", "comeager-ii", "lusin-ii",
    "sigma-i", "echo-ii", "walk-i", "adv-walk-i", "const-i", "constant-ii", "center-ball-ii", "greedy-ii",
)


def make_strategy(ident: str) -> Strategy:
    """Build a fresh strategy from its identifier.

    ``gauge-ii:<catalog id>`` and ``ball-ii:<catalog id>`` borrow another
    entry's gauges; ``walk-i@<seed>`` fixes the walk's private seed.
    """
    name, _, arg = ident.partition(":")
    if name in ("gauge-ii", "ball-ii"):
        override = None
        if arg:
            try:
                override = catalog.lookup(arg)
            except KeyError as exc:
                raise ConfigError(str(exc)) from None
        return GaugeII(override) if name == "gauge-ii" else BallII(override)
    if arg:
        raise ConfigError(f"strategy {name!r} takes no catalog argument")
    if name.startswith("walk-i"):
        _, _, seed = name.partition("@")
        try:
            return WalkI(int(seed) if seed else None)
        except ValueError:
            raise ConfigError(f"bad walk seed in {ident!r}") from None
    simple = {
        "dense-i": DenseAlternationI,
        "equi-const-i": EquiOscConstantI,
        "equi-open-i": EquiOscOpenI,
        "comeager-ii": ComeagerII,
        "lusin-ii": LusinII,
        "sigma-i": SigmaWitnessI,
        "echo-ii": EchoII,
        "adv-walk-i": AdversarialWalkI,
        "const-i": ConstI,
        "constant-ii": ConstantII,
        "center-ball-ii": CenterBallII,
        "greedy-ii": GreedyII,
    }
    if name not in simple:
        raise ConfigError(f"unknown strategy {ident!r}")
    return simple[name]()


def baselines() -> dict:
    """The adversary suite keyed by side."""
    return {
        "I": ("walk-i", "const-i", "adv-walk-i"),
        "II": ("echo-ii", "constant-ii", "center-ball-ii", "greedy-ii"),
    }
