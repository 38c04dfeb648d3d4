"""Game engines, move validation and finite-horizon referees.

Seven kinds are supported::

    G     I plays points with d(x_n, x_{n+1}) <= 2^-n, II plays values
    Gp    as G, but II plays points x'_n and is judged on f(x'_n)
    Gpp   I plays x_n in U_{n-1}, II plays open balls U_n containing x_n
    GpF   Gp for a family, judged uniformly over the family
    GppF  Gpp for a family
    cGpp  Gpp with non-meager representable sets instead of balls
    mGpp  Gpp with positive-measure representable sets

A match is a finite prefix of the infinite game.  The referee returns a
three-valued verdict whose certificate can be re-derived from the transcript.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import catalog
from .exactnum import (
    Ball,
    CantorPoint,
    QuadPoint,
    carrier_of,
    dist,
    format_point,
    in_carrier,
    parse_point,
    step_bound_ok,
)
from .setalgebra import (
    NON_MEAGER,
    NonMeasOracle,
    RepSet,
    classify_category,
    closure_contains,
    measure,
    member,
    parse_repset,
)

KINDS = ("G", "Gp", "Gpp", "GpF", "GppF", "cGpp", "mGpp")
STEP_KINDS = ("G", "Gp", "GpF")
BALL_KINDS = ("Gpp", "GppF")
SET_KINDS = ("cGpp", "mGpp")
OPEN_KINDS = BALL_KINDS + SET_KINDS
FAMILY_KINDS = ("GpF", "GppF")

I_WINS = "IWins"
II_WINS = "IIWins"
UNDECIDED = "Undecided"

EXIT_CODES = {II_WINS: 0, I_WINS: 10, UNDECIDED: 20}
EXIT_FORFEIT = 30


class ConfigError(ValueError):
    """A match cannot be set up as requested."""


@dataclass(frozen=True)
class MatchConfig:
    rounds: int = 40
    eps_dec: Fraction = Fraction(1, 8)
    window: int = 8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eps_dec", Fraction(self.eps_dec))
        if self.rounds < 1:
            raise ConfigError("rounds must be positive")
        if not 1 <= self.window <= self.rounds:
            raise ConfigError("window must lie in 1..rounds")
        if self.eps_dec <= 0:
            raise ConfigError("eps_dec must be positive")


@dataclass(frozen=True)
class Violation:
    side: str
    n: int
    rule: str
    detail: str

    def to_json(self) -> dict:
        return {"type": "forfeit", "by": self.side, "n": self.n, "rule": self.rule, "detail": self.detail}


def check_binding(kind: str, target) -> None:
    if kind not in KINDS:
        raise ConfigError(f"unknown game kind {kind!r}")
    fam = catalog.is_family(target)
    if kind in FAMILY_KINDS and not fam:
        raise ConfigError(f"{kind} binds a family, got function {target.ident}")
    if kind not in FAMILY_KINDS and fam:
        raise ConfigError(f"{kind} binds a function, got family {target.ident}")
    if kind in SET_KINDS and target.carrier != "line":
        raise ConfigError(f"{kind} is played on [0,1]")


# -- values -------------------------------------------------------------------------

class Evaluator:
    """Exact values and gaps for the bound target, routing oracle entries."""

    def __init__(self, target, oracle: NonMeasOracle | None = None):
        self.target = target
        self.oracle = oracle
        self.is_family = catalog.is_family(target)
        self.uses_oracle = isinstance(target, catalog.OracleFunction)
        if self.uses_oracle and oracle is None:
            self.oracle = NonMeasOracle()

    def value(self, p) -> QuadPoint:
        if self.uses_oracle:
            return self.oracle.value(p)
        return self.target.evaluate(p)

    def gap_witness(self, u, v, eps):
        """``(member_id, gap)`` when some member separates u, v by ``>= eps``."""
        if self.is_family:
            w = self.target.gap_witness(u, v, eps)
            return None if w is None else (w.member.ident, w.gap)
        gap = abs(self.value(u) - self.value(v))
        return (self.target.ident, gap) if gap >= eps else None

    def sup_gap(self, u, v) -> QuadPoint:
        if self.is_family:
            return self.target.sup_gap(u, v)
        return abs(self.value(u) - self.value(v))


# -- moves ------------------------------------------------------------------------------

def move_type(kind: str, side: str) -> str:
    if side == "I":
        return "point"
    if kind == "G":
        return "value"
    if kind in ("Gp", "GpF"):
        return "point"
    if kind in BALL_KINDS:
        return "ball"
    return "set"


def format_move(m) -> str:
    if isinstance(m, Ball):
        o, c = ("[", "]") if m.closed else ("(", ")")
        return f"B{o}{format_point(m.center)},{format_point(m.radius)}{c}"
    if isinstance(m, RepSet):
        return str(m)
    return format_point(m)


def parse_move(mtype: str, text: str):
    if mtype == "ball":
        if not (text.startswith("B(") or text.startswith("B[")):
            raise ValueError(f"bad ball literal {text!r}")
        center, radius = text[2:-1].split(",")
        return Ball(parse_point(center), Fraction(radius), text[1] == "[")
    if mtype == "set":
        return parse_repset(text)
    return parse_point(text)


def _contains(region, p) -> bool:
    if isinstance(region, Ball):
        return region.contains(p)
    return member(region, p)


def validate_move(kind: str, target, xs: list, ys: list, side: str, move) -> Violation | None:
    """Check one move against the rules; ``xs``/``ys`` are the prior moves."""
    carrier = target.carrier
    if side == "I":
        n = len(xs)
        if not in_carrier(move, carrier):
            return Violation("I", n, "carrier", f"{format_move(move)} is not a point of the {carrier}")
        if n == 0:
            return None
        if kind in STEP_KINDS:
            if not step_bound_ok(xs[n - 1], move, n - 1):
                return Violation("I", n, "step", f"d({format_point(xs[n - 1])},{format_point(move)}) = "
                                 f"{format_point(dist(xs[n - 1], move))} > 2^-{n - 1}")
            return None
        if not _contains(ys[n - 1], move):
            return Violation("I", n, "inside-previous", f"{format_point(move)} not in {format_move(ys[n - 1])}")
        return None
    n = len(ys)
    x = xs[n]
    mtype = move_type(kind, "II")
    if mtype == "value":
        if not isinstance(move, QuadPoint):
            return Violation("II", n, "value", f"{move!r} is not a real value")
        return None
    if mtype == "point":
        if not in_carrier(move, carrier):
            return Violation("II", n, "carrier", f"{format_move(move)} is not a point of the {carrier}")
        return None
    if mtype == "ball":
        if not isinstance(move, Ball) or move.closed:
            return Violation("II", n, "open-ball", f"{move!r} is not an open ball")
        if move.radius <= 0 or carrier_of(move.center) != carrier:
            return Violation("II", n, "open-ball", f"{format_move(move)} has a bad center or radius")
        if not move.contains(x):
            return Violation("II", n, "contains", f"{format_move(move)} does not contain {format_point(x)}")
        return None
    if not isinstance(move, RepSet):
        return Violation("II", n, "set", f"{move!r} is not a representable set")
    if kind == "cGpp" and classify_category(move) != NON_MEAGER:
        return Violation("II", n, "non-meager", f"{move} is meager")
    if kind == "mGpp" and not measure(move).sign() > 0:
        return Violation("II", n, "positive-measure", f"{move} has measure 0")
    if not member(move, x):
        return Violation("II", n, "contains", f"{move} does not contain {format_point(x)}")
    return None


def limit_consistent(kind: str, xs: list, ys: list, limit) -> bool:
    """A declared limit must be reachable by the point sequence.

    Step consistency means ``d(x_n, limit) <= 2^(-n+1)`` for every n; set
    games also accept a limit lying in the closure of every ``U_n``.
    """
    if xs and carrier_of(limit) != carrier_of(xs[0]):
        return False
    step_ok = all(step_bound_ok(x, limit, n - 1) if n >= 1 else dist(x, limit) <= 2 for n, x in enumerate(xs))
    if step_ok or kind not in SET_KINDS:
        return step_ok
    return all(closure_contains(u, limit) for u in ys)


# -- matches ------------------------------------------------------------------------------------

@dataclass
class MatchState:
    """What strategies see: the history so far plus match-scoped resources."""

    kind: str
    target: object
    config: MatchConfig
    evaluator: Evaluator
    xs: list = field(default_factory=list)
    ys: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.xs)

    @property
    def oracle(self) -> NonMeasOracle | None:
        return self.evaluator.oracle

    def value(self, p) -> QuadPoint:
        return self.evaluator.value(p)

    def rng(self, side: str, salt: int = 0) -> random.Random:
        return random.Random(self.config.seed * 7919 + (1 if side == "I" else 2) + 31 * salt)


@dataclass
class Transcript:
    kind: str
    target: str
    strategy_I: str
    strategy_II: str
    config: MatchConfig
    moves_I: list = field(default_factory=list)
    moves_II: list = field(default_factory=list)
    declared_limit: object = None
    declared_by: str | None = None
    forfeit: Violation | None = None
    aborted: str | None = None
    oracle_records: list = field(default_factory=list)

    @property
    def round_count(self) -> int:
        return len(self.moves_I)

    def lines(self) -> list:
        c = self.config
        out = [{"type": "header", "kind": self.kind, "target": self.target, "I": self.strategy_I,
                "II": self.strategy_II, "rounds": c.rounds, "eps_dec": str(c.eps_dec), "window": c.window,
                "seed": c.seed}]
        for n, x in enumerate(self.moves_I):
            out.append({"type": "move", "n": n, "side": "I", "mtype": "point", "move": format_move(x)})
            if n < len(self.moves_II):
                out.append({"type": "move", "n": n, "side": "II", "mtype": move_type(self.kind, "II"),
                            "move": format_move(self.moves_II[n])})
        if self.declared_limit is not None:
            out.append({"type": "limit", "by": self.declared_by, "point": format_point(self.declared_limit)})
        if self.forfeit is not None:
            out.append(self.forfeit.to_json())
        if self.aborted is not None:
            out.append({"type": "aborted", "detail": self.aborted})
        out.extend(self.oracle_records)
        return out

    def dumps(self) -> str:
        return "".join(json.dumps(line, ensure_ascii=False) + "\n" for line in self.lines())

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        lines = [json.loads(s) for s in text.splitlines() if s.strip()]
        if not lines or lines[0].get("type") != "header":
            raise ValueError("transcript must start with a header line")
        h = lines[0]
        cfg = MatchConfig(int(h["rounds"]), Fraction(h["eps_dec"]), int(h["window"]), int(h["seed"]))
        t = cls(h["kind"], h["target"], h["I"], h["II"], cfg)
        for rec in lines[1:]:
            typ = rec["type"]
            if typ == "move":
                m = parse_move(rec["mtype"], rec["move"])
                seq = t.moves_I if rec["side"] == "I" else t.moves_II
                if rec["n"] != len(seq):
                    raise ValueError(f"move {rec['n']} for {rec['side']} out of order")
                seq.append(m)
            elif typ == "limit":
                t.declared_limit = parse_point(rec["point"])
                t.declared_by = rec["by"]
            elif typ == "forfeit":
                t.forfeit = Violation(rec["by"], rec["n"], rec["rule"], rec["detail"])
            elif typ == "aborted":
                t.aborted = rec["detail"]
            elif typ == "oracle":
                t.oracle_records.append(rec)
            else:
                raise ValueError(f"unknown transcript line type {typ!r}")
        return t


def play_match(kind: str, target, strategy_I, strategy_II, config: MatchConfig) -> Transcript:
    """Alternate validated moves for ``config.rounds`` rounds or until a violation."""
    check_binding(kind, target)
    for s, side in ((strategy_I, "I"), (strategy_II, "II")):
        if s.side != side:
            raise ConfigError(f"{s.ident} plays for {s.side}, not {side}")
        if kind not in s.kinds:
            raise ConfigError(f"{s.ident} does not play {kind}")
    state = MatchState(kind, target, config, Evaluator(target))
    t = Transcript(kind, target.ident, strategy_I.ident, strategy_II.ident, config)
    strategy_I.start(state)
    strategy_II.start(state)
    for _ in range(config.rounds):
        for strat, seq, side in ((strategy_I, state.xs, "I"), (strategy_II, state.ys, "II")):
            try:
                m = strat.move(state)
            except catalog.WitnessError as exc:
                t.aborted = f"{side} witness failure: {exc}"
                break
            v = validate_move(kind, target, state.xs, state.ys, side, m)
            if v is not None:
                t.forfeit = v
                break
            seq.append(m)
        if t.forfeit is not None or t.aborted is not None:
            break
    t.moves_I, t.moves_II = list(state.xs), list(state.ys)
    if t.forfeit is None and t.aborted is None:
        for strat, side in ((strategy_I, "I"), (strategy_II, "II")):
            lim = strat.declare_limit(state)
            if lim is None:
                continue
            t.declared_limit, t.declared_by = lim, side
            if not limit_consistent(kind, state.xs, state.ys, lim):
                t.forfeit = Violation(side, len(state.xs), "declared-limit",
                                      f"{format_point(lim)} is inconsistent with the played points")
            break
    if state.oracle is not None:
        t.oracle_records = state.oracle.records()
    return t


# -- referee -------------------------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    outcome: str
    reason: str
    certificate: dict
    rounds: int

    @property
    def exit_code(self) -> int:
        if self.reason == "forfeit":
            return EXIT_FORFEIT
        return EXIT_CODES[self.outcome]

    def to_json(self) -> dict:
        return {"verdict": self.outcome, "reason": self.reason, "rounds": self.rounds,
                "certificate": self.certificate}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True) + "\n"


def _relevant(kind: str, t: Transcript) -> list:
    if kind in ("G", "Gp", "GpF"):
        return t.moves_II
    return t.moves_I


def _evaluator_for(t: Transcript, target=None) -> Evaluator:
    target = target if target is not None else catalog.lookup(t.target)
    oracle = NonMeasOracle.from_records(t.oracle_records) if t.oracle_records else None
    return Evaluator(target, oracle)


def find_cauchy_failure(kind: str, seq: list, ev: Evaluator, eps, lo: int):
    """First pair ``i < j`` with ``i >= lo`` whose value gap is at least ``eps``."""
    for i in range(lo, len(seq)):
        for j in range(i + 1, len(seq)):
            if kind == "G":
                gap = abs(seq[i] - seq[j])
                if gap >= eps:
                    return {"type": "cauchy", "i": i, "j": j, "gap": format_point(gap), "member": ev.target.ident}
            else:
                w = ev.gap_witness(seq[i], seq[j], eps)
                if w is not None:
                    return {"type": "cauchy", "i": i, "j": j, "gap": format_point(w[1]), "member": w[0]}
    return None


def _point_failure(xs: list, eps, lo: int):
    for i in range(lo, len(xs)):
        for j in range(i + 1, len(xs)):
            d = dist(xs[i], xs[j])
            if d >= eps:
                return {"type": "point-cauchy", "i": i, "j": j, "distance": format_point(d)}
    return None


def referee(kind: str, t: Transcript, config: MatchConfig | None = None, target=None) -> Verdict:
    """Finite-horizon verdict: forfeit, Cauchy failure, limit residual, or undecided."""
    config = config or t.config
    eps = config.eps_dec
    rounds = t.round_count
    if t.forfeit is not None:
        winner = II_WINS if t.forfeit.side == "I" else I_WINS
        return Verdict(winner, "forfeit", t.forfeit.to_json(), rounds)
    if t.aborted is not None:
        return Verdict(UNDECIDED, "aborted", {"type": "aborted", "detail": t.aborted}, rounds)
    ev = _evaluator_for(t, target)
    seq = _relevant(kind, t)
    lo = max(0, len(seq) - config.window)
    cert = find_cauchy_failure(kind, seq, ev, eps, lo)
    if cert is not None:
        return Verdict(I_WINS, "cauchy", cert, rounds)
    if kind in OPEN_KINDS:
        cert = _point_failure(t.moves_I, eps, max(0, len(t.moves_I) - config.window))
        if cert is not None:
            return Verdict(I_WINS, "point-cauchy", cert, rounds)
    tail = t.moves_I[-config.window:]
    if len(t.moves_I) >= config.window and all(x == tail[0] for x in tail):
        limit, source = tail[0], "stabilized"
    elif t.declared_limit is not None:
        limit, source = t.declared_limit, f"declared-{t.declared_by}"
    else:
        return Verdict(UNDECIDED, "no-limit", {"type": "undecided", "round": rounds,
                                               "diagnostic": "no stabilized or declared limit"}, rounds)
    window = seq[lo:]
    if not window:
        return Verdict(UNDECIDED, "empty", {"type": "undecided", "round": rounds, "diagnostic": "no moves"}, rounds)
    if kind == "G":
        target_value = ev.value(limit)
        residuals = [abs(y - target_value) for y in window]
    else:
        residuals = [ev.sup_gap(p, limit) for p in window]
    worst, best = max(residuals), min(residuals)
    base = {"limit": format_point(limit), "source": source, "window_start": lo}
    if worst < eps:
        return Verdict(II_WINS, "residual", {"type": "residual", "residual": format_point(worst), **base}, rounds)
    if best >= eps:
        return Verdict(I_WINS, "limit-gap", {"type": "limit-gap", "gap": format_point(best), **base}, rounds)
    return Verdict(UNDECIDED, "mixed-window", {"type": "undecided", "round": rounds,
                                               "diagnostic": "window values straddle the tolerance", **base}, rounds)


def replay(kind_or_t, t: Transcript | None = None) -> tuple:
    """Re-validate every move of a transcript and re-derive its verdict.

    Returns ``(verdict, problems)``; ``problems`` lists moves that no longer
    validate or a forfeit record that does not reproduce.
    """
    t = kind_or_t if t is None else t
    target = catalog.lookup(t.target)
    problems = []
    xs, ys = [], []
    stop = t.forfeit.n if t.forfeit is not None else None
    for n, x in enumerate(t.moves_I):
        v = validate_move(t.kind, target, xs, ys, "I", x)
        if v is not None:
            problems.append(f"I move {n}: {v.rule}: {v.detail}")
        xs.append(x)
        if n < len(t.moves_II):
            v = validate_move(t.kind, target, xs, ys, "II", t.moves_II[n])
            if v is not None:
                problems.append(f"II move {n}: {v.rule}: {v.detail}")
            ys.append(t.moves_II[n])
    if t.declared_limit is not None and t.forfeit is None:
        if not limit_consistent(t.kind, xs, ys, t.declared_limit):
            problems.append("declared limit is inconsistent")
    if stop is not None and t.forfeit.rule != "declared-limit" and t.forfeit.n != len(
            t.moves_I if t.forfeit.side == "I" else t.moves_II):
        problems.append("forfeit record does not follow the last legal move")
    return referee(t.kind, t, target=target), problems


def verify_certificate(t: Transcript, verdict: Verdict) -> bool:
    """Re-check an IWins Cauchy certificate or an IIWins residual exactly."""
    c = verdict.certificate
    ev = _evaluator_for(t)
    eps = t.config.eps_dec
    if c.get("type") == "cauchy":
        seq = _relevant(t.kind, t)
        u, v = seq[c["i"]], seq[c["j"]]
        if t.kind == "G":
            return abs(u - v) >= eps and format_point(abs(u - v)) == c["gap"]
        if ev.is_family:
            try:
                m = catalog.lookup(c["member"])
            except KeyError:
                return ev.sup_gap(u, v) >= eps
            return abs(m.evaluate(u) - m.evaluate(v)) >= eps
        return abs(ev.value(u) - ev.value(v)) >= eps
    if c.get("type") == "point-cauchy":
        return dist(t.moves_I[c["i"]], t.moves_I[c["j"]]) >= eps
    return referee(t.kind, t) == verdict


# -- equi-convergence checkers ---------------------------------------------------------------------------

def _family_gap(family, u, v) -> QuadPoint:
    return catalog.as_family(family).sup_gap(u, v)


def check_equi_cauchy(family, points: list, eps) -> bool:
    """Some ``N <= L//2`` has every later pair uniformly closer than ``eps``."""
    eps = Fraction(eps)
    length = len(points)
    bad_from = -1
    # largest i that starts a bad pair; then N must exceed it
    for i in range(length):
        for j in range(i + 1, length):
            if _family_gap(family, points[i], points[j]) >= eps:
                bad_from = max(bad_from, i)
                break
    return bad_from + 1 <= length // 2


def check_equi_conv(family, points: list, target, eps) -> bool:
    """Some ``N <= L//2`` has every later term uniformly within ``eps`` of target."""
    eps = Fraction(eps)
    length = len(points)
    bad = [k for k in range(length) if _family_gap(family, points[k], target) >= eps]
    return (bad[-1] + 1 if bad else 0) <= length // 2
