import random
from fractions import Fraction

import pytest

from baire_games import catalog
from baire_games.arena import (
    I_WINS,
    II_WINS,
    UNDECIDED,
    ConfigError,
    MatchConfig,
    Transcript,
    check_binding,
    check_equi_cauchy,
    check_equi_conv,
    format_move,
    parse_move,
    play_match,
    referee,
    replay,
    validate_move,
    verify_certificate,
)
from baire_games.exactnum import Ball, QuadPoint
from baire_games.setalgebra import RepSet, parse_repset
from baire_games.strategies import Strategy, make_strategy

F = Fraction
STEP = catalog.lookup("step@1/2")
DQ = catalog.lookup("dirichlet-quad")


def q(x):
    return QuadPoint(F(x))


def cfg(rounds=40, **kw):
    return MatchConfig(rounds=rounds, **kw)


class Scripted(Strategy):
    """Replays a fixed list of moves."""

    def __init__(self, side, moves, kinds, limit=None):
        self.side, self.moves, self.kinds, self.limit = side, list(moves), kinds, limit
        self.ident = f"scripted-{side.lower()}"

    def move(self, state):
        seq = state.xs if self.side == "I" else state.ys
        return self.moves[len(seq)]

    def declare_limit(self, state):
        return self.limit


# -- config and binding ---------------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        MatchConfig(rounds=0)
    with pytest.raises(ConfigError):
        MatchConfig(eps_dec=F(0))
    with pytest.raises(ConfigError):
        MatchConfig(rounds=4, window=8)


def test_binding_rules():
    check_binding("Gp", STEP)
    with pytest.raises(ConfigError):
        check_binding("GpF", STEP)
    with pytest.raises(ConfigError):
        check_binding("Gp", catalog.lookup("step-family"))
    with pytest.raises(ConfigError):
        check_binding("Nope", STEP)


# -- validation ----------------------------------------------------------------------------

def test_step_rule_example():
    v = validate_move("G", STEP, [q(0), q(0)], [q(0)], "I", q(F(3, 4)))
    assert v is not None and v.rule == "step" and "2^-1" in v.detail
    assert validate_move("G", STEP, [q(0)], [q(0)], "I", q(F(3, 4))) is None


def test_ball_must_contain_point():
    v = validate_move("Gpp", DQ, [q(F(1, 2))], [], "II", Ball(q(F(3, 4)), F(1, 8)))
    assert v is not None and v.rule == "contains"
    assert validate_move("Gpp", DQ, [q(F(1, 2))], [], "II", Ball(q(F(1, 2)), F(1, 8))) is None
    closed = Ball(q(F(1, 2)), F(1, 8), True)
    assert validate_move("Gpp", DQ, [q(F(1, 2))], [], "II", closed).rule == "open-ball"


def test_meager_set_rejected_in_cgpp():
    atoms = RepSet(atoms=(q(F(1, 2)),))
    v = validate_move("cGpp", DQ, [q(F(1, 2))], [], "II", atoms)
    assert v is not None and v.rule == "non-meager"
    v = validate_move("mGpp", DQ, [q(F(1, 2))], [], "II", atoms)
    assert v is not None and v.rule == "positive-measure"


def test_i_must_stay_in_previous_set():
    u = parse_repset("{1/2}∪((0,1/4)\\Q)")
    assert validate_move("cGpp", DQ, [q(F(1, 2))], [u], "I", q(F(1, 8))).rule == "inside-previous"
    assert validate_move("cGpp", DQ, [q(F(1, 2))], [u], "I", q(F(1, 2))) is None


def test_carrier_checked():
    assert validate_move("Gp", STEP, [], [], "I", q(2)).rule == "carrier"


@pytest.mark.parametrize("move,mtype", [
    (q(F(1, 3)), "point"),
    (Ball(QuadPoint(F(1, 2), F(1, 8)), F(1, 16)), "ball"),
    (parse_repset("{1/2}∪((0,1)\\Q)"), "set"),
])
def test_move_literals_round_trip(move, mtype):
    assert parse_move(mtype, format_move(move)) == move


# -- matches ------------------------------------------------------------------------------

def test_echo_vs_constant_five_rounds():
    t = play_match("Gp", STEP, make_strategy("const-i"), make_strategy("echo-ii"), cfg(5, window=4))
    assert t.round_count == 5
    assert t.moves_I == t.moves_II
    assert len(set(t.moves_I[1:])) == 1
    v = referee("Gp", t)
    assert v.outcome == II_WINS


def test_ball_vs_dense_ten_rounds():
    t = play_match("Gpp", DQ, make_strategy("dense-i"), make_strategy("ball-ii:step@1/2"), cfg(10, window=8))
    assert t.forfeit is None and t.round_count == 10
    vals = [DQ.evaluate(x) for x in t.moves_I]
    assert vals == [0, 1] * 5


def test_step_violation_forfeits():
    moves = [q(0), q(0), q(F(3, 4)), q(F(3, 4))]
    t = play_match("Gp", STEP, Scripted("I", moves, ("Gp",)), make_strategy("echo-ii"), cfg(4, window=4))
    assert t.forfeit is not None and t.forfeit.side == "I" and t.forfeit.n == 2
    assert t.round_count == 2
    v = referee("Gp", t)
    assert v.outcome == II_WINS and v.reason == "forfeit" and v.exit_code == 30
    assert '"type": "forfeit"' in t.dumps()


def test_inconsistent_limit_forfeits():
    moves = [q(0)] * 6
    t = play_match("Gp", STEP, Scripted("I", moves, ("Gp",), limit=q(1)), make_strategy("echo-ii"),
                   cfg(6, window=4))
    assert t.forfeit is not None and t.forfeit.rule == "declared-limit"
    assert referee("Gp", t).outcome == II_WINS


def test_strategy_for_wrong_game_is_refused():
    with pytest.raises(ConfigError):
        play_match("Gpp", DQ, make_strategy("dense-i"), make_strategy("echo-ii"), cfg())
    with pytest.raises(ConfigError):
        play_match("Gpp", DQ, make_strategy("center-ball-ii"), make_strategy("dense-i"), cfg())


# -- referee -----------------------------------------------------------------------------

def test_alternating_gpp_is_i_win():
    t = play_match("Gpp", DQ, make_strategy("dense-i"), make_strategy("center-ball-ii"), cfg())
    v = referee("Gpp", t)
    assert v.outcome == I_WINS and v.reason == "cauchy"
    c = v.certificate
    assert c["gap"] == "1" and c["j"] == c["i"] + 1
    assert verify_certificate(t, v)


def test_echo_of_stabilizing_sequence_residual_zero():
    moves = [q(F(1, 4)), q(F(1, 2))] + [q(F(1, 2))] * 10
    t = play_match("Gp", STEP, Scripted("I", moves, ("Gp",)), make_strategy("echo-ii"), cfg(12))
    v = referee("Gp", t)
    assert v.outcome == II_WINS and v.certificate["residual"] == "0"
    assert v.certificate["source"] == "stabilized"


def test_no_limit_is_undecided():
    # values constant, points still moving, nothing declared
    moves = [q(F(3, 4)) + F(1, 2**(k + 3)) for k in range(12)]
    t = play_match("Gp", STEP, Scripted("I", moves, ("Gp",)), make_strategy("echo-ii"), cfg(12))
    v = referee("Gp", t)
    assert v.outcome == UNDECIDED and v.exit_code == 20
    assert "no stabilized or declared limit" in v.certificate["diagnostic"]


def test_limit_gap_is_i_win():
    moves = [q(F(1, 2))] * 12
    ys = [q(F(1, 4))] * 12
    t = play_match("Gp", STEP, Scripted("I", moves, ("Gp",)), Scripted("II", ys, ("Gp",)), cfg(12))
    v = referee("Gp", t)
    assert v.outcome == I_WINS and v.reason == "limit-gap"
    assert verify_certificate(t, v)


def test_transcript_round_trip_and_replay():
    t = play_match("Gp", STEP, make_strategy("walk-i@7"), make_strategy("gauge-ii"), cfg(seed=3))
    again = Transcript.loads(t.dumps())
    assert again.dumps() == t.dumps()
    v, problems = replay(again)
    assert problems == []
    assert v == referee("Gp", t)
    assert verify_certificate(again, v)


def test_replay_flags_tampered_move():
    t = play_match("Gp", STEP, make_strategy("walk-i@7"), make_strategy("gauge-ii"), cfg(seed=3))
    lines = t.dumps().splitlines()
    for k, line in enumerate(lines):
        if '"n": 5, "side": "I"' in line:
            lines[k] = line.rsplit('"move": ', 1)[0] + '"move": "1"}'
    _, problems = replay(Transcript.loads("\n".join(lines)))
    assert problems


def test_tampered_certificate_fails_verification():
    t = play_match("Gpp", DQ, make_strategy("dense-i"), make_strategy("center-ball-ii"), cfg())
    v = referee("Gpp", t)
    c = dict(v.certificate)
    c["j"] = c["i"] + 2  # same value class, gap 0
    forged = type(v)(v.outcome, v.reason, c, v.rounds)
    assert not verify_certificate(t, forged)


def test_oracle_records_replay():
    target = catalog.lookup("nonmeasurable-oracle")
    t = play_match("cGpp", target, make_strategy("sigma-i"), make_strategy("comeager-ii"), cfg(12))
    assert t.oracle_records
    again = Transcript.loads(t.dumps())
    v, problems = replay(again)
    assert problems == []
    assert v == referee("cGpp", t)


def test_verdict_is_monotone_in_horizon_for_failures():
    # a Cauchy failure found at R still re-verifies on any longer run with the same seed
    t = play_match("Gpp", DQ, make_strategy("dense-i"), make_strategy("center-ball-ii"), cfg(20, window=8))
    v = referee("Gpp", t)
    longer = play_match("Gpp", DQ, make_strategy("dense-i"), make_strategy("center-ball-ii"), cfg(30, window=8))
    assert longer.moves_I[:20] == t.moves_I
    c = v.certificate
    assert abs(DQ.evaluate(longer.moves_I[c["i"]]) - DQ.evaluate(longer.moves_I[c["j"]])) >= F(1, 8)
    assert referee("Gpp", longer).outcome == I_WINS


# -- equi-convergence checkers ---------------------------------------------------------------

def test_constant_sequences_pass_both():
    fam = catalog.lookup("power-family")
    pts = [q(F(1, 3))] * 10
    assert check_equi_cauchy(fam, pts, F(1, 8))
    assert check_equi_conv(fam, pts, q(F(1, 3)), F(1, 8))


def test_alternating_step_family_fails_both():
    fam = catalog.lookup("step-family")
    a, b = q(F(1, 3)), q(F(1, 3)) + F(1, 1000)
    pts = [a if k % 2 else b for k in range(12)]
    assert fam.sup_gap(a, b) == 1
    assert not check_equi_cauchy(fam, pts, F(1, 2))
    assert not check_equi_conv(fam, pts, a, F(1, 2))


def test_random_instances_agree():
    fam = catalog.lookup("step-family")
    rng = random.Random(0)
    for _ in range(100):
        length = rng.randrange(6, 30)
        lim = q(F(rng.randrange(1, 32), 32))
        pre = rng.randrange(0, length // 2 + 1)
        pts = [q(F(rng.randrange(1, 32), 32)) for _ in range(pre)] + [lim] * (length - pre)
        assert check_equi_cauchy(fam, pts, F(1, 2)) == check_equi_conv(fam, pts, lim, F(1, 2))
