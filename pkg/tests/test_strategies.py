from fractions import Fraction

import pytest

from baire_games import catalog
from baire_games.arena import (
    I_WINS,
    II_WINS,
    ConfigError,
    Evaluator,
    MatchConfig,
    MatchState,
    play_match,
    referee,
    verify_certificate,
)
from baire_games.exactnum import Ball, QuadPoint, step_bound_ok
from baire_games.setalgebra import diameter, measure, member
from baire_games.strategies import (
    STRATEGY_IDS,
    BallII,
    ComeagerII,
    GaugeII,
    LusinII,
    baselines,
    make_strategy,
)

F = Fraction
SQRT2 = QuadPoint(0, 1)
STEP = catalog.lookup("step@1/2")
DQ = catalog.lookup("dirichlet-quad")


def q(x):
    return QuadPoint(F(x))


def state(kind, target, xs, ys=()):
    return MatchState(kind, target, MatchConfig(), Evaluator(target), list(xs), list(ys))


# -- gauge-ii ------------------------------------------------------------------------------

def test_gauge_ii_falls_back_at_first_rounds():
    g = GaugeII()
    st = state("Gp", STEP, [q(F(1, 3)), q(F(1, 4))])
    g.start(st)
    assert g.move(st) == q(F(1, 4)) and g.last_m is None


def test_gauge_ii_lipschitz_example():
    f = catalog.lookup("lipschitz@1")
    xs = [q(F(1, 2)), q(F(1, 4)), q(F(3, 8)), q(F(5, 16)), q(F(11, 32))]
    g = GaugeII()
    st = state("Gp", f, xs)
    g.start(st)
    assert g.move(st) == xs[4]
    assert g.last_m == 3


def test_gauge_ii_constant_history_step():
    g = GaugeII()
    for n in range(2, 12):
        st = state("Gp", STEP, [q(F(1, 2))] * (n + 1))
        g.start(st)
        assert g.move(st) == q(F(1, 2))
        assert g.last_m == n - 1


def test_gauge_ii_composes_in_g():
    g = GaugeII()
    st = state("G", STEP, [q(F(1, 2)), q(F(5, 8)), q(F(3, 4))])
    g.start(st)
    assert g.move(st) == 1


def test_gauge_ii_answer_stays_in_k_ball():
    t = play_match("Gp", STEP, make_strategy("adv-walk-i"), make_strategy("gauge-ii"), MatchConfig(seed=4))
    for n, (x, y) in enumerate(zip(t.moves_I, t.moves_II)):
        if n >= 1:
            assert Ball(x, F(2) ** (1 - n), closed=True).contains(y)


def test_gauge_ii_needs_baire1():
    with pytest.raises(ConfigError):
        play_match("Gp", DQ, make_strategy("walk-i"), make_strategy("gauge-ii"), MatchConfig())


# -- ball-ii -----------------------------------------------------------------------------------

def test_ball_ii_step_radius():
    b = BallII()
    st = state("Gpp", STEP, [q(F(1, 4)), q(F(1, 2)), q(F(5, 8)), q(F(3, 4))], [None] * 3)
    b.start(st)
    assert b.move(st) == Ball(q(F(3, 4)), F(1, 32))


def test_ball_ii_power_family_radius():
    fam = catalog.lookup("power-family")
    b = BallII()
    st = state("GppF", fam, [q(F(1, 4)), q(F(1, 2)), q(F(3, 4))], [None] * 2)
    b.start(st)
    assert b.move(st) == Ball(q(F(3, 4)), F(1, 16))


@pytest.mark.parametrize("i_id", ["dense-i", "walk-i"])
def test_ball_ii_diameters_shrink(i_id):
    t = play_match("Gpp", DQ if i_id == "dense-i" else STEP, make_strategy(i_id),
                   make_strategy("ball-ii:step@1/2"), MatchConfig(seed=2))
    for n, u in enumerate(t.moves_II):
        assert 2 * u.radius <= F(1, 2**n)


def test_ball_ii_cross_carrier_refused():
    with pytest.raises(ConfigError):
        play_match("Gpp", catalog.lookup("dirichlet-cantor"), make_strategy("dense-i"),
                   make_strategy("ball-ii:step@1/2"), MatchConfig())


def test_ball_ii_beats_walk_on_baire1():
    for seed in range(5):
        t = play_match("Gpp", STEP, make_strategy("walk-i"), make_strategy("ball-ii"), MatchConfig(seed=seed))
        assert referee("Gpp", t).outcome == II_WINS


# -- dense-i -------------------------------------------------------------------------------

def test_dense_i_alternates_in_gpp():
    t = play_match("Gpp", DQ, make_strategy("dense-i"), make_strategy("center-ball-ii"), MatchConfig())
    vals = [DQ.evaluate(x) for x in t.moves_I]
    assert all(abs(a - b) == 1 for a, b in zip(vals, vals[1:]))
    assert referee("Gpp", t).outcome == I_WINS


def test_dense_i_respects_step_rule_in_gp():
    t = play_match("Gp", DQ, make_strategy("dense-i"), make_strategy("echo-ii"), MatchConfig())
    assert t.forfeit is None
    assert all(step_bound_ok(a, b, n) for n, (a, b) in enumerate(zip(t.moves_I, t.moves_I[1:])))
    assert referee("Gp", t).outcome == I_WINS


def test_dense_i_refuses_baire1_target():
    with pytest.raises(ConfigError):
        play_match("Gpp", STEP, make_strategy("dense-i"), make_strategy("center-ball-ii"), MatchConfig())


# -- equi-oscillation strategies --------------------------------------------------------------

def test_equi_const_jumps_across_a_rational_after_echo():
    fam = catalog.lookup("step-family")
    t = play_match("GpF", fam, make_strategy("equi-const-i"), make_strategy("echo-ii"), MatchConfig(rounds=10))
    for n in range(1, len(t.moves_I)):
        assert t.moves_I[n] != t.moves_I[n - 1]
        assert fam.sup_gap(t.moves_I[n], t.moves_I[n - 1]) == 1
    assert referee("GpF", t).outcome == I_WINS


def test_equi_const_holds_against_far_answers():
    fam = catalog.lookup("step-family")
    t = play_match("GpF", fam, make_strategy("equi-const-i"), make_strategy("constant-ii"), MatchConfig(rounds=10))
    assert len(set(t.moves_I[1:])) == 1


def test_equi_open_beats_ball_on_step_family():
    fam = catalog.lookup("step-family")
    t = play_match("GppF", fam, make_strategy("equi-open-i"), make_strategy("center-ball-ii"), MatchConfig())
    v = referee("GppF", t)
    assert v.outcome == I_WINS
    assert verify_certificate(t, v)


def test_equi_open_loses_to_common_gauge():
    fam = catalog.lookup("power-family")
    for seed in range(3):
        t = play_match("GppF", fam, make_strategy("walk-i"), make_strategy("ball-ii"), MatchConfig(seed=seed))
        assert referee("GppF", t).outcome == II_WINS


def test_equi_const_needs_an_oscillating_family():
    with pytest.raises(ConfigError):
        play_match("GpF", catalog.lookup("power-family"), make_strategy("equi-const-i"),
                   make_strategy("echo-ii"), MatchConfig())


# -- comeager and Lusin -------------------------------------------------------------------

def test_comeager_first_set():
    c = ComeagerII()
    st = state("cGpp", DQ, [q(F(1, 3))])
    c.start(st)
    u0 = c.move(st)
    assert member(u0, q(F(1, 3)))
    assert not member(u0, q(F(1, 2)))
    assert member(u0, SQRT2 / 3)
    assert u0.intervals[0].lo == 0 and u0.intervals[0].hi == 1


def test_comeager_sets_contain_i_moves():
    t = play_match("cGpp", DQ, make_strategy("sigma-i"), make_strategy("comeager-ii"), MatchConfig(seed=1))
    assert all(member(u, x) for x, u in zip(t.moves_I, t.moves_II))
    assert referee("cGpp", t).outcome == II_WINS


def test_comeager_anchor_must_be_in_g():
    c = ComeagerII(a=F(1, 2))
    with pytest.raises(ConfigError):
        c.start(state("cGpp", DQ, [q(F(1, 3))]))


def test_lusin_ten_rounds():
    lusin = LusinII()
    t = play_match("mGpp", DQ, make_strategy("walk-i"), lusin, MatchConfig(rounds=10, window=4))
    assert len(lusin.closed) == 10
    for n, f in enumerate(lusin.closed):
        assert measure(f) > 0 and diameter(f) < F(1, n + 2)
    for a, b in zip(lusin.closed, lusin.closed[1:]):
        assert a.intervals[0].lo <= b.intervals[0].lo and b.intervals[0].hi <= a.intervals[0].hi
    a = lusin.declare_limit(None)  # the point of the nested intersection
    assert not a.is_rational and all(f.intervals[0].contains(a) for f in lusin.closed)
    assert all(u.intervals and measure(u) > 0 for u in t.moves_II)


def test_lusin_atom_replay_is_ii_win():
    t = play_match("mGpp", DQ, make_strategy("const-i"), make_strategy("lusin-ii"), MatchConfig(seed=2))
    assert len(set(t.moves_I)) == 1
    assert referee("mGpp", t).outcome == II_WINS


def test_sigma_i_beats_comeager_on_oracle():
    target = catalog.lookup("nonmeasurable-oracle")
    t = play_match("cGpp", target, make_strategy("sigma-i"), make_strategy("comeager-ii"), MatchConfig())
    v = referee("cGpp", t)
    assert v.outcome == I_WINS
    assert len({x for x in t.moves_I}) == len(t.moves_I)


def test_sigma_i_meets_atoms_only_forfeit():
    from baire_games.setalgebra import RepSet
    from baire_games.strategies import Strategy

    class AtomsII(Strategy):
        side, kinds, ident = "II", ("cGpp",), "atoms-ii"

        def move(self, state):
            return RepSet(atoms=(state.xs[-1],))

    t = play_match("cGpp", DQ, make_strategy("sigma-i"), AtomsII(), MatchConfig())
    assert t.forfeit is not None and t.forfeit.side == "II"
    assert referee("cGpp", t).outcome == I_WINS


# -- baselines and registry ------------------------------------------------------------

def test_walk_is_reproducible():
    runs = [play_match("Gp", STEP, make_strategy("walk-i@7"), make_strategy("gauge-ii"), MatchConfig(seed=5))
            for _ in range(2)]
    assert runs[0].dumps() == runs[1].dumps()
    other = play_match("Gp", STEP, make_strategy("walk-i@8"), make_strategy("gauge-ii"), MatchConfig(seed=5))
    assert other.dumps() != runs[0].dumps()


@pytest.mark.parametrize("ident", ["step@1/2", "power@5", "dirichlet-quad", "lipschitz@1"])
def test_echo_beats_eventually_constant(ident):
    t = play_match("Gp", catalog.lookup(ident), make_strategy("const-i"), make_strategy("echo-ii"),
                   MatchConfig(seed=1))
    assert referee("Gp", t).outcome == II_WINS


def test_registry():
    for ident in STRATEGY_IDS:
        assert make_strategy(ident).ident == ident
    assert make_strategy("ball-ii:step@1/2").ident == "ball-ii:step@1/2"
    b = baselines()
    assert set(b) == {"I", "II"}
    for bad in ["nope", "echo-ii:step@1/2", "walk-i@x", "gauge-ii:nope"]:
        with pytest.raises(ConfigError):
            make_strategy(bad)
