import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from baire_games import catalog
from baire_games.catalog import (
    ClassificationError,
    Counterexample,
    GaugeFamily,
    NoViolation,
    check_gauge,
    constant_gauge,
    gauge,
    lookup,
    n_eps,
    normalize_gauges,
    shrink_gauges,
)
from baire_games.exactnum import Ball, CantorPoint, DomainError, QuadPoint, parse_point

F = Fraction
SQRT2 = QuadPoint(0, 1)
STEP = lookup("step@1/2")


def q(x):
    return QuadPoint(F(x))


# -- brute-force oracle, independent of the pair sampler ----------------------------------------

def grid_violation(f, g, eps, denom=64):
    """First grid pair within both gauge radii with value gap >= eps."""
    pts = [q(F(k, denom)) for k in range(denom + 1)]
    for x0, x1 in itertools.combinations(pts, 2):
        d = abs(x0 - x1)
        if d < g(eps, x0) and d < g(eps, x1):
            if abs(f.evaluate(x0) - f.evaluate(x1)) >= eps:
                return x0, x1
    return None


# -- evaluation ------------------------------------------------------------------------------

def test_eval_examples():
    dq = lookup("dirichlet-quad")
    assert dq.evaluate(q(F(1, 2))) == 1
    assert dq.evaluate(SQRT2 / 2) == 0
    assert STEP.evaluate(q(F(1, 4))) == 0
    assert STEP.evaluate(q(F(1, 2))) == 1


def test_eval_outside_carrier():
    with pytest.raises(DomainError):
        STEP.evaluate(q(2))


def test_dirichlet_cantor_and_bits():
    dc = lookup("dirichlet-cantor")
    assert dc.evaluate(CantorPoint("01", "0")) == 1
    assert dc.evaluate(CantorPoint("", "01")) == 0
    assert lookup("cantor-bit@2").evaluate(CantorPoint("001", "0")) == 1


def test_piecewise_sample_values():
    f = catalog.PIECEWISE_SAMPLE
    assert f.evaluate(q(0)) == 0
    assert f.evaluate(q(F(1, 3))) == 1     # right-continuous
    assert f.evaluate(q(F(1, 6))) == F(1, 6)
    assert f.jumps() == (F(1, 3), F(2, 3))


# -- gauges --------------------------------------------------------------------------------

def test_gauge_examples():
    assert gauge(STEP, F(1, 4), q(F(3, 4))) == F(1, 4)
    assert gauge(STEP, F(1, 7), q(F(1, 2))) == 1
    assert gauge(lookup("power-family"), F(1, 2), q(F(3, 4))) == F(1, 8)
    assert gauge(lookup("lipschitz@2"), F(1, 4), SQRT2 / 3) == F(1, 8)


def test_gauge_for_non_baire1_is_refused():
    with pytest.raises(ClassificationError):
        gauge(lookup("dirichlet-quad"), F(1, 2), q(F(1, 2)))
    with pytest.raises(ClassificationError):
        gauge(lookup("step-family"), F(1, 2), q(F(1, 2)))


def test_n_eps():
    assert n_eps(2) == 1 and n_eps(1) == 1
    assert n_eps(F(2, 5)) == 3
    assert n_eps(F(1, 3)) == 3
    with pytest.raises(DomainError):
        n_eps(0)


def _table_gauge(table):
    return GaugeFamily(lambda eps, x: table[eps], "line", "table")


def test_normalize_examples():
    table = {F(1): F(1, 5), F(1, 2): F(1, 2), F(1, 3): F(1, 4)}
    g = normalize_gauges(_table_gauge(table))
    assert g(2, q(0)) == F(1, 5)
    assert g(F(2, 5), q(0)) == min(table.values())
    assert g.monotone


def test_normalize_keeps_monotone_families():
    base = catalog.function_gauge(lookup("lipschitz@1"))
    g = normalize_gauges(base)
    for n in range(1, 20):
        assert g(F(1, n), q(F(1, 3))) == base(F(1, n), q(F(1, 3)))


def test_normalize_rejects_nonpositive_eps():
    with pytest.raises(DomainError):
        normalize_gauges(constant_gauge(1))(0, q(0))


def test_shrink_examples():
    assert shrink_gauges(constant_gauge(1))(F(1, 3), q(0)) == F(1, 16)
    assert shrink_gauges(constant_gauge(F(1, 100)))(F(1, 2), q(0)) == F(1, 100)
    with pytest.raises(ClassificationError):
        shrink_gauges(_table_gauge({}))


@given(st.fractions(F(1, 50), 3, max_denominator=50), st.fractions(F(1, 50), 3, max_denominator=50),
       st.sampled_from(["step@1/2", "piecewise-sample", "power@5", "lipschitz@2", "power-family"]),
       st.fractions(0, 1, max_denominator=40))
def test_normalized_gauges_are_monotone(e1, e2, ident, x):
    g = normalize_gauges(catalog.gauge_family(lookup(ident)))
    lo, hi = min(e1, e2), max(e1, e2)
    assert g(lo, q(x)) <= g(hi, q(x))


# -- check_gauge -------------------------------------------------------------------------------

def test_bogus_constant_gauge_is_refuted():
    bogus = constant_gauge(F(1, 4))
    res = check_gauge(STEP, bogus, F(1, 2))
    assert isinstance(res, Counterexample)
    assert res.reverify(STEP, bogus, F(1, 2))
    assert abs(res.x0 - res.x1) < F(1, 4)
    assert grid_violation(STEP, bogus, F(1, 2)) == (q(F(17, 64)), q(F(32, 64)))


def test_step_gauge_passes_on_budget():
    g = catalog.gauge_family(STEP)
    res = check_gauge(STEP, g, F(1, 2), budget=10_000)
    assert res == NoViolation(10_000)
    assert grid_violation(STEP, g, F(1, 2)) is None


@pytest.mark.parametrize("eps", [F(1), F(1, 2), F(1, 8)])
def test_lipschitz_with_eps_gauge(eps):
    f = lookup("lipschitz@1")
    g = catalog.scaled_eps_gauge()
    assert isinstance(check_gauge(f, g, eps, budget=2000), NoViolation)
    assert grid_violation(f, g, eps) is None


@pytest.mark.parametrize("ident", ["step@1/2", "piecewise-sample", "power@5", "lipschitz@2"])
@pytest.mark.parametrize("eps", [F(1, 2), F(1, 8)])
def test_sampler_and_grid_oracle_agree_on_analytic_gauges(ident, eps):
    f = lookup(ident)
    g = catalog.gauge_family(f)
    assert grid_violation(f, g, eps) is None
    assert isinstance(check_gauge(f, g, eps, budget=2000), NoViolation)


@pytest.mark.parametrize("ident", ["piecewise-sample", "power@5", "lipschitz@2"])
def test_grid_oracle_and_sampler_both_refute_a_wide_gauge(ident):
    f = lookup(ident)
    g = constant_gauge(F(1, 2))
    assert grid_violation(f, g, F(1, 8)) is not None
    assert isinstance(check_gauge(f, g, F(1, 8), budget=10_000), Counterexample)


def test_power_family_negative_control():
    fam = lookup("power-family")
    res = check_gauge(fam, catalog.scaled_eps_gauge(), F(1, 4))
    assert isinstance(res, Counterexample)
    assert res.gap >= F(1, 4)


def test_check_gauge_budget():
    with pytest.raises(DomainError):
        check_gauge(STEP, catalog.gauge_family(STEP), F(1, 2), budget=0)


def test_check_monotone_finds_decrease():
    bad = _table_gauge({F(1, 2): F(1, 2), F(1): F(1, 4)})
    assert catalog.check_monotone(bad, [q(0)], [F(1, 2), F(1)]) == (q(0), F(1, 2), F(1))


# -- power-family gap oracle ---------------------------------------------------------------

@given(st.fractions(0, 1, max_denominator=30), st.fractions(0, 1, max_denominator=30))
def test_power_family_sup_gap_matches_brute_force(a, b):
    fam = lookup("power-family")
    lo, hi = min(a, b), max(a, b)
    brute = max((hi**n - lo**n for n in range(1, 400)), default=0)
    got = fam.sup_gap(q(lo), q(hi))
    assert got >= brute
    # beyond n = 400 the gap can only grow by a tiny amount for these denominators
    assert got - brute < F(1, 100) or hi == 1


# -- oscillation ---------------------------------------------------------------------------

def test_osc_set_examples():
    assert catalog.osc_set(lookup("step-family"), Ball(q(F(1, 2)), F(1, 8))) == 1
    assert catalog.osc_set(lookup("lipschitz@1"), (q(F(1, 4)), q(F(1, 2)), False, False)) == F(1, 4)
    assert catalog.osc_set(STEP, (q(0), q(F(1, 4)), False, False)) == 0


def test_osc_point_examples():
    assert catalog.osc_point(lookup("step-family"), q(F(1, 2))) == 1
    assert catalog.osc_point(STEP, q(F(1, 4))) == 0
    assert catalog.osc_point(STEP, q(F(1, 2))) == 1


def test_estimator_certifies_zero_for_continuous():
    est = catalog.estimate_osc_point(lookup("lipschitz@1"), q(F(1, 3)), depth=10)
    assert est.certified_zero
    assert est.scale_gap <= 2 * F(1, 2**10)  # grid spans x +- h


def test_estimator_sees_the_step():
    est = catalog.estimate_osc_point(STEP, q(F(1, 2)), depth=10)
    assert est.scale_gap == 1


# -- witnesses --------------------------------------------------------------------------------

def test_dense_pair_examples():
    w = catalog.dense_pair_witness(lookup("dirichlet-quad"))
    region = (q(F(3, 8)), q(F(5, 8)), False, False)
    a, b = w.pick_a(region), w.pick_b(region)
    assert a == F(1, 2)
    assert b == QuadPoint(F(3, 8), F(1, 8))
    assert w.eps == F(1, 4) and w.y0 == 1


def test_dense_pair_cantor_pick():
    w = catalog.dense_pair_witness(lookup("dirichlet-cantor"))
    b = w.pick_b("01")
    assert b == CantorPoint("", "01")
    assert lookup("dirichlet-cantor").evaluate(b) == 0
    assert lookup("dirichlet-cantor").evaluate(w.pick_a("01")) == 1


def test_dense_pair_refuses_baire1():
    with pytest.raises(ClassificationError):
        catalog.dense_pair_witness(STEP)


def test_step_family_osc_witness():
    import random

    w = lookup("step-family").osc_witness()
    region = Ball(q(F(1, 3)), F(1, 64))
    member, a, gap = w.pick(region, q(F(1, 3)), random.Random(1))
    assert region.contains(a)
    assert gap == 1
    assert abs(member.evaluate(a) - member.evaluate(q(F(1, 3)))) == 1


# -- registry ----------------------------------------------------------------------------------

@pytest.mark.parametrize("ident", catalog.DEFAULT_IDS)
def test_lookup_round_trip(ident):
    assert lookup(ident).ident == ident


@pytest.mark.parametrize("bad", ["nope", "step@", "step@2", "power@x", "finite:nope"])
def test_lookup_rejects(bad):
    with pytest.raises((KeyError, DomainError)):
        lookup(bad)


def test_gauge_entries_are_the_baire1_ones():
    ids = {e.ident for e in catalog.gauge_entries()}
    assert "dirichlet-quad" not in ids and "step-family" not in ids
    assert {"step@1/2", "power-family", "cantor-binary"} <= ids


def test_parse_point_feeds_catalog():
    assert STEP.evaluate(parse_point("1/2-1/8*sqrt2")) == 0
