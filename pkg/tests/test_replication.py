"""Replication cost, portfolio value, generalized inverse, growth analysis."""

import math
import random

import pytest
from scipy.integrate import quad

from cfmmrep import (
    BlackScholesBinary,
    CappedCall,
    CappedPower,
    CashOrNothing,
    ConstantProportion,
    DomainError,
    GrowthClass,
    InfiniteReplicationCostError,
    Logarithmic,
    PriceInterval,
    QuadratureOptions,
    ReplicationProfile,
    g_inverse,
    growth_classification,
    make_catalog_payoff,
    make_piecewise_payoff,
    portfolio_at,
    portfolio_value,
    portfolio_value_integral,
    replication_cost,
)
from cfmmrep.normal import norm_cdf

E = math.e

TIGHT = QuadratureOptions(rel_tol=1e-10, abs_tol=1e-300)


def profile_suite():
    return [
        (ReplicationProfile(make_catalog_payoff(CashOrNothing(2.0))), 0.1, 50.0),
        (ReplicationProfile(make_catalog_payoff(CappedCall(1.0, E))), 0.05, E),
        (ReplicationProfile(make_catalog_payoff(BlackScholesBinary(1.0, 0.2, 1.0))), 0.05, 20.0),
        (ReplicationProfile(make_catalog_payoff(Logarithmic(1.0))), 0.05, 100.0),
        (ReplicationProfile(make_catalog_payoff(CappedPower(1.0, 4.0, 2.0))), 0.1, 4.0),
        (ReplicationProfile(make_catalog_payoff(ConstantProportion(0.5, 1.0))), 0.02, 100.0),
    ]


class TestReplicationCost:
    def test_capped_call(self):
        prof = ReplicationProfile(make_catalog_payoff(CappedCall(1.0, E)))
        assert replication_cost(prof, 1.0) == pytest.approx(1.0, rel=1e-12)
        assert replication_cost(prof, E) == 0.0
        assert replication_cost(prof, 1.5) == pytest.approx(1.0 - math.log(1.5), rel=1e-12)

    def test_cash_or_nothing(self):
        prof = ReplicationProfile(make_catalog_payoff(CashOrNothing(2.0)))
        assert replication_cost(prof, 1.0) == pytest.approx(0.5)
        # Jump at the evaluation point still counts: the rebalance is ahead.
        assert replication_cost(prof, 2.0) == pytest.approx(0.5)
        assert replication_cost(prof, 2.5) == 0.0

    def test_black_scholes(self):
        prof = ReplicationProfile(make_catalog_payoff(BlackScholesBinary(1.0, 0.2, 1.0)))
        # g(1) = 1 - Phi(0.1), with Phi checked against the integration oracle.
        phi_01, _ = quad(lambda x: math.exp(-x * x / 2) / math.sqrt(2 * math.pi),
                         -30.0, 0.1)
        expected = 1.0 - phi_01
        assert expected == pytest.approx(0.460172, abs=5e-7)
        assert replication_cost(prof, 1.0) == pytest.approx(expected, rel=1e-9)

    def test_quadrature_matches_closed_forms(self):
        rng = random.Random(2)
        for prof, lo, hi in profile_suite():
            for _ in range(25):
                p = math.exp(rng.uniform(math.log(lo), math.log(hi)))
                c = prof.g(p)
                q = prof.g(p, opts=TIGHT, method="quadrature")
                assert q == pytest.approx(c, rel=1e-8, abs=1e-12), (
                    f"{prof.payoff.catalog} at p={p}")

    def test_scipy_cross_check_smooth_families(self):
        # Independent integrator on the raw integrand for the smooth families.
        cases = [
            (make_catalog_payoff(ConstantProportion(0.5, 1.0)), (0.5, 2.0, 10.0)),
            (make_catalog_payoff(BlackScholesBinary(1.0, 0.2, 1.0)), (0.5, 1.0, 1.8)),
            (make_catalog_payoff(Logarithmic(1.0)), (0.5, 3.0, 40.0)),
        ]
        for spec, prices in cases:
            prof = ReplicationProfile(spec)
            for p in prices:
                oracle, err = quad(lambda q: spec.slope(q) / q, p, math.inf)
                assert err < 1e-7
                assert prof.g(p) == pytest.approx(oracle, rel=1e-7), (
                    f"{spec.catalog} at p={p}")

    def test_outside_interval(self):
        prof = ReplicationProfile(make_catalog_payoff(CappedCall(1.0, E)))
        with pytest.raises(DomainError):
            replication_cost(prof, E + 0.5)

    def test_divergent_construction_rejected(self):
        spec = make_catalog_payoff(CappedPower(1.0, math.inf, 1.0),
                                   allow_infinite_cost=True)
        with pytest.raises(InfiniteReplicationCostError):
            ReplicationProfile(spec)

    def test_nonincreasing_and_nonnegative(self):
        rng = random.Random(9)
        for prof, lo, hi in profile_suite():
            grid = sorted(math.exp(rng.uniform(math.log(lo), math.log(hi)))
                          for _ in range(100))
            values = [prof.g(p) for p in grid]
            assert all(v >= 0.0 for v in values)
            for a, b in zip(values, values[1:]):
                assert b <= a + 1e-12


class TestPortfolio:
    def test_capped_call_portfolio(self):
        prof = ReplicationProfile(make_catalog_payoff(CappedCall(1.0, E)))
        numeraire, risky = portfolio_at(prof, 1.5)
        assert numeraire == pytest.approx(0.5)
        assert risky == pytest.approx(1.0 - math.log(1.5))
        assert portfolio_at(prof, E) == (pytest.approx(E - 1.0), pytest.approx(0.0))

    def test_constant_proportion_portfolio(self):
        prof = ReplicationProfile(make_catalog_payoff(ConstantProportion(0.5, 1.0)))
        assert portfolio_at(prof, 4.0) == (pytest.approx(2.0), pytest.approx(0.5))
        assert portfolio_value(prof, 4.0) == pytest.approx(4.0)

    def test_value_where_risky_vanishes(self):
        prof = ReplicationProfile(make_catalog_payoff(CappedCall(1.0, E)))
        assert portfolio_value(prof, E) == pytest.approx(E - 1.0)

    def test_integral_identity_examples(self):
        prof = ReplicationProfile(make_catalog_payoff(CappedCall(1.0, E)))
        assert portfolio_value_integral(prof, 1.0) == pytest.approx(1.0, rel=1e-10)
        assert portfolio_value_integral(prof, E) == pytest.approx(E - 1.0, rel=1e-10)
        cp = ReplicationProfile(make_catalog_payoff(ConstantProportion(0.5, 1.0)))
        assert portfolio_value_integral(cp, 4.0) == pytest.approx(4.0, rel=1e-10)

    def test_integral_identity_random(self):
        rng = random.Random(4)
        for prof, lo, hi in profile_suite():
            for _ in range(15):
                p = math.exp(rng.uniform(math.log(lo), math.log(hi)))
                direct = portfolio_value(prof, p)
                integral = portfolio_value_integral(prof, p)
                assert abs(integral - direct) <= 1e-8 * max(1.0, abs(direct)), (
                    f"{prof.payoff.catalog} at p={p}")

    def test_concavity_and_monotonicity(self):
        rng = random.Random(6)
        for prof, lo, hi in profile_suite():
            for _ in range(100):
                p = math.exp(rng.uniform(math.log(lo), math.log(hi)))
                q = math.exp(rng.uniform(math.log(lo), math.log(hi)))
                p, q = min(p, q), max(p, q)
                vp, vq = portfolio_value(prof, p), portfolio_value(prof, q)
                vm = portfolio_value(prof, 0.5 * (p + q))
                assert vp <= vq + 1e-10
                assert vm >= 0.5 * (vp + vq) - 1e-10


class TestGInverse:
    def test_capped_call_examples(self):
        prof = ReplicationProfile(make_catalog_payoff(CappedCall(1.0, E)))
        assert g_inverse(prof, 1.0) == pytest.approx(1.0)
        assert g_inverse(prof, 0.0) == pytest.approx(E)

    def test_cash_or_nothing_examples(self):
        prof = ReplicationProfile(make_catalog_payoff(CashOrNothing(2.0)))
        assert g_inverse(prof, 0.1) == pytest.approx(2.0)
        assert g_inverse(prof, 0.0) == math.inf
        # Above the valid range the set is empty and alpha comes back.
        assert g_inverse(prof, 0.6) == 0.0

    def test_round_trip_on_continuous_families(self):
        rng = random.Random(8)
        for prof, lo, hi in profile_suite():
            if isinstance(prof.payoff.catalog, CashOrNothing):
                continue
            for _ in range(25):
                p = math.exp(rng.uniform(math.log(lo), math.log(hi)))
                r2 = prof.g(p)
                if r2 <= 0.0:
                    continue
                assert prof.g(g_inverse(prof, r2)) == pytest.approx(r2, rel=1e-9)

    def test_numeric_matches_closed(self):
        closed = ReplicationProfile(make_catalog_payoff(BlackScholesBinary(1.0, 0.2, 1.0)))
        numeric = ReplicationProfile(make_catalog_payoff(BlackScholesBinary(1.0, 0.2, 1.0)),
                                     opts=TIGHT, use_closed_forms=False)
        for p in (0.8, 1.3, 3.0):
            r2 = closed.g(p)
            assert numeric.g_inverse_value(r2) == pytest.approx(
                closed.g_inverse_value(r2), rel=1e-8)
        # Where g is nearly flat, price noise amplifies; the value-level
        # round trip is the meaningful contract there.
        r2 = closed.g(0.3)
        assert closed.g(numeric.g_inverse_value(r2)) == pytest.approx(r2, rel=1e-9)

    def test_flat_region_returns_rightmost(self):
        # g is flat at 1/p0 left of p0 for the logarithmic payoff.
        prof = ReplicationProfile(make_catalog_payoff(Logarithmic(1.0)))
        assert g_inverse(prof, 1.0) == pytest.approx(1.0)
        numeric = ReplicationProfile(make_catalog_payoff(Logarithmic(1.0)),
                                     use_closed_forms=False)
        assert numeric.g_inverse_value(1.0) == pytest.approx(1.0, rel=1e-9)

    def test_monotone_in_reserve(self):
        prof = ReplicationProfile(make_catalog_payoff(CappedCall(1.0, E)))
        reserves = [0.0, 0.1, 0.4, 0.7, 1.0]
        prices = [g_inverse(prof, r) for r in reserves]
        for a, b in zip(prices, prices[1:]):
            assert b <= a + 1e-12

    def test_sup_bound_property(self):
        rng = random.Random(13)
        for prof, lo, hi in profile_suite():
            g_alpha = prof.g_alpha
            top = min(g_alpha, prof.g(lo)) if math.isinf(g_alpha) else g_alpha
            for _ in range(20):
                r2 = rng.uniform(0.0, top)
                p_star = g_inverse(prof, r2)
                if math.isinf(p_star):
                    continue
                assert prof.g(p_star) >= r2 - 1e-9


class TestGrowthClassification:
    def test_bounded_interval_finite(self):
        spec = make_catalog_payoff(CappedCall(1.0, E))
        assert growth_classification(spec).classification is GrowthClass.FINITE

    def test_logarithmic_finite(self):
        spec = make_catalog_payoff(Logarithmic(1.0))
        out = growth_classification(spec)
        assert out.classification is GrowthClass.FINITE
        assert out.asymptotic_exponent == 0.0

    def test_constant_proportion_finite(self):
        spec = make_catalog_payoff(ConstantProportion(0.5, 1.0))
        out = growth_classification(spec)
        assert out.classification is GrowthClass.FINITE
        assert out.asymptotic_exponent == 0.5

    def test_linear_tail_infinite(self):
        spec = make_catalog_payoff(CappedPower(1.0, math.inf, 1.0),
                                   allow_infinite_cost=True)
        out = growth_classification(spec)
        assert out.classification is GrowthClass.INFINITE
        assert out.asymptotic_exponent == 1.0
        # Probes grow by log(10) per decade of cutoff.
        increments = [b[1] - a[1] for a, b in zip(out.evidence, out.evidence[1:])]
        for d in increments:
            assert d == pytest.approx(math.log(10.0), rel=0.05)

    def test_piecewise_probes_converge(self):
        spec = make_piecewise_payoff([(1.0, 0.0), (2.0, 1.0)],
                                     interval=PriceInterval(1.0, math.inf))
        out = growth_classification(spec)
        assert out.classification is GrowthClass.FINITE
        cutoffs = [c for c, _ in out.evidence]
        assert cutoffs == sorted(cutoffs)

    def test_evidence_cutoffs_increasing(self):
        spec = make_catalog_payoff(Logarithmic(1.0))
        cutoffs = [c for c, _ in growth_classification(spec).evidence]
        assert all(a < b for a, b in zip(cutoffs, cutoffs[1:]))

    def test_unclassifiable_tail_is_unknown(self):
        # A hand-built (non-catalog) payoff with a slow power tail: probes
        # neither settle below tolerance nor keep growing, so the honest
        # answer is Unknown.
        from cfmmrep.payoffs import PayoffSpec, PowerForm, Segment
        spec = PayoffSpec(
            segments=(Segment(0.0, 1.0, PowerForm(1.0, 0.5, 0.0)),
                      Segment(1.0, math.inf, PowerForm(1.0, 0.5, 0.0))),
            jumps=(),
            interval=PriceInterval(0.0, math.inf))
        out = growth_classification(spec)
        assert out.classification is GrowthClass.UNKNOWN
        assert len(out.evidence) == 4


class TestDegenerateCatalogConfigs:
    def test_capped_power_from_zero_superlinear(self):
        # g(p) = 2*(4 - p) on [0, 4]: finite at 0, linear inverse.
        prof = ReplicationProfile(make_catalog_payoff(CappedPower(0.0, 4.0, 2.0)))
        assert prof.g(0.0) == pytest.approx(8.0)
        assert prof.g(0.0, method="quadrature") == pytest.approx(8.0, rel=1e-9)
        assert g_inverse(prof, 8.0) == pytest.approx(0.0, abs=1e-12)
        for x in (2.0, 4.0, 6.0):
            assert g_inverse(prof, x) == pytest.approx(4.0 - x / 2.0)

    def test_capped_power_from_zero_sublinear(self):
        prof = ReplicationProfile(make_catalog_payoff(CappedPower(0.0, 4.0, 0.5)))
        assert prof.g(0.0) == math.inf
        expected = (0.5 / (0.5 - 1.0)) * (4.0**-0.5 - 1.0)
        assert prof.g(1.0) == pytest.approx(expected)
        assert g_inverse(prof, prof.g(1.0)) == pytest.approx(1.0, rel=1e-9)

    def test_zero_vol_binary_is_a_step(self):
        prof = ReplicationProfile(
            make_catalog_payoff(BlackScholesBinary(2.0, 0.0, 1.0)))
        assert prof.payoff.value(2.0) == 0.0
        assert prof.payoff.value(2.0 + 1e-12) == 1.0
        assert prof.g(1.0) == pytest.approx(0.5)
        assert prof.g(1.0, method="quadrature") == pytest.approx(0.5)
        assert g_inverse(prof, 0.1) == pytest.approx(2.0)

    def test_zero_strike_binary_is_constant(self):
        prof = ReplicationProfile(
            make_catalog_payoff(BlackScholesBinary(0.0, 0.2, 1.0)))
        assert prof.payoff.value(5.0) == 1.0
        assert prof.g(5.0) == 0.0

    def test_flat_families(self):
        flat = ReplicationProfile(make_catalog_payoff(CappedCall(2.0, 2.0)))
        assert flat.payoff.value(1.0) == 0.0 and flat.g(1.0) == 0.0
        empty = ReplicationProfile(
            make_catalog_payoff(ConstantProportion(0.5, 0.0)))
        assert empty.g(1.0) == 0.0 and empty.v_alpha == 0.0


class TestConcurrentEvaluation:
    def test_shared_profile_across_threads(self):
        """Profiles are immutable after construction: concurrent evaluation
        must match the serial results exactly."""
        from concurrent.futures import ThreadPoolExecutor

        prof = ReplicationProfile(
            make_catalog_payoff(BlackScholesBinary(1.0, 0.2, 1.0)),
            use_closed_forms=False)
        prices = [0.3 + 0.11 * i for i in range(40)]
        serial = [(prof.g(p), prof.portfolio_value(p)) for p in prices]

        def evaluate(p):
            return prof.g(p), prof.portfolio_value(p)

        with ThreadPoolExecutor(max_workers=8) as pool:
            threaded = list(pool.map(evaluate, prices))
        assert threaded == serial


class TestIntervalHandling:
    def test_narrowed_beta_changes_g(self):
        # Cutting the interval below the cap invalidates the family formula;
        # the profile must fall back to quadrature transparently.
        spec = make_catalog_payoff(CappedCall(1.0, 4.0), PriceInterval(0.0, 2.0))
        prof = ReplicationProfile(spec)
        assert prof.g_closed_form is None
        assert prof.g(1.5) == pytest.approx(math.log(2.0 / 1.5), rel=1e-9)

    def test_widened_beta_keeps_closed_forms(self):
        spec = make_catalog_payoff(CappedCall(1.0, 2.0), PriceInterval(0.0, math.inf))
        prof = ReplicationProfile(spec)
        assert prof.g_closed_form is not None
        assert prof.g(3.0) == 0.0

    def test_alpha_override(self):
        spec = make_catalog_payoff(CappedCall(1.0, E), PriceInterval(1.0, E))
        prof = ReplicationProfile(spec)
        assert prof.g_alpha == pytest.approx(1.0)
        assert prof.v_alpha == pytest.approx(1.0)
