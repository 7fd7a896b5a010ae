"""Scaling schedules, limit laws, and convergence machinery."""

import math
from fractions import Fraction

import numpy as np
import pytest

from eoe.asymptotics import (
    EXP1,
    HYPOEXP_1_2,
    RING_EOE,
    RateSpec,
    builtin_schedules,
    convergence_check,
    divergence_probe,
    limit_law_transform,
    make_schedule,
    theorem3_coefficient,
)
from eoe.errors import ScheduleRegimeError
from eoe.graphs import meeting_chain
from eoe.oracle import mean_N
from eoe.transforms import moments_from_transform


class TestRateSpec:
    def test_values(self):
        assert RateSpec("const", 3.0).value(50) == 3.0
        assert RateSpec("power", 2.0, 1.5).value(4) == pytest.approx(16.0)
        assert RateSpec("logpower", 1.0, 2.0).value(math.e ** 2) == pytest.approx(4.0)

    def test_parse_roundtrip(self):
        for text in ("const:2", "power:1:1.5", "logpower:0.5:2"):
            spec = RateSpec.parse(text)
            assert RateSpec.parse(spec.describe()) == spec

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            RateSpec("exp", 1.0).value(10)


class TestCatalog:
    def test_names_and_laws(self):
        cat = builtin_schedules()
        assert cat["complete-regime-i"].law is EXP1
        assert cat["complete-regime-iii"].law is HYPOEXP_1_2
        assert cat["ring"].law is RING_EOE

    def test_complete_regime_i_scale(self):
        # (c2 / 2 c1) * gamma^2 / (lam * a_n) collapses to n gamma^2 / lam
        sched = make_schedule("complete-regime-i")
        n = 400
        assert sched.b_n(n) == pytest.approx(n / n ** 1.5, rel=1e-12)
        assert (sched.c1, sched.c2) == (1.0, 2.0)

    def test_exponential_bookkeeping(self):
        # X ~ Exp(1/4) has mean 4 and second moment 32
        sched = make_schedule("bipartite-power", param=0.5)
        assert (sched.c1, sched.c2) == (4.0, 32.0)

    def test_star_coefficient(self):
        sched = make_schedule("star")
        n = 1000
        assert sched.b_n(n) * sched.lam.value(n) == pytest.approx(2.5, rel=1e-12)

    def test_fixed_side_coefficient(self):
        sched = make_schedule("bipartite-fixed", param=2)
        n = 500
        assert sched.b_n(n) * sched.lam.value(n) == pytest.approx(6.5, rel=1e-12)

    def test_linear_side_moments(self):
        sched = make_schedule("bipartite-linear", param=0.3)
        assert sched.c1 == pytest.approx(4 * 0.3 * 0.7)
        assert sched.c2 == pytest.approx(32 * 0.3 ** 2 * 0.7 ** 2)
        assert sched.m_of(1000) == 300

    @pytest.mark.parametrize("m", range(1, 11))
    def test_theorem3_coefficient_identity(self, m):
        c1 = Fraction(4 * m - 1)
        c2 = Fraction(16 * m * (2 * m - 1) + 1)
        assert (c1 + c2) / (2 * (1 + c1)) == Fraction(8 * m - 3, 2)
        assert theorem3_coefficient(m) == pytest.approx(float(Fraction(8 * m - 3, 2)))


class TestLimitLaws:
    def test_exp1_value(self):
        assert limit_law_transform("exp1", 1.0) == 0.5

    def test_hypoexp_at_zero(self):
        assert limit_law_transform("exp1-plus-exp2", 0.0) == pytest.approx(1.0)

    def test_ring_law_value(self):
        # frozen from 2*(sqrt(3)-sqrt(2)) / (sqrt(6)*(2*sqrt(2)-sqrt(3)))
        hand = 2 * (math.sqrt(3) - math.sqrt(2)) / (
            math.sqrt(2) * math.sqrt(3) * (2 * math.sqrt(2) - math.sqrt(3)))
        assert hand == pytest.approx(0.2367010, abs=1e-6)
        assert limit_law_transform("ring-eoe", 1.0) == pytest.approx(hand, abs=1e-14)

    def test_unknown_law(self):
        with pytest.raises(ValueError):
            limit_law_transform("cauchy", 1.0)

    @pytest.mark.parametrize("law", [EXP1, HYPOEXP_1_2, RING_EOE],
                             ids=lambda l: l.name)
    def test_transform_properties(self, law):
        grid = np.logspace(-3, 1.5, 50)
        vals = [law.transform(float(s)) for s in grid]
        assert abs(law.transform(0.0) - 1.0) <= 1e-12
        assert all(0 < v <= 1 for v in vals)
        assert all(b < a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_hypoexp_moments_match_transform(self):
        assert moments_from_transform(HYPOEXP_1_2.transform, 1) == pytest.approx(
            HYPOEXP_1_2.mean, rel=1e-6)
        assert moments_from_transform(HYPOEXP_1_2.transform, 2) == pytest.approx(
            HYPOEXP_1_2.second_moment, rel=1e-5)

    def test_cdf_transform_consistency(self):
        # numeric Laplace transform of the CDF density vs the closed form
        ts = np.linspace(0, 60, 400000)
        for law in (EXP1, HYPOEXP_1_2):
            f = np.gradient(np.array([law.cdf(t) for t in ts]), ts)
            for s in (0.5, 2.0):
                quad = np.trapezoid(np.exp(-s * ts) * f, ts)
                assert quad == pytest.approx(law.transform(s), abs=2e-4)


class TestScheduleConsistency:
    @pytest.mark.parametrize("name,param", [
        ("complete-regime-i", None),
        ("bipartite-linear", 0.3),
        ("bipartite-power", 0.5),
        ("bipartite-fixed", 2),
    ])
    def test_normalized_jump_count_mean_approaches_c1(self, name, param):
        sched = make_schedule(name, param=param)
        n = 2000
        chain = meeting_chain(sched.graph(n))
        mean = mean_N(chain)
        a_n = sched.a_n(n) if sched.regime == "thm2" else 1.0
        assert a_n * mean == pytest.approx(sched.c1, rel=0.05)

    def test_regime_violation_rejected(self):
        # lam growing like gamma violates gamma = o(lam * a_n)
        sched = make_schedule("complete-regime-i",
                              lam=RateSpec("power", 1, 1.0),
                              gamma=RateSpec("power", 1, 1.0))
        with pytest.raises(ScheduleRegimeError):
            sched.check_regime((50, 200, 1000))

    def test_regime_iii_needs_sublinear_walk(self):
        sched = make_schedule("complete-regime-iii", lam=RateSpec("power", 1, 2.0))
        with pytest.raises(ScheduleRegimeError):
            sched.check_regime((100, 1000))

    def test_acceptance_schedules_pass(self):
        make_schedule("complete-regime-i").check_regime((50, 200, 1000))
        make_schedule("complete-regime-iii").check_regime((1000,))
        make_schedule("star").check_regime((1000,))
        make_schedule("ring").check_regime((1000,))

    def test_ring_rejects_odd_n(self):
        with pytest.raises(ValueError):
            make_schedule("ring").graph(501)

    def test_bipartite_side_cap(self):
        sched = make_schedule("bipartite-fixed", param=64)
        with pytest.raises(ValueError):
            sched.graph(50)


class TestExperiments:
    def test_convergence_report_fields(self):
        sched = make_schedule("complete-regime-i")
        report = convergence_check(sched, (30, 120), reps=1500, seed=5, workers=2)
        assert report.rows[0].metric == "ks"
        assert all(0 <= r.distance <= 1 for r in report.rows)
        # coarse sanity: already in the right neighbourhood at small n
        assert report.rows[-1].distance < 0.25
        assert report.rows[-1].distance < report.rows[0].distance
        d = report.to_dict()
        assert {"schedule", "law", "reps", "rows", "nonincreasing"} <= d.keys()

    def test_ring_metric_is_transform_distance(self):
        sched = make_schedule("ring", lam=RateSpec("const", 500.0))
        report = convergence_check(sched, (64,), reps=800, seed=6, workers=2)
        assert report.rows[0].metric == "transform-sup"
        assert report.rows[0].distance < 0.2

    def test_probe_median_growth_fast_walk(self):
        # lam = n^2, gamma = 1: b_n = 1/n shrinks, medians grow like n ln 2
        sched = make_schedule("complete-regime-i", lam=RateSpec("power", 1, 2.0))
        report = divergence_probe(sched, (50, 120), reps=1000, seed=7, workers=2)
        assert report.median_trend == "increasing"
        for row in report.rows:
            # exact medians carry a +7%/+3% finite-n excess at these sizes
            assert row.median == pytest.approx(math.log(2) * row.n, rel=0.25)

    def test_probe_median_collapse_slow_subregime(self):
        # b_n -> infinity: epidemic times collapse
        sched = make_schedule("complete-regime-i", lam=RateSpec("power", 1, 0.5))
        report = divergence_probe(sched, (100, 900), reps=500, seed=8, workers=2)
        assert report.rows[-1].median < report.rows[0].median

    def test_probe_median_collapse_regimes_ii_iii(self):
        fast_recovery = make_schedule("complete-regime-ii",
                                      lam=RateSpec("power", 1, 0.3),
                                      gamma=RateSpec("power", 1, 1.0))
        report = divergence_probe(fast_recovery, (50, 800), reps=400, seed=9,
                                  workers=2)
        assert report.median_trend == "decreasing"
        middle = make_schedule("complete-regime-iii",
                               lam=RateSpec("power", 1, 0.7),
                               gamma=RateSpec("power", 1, 0.2))
        report = divergence_probe(middle, (50, 800), reps=400, seed=10, workers=2)
        assert report.rows[-1].median < report.rows[0].median
