import math

import pytest

from dfpas.channel import StatisticalNlosModel
from dfpas.montecarlo import McConfig, mc_ergodic_rate_multi, mc_ergodic_rate_single
from dfpas.multi_waveguide import MultiWaveguideScenario, ergodic_rate_multi_closed
from dfpas.physics import AttenuationCoefficient, CarrierConfig, SystemGeometry
from dfpas.single_waveguide import SingleWaveguideScenario, ergodic_rate_df_closed

CARRIER = CarrierConfig(28e9)
ALPHA = AttenuationCoefficient(0.340365)


def single_scenario(lx=10.0, ly=10.0, nlos=None):
    return SingleWaveguideScenario(SystemGeometry(lx, ly, 1.5), CARRIER, ALPHA,
                                   1.0, 1e-12, users=[], nlos=nlos)


def multi_scenario(n_wg=2, lx=10.0, ly=6.0):
    return MultiWaveguideScenario(SystemGeometry(lx, ly, 1.5, num_waveguides=n_wg),
                                  CARRIER, ALPHA, 1.0, 1e-12, users=[])


class TestSingleEstimator:
    def test_deterministic_given_seed(self):
        scn = single_scenario()
        cfg = McConfig(num_drops=5000, rng_seed=3)
        a = mc_ergodic_rate_single(scn, "df", cfg)
        b = mc_ergodic_rate_single(scn, "df", cfg)
        assert a == b

    def test_policies_differ_then_agree_when_lossless(self):
        scn = single_scenario()
        cfg = McConfig(num_drops=50_000, rng_seed=1)
        df = mc_ergodic_rate_single(scn, "df", cfg)
        sf = mc_ergodic_rate_single(scn, "sf", cfg)
        assert df.mean_rate > sf.mean_rate
        lossless = SingleWaveguideScenario(scn.geometry, CARRIER, AttenuationCoefficient(0.0),
                                           1.0, 1e-12, users=[])
        df0 = mc_ergodic_rate_single(lossless, "df", McConfig(num_drops=50_000, rng_seed=5))
        sf0 = mc_ergodic_rate_single(lossless, "sf", McConfig(num_drops=50_000, rng_seed=6))
        assert abs(df0.mean_rate - sf0.mean_rate) <= 2 * math.hypot(
            df0.ci_halfwidth, sf0.ci_halfwidth)

    def test_closed_form_agreement(self):
        scn = single_scenario()
        est = mc_ergodic_rate_single(scn, "df", McConfig(num_drops=300_000, rng_seed=11))
        assert abs(est.mean_rate - ergodic_rate_df_closed(scn)) <= max(0.05, 2 * est.ci_halfwidth)

    def test_disjoint_half_runs_pool_to_full_mean(self):
        scn = single_scenario()
        full = mc_ergodic_rate_single(scn, "sf", McConfig(num_drops=20_000, rng_seed=9))
        first = mc_ergodic_rate_single(scn, "sf", McConfig(num_drops=10_000, rng_seed=9))
        second = mc_ergodic_rate_single(scn, "sf",
                                        McConfig(num_drops=10_000, rng_seed=9, drop_start=10_000))
        pooled = 0.5 * (first.mean_rate + second.mean_rate)
        assert pooled == pytest.approx(full.mean_rate, abs=1e-12)

    def test_ci_shrinks_with_drop_count(self):
        scn = single_scenario()
        small = mc_ergodic_rate_single(scn, "df", McConfig(num_drops=10_000, rng_seed=2))
        large = mc_ergodic_rate_single(scn, "df", McConfig(num_drops=40_000, rng_seed=2))
        ratio = small.ci_halfwidth / large.ci_halfwidth
        assert ratio == pytest.approx(2.0, rel=0.15)

    def test_ci_matches_confidence_level(self):
        scn = single_scenario()
        est95 = mc_ergodic_rate_single(scn, "df", McConfig(num_drops=5000, rng_seed=4))
        est99 = mc_ergodic_rate_single(scn, "df",
                                       McConfig(num_drops=5000, rng_seed=4,
                                                confidence_level=0.99))
        assert est95.mean_rate == est99.mean_rate
        assert est99.ci_halfwidth > est95.ci_halfwidth
        assert est95.ci_halfwidth == pytest.approx(1.959964 * est95.std_error, rel=1e-6)

    def test_unknown_policy_rejected(self):
        with pytest.raises(ValueError):
            mc_ergodic_rate_single(single_scenario(), "both", McConfig(num_drops=10))

    def test_nlos_sampling_raises_mean_power(self):
        model = StatisticalNlosModel.equal_weights(10, 0.5 * CARRIER.los_constant)
        plain = single_scenario()
        rich = single_scenario(nlos=model)
        cfg = McConfig(num_drops=100_000, rng_seed=8, los_only=False)
        with pytest.raises(ValueError):
            mc_ergodic_rate_single(plain, "df", cfg)
        est_rich = mc_ergodic_rate_single(rich, "df", cfg)
        est_los = mc_ergodic_rate_single(rich, "df",
                                         McConfig(num_drops=100_000, rng_seed=8))
        assert est_rich.mean_rate > est_los.mean_rate


class TestMultiEstimator:
    def test_jensen_direction(self):
        scn = multi_scenario(n_wg=2)
        est = mc_ergodic_rate_multi(scn, McConfig(num_drops=300_000, rng_seed=3))
        assert ergodic_rate_multi_closed(scn) >= est.mean_rate - 2 * est.ci_halfwidth

    def test_gap_shrinks_with_density(self):
        cfg = McConfig(num_drops=300_000, rng_seed=5)
        gap2 = ergodic_rate_multi_closed(multi_scenario(2)) \
            - mc_ergodic_rate_multi(multi_scenario(2), cfg).mean_rate
        gap8 = ergodic_rate_multi_closed(multi_scenario(8)) \
            - mc_ergodic_rate_multi(multi_scenario(8), cfg).mean_rate
        assert gap8 < gap2

    def test_single_waveguide_consistency(self):
        # one waveguide at Ly/2 sees |y - Ly/2| ~ U[0, Ly/2], the same distance
        # law as a single-waveguide run over a half-width area
        multi = multi_scenario(n_wg=1, lx=10.0, ly=6.0)
        single = SingleWaveguideScenario(SystemGeometry(10.0, 3.0, 1.5), CARRIER, ALPHA,
                                         1.0, 1e-12, users=[])
        m_est = mc_ergodic_rate_multi(multi, McConfig(num_drops=200_000, rng_seed=6))
        s_est = mc_ergodic_rate_single(single, "df", McConfig(num_drops=200_000, rng_seed=7))
        tol = 2 * math.hypot(m_est.ci_halfwidth, s_est.ci_halfwidth)
        assert abs(m_est.mean_rate - s_est.mean_rate) <= tol

    def test_deterministic_given_seed(self):
        scn = multi_scenario()
        cfg = McConfig(num_drops=2000, rng_seed=1)
        assert mc_ergodic_rate_multi(scn, cfg) == mc_ergodic_rate_multi(scn, cfg)
