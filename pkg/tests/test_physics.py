import math

import numpy as np
import pytest

from dfpas.physics import (
    PTFE,
    AttenuationCoefficient,
    CarrierConfig,
    Point3,
    SystemGeometry,
    WaveguideMaterial,
    db_to_nepers,
    dbm_to_watts,
    dielectric_attenuation,
    euclidean_distance,
    nepers_to_db,
    propagated_power,
    watts_to_dbm,
)

CARRIER_28GHZ = CarrierConfig(28e9)


class TestDielectricAttenuation:
    def test_ptfe_at_28ghz_in_db(self):
        alpha = dielectric_attenuation(PTFE, CARRIER_28GHZ)
        assert alpha.db_per_meter() == pytest.approx(1.48, abs=0.01)

    def test_ptfe_at_28ghz_in_nepers(self):
        # frozen from a hand evaluation of 2 pi n tan(delta) / lambda0
        alpha = dielectric_attenuation(PTFE, CARRIER_28GHZ)
        assert alpha.nepers_per_meter == pytest.approx(0.340365, rel=1e-4)

    def test_lossless_material(self):
        lossless = WaveguideMaterial(0.0, 1.45)
        assert dielectric_attenuation(lossless, CARRIER_28GHZ).nepers_per_meter == 0.0

    def test_linear_scaling(self):
        base = dielectric_attenuation(PTFE, CARRIER_28GHZ).nepers_per_meter
        doubled_tan = WaveguideMaterial(2 * PTFE.loss_tangent, PTFE.effective_refractive_index)
        doubled_n = WaveguideMaterial(PTFE.loss_tangent, 2 * PTFE.effective_refractive_index)
        assert dielectric_attenuation(doubled_tan, CARRIER_28GHZ).nepers_per_meter \
            == pytest.approx(2 * base, rel=1e-12)
        assert dielectric_attenuation(doubled_n, CARRIER_28GHZ).nepers_per_meter \
            == pytest.approx(2 * base, rel=1e-12)
        assert dielectric_attenuation(PTFE, CarrierConfig(56e9)).nepers_per_meter \
            == pytest.approx(2 * base, rel=1e-12)

    def test_rejects_bad_material(self):
        with pytest.raises(ValueError):
            WaveguideMaterial(-1e-4, 1.45)
        with pytest.raises(ValueError):
            WaveguideMaterial(4e-4, 0.9)


class TestPropagatedPower:
    def test_ptfe_ten_meters(self):
        alpha = dielectric_attenuation(PTFE, CARRIER_28GHZ)
        assert propagated_power(1.0, alpha, 10.0) == pytest.approx(0.033, abs=1e-3)

    def test_zero_distance(self):
        alpha = AttenuationCoefficient(0.3)
        assert propagated_power(2.5, alpha, 0.0) == 2.5

    def test_lossless(self):
        assert propagated_power(0.7, AttenuationCoefficient(0.0), 123.0) == 0.7

    def test_negative_distance_rejected(self):
        with pytest.raises(ValueError):
            propagated_power(1.0, AttenuationCoefficient(0.1), -1.0)

    def test_halving_distance(self):
        # power halves every 10*log10(2) / alpha_dB meters
        rng = np.random.default_rng(0)
        for alpha_db in rng.uniform(0.2, 3.0, size=3):
            alpha = AttenuationCoefficient.from_db_per_meter(alpha_db)
            z_half = 10.0 * math.log10(2.0) / alpha_db
            p0 = propagated_power(1.0, alpha, 5.0)
            p1 = propagated_power(1.0, alpha, 5.0 + z_half)
            assert p1 == pytest.approx(p0 / 2.0, rel=1e-12)


class TestUnits:
    def test_neper_db_round_trip(self):
        for x in (1e-6, 0.34, 7.2):
            assert db_to_nepers(nepers_to_db(x)) == pytest.approx(x, rel=1e-12)

    def test_dbm_watts(self):
        assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-12)
        assert dbm_to_watts(-90.0) == pytest.approx(1e-12, rel=1e-12)
        assert watts_to_dbm(dbm_to_watts(17.3)) == pytest.approx(17.3, rel=1e-12)

    def test_negative_attenuation_rejected(self):
        with pytest.raises(ValueError):
            AttenuationCoefficient(-0.1)


class TestCarrierConfig:
    def test_wavelength(self):
        assert CARRIER_28GHZ.wavelength_m == pytest.approx(299792458.0 / 28e9, rel=1e-12)

    def test_los_constant(self):
        # (c / (4 pi f_c))^2, frozen from a hand evaluation
        assert CARRIER_28GHZ.los_constant == pytest.approx(7.2595e-7, rel=1e-4)

    def test_rejects_nonpositive_frequency(self):
        with pytest.raises(ValueError):
            CarrierConfig(0.0)


class TestGeometry:
    def test_waveguide_layout(self):
        geo = SystemGeometry(10.0, 6.0, 1.5, num_waveguides=3)
        ys = geo.waveguide_y_coords_m
        assert np.allclose(ys, [1.0, 3.0, 5.0])
        assert np.all(np.diff(ys) > 0)
        assert np.all((ys > 0) & (ys < geo.service_width_m))

    def test_distance(self):
        assert euclidean_distance(Point3(0, 0, 0), Point3(0, 0, 0)) == 0.0
        assert euclidean_distance(Point3(0, 0, 0), Point3(3, 4, 0)) == 5.0
        assert euclidean_distance(Point3(1, 2, 1.5), Point3(1, 2, 0)) == 1.5

    def test_rejects_bad_geometry(self):
        with pytest.raises(ValueError):
            SystemGeometry(0.0, 10.0, 1.5)
        with pytest.raises(ValueError):
            SystemGeometry(10.0, 10.0, 1.5, num_waveguides=0)
