"""Benchmark schemes: dual-fed, single-fed, random placement, conventional.

Every scheme returns a RateReport.  For the single-waveguide TDMA pipeline
the per-user rate already includes the 1/M slot share, so the report's sum
equals the TDMA sum rate.  For the multi-waveguide pipeline the dual- and
single-fed schemes run the full two-phase optimizer (the single-fed variant
with the feed vector pinned to the left ends), while the random-placement
and conventional benchmarks only solve beams.
"""

from __future__ import annotations

import numpy as np

from .multi_waveguide import (
    MultiWaveguideScenario,
    NetworkState,
    RateReport,
    effective_channel_matrix,
    rate_report,
)
from .optimizer import OptimizerConfig, two_phase_optimize, wmmse_beamforming
from .physics import Point3
from .single_waveguide import (
    SingleWaveguideScenario,
    optimal_pa_position,
    placement_snr,
    select_feed_per_user,
)
from .channel import geometric_nlos, los_gain


def _tdma_report(scenario: SingleWaveguideScenario, sinrs) -> RateReport:
    sinrs = np.asarray(sinrs, dtype=float)
    rates = np.log2(1.0 + sinrs) / scenario.num_users
    return RateReport(sinrs, rates, float(rates.sum()))


def _single_df(scenario: SingleWaveguideScenario) -> RateReport:
    sinrs = []
    for m, user in enumerate(scenario.users):
        left = optimal_pa_position(user, 1, scenario, m)
        right = optimal_pa_position(user, 0, scenario, m)
        best = left if left.achieved_snr >= right.achieved_snr else right
        sinrs.append(best.achieved_snr)
    return _tdma_report(scenario, sinrs)


def _single_sf(scenario: SingleWaveguideScenario) -> RateReport:
    sinrs = [optimal_pa_position(u, 1, scenario, m).achieved_snr
             for m, u in enumerate(scenario.users)]
    return _tdma_report(scenario, sinrs)


def _single_random(scenario: SingleWaveguideScenario, seed) -> RateReport:
    rng = np.random.default_rng(seed)
    lx = scenario.geometry.service_length_m
    sinrs = []
    for m, user in enumerate(scenario.users):
        x_pin = float(rng.uniform(0.0, lx))
        feed = select_feed_per_user(x_pin, lx)
        sinrs.append(placement_snr(x_pin, feed, user, scenario, m))
    return _tdma_report(scenario, sinrs)


def _single_conventional(scenario: SingleWaveguideScenario) -> RateReport:
    """Fixed mid-waveguide antenna fed without in-waveguide loss."""
    lx = scenario.geometry.service_length_m
    d = scenario.geometry.waveguide_height_m
    sinrs = []
    for m, user in enumerate(scenario.users):
        dist2 = (lx / 2.0 - user.x_m) ** 2 + user.y_m**2 + d**2
        sinrs.append(scenario.injected_power_w * scenario.effective_los_constant(m)
                     / scenario.noise_power_w / dist2)
    return _tdma_report(scenario, sinrs)


def _multi_random_state(scenario: MultiWaveguideScenario, seed) -> NetworkState:
    rng = np.random.default_rng(seed)
    lx = scenario.geometry.service_length_m
    positions = rng.uniform(0.0, lx, size=scenario.num_waveguides)
    feeds = (positions <= lx / 2.0).astype(int)
    beams = np.zeros((scenario.num_waveguides, scenario.num_users), dtype=complex)
    return NetworkState(feeds, positions, beams)


def _conventional_channel_matrix(scenario: MultiWaveguideScenario) -> np.ndarray:
    """Fixed antennas at mid-waveguide positions, no in-waveguide response."""
    geo = scenario.geometry
    h = np.zeros((scenario.num_waveguides, scenario.num_users), dtype=complex)
    for n in range(scenario.num_waveguides):
        pa = Point3(geo.service_length_m / 2.0, float(geo.waveguide_y_coords_m[n]),
                    geo.waveguide_height_m)
        for m, user in enumerate(scenario.users):
            gain = los_gain(pa, user, scenario.carrier)
            if scenario.scatterers is not None:
                gain += geometric_nlos(pa, user, scenario.scatterers, scenario.carrier)
            h[n, m] = gain
    return h


def scheme_df_pas(scenario, cfg: OptimizerConfig | None = None) -> RateReport:
    """Dual-fed scheme: feed selection, placement, and beams all optimized."""
    if isinstance(scenario, SingleWaveguideScenario):
        return _single_df(scenario)
    result = two_phase_optimize(scenario, cfg or OptimizerConfig())
    return result.report


def scheme_sf_pas(scenario, cfg: OptimizerConfig | None = None) -> RateReport:
    """Single-fed baseline: left feeds everywhere, positions and beams optimized."""
    if isinstance(scenario, SingleWaveguideScenario):
        return _single_sf(scenario)
    feeds = np.ones(scenario.num_waveguides, dtype=int)
    result = two_phase_optimize(scenario, cfg or OptimizerConfig(), feed_selection=feeds)
    return result.report


def scheme_random_pa(scenario, seed, cfg: OptimizerConfig | None = None) -> RateReport:
    """Uniformly random pinch positions, nearest-end feeds, beams only."""
    if isinstance(scenario, SingleWaveguideScenario):
        return _single_random(scenario, seed)
    state = _multi_random_state(scenario, seed)
    matrix = effective_channel_matrix(scenario, state)
    solved = wmmse_beamforming(matrix, scenario.total_power_w, scenario.noise_power_w,
                               cfg or OptimizerConfig())
    return rate_report(solved.beams, matrix, scenario.noise_power_w)


def scheme_conventional(scenario, cfg: OptimizerConfig | None = None) -> RateReport:
    """Fixed mid-waveguide antennas without in-waveguide loss, beams only."""
    if isinstance(scenario, SingleWaveguideScenario):
        return _single_conventional(scenario)
    matrix = _conventional_channel_matrix(scenario)
    solved = wmmse_beamforming(matrix, scenario.total_power_w, scenario.noise_power_w,
                               cfg or OptimizerConfig())
    return rate_report(solved.beams, matrix, scenario.noise_power_w)


SCHEMES = {
    "df-pas": scheme_df_pas,
    "sf-pas": scheme_sf_pas,
    "random-pa": scheme_random_pa,
    "conventional": scheme_conventional,
}
