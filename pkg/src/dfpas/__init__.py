"""Dual-fed pinching-antenna system simulator and optimizer."""

from .physics import (
    PTFE,
    AttenuationCoefficient,
    CarrierConfig,
    Point3,
    SystemGeometry,
    WaveguideMaterial,
    dielectric_attenuation,
    euclidean_distance,
    propagated_power,
)
from .channel import (
    ScattererField,
    StatisticalNlosModel,
    WaveguideSpec,
    effective_channel,
    geometric_nlos,
    in_waveguide_response,
    los_gain,
    sample_statistical_nlos,
)
from .single_waveguide import (
    PaPlacementResult,
    SingleWaveguideScenario,
    ergodic_rate_df_closed,
    ergodic_rate_sf_closed,
    optimal_pa_position,
    rate_gain_df_over_sf,
    select_feed_fixed,
    select_feed_per_user,
    snr_df_nearest,
    tdma_sum_rate,
)
from .multi_waveguide import (
    MultiWaveguideScenario,
    NetworkState,
    RateReport,
    effective_channel_matrix,
    ergodic_rate_multi_closed,
    mrt_equal_power_snr,
    rate_report,
    sinr,
)
from .optimizer import (
    GradientVector,
    OptimizerConfig,
    bls_position_update,
    greedy_feed_switching,
    sum_rate_gradient,
    two_phase_optimize,
    wmmse_beamforming,
)
from .montecarlo import McConfig, McEstimate, mc_ergodic_rate_multi, mc_ergodic_rate_single
from .schemes import scheme_conventional, scheme_df_pas, scheme_random_pa, scheme_sf_pas

__version__ = "0.1.0"
