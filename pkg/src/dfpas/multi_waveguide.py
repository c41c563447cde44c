"""Multi-waveguide dual-fed system: channels, SINR, and closed-form analytics.

N parallel waveguides at heights d and y-coordinates (2n-1) L_y / (2N) each
carry one pinching antenna.  All users are served simultaneously through
per-waveguide beamforming weights; the effective channel from waveguide n's
feed input to user m is the free-space channel scaled by the in-waveguide
response nu_n of that waveguide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ScattererField, WaveguideSpec, geometric_nlos, in_waveguide_response, los_gain
from .physics import AttenuationCoefficient, CarrierConfig, Point3, SystemGeometry

LOG2E = math.log2(math.e)


@dataclass
class MultiWaveguideScenario:
    geometry: SystemGeometry
    carrier: CarrierConfig
    alpha: AttenuationCoefficient
    total_power_w: float
    noise_power_w: float
    users: list = field(default_factory=list)      # of Point3, z = 0
    scatterers: ScattererField | None = None       # None -> LoS only
    effective_refractive_index: float = 1.45

    def __post_init__(self):
        if self.total_power_w <= 0 or self.noise_power_w <= 0:
            raise ValueError("powers must be positive")
        if self.effective_refractive_index < 1.0:
            raise ValueError("effective refractive index must be >= 1")
        for u in self.users:
            if not self.geometry.contains(u):
                raise ValueError(f"user {u} outside the service area")

    @property
    def num_users(self) -> int:
        return len(self.users)

    @property
    def num_waveguides(self) -> int:
        return self.geometry.num_waveguides

    @property
    def waveguide(self) -> WaveguideSpec:
        return WaveguideSpec(
            length_m=self.geometry.service_length_m,
            alpha=self.alpha,
            guided_wavelength_m=self.carrier.wavelength_m / self.effective_refractive_index,
        )

    def pa_position(self, n: int, x_pin: float) -> Point3:
        y = self.geometry.waveguide_y_coords_m[n]
        return Point3(x_pin, float(y), self.geometry.waveguide_height_m)


@dataclass
class NetworkState:
    """Feed selection, pinch positions, and beamforming matrix (column per user)."""

    feed_selection: np.ndarray   # (N,) of {0, 1}
    pa_positions: np.ndarray     # (N,) in [0, L_x]
    beamforming: np.ndarray      # (N, M) complex

    def __post_init__(self):
        self.feed_selection = np.asarray(self.feed_selection, dtype=int)
        self.pa_positions = np.asarray(self.pa_positions, dtype=float)
        self.beamforming = np.asarray(self.beamforming, dtype=complex)

    def validate(self, scenario: MultiWaveguideScenario, power_slack: float = 1e-9):
        n = scenario.num_waveguides
        if self.feed_selection.shape != (n,) or self.pa_positions.shape != (n,):
            raise ValueError("state dimensions do not match the waveguide count")
        if self.beamforming.shape != (n, scenario.num_users):
            raise ValueError("beamforming matrix must be N x M")
        if not np.isin(self.feed_selection, (0, 1)).all():
            raise ValueError("feed selection entries must be 0 or 1")
        lx = scenario.geometry.service_length_m
        if np.any(self.pa_positions < 0) or np.any(self.pa_positions > lx):
            raise ValueError("pinch positions must lie on the waveguide")
        power = float(np.sum(np.abs(self.beamforming) ** 2))
        if power > scenario.total_power_w + power_slack:
            raise ValueError(f"beamforming power {power} exceeds budget {scenario.total_power_w}")


@dataclass(frozen=True)
class RateReport:
    per_user_sinr: np.ndarray
    per_user_rate: np.ndarray
    sum_rate: float


def effective_channel_matrix(scenario: MultiWaveguideScenario, state: NetworkState) -> np.ndarray:
    """N x M matrix of feed-input to user channels nu_n * (h_los + h_nlos)."""
    n_wg, m_users = scenario.num_waveguides, scenario.num_users
    wg = scenario.waveguide
    h = np.zeros((n_wg, m_users), dtype=complex)
    for n in range(n_wg):
        pa = scenario.pa_position(n, float(state.pa_positions[n]))
        nu = in_waveguide_response(int(state.feed_selection[n]), pa.x_m, wg)
        for m, user in enumerate(scenario.users):
            gain = los_gain(pa, user, scenario.carrier)
            if scenario.scatterers is not None:
                gain += geometric_nlos(pa, user, scenario.scatterers, scenario.carrier)
            h[n, m] = nu * gain
    return h


def sinr(beams: np.ndarray, channel_matrix: np.ndarray, m: int, noise_power_w: float) -> float:
    """SINR of user m: |h_m^H p_m|^2 / (sum_{i != m} |h_m^H p_i|^2 + sigma^2)."""
    products = channel_matrix[:, m].conj() @ beams     # (M,) of h_m^H p_i
    powers = np.abs(products) ** 2
    signal = powers[m]
    interference = powers.sum() - signal
    return float(signal / (interference + noise_power_w))


def rate_report(beams: np.ndarray, channel_matrix: np.ndarray, noise_power_w: float) -> RateReport:
    m_users = channel_matrix.shape[1]
    sinrs = np.array([sinr(beams, channel_matrix, m, noise_power_w) for m in range(m_users)])
    rates = np.log2(1.0 + sinrs)
    return RateReport(sinrs, rates, float(rates.sum()))


def mrt_equal_power_snr(user: Point3, scenario: MultiWaveguideScenario) -> float:
    """Single-user SNR under equal per-waveguide power and phase-aligned beams.

    All pinches sit at the user's x with the nearer feed active, the channel
    is LoS only, and the N amplitude contributions add coherently:
    gamma = (P0 eta / (N sigma^2)) e^{-alpha z} (sum_n 1/r_n)^2.
    """
    geo = scenario.geometry
    z = min(user.x_m, geo.service_length_m - user.x_m)
    dists = np.sqrt((user.y_m - geo.waveguide_y_coords_m) ** 2 + geo.waveguide_height_m**2)
    coherent = float(np.sum(1.0 / dists)) ** 2
    return (scenario.total_power_w * scenario.carrier.los_constant
            / (geo.num_waveguides * scenario.noise_power_w)
            * math.exp(-scenario.alpha.nepers_per_meter * z) * coherent)


def ergodic_rate_multi_closed(scenario: MultiWaveguideScenario) -> float:
    """High-SNR closed-form ergodic rate for the equal-power phase-aligned scheme.

    The geometric term is a log-of-mean bound (concavity of the log), so the
    value upper-bounds the simulated ergodic rate; the gap closes as the
    waveguide deployment densifies.
    """
    geo = scenario.geometry
    d = geo.waveguide_height_m
    ys = geo.waveguide_y_coords_m
    asinh_sum = float(np.sum(np.arcsinh((geo.service_width_m - ys) / d) + np.arcsinh(ys / d)))
    return (math.log2(scenario.total_power_w * scenario.carrier.los_constant
                      / (geo.num_waveguides * scenario.noise_power_w))
            - scenario.alpha.nepers_per_meter * geo.service_length_m / 4.0 * LOG2E
            + 2.0 * math.log2(asinh_sum / geo.service_width_m))
