"""Single-waveguide dual-fed system: analytics and closed-form optimization.

The waveguide runs along the x-axis at the service-area edge (y = 0) at
height d, with feed points at both ends.  Users live on the ground plane
inside the L_x-by-L_y rectangle.  High-SNR closed forms for the ergodic rate
are evaluated unconditionally; a diagnostic warning fires when the area
minimum SNR drops below 10 dB and the approximation is stretched.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .channel import StatisticalNlosModel
from .physics import AttenuationCoefficient, CarrierConfig, Point3, SystemGeometry

LOG2E = math.log2(math.e)


class HighSnrApproximationWarning(UserWarning):
    """Raised when a high-SNR closed form is evaluated outside its comfort zone."""


@dataclass
class SingleWaveguideScenario:
    geometry: SystemGeometry
    carrier: CarrierConfig
    alpha: AttenuationCoefficient
    injected_power_w: float
    noise_power_w: float
    users: list = field(default_factory=list)     # of Point3, z = 0
    nlos: object = None   # None, one StatisticalNlosModel, or one per user

    def __post_init__(self):
        if self.geometry.num_waveguides != 1:
            raise ValueError("single-waveguide scenario requires exactly one waveguide")
        if self.injected_power_w <= 0 or self.noise_power_w <= 0:
            raise ValueError("powers must be positive")
        for u in self.users:
            if not self.geometry.contains(u):
                raise ValueError(f"user {u} outside the service area")
        if isinstance(self.nlos, (list, tuple)) and len(self.nlos) != len(self.users):
            raise ValueError("need one NLoS model per user")

    @property
    def num_users(self) -> int:
        return len(self.users)

    def nlos_model(self, m: int):
        if isinstance(self.nlos, (list, tuple)):
            return self.nlos[m]
        return self.nlos

    def nlos_aggregate(self, m: int) -> float:
        model = self.nlos_model(m)
        return model.aggregate_power if isinstance(model, StatisticalNlosModel) else 0.0

    def effective_los_constant(self, m: int) -> float:
        """LoS constant plus the aggregate NLoS power for user m."""
        return self.carrier.los_constant + self.nlos_aggregate(m)


def snr_df_nearest(user: Point3, scenario: SingleWaveguideScenario) -> float:
    """LoS-only SNR with the pinch above the user and the nearer feed active.

    gamma = (P0 eta / sigma^2) * exp(-alpha * min(x, L_x - x)) / (y^2 + d^2).
    """
    lx = scenario.geometry.service_length_m
    if not scenario.geometry.contains(user):
        raise ValueError(f"user {user} outside the service area")
    z = min(user.x_m, lx - user.x_m)
    d2 = user.y_m**2 + scenario.geometry.waveguide_height_m**2
    return (scenario.injected_power_w * scenario.carrier.los_constant / scenario.noise_power_w
            * math.exp(-scenario.alpha.nepers_per_meter * z) / d2)


def _geometric_term(ly: float, d: float) -> float:
    return math.log2(ly**2 + d**2) - (2.0 / math.log(2)) * (1.0 - (d / ly) * math.atan(ly / d))


def _check_high_snr(scenario: SingleWaveguideScenario, worst_z: float, label: str):
    geo = scenario.geometry
    gamma_min = (scenario.injected_power_w * scenario.carrier.los_constant
                 / scenario.noise_power_w
                 * math.exp(-scenario.alpha.nepers_per_meter * worst_z)
                 / (geo.service_width_m**2 + geo.waveguide_height_m**2))
    if gamma_min < 10.0:
        warnings.warn(
            f"{label}: area-minimum SNR is {10 * math.log10(max(gamma_min, 1e-300)):.1f} dB; "
            "the high-SNR closed form is stretched",
            HighSnrApproximationWarning, stacklevel=3)


def ergodic_rate_df_closed(scenario: SingleWaveguideScenario) -> float:
    """High-SNR ergodic rate with dual feeds and nearest-feed injection."""
    geo = scenario.geometry
    _check_high_snr(scenario, geo.service_length_m / 2.0, "dual-fed ergodic rate")
    return (math.log2(scenario.injected_power_w * scenario.carrier.los_constant
                      / scenario.noise_power_w)
            - scenario.alpha.nepers_per_meter * geo.service_length_m / 4.0 * LOG2E
            - _geometric_term(geo.service_width_m, geo.waveguide_height_m))


def ergodic_rate_sf_closed(scenario: SingleWaveguideScenario) -> float:
    """High-SNR ergodic rate with a single fixed feed at the left end.

    Identical to the dual-fed form except the mean in-waveguide distance is
    L_x / 2 instead of L_x / 4.
    """
    geo = scenario.geometry
    _check_high_snr(scenario, geo.service_length_m, "single-fed ergodic rate")
    return (math.log2(scenario.injected_power_w * scenario.carrier.los_constant
                      / scenario.noise_power_w)
            - scenario.alpha.nepers_per_meter * geo.service_length_m / 2.0 * LOG2E
            - _geometric_term(geo.service_width_m, geo.waveguide_height_m))


def rate_gain_df_over_sf(alpha: AttenuationCoefficient, lx_m: float) -> float:
    """Ergodic-rate gain of dual feeds over one feed: alpha * L_x / 4 * log2(e)."""
    if lx_m < 0:
        raise ValueError(f"waveguide length must be nonnegative, got {lx_m}")
    return alpha.nepers_per_meter * lx_m / 4.0 * LOG2E


@dataclass(frozen=True)
class PaPlacementResult:
    x_star_m: float
    feed: int
    achieved_snr: float
    boundary_case: bool


def placement_snr(x_pin: float, feed: int, user: Point3,
                  scenario: SingleWaveguideScenario, user_index: int | None = None) -> float:
    """Expected SNR of a user for a given pinch position and feed choice.

    Includes the aggregate NLoS power: gamma = (P0 (eta + mu) / sigma^2)
    * exp(-alpha z) / ((x_pin - x_m)^2 + y_m^2 + d^2), with z the distance
    from the active feed.
    """
    lx = scenario.geometry.service_length_m
    if not 0.0 <= x_pin <= lx:
        raise ValueError(f"pinch position {x_pin} outside waveguide [0, {lx}]")
    z = x_pin if feed == 1 else lx - x_pin
    mu = scenario.nlos_aggregate(user_index) if user_index is not None else 0.0
    if user_index is None and isinstance(scenario.nlos, StatisticalNlosModel):
        mu = scenario.nlos.aggregate_power
    d_m = (x_pin - user.x_m)**2 + user.y_m**2 + scenario.geometry.waveguide_height_m**2
    return (scenario.injected_power_w * (scenario.carrier.los_constant + mu)
            / scenario.noise_power_w
            * math.exp(-scenario.alpha.nepers_per_meter * z) / d_m)


def optimal_pa_position(user: Point3, feed: int,
                        scenario: SingleWaveguideScenario,
                        user_index: int | None = None) -> PaPlacementResult:
    """Closed-form pinch position maximizing the expected SNR for one user.

    The position balances free-space spreading against in-waveguide
    attenuation.  The SNR along the waveguide has at most one interior local
    maximum, offset (-1 + sqrt(1 - alpha^2 D)) / alpha from the user toward
    the active feed (D = y_m^2 + d^2); the only other candidate is the feed
    itself, so the optimum is whichever of the two scores higher.  For users
    within 1/alpha of the feed this comparison reduces to the threshold test
    D >= x (2 - alpha x) / alpha, under which the optimum collapses onto the
    feed; when alpha^2 D >= 1 the SNR decays monotonically away from the
    feed and the feed always wins.
    """
    if feed not in (0, 1):
        raise ValueError(f"feed indicator must be 0 or 1, got {feed}")
    lx = scenario.geometry.service_length_m
    alpha = scenario.alpha.nepers_per_meter
    d_m = user.y_m**2 + scenario.geometry.waveguide_height_m**2
    feed_pos = 0.0 if feed == 1 else lx

    if alpha == 0.0:
        x_star, boundary = user.x_m, False
    elif alpha**2 * d_m >= 1.0:
        x_star, boundary = feed_pos, True
    else:
        offset = (-1.0 + math.sqrt(1.0 - alpha**2 * d_m)) / alpha
        interior = user.x_m + offset if feed == 1 else user.x_m - offset
        interior = min(max(interior, 0.0), lx)
        snr_interior = placement_snr(interior, feed, user, scenario, user_index)
        snr_feed = placement_snr(feed_pos, feed, user, scenario, user_index)
        if snr_feed >= snr_interior:
            x_star, boundary = feed_pos, True
        else:
            x_star, boundary = interior, False

    snr = placement_snr(x_star, feed, user, scenario, user_index)
    return PaPlacementResult(x_star, feed, snr, boundary)


def select_feed_per_user(x_pin: float, lx_m: float) -> int:
    """Feed minimizing the in-waveguide distance to a pinch position (tie -> left)."""
    if not 0.0 <= x_pin <= lx_m:
        raise ValueError(f"pinch position {x_pin} outside waveguide [0, {lx_m}]")
    return 1 if x_pin <= lx_m / 2.0 else 0


def select_feed_fixed(scenario: SingleWaveguideScenario) -> tuple:
    """Pick one feed for the whole frame from both candidate TDMA sum rates.

    Each feed is scored with every user at its per-feed optimal pinch
    position; returns (feed, sum_rate_left, sum_rate_right) with ties going
    to the left feed.
    """
    if scenario.num_users == 0:
        raise ValueError("feed selection needs at least one user")
    left = [optimal_pa_position(u, 1, scenario, m) for m, u in enumerate(scenario.users)]
    right = [optimal_pa_position(u, 0, scenario, m) for m, u in enumerate(scenario.users)]
    r_left = tdma_sum_rate(scenario, left)
    r_right = tdma_sum_rate(scenario, right)
    return (1 if r_left >= r_right else 0), r_left, r_right


def tdma_sum_rate(scenario: SingleWaveguideScenario, placements: list) -> float:
    """Equal-slot TDMA sum rate (1/M) sum_m log2(1 + gamma_m)."""
    if len(placements) != scenario.num_users:
        raise ValueError(
            f"got {len(placements)} placements for {scenario.num_users} users")
    total = 0.0
    for m, (user, pl) in enumerate(zip(scenario.users, placements)):
        gamma = placement_snr(pl.x_star_m, pl.feed, user, scenario, m)
        total += math.log2(1.0 + gamma)
    return total / scenario.num_users
