"""Physical constants, unit conversions, waveguide attenuation, and geometry.

All internal powers are watts and all attenuation values are nepers per
meter (natural base, so that P(z) = P_in * exp(-alpha * z) is exact).
Decibel variants exist only for I/O.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT_M_S = 299_792_458.0

# power ratio e^{-1} corresponds to -10*log10(e) dB
NEPER_TO_DB = 10.0 * math.log10(math.e)


def nepers_to_db(nepers: float) -> float:
    return nepers * NEPER_TO_DB


def db_to_nepers(db: float) -> float:
    return db / NEPER_TO_DB


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError(f"power must be positive to convert to dBm, got {watts}")
    return 10.0 * math.log10(watts * 1e3)


@dataclass(frozen=True)
class CarrierConfig:
    """Carrier frequency and the derived free-space constants."""

    frequency_hz: float

    def __post_init__(self):
        if self.frequency_hz <= 0:
            raise ValueError(f"carrier frequency must be positive, got {self.frequency_hz}")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT_M_S / self.frequency_hz

    @property
    def los_constant(self) -> float:
        """Squared free-space amplitude factor at 1 m, (c / (4 pi f_c))^2."""
        return (SPEED_OF_LIGHT_M_S / (4.0 * math.pi * self.frequency_hz)) ** 2


@dataclass(frozen=True)
class WaveguideMaterial:
    """Dielectric loss tangent and effective refractive index of the guided mode."""

    loss_tangent: float
    effective_refractive_index: float

    def __post_init__(self):
        if self.loss_tangent < 0:
            raise ValueError(f"loss tangent must be nonnegative, got {self.loss_tangent}")
        if self.effective_refractive_index < 1.0:
            raise ValueError(
                f"effective refractive index must be >= 1, got {self.effective_refractive_index}"
            )


#: PTFE (Teflon) rod waveguide.
PTFE = WaveguideMaterial(loss_tangent=4e-4, effective_refractive_index=1.45)


@dataclass(frozen=True)
class AttenuationCoefficient:
    """Power attenuation coefficient alpha, stored in nepers per meter."""

    nepers_per_meter: float

    def __post_init__(self):
        if self.nepers_per_meter < 0:
            raise ValueError(f"attenuation must be nonnegative, got {self.nepers_per_meter}")

    def db_per_meter(self) -> float:
        return nepers_to_db(self.nepers_per_meter)

    @classmethod
    def from_db_per_meter(cls, db: float) -> "AttenuationCoefficient":
        return cls(db_to_nepers(db))


@dataclass(frozen=True)
class Point3:
    """Cartesian point in meters."""

    x_m: float
    y_m: float
    z_m: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x_m, self.y_m, self.z_m], dtype=float)


@dataclass(frozen=True)
class SystemGeometry:
    """Rectangular service area with equally spaced parallel waveguides.

    Waveguides run along x at height `waveguide_height_m`; the n-th one sits
    at y_n = (2n - 1) * L_y / (2N).  Each waveguide spans the full length L_x.
    """

    service_length_m: float
    service_width_m: float
    waveguide_height_m: float
    num_waveguides: int = 1

    def __post_init__(self):
        if self.service_length_m <= 0 or self.service_width_m <= 0:
            raise ValueError("service area dimensions must be positive")
        if self.waveguide_height_m <= 0:
            raise ValueError("waveguide height must be positive")
        if self.num_waveguides < 1:
            raise ValueError(f"need at least one waveguide, got {self.num_waveguides}")

    @property
    def waveguide_y_coords_m(self) -> np.ndarray:
        n = np.arange(1, self.num_waveguides + 1)
        return (2 * n - 1) * self.service_width_m / (2 * self.num_waveguides)

    def contains(self, point: Point3) -> bool:
        return (0.0 <= point.x_m <= self.service_length_m
                and 0.0 <= point.y_m <= self.service_width_m)


def euclidean_distance(a: Point3, b: Point3) -> float:
    return math.dist((a.x_m, a.y_m, a.z_m), (b.x_m, b.y_m, b.z_m))


def dielectric_attenuation(material: WaveguideMaterial, carrier: CarrierConfig) -> AttenuationCoefficient:
    """Power attenuation of a dielectric waveguide dominated by dielectric loss.

    alpha = 2 pi * n_eff * tan(delta) / lambda_0, in nepers per meter.
    """
    alpha = 2.0 * math.pi * material.effective_refractive_index * material.loss_tangent / carrier.wavelength_m
    return AttenuationCoefficient(alpha)


def propagated_power(p_in_w: float, alpha: AttenuationCoefficient, z_m: float) -> float:
    """Power remaining after traveling z meters from the feed point."""
    if p_in_w <= 0:
        raise ValueError(f"input power must be positive, got {p_in_w}")
    if z_m < 0:
        raise ValueError(f"propagation distance must be nonnegative, got {z_m}")
    return p_in_w * math.exp(-alpha.nepers_per_meter * z_m)
