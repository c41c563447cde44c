"""Complex channel coefficients between pinching antennas and users.

Three ingredients:

* a spherical-wave line-of-sight term,
* two NLoS models (a statistical cluster model used by the single-waveguide
  analysis, and a deterministic geometric double-bounce scatterer model used
  by the multi-waveguide system),
* the equivalent in-waveguide response nu accounting for attenuation and the
  guided-phase rotation between the active feed and the pinch position.

The two NLoS formalisms are never mixed within one experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .physics import (
    AttenuationCoefficient,
    CarrierConfig,
    Point3,
    SystemGeometry,
    WaveguideMaterial,
    dielectric_attenuation,
    euclidean_distance,
)


def los_gain(pa_pos: Point3, user_pos: Point3, carrier: CarrierConfig) -> complex:
    """Spherical-wave LoS gain sqrt(eta) * exp(-j 2 pi r / lambda) / r."""
    r = euclidean_distance(pa_pos, user_pos)
    if r == 0.0:
        raise ValueError("LoS gain is singular: antenna and user positions coincide")
    phase = -2.0 * math.pi * r / carrier.wavelength_m
    return math.sqrt(carrier.los_constant) / r * complex(math.cos(phase), math.sin(phase))


@dataclass(frozen=True)
class StatisticalNlosModel:
    """Cluster-based NLoS model: a sum of independent complex-Gaussian path gains.

    Path k has average power weight w_k; at antenna-user distance r the
    sampled gain is CN(0, w_k / r^2).  The aggregate power sum(w_k) is the
    distance-normalized NLoS power that adds to the LoS constant in
    expected-power expressions.
    """

    path_power_weights: tuple

    def __post_init__(self):
        if any(w < 0 for w in self.path_power_weights):
            raise ValueError("path power weights must be nonnegative")

    @property
    def num_paths(self) -> int:
        return len(self.path_power_weights)

    @property
    def aggregate_power(self) -> float:
        return float(sum(self.path_power_weights))

    @classmethod
    def equal_weights(cls, num_paths: int, aggregate_power: float) -> "StatisticalNlosModel":
        if num_paths == 0:
            return cls(())
        return cls(tuple([aggregate_power / num_paths] * num_paths))


def sample_statistical_nlos(model: StatisticalNlosModel, r_m: float, rng) -> complex:
    """Draw one NLoS realization at distance r_m. `rng` is a seed or Generator."""
    if r_m <= 0:
        raise ValueError(f"antenna-user distance must be positive, got {r_m}")
    if model.num_paths == 0:
        return 0j
    gen = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    scales = np.sqrt(np.asarray(model.path_power_weights) / (2.0 * r_m**2))
    draws = gen.standard_normal((model.num_paths, 2))
    g = (draws[:, 0] + 1j * draws[:, 1]) * scales
    return complex(g.sum())


@dataclass(frozen=True)
class ScattererField:
    """Fixed scatterer positions (on the ground plane) and reflection coefficients."""

    positions: tuple            # of Point3, all with z = 0
    reflection_coefficients: tuple  # of complex, |Gamma| <= 1

    def __post_init__(self):
        if len(self.positions) != len(self.reflection_coefficients):
            raise ValueError("need one reflection coefficient per scatterer")
        if any(abs(g) > 1.0 + 1e-12 for g in self.reflection_coefficients):
            raise ValueError("reflection coefficient magnitudes must not exceed 1")

    @property
    def num_scatterers(self) -> int:
        return len(self.positions)

    @classmethod
    def uniform(cls, geometry: SystemGeometry, num_scatterers: int = 10,
                reflection: complex = 0.5, rng=None) -> "ScattererField":
        """Scatterers dropped i.i.d. uniformly over the service rectangle at z = 0."""
        gen = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        xy = gen.uniform(size=(num_scatterers, 2)) * np.array(
            [geometry.service_length_m, geometry.service_width_m])
        positions = tuple(Point3(float(x), float(y), 0.0) for x, y in xy)
        return cls(positions, tuple([complex(reflection)] * num_scatterers))

    def to_dict(self) -> dict:
        return {
            "positions": [[p.x_m, p.y_m, p.z_m] for p in self.positions],
            "reflection_coefficients": [[g.real, g.imag]
                                        for g in map(complex, self.reflection_coefficients)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScattererField":
        positions = tuple(Point3(*map(float, p)) for p in data["positions"])
        gammas = tuple(complex(re, im) for re, im in data["reflection_coefficients"])
        return cls(positions, gammas)


def geometric_nlos(pa_pos: Point3, user_pos: Point3, field: ScattererField,
                   carrier: CarrierConfig) -> complex:
    """Deterministic double-bounce NLoS sum over the scatterer field.

    Each scatterer contributes Gamma_k * e^{-j k d1}/d1 * e^{-j k d2}/d2 with
    d1 the antenna-scatterer and d2 the user-scatterer distance.
    """
    if field.num_scatterers == 0:
        return 0j
    sc = np.array([[p.x_m, p.y_m, p.z_m] for p in field.positions])
    d1 = np.linalg.norm(sc - pa_pos.as_array(), axis=1)
    d2 = np.linalg.norm(sc - user_pos.as_array(), axis=1)
    if np.any(d1 == 0) or np.any(d2 == 0):
        raise ValueError("NLoS gain is singular: scatterer coincides with antenna or user")
    k = 2.0 * math.pi / carrier.wavelength_m
    gammas = np.array(field.reflection_coefficients, dtype=complex)
    terms = gammas * np.exp(-1j * k * d1) / d1 * np.exp(-1j * k * d2) / d2
    return complex(terms.sum())


@dataclass(frozen=True)
class WaveguideSpec:
    """One waveguide: length, attenuation, and the guided wavelength."""

    length_m: float
    alpha: AttenuationCoefficient
    guided_wavelength_m: float

    def __post_init__(self):
        if self.length_m <= 0:
            raise ValueError(f"waveguide length must be positive, got {self.length_m}")
        if self.guided_wavelength_m <= 0:
            raise ValueError("guided wavelength must be positive")

    @classmethod
    def from_material(cls, length_m: float, material: WaveguideMaterial,
                      carrier: CarrierConfig) -> "WaveguideSpec":
        return cls(
            length_m=length_m,
            alpha=dielectric_attenuation(material, carrier),
            guided_wavelength_m=carrier.wavelength_m / material.effective_refractive_index,
        )


def in_waveguide_response(xi: int, x_pin: float, wg: WaveguideSpec) -> complex:
    """Equivalent in-waveguide response nu between the active feed and the pinch.

    nu = exp(-(alpha/2 + j 2 pi / lambda_g) * z) with z the feed-to-pinch
    distance: x_pin from the left feed (xi = 1) or length - x_pin from the
    right feed (xi = 0).  |nu|^2 = exp(-alpha z) is the power survival ratio.
    """
    if xi not in (0, 1):
        raise ValueError(f"feed indicator must be 0 or 1, got {xi}")
    if not 0.0 <= x_pin <= wg.length_m:
        raise ValueError(f"pinch position {x_pin} outside waveguide [0, {wg.length_m}]")
    z = xi * x_pin + (1 - xi) * (wg.length_m - x_pin)
    rate = complex(0.5 * wg.alpha.nepers_per_meter, 2.0 * math.pi / wg.guided_wavelength_m)
    return complex(np.exp(-rate * z))


def effective_channel(pa_pos: Point3, user_pos: Point3, xi: int, carrier: CarrierConfig,
                      wg: WaveguideSpec, nlos=None, rng=None) -> complex:
    """Composite feed-input to user channel nu * (h_los + h_nlos).

    `nlos` may be None (LoS only), a ScattererField (deterministic), or a
    StatisticalNlosModel (sampled; requires `rng`).
    """
    h = los_gain(pa_pos, user_pos, carrier)
    if isinstance(nlos, ScattererField):
        h += geometric_nlos(pa_pos, user_pos, nlos, carrier)
    elif isinstance(nlos, StatisticalNlosModel):
        if rng is None:
            raise ValueError("statistical NLoS sampling requires an rng")
        h += sample_statistical_nlos(nlos, euclidean_distance(pa_pos, user_pos), rng)
    elif nlos is not None:
        raise TypeError(f"unsupported NLoS model type: {type(nlos)!r}")
    return in_waveguide_response(xi, pa_pos.x_m, wg) * h
