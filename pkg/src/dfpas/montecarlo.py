"""Seeded Monte Carlo estimation of ergodic rates over uniform user drops.

Estimates use the exact log2(1 + SNR) integrand, not the high-SNR surrogate,
so comparisons against the closed forms quantify the approximation error.
Drops are addressed by (seed, index): a run covering drops [a, b) reproduces
exactly the drops a full run would have produced at those indices, so
disjoint index ranges of the same seed pool to the full-run mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .channel import StatisticalNlosModel
from .multi_waveguide import MultiWaveguideScenario
from .single_waveguide import SingleWaveguideScenario

POLICIES = ("df", "sf")


@dataclass
class McConfig:
    num_drops: int = 100_000
    rng_seed: int = 0
    confidence_level: float = 0.95
    los_only: bool = True
    drop_start: int = 0     # index of the first drop, for split/pooled runs

    def __post_init__(self):
        if self.num_drops < 1:
            raise ValueError("need at least one drop")
        if not 0.0 < self.confidence_level < 1.0:
            raise ValueError("confidence level must lie in (0, 1)")
        if self.drop_start < 0:
            raise ValueError("drop start must be nonnegative")


@dataclass(frozen=True)
class McEstimate:
    mean_rate: float
    std_error: float
    ci_halfwidth: float
    num_drops: int


def _finish(rates: np.ndarray, cfg: McConfig) -> McEstimate:
    mean = float(rates.mean())
    se = float(rates.std(ddof=1) / math.sqrt(rates.size)) if rates.size > 1 else 0.0
    z = float(stats.norm.ppf(0.5 * (1.0 + cfg.confidence_level)))
    return McEstimate(mean, se, z * se, rates.size)


def _drop_uniforms(cfg: McConfig, cols: int) -> np.ndarray:
    """Uniforms for drops [drop_start, drop_start + num_drops), addressed by index."""
    gen = np.random.Generator(np.random.Philox(key=cfg.rng_seed))
    return gen.random((cfg.drop_start + cfg.num_drops, cols))[cfg.drop_start:]


def _drop_normals(cfg: McConfig, cols: int) -> np.ndarray:
    # separate key stream so uniform addressing is unaffected by NLoS sampling
    gen = np.random.Generator(np.random.Philox(key=cfg.rng_seed + (1 << 64)))
    return gen.standard_normal((cfg.drop_start + cfg.num_drops, cols))[cfg.drop_start:]


def mc_ergodic_rate_single(scenario: SingleWaveguideScenario, policy: str,
                           cfg: McConfig) -> McEstimate:
    """Ergodic rate of the single-waveguide system over uniform user drops.

    The pinch tracks the user; policy "df" injects from the nearer feed
    (z = min(x, L_x - x)) and "sf" always from the left feed (z = x).  With
    `los_only` unset, one statistical NLoS realization is drawn per drop.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}, expected one of {POLICIES}")
    geo = scenario.geometry
    u = _drop_uniforms(cfg, 2)
    x = u[:, 0] * geo.service_length_m
    y = u[:, 1] * geo.service_width_m
    z = np.minimum(x, geo.service_length_m - x) if policy == "df" else x
    r2 = y**2 + geo.waveguide_height_m**2
    decay = np.exp(-scenario.alpha.nepers_per_meter * z)

    if cfg.los_only:
        gamma = (scenario.injected_power_w * scenario.carrier.los_constant
                 / scenario.noise_power_w) * decay / r2
    else:
        model = scenario.nlos_model(0)
        if not isinstance(model, StatisticalNlosModel):
            raise ValueError("sampling NLoS requires a statistical NLoS model on the scenario")
        r = np.sqrt(r2)
        h = np.sqrt(scenario.carrier.los_constant) / r \
            * np.exp(-2j * math.pi * r / scenario.carrier.wavelength_m)
        if model.num_paths:
            draws = _drop_normals(cfg, 2 * model.num_paths)
            weights = np.sqrt(np.asarray(model.path_power_weights) / 2.0)
            g = (draws[:, ::2] + 1j * draws[:, 1::2]) * weights[None, :]
            h = h + g.sum(axis=1) / r
        gamma = scenario.injected_power_w * decay * np.abs(h) ** 2 / scenario.noise_power_w

    return _finish(np.log2(1.0 + gamma), cfg)


def mc_ergodic_rate_multi(scenario: MultiWaveguideScenario, cfg: McConfig) -> McEstimate:
    """Ergodic rate of the equal-power phase-aligned multi-waveguide scheme.

    LoS-only by construction: every pinch tracks the dropped user's x with
    the nearer feed active, and the per-waveguide amplitudes add coherently.
    """
    geo = scenario.geometry
    u = _drop_uniforms(cfg, 2)
    x = u[:, 0] * geo.service_length_m
    y = u[:, 1] * geo.service_width_m
    z = np.minimum(x, geo.service_length_m - x)
    dists = np.sqrt((y[:, None] - geo.waveguide_y_coords_m[None, :]) ** 2
                    + geo.waveguide_height_m**2)
    coherent = np.sum(1.0 / dists, axis=1) ** 2
    gamma = (scenario.total_power_w * scenario.carrier.los_constant
             / (geo.num_waveguides * scenario.noise_power_w)
             * np.exp(-scenario.alpha.nepers_per_meter * z) * coherent)
    return _finish(np.log2(1.0 + gamma), cfg)
