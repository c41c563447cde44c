"""Scenario configuration: a flat, diffable key-value text format.

Grammar (one statement per line, ``#`` starts a comment):

    key = value                  scalar (int, float, bool, or string)
    key = v1, v2, v3             list
    seeds = 0..49                inclusive integer range (or a comma list)
    sweep <param> = v1, v2, v3   the swept parameter and its values

At most one ``sweep`` block is allowed.  Unknown keys, unknown sweep axes,
and unknown schemes are rejected with an error naming the offending field.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .channel import ScattererField, StatisticalNlosModel
from .multi_waveguide import MultiWaveguideScenario
from .optimizer import OptimizerConfig
from .physics import (
    AttenuationCoefficient,
    CarrierConfig,
    Point3,
    SystemGeometry,
    dbm_to_watts,
)
from .single_waveguide import SingleWaveguideScenario


class ConfigError(ValueError):
    """Invalid configuration file or option."""


MODES = ("attenuation", "erate-single", "erate-multi", "optimize-single", "optimize-multi")

SWEEP_AXES = ("lx_m", "ly_m", "d_m", "p0_dbm", "noise_dbm", "num_waveguides",
              "num_users", "carrier_ghz", "alpha_db_per_m", "z_m")

SCHEME_NAMES = ("df-pas", "sf-pas", "random-pa", "conventional")


@dataclass
class ScenarioConfig:
    scenario_id: str = "scenario"
    mode: str = "optimize-single"
    lx_m: float = 10.0
    ly_m: float = 10.0
    d_m: float = 1.5
    num_waveguides: int = 1
    num_users: int = 2
    carrier_ghz: float = 28.0
    alpha_db_per_m: float = 1.48
    neff: float = 1.45
    p0_dbm: float = 30.0
    noise_dbm: float = -90.0
    bandwidth_hz: float = 1.0
    nlos_kappa: float = 0.1      # statistical NLoS aggregate as a fraction of eta
    nlos_paths: int = 10
    num_scatterers: int = 10
    reflection_coeff: float = 0.5
    mc_drops: int = 100_000
    schemes: list = field(default_factory=lambda: ["df-pas", "sf-pas"])
    seeds: list = field(default_factory=lambda: [0])
    sweep_name: str | None = None
    sweep_values: list = field(default_factory=list)
    out: str = "results.csv"
    epsilon: float = 1e-4
    max_outer_iters: int = 200
    max_greedy_passes: int = 20
    bls_contraction: float = 0.5
    bls_expansion: float = 1.2

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode '{self.mode}', expected one of {MODES}")
        for key in ("lx_m", "ly_m", "d_m", "carrier_ghz", "bandwidth_hz"):
            if getattr(self, key) <= 0:
                raise ConfigError(f"'{key}' must be positive, got {getattr(self, key)}")
        for key in ("num_waveguides", "num_users", "mc_drops"):
            if getattr(self, key) < 1:
                raise ConfigError(f"'{key}' must be at least 1, got {getattr(self, key)}")
        for key in ("alpha_db_per_m", "nlos_kappa"):
            if getattr(self, key) < 0:
                raise ConfigError(f"'{key}' must be nonnegative, got {getattr(self, key)}")
        if not self.seeds:
            raise ConfigError("'seeds' must name at least one seed")
        for scheme in self.schemes:
            if scheme not in SCHEME_NAMES:
                raise ConfigError(f"unknown scheme '{scheme}', expected one of {SCHEME_NAMES}")
        if self.sweep_name is not None and self.sweep_name not in SWEEP_AXES:
            raise ConfigError(
                f"unknown sweep axis '{self.sweep_name}', expected one of {SWEEP_AXES}")
        if self.mode == "attenuation" and self.sweep_name not in (None, "z_m"):
            raise ConfigError("mode 'attenuation' sweeps 'z_m' only")
        if self.mode != "attenuation" and self.sweep_name == "z_m":
            raise ConfigError("sweep axis 'z_m' is only valid in mode 'attenuation'")

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            epsilon=self.epsilon,
            max_outer_iters=self.max_outer_iters,
            max_greedy_passes=self.max_greedy_passes,
            bls_contraction=self.bls_contraction,
            bls_expansion=self.bls_expansion,
        )

    def with_value(self, name: str, value) -> "ScenarioConfig":
        if not hasattr(self, name):
            raise ConfigError(f"unknown parameter '{name}'")
        kwargs = {f.name: getattr(self, f.name) for f in fields(self)}
        kwargs[name] = value
        return ScenarioConfig(**kwargs)


_LIST_KEYS = ("schemes", "seeds")
_STR_KEYS = ("scenario_id", "mode", "out")
_INT_KEYS = ("num_waveguides", "num_users", "nlos_paths", "num_scatterers",
             "mc_drops", "max_outer_iters", "max_greedy_passes")


def _parse_scalar(token: str):
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    if token.lower() in ("true", "false"):
        return token.lower() == "true"
    return token


def _parse_seed_list(raw: str) -> list:
    raw = raw.strip()
    if ".." in raw and "," not in raw:
        lo, hi = raw.split("..", 1)
        try:
            return list(range(int(lo), int(hi) + 1))
        except ValueError as exc:
            raise ConfigError(f"bad seed range '{raw}'") from exc
    try:
        return [int(tok) for tok in raw.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad seed list '{raw}'") from exc


def parse_config_text(text: str) -> ScenarioConfig:
    valid = {f.name for f in fields(ScenarioConfig)} - {"sweep_name", "sweep_values"}
    kwargs: dict = {}
    sweep_name = None
    sweep_values: list = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{line}'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key.startswith("sweep"):
            axis = key[len("sweep"):].strip()
            if not axis:
                raise ConfigError(f"line {lineno}: sweep requires a parameter name")
            if sweep_name is not None:
                raise ConfigError(f"line {lineno}: only one sweep block is allowed")
            sweep_name = axis
            sweep_values = [_parse_scalar(tok) for tok in value.split(",")]
            continue
        if key not in valid:
            raise ConfigError(f"line {lineno}: unknown config key '{key}'")
        if key == "seeds":
            kwargs[key] = _parse_seed_list(value)
        elif key == "schemes":
            kwargs[key] = [tok.strip() for tok in value.split(",")]
        elif key in _STR_KEYS:
            kwargs[key] = value
        else:
            parsed = _parse_scalar(value)
            if isinstance(parsed, str):
                raise ConfigError(f"line {lineno}: key '{key}' expects a number, got '{value}'")
            kwargs[key] = int(parsed) if key in _INT_KEYS else float(parsed)
    return ScenarioConfig(sweep_name=sweep_name, sweep_values=sweep_values, **kwargs)


def load_config(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def _unit_drops(seed, stream: int, count: int) -> np.ndarray:
    """Unit-square coordinates tied to the seed only, so sweeps stay paired."""
    rng = np.random.default_rng([int(seed), stream])
    return rng.random((count, 2))


def build_single_scenario(config: ScenarioConfig, seed) -> SingleWaveguideScenario:
    carrier = CarrierConfig(config.carrier_ghz * 1e9)
    geometry = SystemGeometry(config.lx_m, config.ly_m, config.d_m, num_waveguides=1)
    unit = _unit_drops(seed, 1, config.num_users)
    users = [Point3(float(u * config.lx_m), float(v * config.ly_m), 0.0) for u, v in unit]
    nlos = None
    if config.nlos_kappa > 0 and config.nlos_paths > 0:
        nlos = StatisticalNlosModel.equal_weights(
            config.nlos_paths, config.nlos_kappa * carrier.los_constant)
    return SingleWaveguideScenario(
        geometry=geometry,
        carrier=carrier,
        alpha=AttenuationCoefficient.from_db_per_meter(config.alpha_db_per_m),
        injected_power_w=dbm_to_watts(config.p0_dbm),
        noise_power_w=dbm_to_watts(config.noise_dbm) * config.bandwidth_hz,
        users=users,
        nlos=nlos,
    )


def build_multi_scenario(config: ScenarioConfig, seed) -> MultiWaveguideScenario:
    carrier = CarrierConfig(config.carrier_ghz * 1e9)
    geometry = SystemGeometry(config.lx_m, config.ly_m, config.d_m,
                              num_waveguides=config.num_waveguides)
    unit = _unit_drops(seed, 1, config.num_users)
    users = [Point3(float(u * config.lx_m), float(v * config.ly_m), 0.0) for u, v in unit]
    scatterers = None
    if config.num_scatterers > 0:
        sc_unit = _unit_drops(seed, 2, config.num_scatterers)
        positions = tuple(Point3(float(u * config.lx_m), float(v * config.ly_m), 0.0)
                          for u, v in sc_unit)
        gammas = tuple([complex(config.reflection_coeff)] * config.num_scatterers)
        scatterers = ScattererField(positions, gammas)
    return MultiWaveguideScenario(
        geometry=geometry,
        carrier=carrier,
        alpha=AttenuationCoefficient.from_db_per_meter(config.alpha_db_per_m),
        total_power_w=dbm_to_watts(config.p0_dbm),
        noise_power_w=dbm_to_watts(config.noise_dbm) * config.bandwidth_hz,
        users=users,
        scatterers=scatterers,
        effective_refractive_index=config.neff,
    )
