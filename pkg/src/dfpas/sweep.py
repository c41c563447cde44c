"""Experiment sweeps and flat-file persistence.

A sweep expands into cells (swept value x scheme x seed), runs each cell's
pipeline, and collects one row per emitted metric.  Cells may execute in a
thread pool; rows are always assembled in cell order so output is
deterministic regardless of worker count.  CSV files start with a single
timestamped comment line; every other byte is reproducible from the config.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor

from .config import ConfigError, ScenarioConfig, build_multi_scenario, build_single_scenario
from .montecarlo import McConfig, mc_ergodic_rate_multi, mc_ergodic_rate_single
from .multi_waveguide import ergodic_rate_multi_closed
from .physics import AttenuationCoefficient, dbm_to_watts, propagated_power
from .schemes import SCHEMES
from .single_waveguide import ergodic_rate_df_closed, ergodic_rate_sf_closed

CSV_COLUMNS = ("scenario_id", "scheme", "seed", "swept_name", "swept_value",
               "metric", "value", "ci_halfwidth", "runtime_ms")

FILE_TAG = "dfpas-sweep-v1"
TRACE_SCHEMA_VERSION = 1


def _row(config: ScenarioConfig, scheme, seed, swept_value, metric, value,
         ci=None, runtime_ms=0.0) -> dict:
    return {
        "scenario_id": config.scenario_id,
        "scheme": scheme,
        "seed": seed,
        "swept_name": config.sweep_name or "",
        "swept_value": swept_value if swept_value is not None else "",
        "metric": metric,
        "value": value,
        "ci_halfwidth": ci if ci is not None else "",
        "runtime_ms": runtime_ms,
    }


def _erate_policy(scheme: str, mode: str) -> str:
    if mode == "erate-single":
        if scheme == "df-pas":
            return "df"
        if scheme == "sf-pas":
            return "sf"
    elif scheme == "df-pas":
        return "df"
    raise ConfigError(f"scheme '{scheme}' is not supported in mode '{mode}'")


def _run_cell(config: ScenarioConfig, swept_value, scheme, seed) -> list:
    start = time.perf_counter()
    cell = config if config.sweep_name is None \
        else config.with_value(config.sweep_name, swept_value)
    rows = []

    if cell.mode == "erate-single":
        policy = _erate_policy(scheme, cell.mode)
        scenario = build_single_scenario(cell, seed)
        closed = ergodic_rate_df_closed(scenario) if policy == "df" \
            else ergodic_rate_sf_closed(scenario)
        estimate = mc_ergodic_rate_single(
            scenario, policy, McConfig(num_drops=cell.mc_drops, rng_seed=seed))
        elapsed = (time.perf_counter() - start) * 1e3
        rows.append(_row(cell, scheme, seed, swept_value, "rate_closed", closed,
                         runtime_ms=elapsed))
        rows.append(_row(cell, scheme, seed, swept_value, "rate_mc", estimate.mean_rate,
                         ci=estimate.ci_halfwidth, runtime_ms=elapsed))
    elif cell.mode == "erate-multi":
        _erate_policy(scheme, cell.mode)
        scenario = build_multi_scenario(cell, seed)
        closed = ergodic_rate_multi_closed(scenario)
        estimate = mc_ergodic_rate_multi(
            scenario, McConfig(num_drops=cell.mc_drops, rng_seed=seed))
        elapsed = (time.perf_counter() - start) * 1e3
        rows.append(_row(cell, scheme, seed, swept_value, "rate_closed", closed,
                         runtime_ms=elapsed))
        rows.append(_row(cell, scheme, seed, swept_value, "rate_mc", estimate.mean_rate,
                         ci=estimate.ci_halfwidth, runtime_ms=elapsed))
    elif cell.mode in ("optimize-single", "optimize-multi"):
        runner = SCHEMES[scheme]
        if cell.mode == "optimize-single":
            scenario = build_single_scenario(cell, seed)
            report = runner(scenario, seed) if scheme == "random-pa" else runner(scenario)
        else:
            scenario = build_multi_scenario(cell, seed)
            opt = cell.optimizer_config()
            report = runner(scenario, seed, opt) if scheme == "random-pa" \
                else runner(scenario, opt)
        elapsed = (time.perf_counter() - start) * 1e3
        rows.append(_row(cell, scheme, seed, swept_value, "sum_rate", report.sum_rate,
                         runtime_ms=elapsed))
    else:
        raise ConfigError(f"mode '{cell.mode}' does not run scheme cells")
    return rows


def run_sweep(config: ScenarioConfig, threads: int = 1) -> list:
    """Expand and run all sweep cells; returns CSV-ready row dicts in cell order."""
    if config.mode == "attenuation":
        return _run_attenuation(config)
    swept = config.sweep_values if config.sweep_name is not None else [None]
    cells = [(value, scheme, seed)
             for value in swept
             for scheme in config.schemes
             for seed in config.seeds]
    if threads > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _run_cell(config, *c), cells))
    else:
        results = [_run_cell(config, *cell) for cell in cells]
    return [row for cell_rows in results for row in cell_rows]


def _run_attenuation(config: ScenarioConfig) -> list:
    if config.sweep_name != "z_m" or not config.sweep_values:
        raise ConfigError("mode 'attenuation' requires a 'sweep z_m = ...' block")
    alpha = AttenuationCoefficient.from_db_per_meter(config.alpha_db_per_m)
    p_in = dbm_to_watts(config.p0_dbm)
    seed = config.seeds[0]
    rows = []
    for z in config.sweep_values:
        start = time.perf_counter()
        power = propagated_power(p_in, alpha, float(z))
        rows.append(_row(config, "waveguide", seed, z, "power_w", power,
                         runtime_ms=(time.perf_counter() - start) * 1e3))
    return rows


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(rows: list, path, timestamp: str | None = None) -> None:
    """Write rows with the fixed column set behind one timestamped comment line."""
    if timestamp is None:
        timestamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(f"# {FILE_TAG} generated={timestamp}\n")
            writer = csv.writer(handle)
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow([_format_value(row[col]) for col in CSV_COLUMNS])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def parse_csv(path) -> list:
    """Read back an emitted CSV; numeric fields are restored exactly."""
    rows = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            lines = [line for line in handle if not line.startswith("#")]
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc}") from exc
    reader = csv.DictReader(lines)
    for record in reader:
        row = dict(record)
        for key in ("swept_value", "value", "ci_halfwidth", "runtime_ms"):
            if row[key] == "":
                row[key] = ""
            else:
                number = float(row[key])
                row[key] = int(number) if number.is_integer() and "." not in row[key] \
                    and "e" not in row[key].lower() else number
        row["seed"] = int(row["seed"])
        rows.append(row)
    return rows


def emit_json(records: list, path) -> None:
    """Write a versioned JSON trace (list of dict records)."""
    payload = {"schema_version": TRACE_SCHEMA_VERSION, "records": records}
    try:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True)
            handle.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write JSON trace to {path}: {exc}") from exc
