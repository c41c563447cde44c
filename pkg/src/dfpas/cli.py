"""Batch command-line interface.

Subcommands map to the experiment families: ``attenuation`` (power decay
curve), ``erate-single`` / ``erate-multi`` (closed-form vs Monte Carlo
ergodic rates), ``optimize-single`` / ``optimize-multi`` (benchmark scheme
sum rates), the generic ``sweep`` (mode taken from the config file), and
``validate`` (runs the acceptance suite).

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .sweep import emit_csv, emit_json, run_sweep

_MODE_COMMANDS = ("attenuation", "erate-single", "erate-multi",
                  "optimize-single", "optimize-multi", "sweep")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfpas",
        description="Dual-fed pinching-antenna system simulator and optimizer.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _MODE_COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} pipeline")
        cmd.add_argument("--config", required=True, help="path to a scenario config file")
        cmd.add_argument("--out", default=None, help="output CSV path (overrides config)")
        cmd.add_argument("--seed", type=int, default=None, help="run a single seed")
        cmd.add_argument("--drops", type=int, default=None, help="Monte Carlo drop count")
        cmd.add_argument("--threads", type=int, default=1, help="worker threads for sweep cells")
        cmd.add_argument("--trace", default=None,
                         help="also write the optimizer trace JSON here (optimize modes)")
    val = sub.add_parser("validate", help="run the acceptance suite with pytest")
    val.add_argument("--config", default=None, help=argparse.SUPPRESS)
    return parser


def _run_validate() -> int:
    tests = Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"
    if not tests.exists():
        print(f"acceptance suite not found at {tests}; run from a source checkout",
              file=sys.stderr)
        return 2
    proc = subprocess.run([sys.executable, "-m", "pytest", "-v", str(tests)])
    return proc.returncode


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "validate":
        return _run_validate()

    try:
        config = load_config(args.config)
        if args.command != "sweep" and config.mode != args.command:
            raise ConfigError(
                f"config mode '{config.mode}' does not match subcommand '{args.command}'")
        if args.seed is not None:
            config.seeds = [args.seed]
        if args.drops is not None:
            config.mc_drops = args.drops
        out_path = args.out if args.out is not None else config.out
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        rows = run_sweep(config, threads=args.threads)
        emit_csv(rows, out_path)
        if args.trace is not None and config.mode in ("optimize-single", "optimize-multi"):
            trace = _collect_trace(config)
            emit_json(trace, args.trace)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical or I/O failure
        print(f"run failed: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


def _collect_trace(config) -> list:
    """Convergence trace of the dual-fed optimizer on the first cell."""
    from .config import build_multi_scenario
    from .optimizer import two_phase_optimize

    if config.mode != "optimize-multi":
        raise ConfigError("trace output requires mode 'optimize-multi'")
    cell = config if config.sweep_name is None \
        else config.with_value(config.sweep_name, config.sweep_values[0])
    scenario = build_multi_scenario(cell, config.seeds[0])
    result = two_phase_optimize(scenario, cell.optimizer_config())
    return [record.to_dict() for record in result.trace]


if __name__ == "__main__":
    sys.exit(main())
