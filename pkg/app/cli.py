"""Command-line front end.

    python -m app.cli feasibility [--config inputs.json] [--out DIR]
    python -m app.cli se-sweep [--config scenario.json] [--override trials=50] [--jobs 8] [--full]
    python -m app.cli papr-sweep [--config scenario.json] [--out DIR]
    python -m app.cli demo-roundtrip [--seed 3]
    python -m app.cli sinr --override antenna_sweep=[32] [--seed 7]

Exit status: 0 on success, 1 for configuration errors, 2 for any other simulation error
(including an infeasible feasibility row).
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from app.core.config import settings
from app.core.errors import ConfigError, SimulationError
from app.core.pool import trial_pool
from app.harness import persistence
from app.harness.links import evaluate_link
from app.harness.sweeps import demo_roundtrip, run_feasibility_report, run_papr_sweep, run_se_sweep
from app.schemas.frame import FeasibilityInputs
from app.schemas.scenario import ScenarioConfig

ROUNDTRIP_TOLERANCE = 1e-9


def _sci(value: float) -> str:
    return np.format_float_scientific(value, precision=2, unique=False, exp_digits=1)


def _read_json(path: Optional[str]) -> Any:
    if path is None:
        return None
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def parse_override(text: str) -> Dict[str, Any]:
    """`a.b.c=value` as a nested dict; the value is parsed as JSON when possible."""
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigError(f"override {text!r} is not of the form KEY=VALUE")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    for part in reversed(key.split(".")):
        value = {part: value}
    return value


def load_scenario(
    config_path: Optional[str] = None,
    overrides: Sequence[str] = (),
    full: bool = False,
    seed: Optional[int] = None,
) -> ScenarioConfig:
    """Profile defaults, then the config file, then overrides in order; seed precedence is
    --seed, then DDAM_SIM_SEED, then the file."""
    profile = ScenarioConfig.full_profile() if full else ScenarioConfig()
    document = profile.model_dump(mode="json")
    # Dropped so that grid overrides re-derive the frame duration.
    document["frame"].pop("frame_duration_s")

    data = _read_json(config_path)
    if data is not None:
        if not isinstance(data, dict):
            raise ConfigError("scenario config must be a JSON object")
        document = _deep_merge(document, data)
    for text in overrides:
        document = _deep_merge(document, parse_override(text))

    if seed is None:
        seed = settings.DDAM_SIM_SEED
    if seed is not None:
        document["base_seed"] = seed
    return ScenarioConfig.model_validate(document)


def load_feasibility_inputs(config_path: Optional[str]) -> Optional[List[FeasibilityInputs]]:
    data = _read_json(config_path)
    if data is None:
        return None
    if isinstance(data, dict):
        data = data.get("inputs", [data])
    if not isinstance(data, list):
        raise ConfigError("feasibility config must be an object, a list, or {\"inputs\": [...]}")
    return [FeasibilityInputs.model_validate(item) for item in data]


def cmd_feasibility(args: argparse.Namespace) -> int:
    rows = run_feasibility_report(load_feasibility_inputs(args.config))
    for row in rows:
        result = row.result
        verdict = "FEASIBLE" if result.feasible else "INFEASIBLE"
        print(f"{verdict} lower={_sci(result.lower_bound_s)} upper={_sci(result.upper_bound_s)}")
    if args.out:
        persistence.write_feasibility_csv(rows, Path(args.out))
    return 0 if all(row.result.feasible for row in rows) else 2


def cmd_se_sweep(args: argparse.Namespace) -> int:
    cfg = load_scenario(args.config, args.override, args.full, args.seed)
    result = run_se_sweep(cfg, trial_pool)
    out = Path(args.out)
    persistence.write_se_csv(result.se_rows, out)
    persistence.write_run_meta(result.metadata, out)
    for row in result.se_rows:
        print(f"{row.scheme:14s} M_t={row.mt:<4d} SE={row.mean_se:.4f} +/- {row.ci95:.4f} bit/s/Hz")
    return 0


def cmd_papr_sweep(args: argparse.Namespace) -> int:
    cfg = load_scenario(args.config, args.override, args.full, args.seed)
    result = run_papr_sweep(cfg, trial_pool)
    out = Path(args.out)
    persistence.write_papr_csv(result.papr_rows, out)
    persistence.write_run_meta(result.metadata, out)
    for row in result.papr_rows:
        print(f"{row.scheme:14s} N={row.n_slots:<4d} PAPR@1e-2={row.papr_at_1e2_db:.2f} dB")
    return 0


def cmd_demo_roundtrip(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else (settings.DDAM_SIM_SEED or 0)
    report = demo_roundtrip(seed)
    print(f"n_max={report.n_max} relative error={report.relative_error:.3e} "
          f"max error={report.max_abs_error:.3e}")
    return 0 if report.relative_error < ROUNDTRIP_TOLERANCE else 2


def cmd_sinr(args: argparse.Namespace) -> int:
    cfg = load_scenario(args.config, args.override, args.full, args.seed)
    outcomes = [evaluate_link(cfg, mt, 0) for mt in cfg.antenna_sweep]
    document = [
        {
            "antennas": o.antennas,
            "seed": o.seed,
            "selected_bins": o.selected_bins,
            "sinr_db": {k: (r.sinr_db if r is not None else None) for k, r in o.reports.items()},
        }
        for o in outcomes
    ]
    print(json.dumps(document, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file (scenario, or feasibility inputs)")
    common.add_argument("--out", default=None, help=f"output directory (default: {settings.OUTPUT_DIR})")
    common.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="dotted config key, JSON value; repeatable, last wins")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    common.add_argument("--full", action="store_true", help="full-size numerology (M=512, N=128)")
    common.add_argument("--seed", type=int, default=None, help="base seed, overrides DDAM_SIM_SEED")

    parser = argparse.ArgumentParser(prog="app.cli", description="DDAM-OTFS link-level simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler, text in (
        ("feasibility", cmd_feasibility, "OTFS period constraints"),
        ("se-sweep", cmd_se_sweep, "spectral efficiency versus transmit antennas"),
        ("papr-sweep", cmd_papr_sweep, "PAPR CCDF versus time slots"),
        ("demo-roundtrip", cmd_demo_roundtrip, "integer-grid perfect reconstruction check"),
        ("sinr", cmd_sinr, "SINR of every scheme on one channel draw"),
    ):
        command = sub.add_parser(name, parents=[common], help=text)
        command.set_defaults(handler=handler)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=settings.LOG_LEVEL, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    sweeping = args.command in ("se-sweep", "papr-sweep")
    if args.out is None and sweeping:
        args.out = settings.OUTPUT_DIR

    if sweeping:
        trial_pool.connect(args.jobs)
    try:
        return args.handler(args)
    except (ConfigError, ValidationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        trial_pool.disconnect()


if __name__ == "__main__":
    sys.exit(main())
