"""Experiment drivers: SE versus antennas, PAPR CCDF versus slots, period feasibility tables."""

import hashlib
import json
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.config import settings
from app.core.errors import ConfigError, FeasibilityError
from app.core.pool import TrialPool, trial_pool
from app.harness.links import SCHEMES, LinkOutcome, build_plan, evaluate_link
from app.schemas.alignment import BeamformerDesign, BinSelectParams
from app.schemas.channel import MultipathChannel, PathComponent, PulseShape
from app.schemas.frame import FeasibilityInputs, FrameParams
from app.schemas.scenario import (
    FeasibilityRow,
    PaprRow,
    RunMetadata,
    RunResult,
    ScenarioConfig,
    SeRow,
)
from app.sim import ddcore
from app.sim.channel import (
    DATA_STREAM,
    apply_channel,
    decompose_channel,
    random_channel,
    rng_for,
    steering_vector,
)
from app.sim.ddam import aligned_path_vectors, design_beamformers, effective_spreads, plan_path_alignment, precode
from app.sim.metrics import ccdf, papr_db, spectral_efficiency

logger = logging.getLogger(__name__)

CI95_Z = 1.96


def config_hash(cfg: ScenarioConfig) -> str:
    document = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(document.encode("utf-8")).hexdigest()


def run_metadata(cfg: ScenarioConfig, **conventions) -> RunMetadata:
    conventions.setdefault("original_denominator", cfg.ddam.original_denominator)
    conventions.setdefault("ddam_mode", cfg.ddam.mode)
    conventions.setdefault("strategy", cfg.ddam.strategy)
    return RunMetadata(
        config_hash=config_hash(cfg),
        seed=cfg.base_seed,
        version=settings.VERSION,
        conventions=conventions,
    )


def scheme_cp_overheads(cfg: ScenarioConfig) -> Dict[str, float]:
    """CP overhead of each scheme for the worst-case delay spread of the channel generator."""
    params = cfg.frame
    tau = cfg.channel_gen.max_delay_s
    baseline = ddcore.cp_overhead(params.bandwidth_hz, tau, params.subcarriers)
    tau_ddam, _ = effective_spreads(
        cfg.ddam.interference_delay_window, cfg.ddam.interference_doppler_window, params, cfg.ddam.mode
    )
    reference = tau if cfg.ddam.original_denominator else None
    ddam = ddcore.cp_overhead(params.bandwidth_hz, tau_ddam, params.subcarriers, reference)
    return {"otfs_baseline": baseline, "ddam_path": ddam, "ddam_bin": ddam}


def numerology_checks(cfg: ScenarioConfig) -> Dict[str, bool]:
    """Whether each scheme's slot duration stays below 1/nu_spread."""
    params = cfg.frame
    nu = ddcore.doppler_spread(cfg.channel_gen.carrier_hz, cfg.channel_gen.max_speed_mps)
    checks = {}
    for scheme in SCHEMES:
        if scheme == "otfs_baseline":
            spread = nu
        else:
            mode = "path" if scheme == "ddam_path" else "bin"
            _, spread = effective_spreads(
                cfg.ddam.interference_delay_window, cfg.ddam.interference_doppler_window, params, mode
            )
        checks[scheme] = spread == 0 or params.slot_duration_s < 1.0 / spread
        if not checks[scheme]:
            logger.warning("%s: slot duration %.3g s is not below 1/nu' = %.3g s",
                           scheme, params.slot_duration_s, 1.0 / spread)
    return checks


def _se_trial(item: Tuple[ScenarioConfig, int, int]) -> LinkOutcome:
    cfg, antennas, trial = item
    return evaluate_link(cfg, antennas, trial)


def _summarise(values: Sequence[float]) -> Tuple[float, float]:
    if not values:
        return math.nan, 0.0
    data = np.asarray(values, dtype=float)
    if data.size < 2:
        return float(data.mean()), 0.0
    return float(data.mean()), float(CI95_Z * data.std(ddof=1) / math.sqrt(data.size))


def run_se_sweep(cfg: ScenarioConfig, pool: Optional[TrialPool] = None) -> RunResult:
    """Mean SE with a 95% confidence half-width per (scheme, M_t).

    Trials that cannot be aligned are logged and left out of the mean; the row carries
    how many were dropped.
    """
    pool = pool or trial_pool
    overheads = scheme_cp_overheads(cfg)
    checks = numerology_checks(cfg)
    items = [(cfg, mt, trial) for mt in cfg.antenna_sweep for trial in range(cfg.trials)]
    logger.info("SE sweep: %d antenna counts x %d trials", len(cfg.antenna_sweep), cfg.trials)
    outcomes = pool.map(_se_trial, items)

    rows: List[SeRow] = []
    for scheme in SCHEMES:
        for mt in cfg.antenna_sweep:
            reports = [o.reports[scheme] for o in outcomes if o.antennas == mt]
            usable = [r for r in reports if r is not None]
            failures = len(reports) - len(usable)
            if failures:
                logger.warning("%s at M_t=%d: %d of %d trials could not be aligned",
                               scheme, mt, failures, len(reports))
            se = [spectral_efficiency(r.sinr, overheads[scheme]) for r in usable]
            mean_se, ci95 = _summarise(se)
            mean_sinr_db, _ = _summarise([r.sinr_db for r in usable])
            rows.append(SeRow(
                scheme=scheme,
                mt=mt,
                mean_se=mean_se,
                ci95=ci95,
                mean_sinr_db=mean_sinr_db,
                cp_overhead=overheads[scheme],
                failures=failures,
            ))

    metadata = run_metadata(cfg, numerology_feasible=checks, se_average="per_realisation")
    return RunResult(kind="se", se_rows=rows, metadata=metadata)


def _papr_trial(item: Tuple[ScenarioConfig, str, int, int]) -> float:
    cfg, scheme, slots, trial = item
    seed = cfg.base_seed + trial
    params = cfg.frame.with_slots(slots)
    rng = rng_for(seed, DATA_STREAM)
    x = ddcore.idzt(ddcore.qam_frame(params, cfg.papr.qam_order, rng))
    if scheme == "otfs_baseline":
        return papr_db(x, cfg.papr.oversample)

    gen = cfg.channel_gen.model_copy(update={"rng_seed": seed})
    channel = random_channel(gen, params)
    design = BeamformerDesign(strategy=cfg.ddam.strategy, total_power_w=cfg.tx_power_w)
    selection = BinSelectParams(threshold_ratio=cfg.ddam.threshold_ratio)
    plan = build_plan(channel, params, cfg.ddam.mode, cfg.ddam.pulse, design, selection)
    return papr_db(precode(x, plan), cfg.papr.oversample)


def papr_points(cfg: ScenarioConfig) -> List[Tuple[str, int]]:
    """(scheme, N) pairs of the PAPR sweep; M*N stays fixed so only the slot count varies."""
    points = [("ddam", n) for n in cfg.slot_sweep]
    points.append(("otfs_baseline", cfg.papr.baseline_slots))
    for scheme, n in points:
        try:
            cfg.frame.with_slots(n)
        except ValueError as exc:
            raise ConfigError(f"{scheme} with N={n}: {exc}") from exc
    return points


def check_baseline_doppler(cfg: ScenarioConfig) -> None:
    params = cfg.frame.with_slots(cfg.papr.baseline_slots)
    nu = ddcore.doppler_spread(cfg.channel_gen.carrier_hz, cfg.channel_gen.max_speed_mps)
    needed = ddcore.min_slots_for_doppler(params.frame_duration_s, nu)
    if params.time_slots < needed:
        raise FeasibilityError(
            f"baseline OTFS needs at least {needed} slots to resolve a {nu:.4g} Hz Doppler spread, "
            f"got {params.time_slots}"
        )


def run_papr_sweep(cfg: ScenarioConfig, pool: Optional[TrialPool] = None) -> RunResult:
    """PAPR CCDF per slot count; DDAM frames are precoded over a fresh channel each trial."""
    pool = pool or trial_pool
    points = papr_points(cfg)
    check_baseline_doppler(cfg)
    thresholds = cfg.papr.thresholds()
    frames = cfg.papr.frames

    rows: List[PaprRow] = []
    for scheme, slots in sorted(points, key=lambda point: point[1]):
        logger.info("PAPR sweep: %s, N=%d, %d frames", scheme, slots, frames)
        samples = pool.map(_papr_trial, [(cfg, scheme, slots, t) for t in range(frames)])
        curve = ccdf(samples, thresholds)
        rows.append(PaprRow(
            scheme=scheme,
            n_slots=slots,
            subcarriers=cfg.frame.num_samples // slots,
            papr_at_1e2_db=curve.quantile_db(1e-2),
            curve=curve,
        ))

    metadata = run_metadata(
        cfg,
        oversample=cfg.papr.oversample,
        qam_order=cfg.papr.qam_order,
        papr_envelope={"ddam": "sum_power", "otfs_baseline": "scalar"},
    )
    return RunResult(kind="papr", papr_rows=rows, metadata=metadata)


def default_feasibility_inputs() -> List[FeasibilityInputs]:
    """Period constraints before and after alignment for a 1 ms frame at 28 GHz / 300 km/h."""
    return [
        FeasibilityInputs(
            label="otfs",
            delay_spread_s=500e-9,
            doppler_spread_hz=15.57e3,
            max_cp_overhead=0.005,
            max_slots=8,
            frame_duration_s=1e-3,
        ),
        FeasibilityInputs(
            label="ddam",
            delay_spread_s=60e-9,
            doppler_spread_hz=2e3,
            max_cp_overhead=0.005,
            max_slots=8,
            frame_duration_s=1e-3,
        ),
    ]


def run_feasibility_report(inputs: Optional[Sequence[FeasibilityInputs]] = None) -> List[FeasibilityRow]:
    rows = []
    for item in inputs if inputs is not None else default_feasibility_inputs():
        result = ddcore.feasible_interval(item)
        if not result.feasible:
            logger.info("%s: infeasible, %s bound %.3g s >= %.3g s",
                        item.label or "input", result.binding_constraint.value,
                        result.lower_bound_s, result.upper_bound_s)
        rows.append(FeasibilityRow(
            label=item.label,
            delay_spread_s=item.delay_spread_s,
            doppler_spread_hz=item.doppler_spread_hz,
            result=result,
            min_slots_for_doppler=ddcore.min_slots_for_doppler(item.frame_duration_s, item.doppler_spread_hz),
        ))
    return rows


class RoundtripReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_max: int
    gain_re: float
    gain_im: float
    max_abs_error: float
    relative_error: float
    residual_ratio: float


def demo_roundtrip(seed: int = 0) -> RoundtripReport:
    """Integer-grid link through precoder, channel and DZT.

    With on-grid paths, ideal sinc pulses and zero-forcing beams the received frame is the
    transmitted one delayed by n_max and scaled by c = sum_p hbar_p^H f_p.
    """
    params = FrameParams.from_grid(1e6, 32, 8)
    rng = rng_for(seed)
    antennas, num_paths = 8, 3
    delays = rng.choice(params.subcarriers // 2, size=num_paths, replace=False)
    dopplers = rng.integers(-params.time_slots // 2 + 1, params.time_slots // 2 + 1, size=num_paths)
    doppler_bin = params.bandwidth_hz / params.num_samples
    paths = [
        PathComponent(
            delay_s=float(delays[p]) / params.bandwidth_hz,
            doppler_hz=float(dopplers[p]) * doppler_bin,
            gain=(rng.standard_normal() + 1j * rng.standard_normal())
            * steering_vector(rng.uniform(-np.pi / 2, np.pi / 2), antennas),
        )
        for p in range(num_paths)
    ]
    channel = MultipathChannel(paths=paths)
    pulse = PulseShape(kind="ideal_sinc")

    sampled = decompose_channel(channel, params)
    plan = plan_path_alignment(sampled)
    vectors = aligned_path_vectors(channel, sampled, params)
    plan = plan.with_beamformers(design_beamformers(vectors))
    gain = sum(np.vdot(g, f) for g, f in zip(vectors, plan.beamformers))

    X = ddcore.qam_frame(params, 16, rng)
    y = apply_channel(precode(ddcore.idzt(X), plan), channel, pulse, 0.0, params)
    Y = ddcore.dzt(y, params).data
    expected = gain * ddcore.delay_shift(X, plan.n_max).data

    error = Y - expected
    fitted = np.vdot(expected, Y) / np.vdot(expected, expected) * expected
    residual = Y - fitted
    report = RoundtripReport(
        n_max=plan.n_max,
        gain_re=float(gain.real),
        gain_im=float(gain.imag),
        max_abs_error=float(np.max(np.abs(error))),
        relative_error=float(np.linalg.norm(error) / np.linalg.norm(expected)),
        residual_ratio=float(np.vdot(residual, residual).real / np.vdot(fitted, fitted).real),
    )
    logger.info("round trip: n_max=%d, relative error %.3e", report.n_max, report.relative_error)
    return report
