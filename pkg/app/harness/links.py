"""Single-link evaluation: build a plan for one channel draw and score every scheme on it."""

import logging
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.errors import AlignmentError, SignalError
from app.schemas.alignment import AlignmentPlan, BeamformerDesign, BinSelectParams
from app.schemas.channel import BinChannel, MultipathChannel, PulseShape
from app.schemas.frame import FrameParams
from app.schemas.metrics import SinrReport
from app.schemas.scenario import ScenarioConfig
from app.sim import ddcore
from app.sim.channel import (
    DATA_STREAM,
    apply_channel,
    bin_channel_response,
    decompose_channel,
    random_channel,
    rng_for,
    signed_bin,
)
from app.sim.ddam import (
    aligned_bin_vectors,
    aligned_path_vectors,
    design_beamformers,
    plan_bin_alignment,
    plan_path_alignment,
    precode,
)
from app.sim.metrics import empirical_sinr, sinr_bin, sinr_path

logger = logging.getLogger(__name__)

SCHEMES = ("otfs_baseline", "ddam_path", "ddam_bin")


class LinkOutcome(BaseModel):
    """SINR of each scheme on one channel realisation; None marks a scheme that could not be built."""

    model_config = ConfigDict(frozen=True)

    seed: int
    antennas: int
    reports: Dict[str, Optional[SinrReport]]
    selected_bins: int = 0


def build_plan(
    channel: MultipathChannel,
    params: FrameParams,
    mode: str,
    pulse: PulseShape,
    design: BeamformerDesign,
    selection: BinSelectParams = BinSelectParams(),
    bins: Optional[BinChannel] = None,
) -> AlignmentPlan:
    """Alignment plan with beamformers attached."""
    if mode == "path":
        paths = decompose_channel(channel, params)
        plan = plan_path_alignment(paths)
        vectors = aligned_path_vectors(channel, paths, params)
    else:
        if bins is None:
            bins = bin_channel_response(channel, pulse, params)
        plan = plan_bin_alignment(bins, selection)
        vectors = aligned_bin_vectors(bins, plan, params)
        if plan.size != channel.num_paths:
            logger.debug("bin selection kept %d bins for %d paths", plan.size, channel.num_paths)
    return plan.with_beamformers(design_beamformers(vectors, design))


def baseline_beamformer(channel: MultipathChannel, power_w: float) -> np.ndarray:
    """Frequency-flat MRT on the dominant eigenvector of sum_p h_p h_p^H."""
    left, _, _ = np.linalg.svd(channel.gains.T, full_matrices=False)
    return np.sqrt(power_w) * left[:, 0]


def baseline_sinr(
    channel: MultipathChannel,
    params: FrameParams,
    pulse: PulseShape,
    noise_psd_w_hz: float,
    power_w: float,
    rng_seed: int,
    qam_order: int = 16,
) -> SinrReport:
    """Plain OTFS with one MRT beam and a single-tap detector on the strongest DD bin.

    Measured by demodulating one noise-free frame; noise enters analytically.
    """
    f = baseline_beamformer(channel, power_w)
    bins = bin_channel_response(channel, pulse, params)
    scalar = np.abs(bins.response.conj() @ f)
    k_idx, j_idx = np.unravel_index(np.argmax(scalar), scalar.shape)
    k_star = signed_bin(int(k_idx), params.time_slots)
    m_star = int(j_idx) - bins.delay_offset

    x = ddcore.idzt(ddcore.qam_frame(params, qam_order, rng_for(rng_seed, DATA_STREAM)))
    y = apply_channel(np.outer(f, x), channel, pulse, 0.0, params)
    n = np.arange(params.num_samples)
    reference = np.roll(x, m_star) * np.exp(2j * np.pi * k_star * n / params.num_samples)
    return empirical_sinr(y, reference, noise_psd_w_hz * params.bandwidth_hz)


def observation_window(plan: AlignmentPlan, pulse: PulseShape, params: FrameParams) -> slice:
    """Samples whose channel inputs all lie inside the frame.

    Fractional Doppler compensation is not periodic over the frame, so the wrapped
    samples at either edge are excluded from empirical measurements.
    """
    start = pulse.half_width + plan.n_max
    stop = params.num_samples - pulse.half_width
    if stop <= start:
        raise SignalError("frame too short for the pulse support and delay spread")
    return slice(start, stop)


def measure_sinr(
    channel: MultipathChannel,
    plan: AlignmentPlan,
    pulse: PulseShape,
    noise_psd_w_hz: float,
    params: FrameParams,
    frames: int,
    rng_seed: int,
    qam_order: int = 16,
) -> SinrReport:
    """Monte Carlo SINR of an aligned link: fit y[n] onto x[n - n_max] over noise-free frames."""
    rng = rng_for(rng_seed, DATA_STREAM)
    window = observation_window(plan, pulse, params)
    received: List[np.ndarray] = []
    reference: List[np.ndarray] = []
    for _ in range(frames):
        x = ddcore.idzt(ddcore.qam_frame(params, qam_order, rng))
        y = apply_channel(precode(x, plan), channel, pulse, 0.0, params)
        received.append(y[window])
        reference.append(np.roll(x, plan.n_max)[window])
    return empirical_sinr(
        np.concatenate(received),
        np.concatenate(reference),
        noise_psd_w_hz * params.bandwidth_hz,
    )


def evaluate_link(cfg: ScenarioConfig, antennas: int, trial: int) -> LinkOutcome:
    """Score every scheme on the channel drawn for `trial`; alignment failures are recorded as None."""
    seed = cfg.base_seed + trial
    params = cfg.frame
    ddam = cfg.ddam
    gen = cfg.channel_gen.model_copy(update={"antennas": antennas, "rng_seed": seed})
    channel = random_channel(gen, params)
    noise_psd = cfg.noise_power_w / params.bandwidth_hz
    design = BeamformerDesign(strategy=ddam.strategy, total_power_w=cfg.tx_power_w)
    selection = BinSelectParams(threshold_ratio=ddam.threshold_ratio)

    reports: Dict[str, Optional[SinrReport]] = {}
    reports["otfs_baseline"] = baseline_sinr(
        channel, params, ddam.pulse, noise_psd, cfg.tx_power_w, seed, cfg.papr.qam_order
    )

    try:
        plan = build_plan(channel, params, "path", ddam.pulse, design)
        reports["ddam_path"] = sinr_path(
            channel,
            decompose_channel(channel, params),
            plan.beamformers,
            ddam.pulse,
            ddam.interference_delay_window,
            noise_psd,
            params,
        )
    except AlignmentError as exc:
        logger.warning("trial %d, M_t=%d: path alignment failed: %s", trial, antennas, exc)
        reports["ddam_path"] = None

    selected = 0
    try:
        bins = bin_channel_response(channel, ddam.pulse, params)
        plan = build_plan(channel, params, "bin", ddam.pulse, design, selection, bins)
        selected = plan.size
        reports["ddam_bin"] = sinr_bin(
            bins,
            plan,
            ddam.interference_delay_window,
            ddam.interference_doppler_window,
            noise_psd,
            params,
        )
    except AlignmentError as exc:
        logger.warning("trial %d, M_t=%d: bin alignment failed: %s", trial, antennas, exc)
        reports["ddam_bin"] = None

    return LinkOutcome(seed=seed, antennas=antennas, reports=reports, selected_bins=selected)
