"""Delay-Doppler alignment: compensation plans, spatial beamformers and the precoder."""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy import linalg

from app.core.errors import (
    AlignmentError,
    BeamformersUnsetError,
    DegenerateBeamformerError,
    DimensionError,
    NoBinsError,
    RankError,
)
from app.schemas.alignment import (
    AlignmentEntry,
    AlignmentPlan,
    BeamformerDesign,
    BinSelectParams,
)
from app.schemas.channel import BinChannel, MultipathChannel, SampledPath
from app.schemas.frame import FrameParams
from app.sim.channel import signed_bin

logger = logging.getLogger(__name__)

# Relative norm below which a zero-forcing projection is treated as empty.
DEGENERACY_TOLERANCE = 1e-8


def plan_path_alignment(paths: Sequence[SampledPath]) -> AlignmentPlan:
    """One branch per path: kappa_p = n_max - l_pi, b_p = -k_p."""
    if not paths:
        raise AlignmentError("cannot align an empty path set")
    n_max = max(sp.delay_int for sp in paths)
    entries = [
        AlignmentEntry(
            delay_comp=n_max - sp.delay_int,
            doppler_comp=-sp.doppler_bins,
            aligned_delay=sp.delay_int,
            aligned_doppler=sp.doppler_bins,
        )
        for sp in paths
    ]
    return AlignmentPlan(mode="path", entries=entries, n_max=n_max)


def select_bins(bins: BinChannel, params: BinSelectParams) -> List[Tuple[int, int]]:
    """Local maxima of ||h_bin||^2 that reach C times the global maximum.

    Neighbours wrap around in Doppler and are clipped at the delay edges. Bins are
    returned as (signed Doppler index, delay) ordered by decreasing power.
    """
    power = bins.power()
    peak = power.max()
    if not peak > 0:
        raise NoBinsError("bin channel has no energy")

    padded = np.pad(power, ((0, 0), (1, 1)), constant_values=0.0)
    neighbours = np.stack([
        np.roll(power, 1, axis=0),
        np.roll(power, -1, axis=0),
        padded[:, :-2],
        padded[:, 2:],
    ])
    selected = (power >= params.threshold_ratio * peak) & np.all(power >= neighbours, axis=0)
    k_idx, j_idx = np.nonzero(selected)
    if k_idx.size == 0:
        raise NoBinsError("no bin passed the selection rule")

    order = np.argsort(-power[k_idx, j_idx], kind="stable")
    return [
        (signed_bin(int(k_idx[i]), bins.time_slots), int(j_idx[i]) - bins.delay_offset)
        for i in order
    ]


def plan_bin_alignment(bins: BinChannel, params: BinSelectParams = BinSelectParams()) -> AlignmentPlan:
    """One branch per selected bin: kappa_g = n_max - l_g, b_g = -k_g (integer)."""
    selected = select_bins(bins, params)
    logger.debug("selected %d of %d bins", len(selected), bins.time_slots * bins.num_delays)
    n_max = max(m for _, m in selected)
    entries = [
        AlignmentEntry(
            delay_comp=n_max - m,
            doppler_comp=float(-k),
            aligned_delay=m,
            aligned_doppler=float(k),
        )
        for k, m in selected
    ]
    return AlignmentPlan(mode="bin", entries=entries, n_max=n_max, selected_bins=selected)


def aligned_path_vectors(channel: MultipathChannel, paths: Sequence[SampledPath], params: FrameParams) -> List[np.ndarray]:
    """h_p * exp(-j2*pi*k_p*l_pi/(MN)).

    The phase is what the aligned branch of path p picks up at the receiver, so
    beamformers designed on these vectors add the paths coherently.
    """
    MN = params.num_samples
    return [
        path.gain * np.exp(-2j * np.pi * sp.doppler_bins * sp.delay_int / MN)
        for path, sp in zip(channel.paths, paths)
    ]


def aligned_bin_vectors(bins: BinChannel, plan: AlignmentPlan, params: FrameParams) -> List[np.ndarray]:
    """h_bin[k_g, l_g] * exp(-j2*pi*k_g*l_g/(MN)) scaled by 1/N."""
    if plan.mode != "bin":
        raise AlignmentError("plan was not built from DD bins")
    MN = params.num_samples
    N = bins.time_slots
    return [
        bins.at(int(e.aligned_doppler), e.aligned_delay)
        * np.exp(-2j * np.pi * e.aligned_doppler * e.aligned_delay / MN) / N
        for e in plan.entries
    ]


def design_beamformers(vectors: Sequence[np.ndarray], design: BeamformerDesign = BeamformerDesign()) -> List[np.ndarray]:
    """Split the power budget evenly over the branches.

    isi_zf points each beam at its own vector projected onto the orthogonal complement
    of the others (g_d'^H f_d = 0 for d' != d). isi_mrt matches each vector directly.
    """
    if not vectors:
        raise AlignmentError("no channel vectors to design beamformers for")
    G = np.stack([np.asarray(g, dtype=np.complex128).reshape(-1) for g in vectors])
    D, antennas = G.shape
    amplitude = math.sqrt(design.total_power_w / D)

    if design.strategy == "isi_mrt":
        norms = np.linalg.norm(G, axis=1)
        if np.any(norms == 0):
            raise DegenerateBeamformerError("zero channel vector")
        return [amplitude * G[d] / norms[d] for d in range(D)]

    if antennas < D:
        raise RankError(f"zero-forcing {D} branches needs at least {D} antennas, got {antennas}")

    beamformers = []
    for d in range(D):
        target = G[d]
        others = np.delete(G, d, axis=0)
        if others.shape[0]:
            basis = linalg.orth(others.T)
            target = target - basis @ (basis.conj().T @ target)
        norm = np.linalg.norm(target)
        if norm <= DEGENERACY_TOLERANCE * np.linalg.norm(G[d]):
            raise DegenerateBeamformerError(f"branch {d} lies in the span of the other channel vectors")
        beamformers.append(amplitude * target / norm)
    return beamformers


def precode(x: np.ndarray, plan: AlignmentPlan) -> np.ndarray:
    """s[:, n] = sum_d f_d x[(n - kappa_d) mod MN] exp(j2*pi*b_d*n/(MN)); returns M_t x MN."""
    if not plan.has_beamformers:
        raise BeamformersUnsetError("design beamformers before precoding")
    x = np.asarray(x, dtype=np.complex128).reshape(-1)
    MN = x.size
    antennas = plan.entries[0].beamformer.size
    n = np.arange(MN)
    s = np.zeros((antennas, MN), dtype=np.complex128)
    for entry in plan.entries:
        if entry.delay_comp >= MN:
            raise DimensionError(f"delay compensation {entry.delay_comp} exceeds the frame length {MN}")
        if entry.beamformer.size != antennas:
            raise DimensionError("beamformers disagree on the number of antennas")
        branch = np.roll(x, entry.delay_comp) * np.exp(2j * np.pi * entry.doppler_comp * n / MN)
        s += np.outer(entry.beamformer, branch)
    return s


def effective_spreads(
    delay_window: int,
    doppler_window: int,
    params: FrameParams,
    mode: str = "bin",
) -> Tuple[float, float]:
    """Residual spreads after alignment: tau' = 2*N_i*T and nu' = 2*K_i/(N*M*T).

    Path alignment compensates Doppler exactly, so only the delay window remains.
    """
    tau = 2 * delay_window * params.sample_interval_s
    if mode == "path":
        return tau, 0.0
    return tau, 2 * doppler_window / (params.num_samples * params.sample_interval_s)
