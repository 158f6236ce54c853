"""Sparse linear time-variant multipath channel on the sampled OTFS grid."""

import logging
import math
from typing import Optional

import numpy as np

from app.core.errors import DimensionError
from app.schemas.channel import (
    BinChannel,
    ChannelGenConfig,
    MultipathChannel,
    PathComponent,
    PulseShape,
    SampledPath,
)
from app.schemas.frame import FrameParams
from app.sim.ddcore import SPEED_OF_LIGHT

logger = logging.getLogger(__name__)

# Offsets closer than this to an integer are treated as on-grid.
GRID_TOLERANCE = 1e-9


def kmh_to_mps(speed_kmh: float) -> float:
    return speed_kmh / 3.6


# Independent random streams derived from one trial seed.
CHANNEL_STREAM = 0
DATA_STREAM = 1
NOISE_STREAM = 2


def rng_for(seed: int, stream: int = CHANNEL_STREAM) -> np.random.Generator:
    """Counter-based generator; each (seed, stream) pair is its own sequence, independent of scheduling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def _split(value: float):
    nearest = round(value)
    if abs(value - nearest) < GRID_TOLERANCE:
        value = float(nearest)
    whole = math.floor(value + 0.5)
    frac = value - whole
    if frac < -0.5:
        whole -= 1
        frac = value - whole
    return value, int(whole), frac


def decompose(delay_s: float, doppler_hz: float, params: FrameParams) -> SampledPath:
    """Nearest-integer split of l_p = tau/T and k_p = nu*N*M*T, fractions in [-0.5, 0.5)."""
    l_p, l_pi, l_pf = _split(delay_s * params.bandwidth_hz)
    k_p, k_pi, k_pf = _split(doppler_hz * params.num_samples / params.bandwidth_hz)
    return SampledPath(
        delay_samples=l_p,
        delay_int=l_pi,
        delay_frac=l_pf,
        doppler_bins=k_p,
        doppler_int=k_pi,
        doppler_frac=k_pf,
    )


def decompose_channel(channel: MultipathChannel, params: FrameParams):
    return [decompose(p.delay_s, p.doppler_hz, params) for p in channel.paths]


def steering_vector(theta: float, antennas: int) -> np.ndarray:
    """Half-wavelength ULA response a_m = exp(j*pi*m*sin(theta))."""
    m = np.arange(antennas)
    return np.exp(1j * np.pi * m * np.sin(theta))


def random_channel(cfg: ChannelGenConfig, params: Optional[FrameParams] = None) -> MultipathChannel:
    """Draw L paths; the same seed yields the same geometry for any antenna count."""
    rng = rng_for(cfg.rng_seed)
    L = cfg.num_paths
    nu_max = cfg.carrier_hz * cfg.max_speed_mps / SPEED_OF_LIGHT

    delays = rng.uniform(0.0, cfg.max_delay_s, size=L)
    dopplers = rng.uniform(-nu_max, nu_max, size=L)
    angles = rng.uniform(-np.pi / 2, np.pi / 2, size=L)
    alphas = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) * math.sqrt(0.5 / L)

    if cfg.snap_to_grid:
        if params is None:
            raise ValueError("snap_to_grid needs the frame numerology")
        T = params.sample_interval_s
        doppler_bin = 1.0 / (params.num_samples * T)
        delays = np.round(delays / T) * T
        dopplers = np.round(dopplers / doppler_bin) * doppler_bin

    paths = [
        PathComponent(
            delay_s=float(delays[p]),
            doppler_hz=float(dopplers[p]),
            gain=alphas[p] * steering_vector(angles[p], cfg.antennas),
        )
        for p in range(L)
    ]
    logger.debug("seed %d: %d paths, max delay %.3g s, max |doppler| %.3g Hz",
                 cfg.rng_seed, L, float(delays.max()), float(np.abs(dopplers).max()))
    return MultipathChannel(paths=paths)


def check_delays(channel: MultipathChannel, params: FrameParams):
    for p in channel.paths:
        if p.delay_s >= params.slot_duration_s:
            raise DimensionError(
                f"path delay {p.delay_s:.3g}s is not shorter than the slot duration {params.slot_duration_s:.3g}s"
            )


def _shift(signal: np.ndarray, delay: int, circular: bool) -> np.ndarray:
    """out[n] = signal[n - delay]."""
    if circular:
        return np.roll(signal, delay)
    out = np.zeros_like(signal)
    size = signal.size
    if delay >= 0:
        if delay < size:
            out[delay:] = signal[: size - delay]
    elif -delay < size:
        out[: size + delay] = signal[-delay:]
    return out


def apply_channel(
    s: np.ndarray,
    channel: MultipathChannel,
    pulse: PulseShape,
    noise_psd_w_hz: float,
    params: FrameParams,
    rng_seed: int = 0,
    linear_edges: bool = False,
) -> np.ndarray:
    """Sampled LTV channel.

    y[n] = sum_p h_p^H sum_{|z|<=W} s[n - z - l_pi] p(zT - l_pf T) exp(j2*pi*k_p*n/(NM)) + w[n]

    `s` is read cyclically modulo M*N unless `linear_edges` is set, in which case samples
    outside the frame are zero.
    """
    s = np.asarray(s, dtype=np.complex128)
    if s.ndim == 1:
        s = s[np.newaxis, :]
    MN = params.num_samples
    if s.shape != (channel.num_antennas, MN):
        raise DimensionError(f"signal shape {s.shape} does not match ({channel.num_antennas}, {MN})")
    if noise_psd_w_hz < 0:
        raise ValueError("noise PSD must be non-negative")
    check_delays(channel, params)

    n = np.arange(MN)
    circular = not linear_edges
    y = np.zeros(MN, dtype=np.complex128)
    for path in channel.paths:
        sp = decompose(path.delay_s, path.doppler_hz, params)
        combined = path.gain.conj() @ s
        taps = pulse.taps(sp.delay_frac)
        received = np.zeros(MN, dtype=np.complex128)
        for z, tap in zip(range(-pulse.half_width, pulse.half_width + 1), taps):
            if tap != 0:
                received += tap * _shift(combined, z + sp.delay_int, circular)
        y += received * np.exp(2j * np.pi * sp.doppler_bins * n / MN)

    if noise_psd_w_hz > 0:
        sigma2 = noise_psd_w_hz * params.bandwidth_hz
        rng = rng_for(rng_seed, NOISE_STREAM)
        y += math.sqrt(sigma2 / 2) * (rng.standard_normal(MN) + 1j * rng.standard_normal(MN))
    return y


def wrap_doppler(d, time_slots: int) -> np.ndarray:
    """Reduce Doppler offsets to (-N/2, N/2]."""
    d = np.asarray(d, dtype=float)
    return d - time_slots * np.ceil(d / time_slots - 0.5)


def signed_bin(k: int, time_slots: int) -> int:
    return k if k <= time_slots // 2 else k - time_slots


def doppler_kernel(d, time_slots: int) -> np.ndarray:
    """G(d) = sum_c exp(-j2*pi*d*c/N) = (exp(-j2*pi*d) - 1) / (exp(-j2*pi*d/N) - 1).

    Equals N at d = 0 (mod N) and vanishes at the other integers.
    """
    N = time_slots
    d = wrap_doppler(d, N)
    near_zero = np.abs(d) < GRID_TOLERANCE
    integer = (np.abs(d - np.round(d)) < GRID_TOLERANCE) & ~near_zero
    safe = np.where(near_zero | integer, 0.5, d)
    value = (np.exp(-2j * np.pi * safe) - 1) / (np.exp(-2j * np.pi * safe / N) - 1)
    value = np.where(near_zero, N, value)
    return np.where(integer, 0, value)


def bin_channel_response(
    channel: MultipathChannel,
    pulse: PulseShape,
    params: FrameParams,
    delay_bins: Optional[int] = None,
) -> BinChannel:
    """h_bin[k, m] = sum_p h_p p((m - l_p)T) G(k - k_p), pulse truncated to |m - l_pi| <= W.

    `delay_bins` counts the causal delays m = 0..delay_bins-1; acausal taps down to
    m = -W are always kept. A single on-grid path gives N*h_p at its own bin.
    """
    W = pulse.half_width
    N = params.time_slots
    sampled = decompose_channel(channel, params)
    needed = max(sp.delay_int for sp in sampled) + W + 1
    if delay_bins is None:
        delay_bins = needed
    elif delay_bins < needed:
        raise DimensionError(f"delay_bins must be at least {needed}")

    m = np.arange(-W, delay_bins)
    k = np.arange(N)
    response = np.zeros((N, m.size, channel.num_antennas), dtype=np.complex128)
    for path, sp in zip(channel.paths, sampled):
        inside = np.abs(m - sp.delay_int) <= W
        delay_taps = np.where(inside, pulse.at_samples(m - sp.delay_samples), 0.0)
        kernel = doppler_kernel(k - sp.doppler_bins, N)
        response += kernel[:, None, None] * delay_taps[None, :, None] * path.gain[None, None, :]
    return BinChannel(response=response, delay_offset=W, time_slots=N)
