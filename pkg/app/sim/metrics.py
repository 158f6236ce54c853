"""Link metrics: analytic SINR of both alignment modes, spectral efficiency, PAPR and its CCDF."""

import math
from typing import Optional, Sequence

import numpy as np
from scipy import fft

from app.core.errors import AlignmentError, SignalError
from app.schemas.alignment import AlignmentPlan
from app.schemas.channel import BinChannel, MultipathChannel, PulseShape, SampledPath
from app.schemas.frame import FrameParams
from app.schemas.metrics import CcdfCurve, SinrReport
from app.sim.channel import signed_bin
from app.sim.ddam import aligned_path_vectors


def sinr_path(
    channel: MultipathChannel,
    paths: Sequence[SampledPath],
    beamformers: Sequence[np.ndarray],
    pulse: PulseShape,
    delay_window: int,
    noise_psd_w_hz: float,
    params: FrameParams,
) -> SinrReport:
    """SINR of path-based alignment.

    The aligned branches combine into an equivalent single-path ISI channel with taps
    a[z] = sum_p hbar_p^H f_p p(zT - l_pf T) exp(j2*pi*k_p*z/(NM)); a[0] is the signal and
    every other tap inside the pulse support is interference. Branches whose beam leaks
    into another path (h_p^H f_p' != 0 for p != p') arrive misaligned and are counted as
    interference with their full pulse energy.
    """
    if len(beamformers) != len(paths) or len(paths) != channel.num_paths:
        raise AlignmentError("need exactly one beamformer per path")
    MN = params.num_samples
    W = pulse.half_width
    z = np.arange(-W, W + 1)
    hbar = aligned_path_vectors(channel, paths, params)

    taps = np.zeros(z.size, dtype=np.complex128)
    leakage = 0.0
    for p, sp in enumerate(paths):
        pulse_taps = pulse.taps(sp.delay_frac)
        taps += np.vdot(hbar[p], beamformers[p]) * pulse_taps * np.exp(2j * np.pi * sp.doppler_bins * z / MN)
        pulse_energy = float(np.sum(pulse_taps ** 2))
        for q, f in enumerate(beamformers):
            if q != p:
                leakage += abs(np.vdot(channel.paths[p].gain, f)) ** 2 * pulse_energy

    power = np.abs(taps) ** 2
    centre = W
    signal = float(power[centre])
    isi = float(power.sum() - power[centre])
    in_window = (np.abs(z) <= delay_window) & (z != 0)
    return SinrReport.from_powers(
        signal_power=signal,
        interference_power=isi + leakage,
        noise_power=noise_psd_w_hz * params.bandwidth_hz,
        window_interference_power=float(power[in_window].sum()),
    )


def sinr_bin(
    bins: BinChannel,
    plan: AlignmentPlan,
    delay_window: int,
    doppler_window: int,
    noise_psd_w_hz: float,
    params: FrameParams,
    beamformers: Optional[Sequence[np.ndarray]] = None,
) -> SinrReport:
    """SINR of bin-based alignment.

    For every DD offset (i, z) the branches contribute
    sum_g' h_bin^H[k_g' + i, l_g' + z] f_g' theta'(i, z, g') / N, with
    theta' = exp(j2*pi*[i*(n_max + z) + k_g'*(z + l_g')]/(MN)). Offset (0, 0) is the signal.
    All N Doppler offsets and the full delay support are summed; the K_i/N_i window only
    splits out the reported share.
    """
    if plan.mode != "bin":
        raise AlignmentError("plan was not built from DD bins")
    if beamformers is None:
        if not plan.has_beamformers:
            raise AlignmentError("plan has no beamformers")
        beamformers = plan.beamformers
    if len(beamformers) != plan.size:
        raise AlignmentError(f"expected {plan.size} beamformers, got {len(beamformers)}")

    N = bins.time_slots
    MN = params.num_samples
    J = bins.num_delays
    offset = bins.delay_offset
    z_centre = J - 1
    i_signed = np.array([signed_bin(i, N) for i in range(N)])
    z_all = np.arange(-(J - 1), J)

    combined = np.zeros((N, 2 * J - 1), dtype=np.complex128)
    for entry, f in zip(plan.entries, beamformers):
        k_g = int(entry.aligned_doppler)
        l_g = entry.aligned_delay
        # Row i holds Doppler bin k_g + i; column j holds delay j - offset.
        response = np.roll(bins.response, -k_g, axis=0).conj() @ np.asarray(f) / N
        start = z_centre - (l_g + offset)
        z = z_all[start:start + J]
        theta = np.exp(2j * np.pi * (np.outer(i_signed, plan.n_max + z) + k_g * (z + l_g)[None, :]) / MN)
        combined[:, start:start + J] += response * theta

    power = np.abs(combined) ** 2
    signal = float(power[0, z_centre])
    interference = float(power.sum() - signal)
    window = (np.abs(i_signed)[:, None] <= doppler_window) & (np.abs(z_all)[None, :] <= delay_window)
    window[0, z_centre] = False
    return SinrReport.from_powers(
        signal_power=signal,
        interference_power=interference,
        noise_power=noise_psd_w_hz * params.bandwidth_hz,
        window_interference_power=float(power[window].sum()),
    )


def spectral_efficiency(sinr: float, cp_overhead: float) -> float:
    if sinr < 0:
        raise ValueError("SINR must be non-negative")
    if not 0 <= cp_overhead < 1:
        raise ValueError("CP overhead must lie in [0, 1)")
    return (1 - cp_overhead) * math.log2(1 + sinr)


def oversample(signal: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited interpolation by zero-padding the spectrum of each row."""
    if factor < 1:
        raise ValueError("oversampling factor must be at least 1")
    signal = np.atleast_2d(np.asarray(signal, dtype=np.complex128))
    if factor == 1:
        return signal
    K = signal.shape[-1]
    spectrum = fft.fft(signal, axis=-1)
    half = (K + 1) // 2
    padded = np.zeros(signal.shape[:-1] + (factor * K,), dtype=np.complex128)
    padded[..., :half] = spectrum[..., :half]
    padded[..., factor * K - (K - half):] = spectrum[..., half:]
    return fft.ifft(padded, axis=-1) * factor


def papr(signal: np.ndarray, oversample_factor: int = 4) -> float:
    """max |s_Q[n]|^2 / mean |s_Q[n]|^2; a 2-D input (antennas x samples) uses the sum-power envelope."""
    envelope = np.sum(np.abs(oversample(signal, oversample_factor)) ** 2, axis=0)
    mean = envelope.mean()
    if not mean > 0:
        raise SignalError("PAPR of an all-zero signal is undefined")
    return float(envelope.max() / mean)


def papr_db(signal: np.ndarray, oversample_factor: int = 4) -> float:
    return 10 * math.log10(papr(signal, oversample_factor))


def ccdf(samples_db: Sequence[float], thresholds_db: Sequence[float]) -> CcdfCurve:
    """Fraction of samples strictly above each threshold."""
    samples = np.sort(np.asarray(samples_db, dtype=float).reshape(-1))
    if samples.size == 0:
        raise SignalError("cannot build a CCDF from no samples")
    thresholds = np.asarray(thresholds_db, dtype=float)
    counts = samples.size - np.searchsorted(samples, thresholds, side="right")
    return CcdfCurve(
        thresholds_db=thresholds.tolist(),
        ccdf=(counts / samples.size).tolist(),
        exceed_counts=counts.tolist(),
        num_samples=int(samples.size),
    )


def empirical_sinr(
    received: np.ndarray,
    reference: np.ndarray,
    noise_power: float,
    window: Optional[slice] = None,
) -> SinrReport:
    """Least-squares fit of the received samples onto the reference symbols.

    The fitted component is the signal, the residual is interference, and noise is added
    analytically so noise-free frames can be reused.
    """
    y = np.asarray(received, dtype=np.complex128).reshape(-1)
    ref = np.asarray(reference, dtype=np.complex128).reshape(-1)
    if window is not None:
        y, ref = y[window], ref[window]
    if y.size != ref.size or y.size == 0:
        raise SignalError("received and reference must be non-empty and of equal length")
    ref_energy = np.vdot(ref, ref).real
    if not ref_energy > 0:
        raise SignalError("reference signal is all zeros")
    gain = np.vdot(ref, y) / ref_energy
    residual = y - gain * ref
    return SinrReport.from_powers(
        signal_power=float(abs(gain) ** 2 * ref_energy / y.size),
        interference_power=float(np.vdot(residual, residual).real / y.size),
        noise_power=noise_power,
    )
