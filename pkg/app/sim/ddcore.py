"""OTFS numerology, discrete Zak transforms, per-slot cyclic prefix and the period-parameter constraints."""

import logging
import math
from typing import List, Optional

import numpy as np
from scipy import fft

from app.core.errors import DimensionError
from app.schemas.frame import (
    BindingConstraint,
    DDFrame,
    FeasibilityInputs,
    FeasibilityResult,
    FrameParams,
)

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299_792_458.0


def idzt(frame: DDFrame) -> np.ndarray:
    """x[l + cM] = 1/sqrt(N) * sum_k X[k, l] exp(j2*pi*c*k/N)."""
    # Row c of the slot matrix is time slot c; flattening row-major gives n = l + cM.
    slots = fft.ifft(frame.data, axis=0, norm="ortho")
    return slots.reshape(-1)


def dzt(y: np.ndarray, params: FrameParams) -> DDFrame:
    """Y[k, l] = 1/sqrt(N) * sum_c y[l + cM] exp(-j2*pi*c*k/N)."""
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if y.size != params.num_samples:
        raise DimensionError(f"expected {params.num_samples} samples, got {y.size}")
    slots = y.reshape(params.time_slots, params.subcarriers)
    return DDFrame(data=fft.fft(slots, axis=0, norm="ortho"), params=params)


def delay_shift(frame: DDFrame, shift: int) -> DDFrame:
    """Zak-domain counterpart of a cyclic delay by `shift` samples (quasi-periodic along delay)."""
    return dzt(np.roll(idzt(frame), shift), frame.params)


def add_cp_per_slot(x: np.ndarray, params: FrameParams) -> np.ndarray:
    x = np.asarray(x).reshape(-1)
    n_cp = params.cp_len
    if n_cp > params.subcarriers:
        raise DimensionError(f"CP length {n_cp} exceeds slot length {params.subcarriers}")
    if x.size != params.num_samples:
        raise DimensionError(f"expected {params.num_samples} samples, got {x.size}")
    slots = x.reshape(params.time_slots, params.subcarriers)
    return np.hstack([slots[:, params.subcarriers - n_cp:], slots]).reshape(-1)


def remove_cp_per_slot(x: np.ndarray, params: FrameParams) -> np.ndarray:
    x = np.asarray(x).reshape(-1)
    n_cp = params.cp_len
    if n_cp > params.subcarriers:
        raise DimensionError(f"CP length {n_cp} exceeds slot length {params.subcarriers}")
    block = params.subcarriers + n_cp
    if x.size != params.time_slots * block:
        raise DimensionError(f"expected {params.time_slots * block} samples, got {x.size}")
    return x.reshape(params.time_slots, block)[:, n_cp:].reshape(-1)


def cp_len_samples(bandwidth_hz: float, delay_spread_s: float) -> int:
    """Integer CP length covering the delay spread, ceil(B*tau)."""
    # Rounding first keeps 64 MHz * 500 ns at exactly 32 samples.
    return int(math.ceil(round(bandwidth_hz * delay_spread_s, 9)))


def cp_overhead(
    bandwidth_hz: float,
    delay_spread_s: float,
    subcarriers: int,
    reference_delay_spread_s: Optional[float] = None,
) -> float:
    """rho = B*tau / (M + B*tau).

    With `reference_delay_spread_s`, the denominator keeps the slot length of the original
    numerology (M + B*tau_ref); this is the convention behind the 0.735% figure for a
    62.5 ns aligned spread against a 500 ns physical one.
    """
    cp = bandwidth_hz * delay_spread_s
    reference = cp if reference_delay_spread_s is None else bandwidth_hz * reference_delay_spread_s
    return cp / (subcarriers + reference)


def feasible_interval(inputs: FeasibilityInputs) -> FeasibilityResult:
    rho = inputs.max_cp_overhead
    bounds = {
        BindingConstraint.DELAY_SPREAD: inputs.delay_spread_s,
        BindingConstraint.CP_OVERHEAD: (1 - rho) / rho * inputs.delay_spread_s,
        BindingConstraint.PAPR_SLOTS: inputs.frame_duration_s / inputs.max_slots,
    }
    binding = max(bounds, key=lambda key: bounds[key])
    lower = bounds[binding]
    upper = 1.0 / inputs.doppler_spread_hz if inputs.doppler_spread_hz > 0 else math.inf
    return FeasibilityResult(
        lower_bound_s=lower,
        upper_bound_s=upper,
        feasible=lower < upper,
        binding_constraint=binding,
        delay_spread_bound_s=bounds[BindingConstraint.DELAY_SPREAD],
        cp_overhead_bound_s=bounds[BindingConstraint.CP_OVERHEAD],
        papr_slots_bound_s=bounds[BindingConstraint.PAPR_SLOTS],
    )


def min_slots_for_doppler(frame_duration_s: float, doppler_spread_hz: float) -> int:
    """Smallest N with T_OTFS / N < 1 / nu_spread."""
    if doppler_spread_hz <= 0:
        return 1
    return int(math.floor(frame_duration_s * doppler_spread_hz)) + 1


def feasible_slot_range(inputs: FeasibilityInputs) -> List[int]:
    """Slot counts N (tau_r = T_OTFS / N) that satisfy every period constraint."""
    result = feasible_interval(inputs)
    slots = []
    for n in range(1, inputs.max_slots + 1):
        tau_r = inputs.frame_duration_s / n
        if result.lower_bound_s <= tau_r < result.upper_bound_s and tau_r > inputs.delay_spread_s:
            slots.append(n)
    return slots


def max_doppler_shift(carrier_hz: float, speed_mps: float) -> float:
    if carrier_hz < 0 or speed_mps < 0:
        raise ValueError("carrier frequency and speed must be non-negative")
    return carrier_hz * speed_mps / SPEED_OF_LIGHT


def doppler_spread(carrier_hz: float, speed_mps: float) -> float:
    return 2.0 * max_doppler_shift(carrier_hz, speed_mps)


def qam_frame(params: FrameParams, order: int, rng: np.random.Generator) -> DDFrame:
    """Random square-QAM symbols with unit average energy."""
    side = int(round(math.sqrt(order)))
    levels = 2 * np.arange(side) - (side - 1)
    scale = math.sqrt(2 * (order - 1) / 3)
    shape = (params.time_slots, params.subcarriers)
    i = levels[rng.integers(0, side, size=shape)]
    q = levels[rng.integers(0, side, size=shape)]
    return DDFrame(data=(i + 1j * q) / scale, params=params)
