from enum import Enum
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class FrameParams(BaseModel):
    """OTFS numerology; the derived quantities are exposed as properties."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    bandwidth_hz: float = Field(..., gt=0, description="System bandwidth B")
    frame_duration_s: float = Field(..., gt=0, description="OTFS frame duration; derived as M*N/B when omitted")
    subcarriers: int = Field(..., ge=1, description="M")
    time_slots: int = Field(..., ge=1, description="N")
    cp_len: int = Field(0, ge=0, description="Cyclic prefix per slot, in samples")

    @model_validator(mode="before")
    @classmethod
    def _derive_duration(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("frame_duration_s") is None:
            data = dict(data)
            try:
                data["frame_duration_s"] = data["subcarriers"] * data["time_slots"] / data["bandwidth_hz"]
            except (KeyError, TypeError, ZeroDivisionError):
                data.pop("frame_duration_s", None)
        return data

    @model_validator(mode="after")
    def _check_sample_count(self) -> "FrameParams":
        samples = self.bandwidth_hz * self.frame_duration_s
        if round(samples) != self.subcarriers * self.time_slots:
            raise ValueError(
                f"M*N = {self.subcarriers * self.time_slots} does not match B*T_OTFS = {samples:.6g} samples"
            )
        return self

    @classmethod
    def from_grid(cls, bandwidth_hz: float, subcarriers: int, time_slots: int, cp_len: int = 0) -> "FrameParams":
        return cls(
            bandwidth_hz=bandwidth_hz,
            subcarriers=subcarriers,
            time_slots=time_slots,
            cp_len=cp_len,
        )

    def with_slots(self, time_slots: int) -> "FrameParams":
        """Same frame duration and bandwidth, N changed and M adjusted to keep M*N fixed."""
        total = self.num_samples
        if total % time_slots:
            raise ValueError(f"N={time_slots} does not divide M*N={total}")
        return FrameParams(
            bandwidth_hz=self.bandwidth_hz,
            frame_duration_s=self.frame_duration_s,
            subcarriers=total // time_slots,
            time_slots=time_slots,
            cp_len=self.cp_len,
        )

    @property
    def num_samples(self) -> int:
        return self.subcarriers * self.time_slots

    @property
    def subcarrier_spacing_hz(self) -> float:
        return self.bandwidth_hz / self.subcarriers

    @property
    def slot_duration_s(self) -> float:
        return self.frame_duration_s / self.time_slots

    @property
    def sample_interval_s(self) -> float:
        return 1.0 / self.bandwidth_hz

    @property
    def delay_period_s(self) -> float:
        return self.slot_duration_s

    @property
    def doppler_period_hz(self) -> float:
        return self.subcarrier_spacing_hz


class DDFrame(BaseModel):
    """N x M delay-Doppler symbol grid, indexed [k, l] (Doppler, delay)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    data: np.ndarray
    params: FrameParams

    @field_validator("data", mode="before")
    @classmethod
    def _as_complex(cls, value: Any) -> np.ndarray:
        return np.asarray(value, dtype=np.complex128)

    @model_validator(mode="after")
    def _check_shape(self) -> "DDFrame":
        expected = (self.params.time_slots, self.params.subcarriers)
        if self.data.shape != expected:
            raise ValueError(f"frame shape {self.data.shape} does not match (N, M) = {expected}")
        return self

    def energy(self) -> float:
        return float(np.sum(np.abs(self.data) ** 2))


class FeasibilityInputs(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    delay_spread_s: float = Field(..., ge=0)
    doppler_spread_hz: float = Field(..., ge=0)
    max_cp_overhead: float = Field(..., gt=0, lt=1)
    max_slots: int = Field(..., ge=1)
    frame_duration_s: float = Field(..., gt=0)
    label: Optional[str] = None


class BindingConstraint(str, Enum):
    DELAY_SPREAD = "delay_spread"
    CP_OVERHEAD = "cp_overhead"
    PAPR_SLOTS = "papr_slots"


class FeasibilityResult(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="null")

    lower_bound_s: float
    upper_bound_s: float
    feasible: bool
    binding_constraint: BindingConstraint
    delay_spread_bound_s: float
    cp_overhead_bound_s: float
    papr_slots_bound_s: float

    @model_validator(mode="after")
    def _check_feasible_flag(self) -> "FeasibilityResult":
        if self.feasible != (self.lower_bound_s < self.upper_bound_s):
            raise ValueError("feasible flag disagrees with the bounds")
        return self
