from typing import Any, List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PathComponent(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delay_s: float = Field(..., ge=0)
    doppler_hz: float
    gain: np.ndarray

    @field_validator("gain", mode="before")
    @classmethod
    def _as_vector(cls, value: Any) -> np.ndarray:
        return np.atleast_1d(np.asarray(value, dtype=np.complex128)).reshape(-1)

    @model_validator(mode="after")
    def _check_gain(self) -> "PathComponent":
        if not np.linalg.norm(self.gain) > 0:
            raise ValueError("path gain vector must be nonzero")
        return self

    @property
    def num_antennas(self) -> int:
        return self.gain.size

    def to_json(self) -> dict:
        return {
            "delay_s": self.delay_s,
            "doppler_hz": self.doppler_hz,
            "h_re": self.gain.real.tolist(),
            "h_im": self.gain.imag.tolist(),
        }


class MultipathChannel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    paths: List[PathComponent] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_antennas(self) -> "MultipathChannel":
        sizes = {p.num_antennas for p in self.paths}
        if len(sizes) != 1:
            raise ValueError(f"paths disagree on the number of antennas: {sorted(sizes)}")
        return self

    @property
    def num_paths(self) -> int:
        return len(self.paths)

    @property
    def num_antennas(self) -> int:
        return self.paths[0].num_antennas

    @property
    def gains(self) -> np.ndarray:
        """L x M_t matrix of channel vectors."""
        return np.stack([p.gain for p in self.paths])

    def scaled(self, factor: complex) -> "MultipathChannel":
        return MultipathChannel(
            paths=[PathComponent(delay_s=p.delay_s, doppler_hz=p.doppler_hz, gain=p.gain * factor) for p in self.paths]
        )

    def to_json(self) -> dict:
        return {"paths": [p.to_json() for p in self.paths]}

    @classmethod
    def from_json(cls, document: dict) -> "MultipathChannel":
        paths = [
            PathComponent(
                delay_s=item["delay_s"],
                doppler_hz=item["doppler_hz"],
                gain=np.asarray(item["h_re"], dtype=float) + 1j * np.asarray(item["h_im"], dtype=float),
            )
            for item in document["paths"]
        ]
        return cls(paths=paths)


class SampledPath(BaseModel):
    """Delay and Doppler of one path on the sample grid, split into integer and fractional parts."""

    model_config = ConfigDict(frozen=True)

    delay_samples: float
    delay_int: int
    delay_frac: float = Field(..., ge=-0.5, lt=0.5)
    doppler_bins: float
    doppler_int: int
    doppler_frac: float = Field(..., ge=-0.5, lt=0.5)

    @model_validator(mode="after")
    def _check_split(self) -> "SampledPath":
        if self.delay_int + self.delay_frac != self.delay_samples:
            raise ValueError("integer and fractional delay do not add up")
        if self.doppler_int + self.doppler_frac != self.doppler_bins:
            raise ValueError("integer and fractional Doppler do not add up")
        return self


class PulseShape(BaseModel):
    """Transmit pulse p(t), normalised so that p(0) = 1 and truncated to |z| <= half_width samples."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["ideal_sinc", "root_raised_cosine"] = "ideal_sinc"
    rolloff: float = Field(0.25, ge=0, le=1)
    half_width: int = Field(16, ge=0)

    def at_samples(self, u: Any) -> np.ndarray:
        """Evaluate p(uT) for time offsets u given in samples."""
        u = np.asarray(u, dtype=float)
        if self.kind == "ideal_sinc":
            values = np.sinc(u)
            on_grid = (u == np.round(u)) & (u != 0)
            return np.where(on_grid, 0.0, values)
        return _root_raised_cosine(u, self.rolloff)

    def evaluate(self, t_seconds: Any, sample_interval_s: float) -> np.ndarray:
        return self.at_samples(np.asarray(t_seconds, dtype=float) / sample_interval_s)

    def taps(self, frac: float) -> np.ndarray:
        """p(zT - frac*T) for z = -W..W."""
        z = np.arange(-self.half_width, self.half_width + 1)
        return self.at_samples(z - frac)


def _root_raised_cosine(u: np.ndarray, beta: float) -> np.ndarray:
    if beta == 0:
        return np.sinc(u)
    peak = 1.0 + beta * (4.0 / np.pi - 1.0)
    out = np.empty_like(u)
    at_zero = u == 0
    singular = np.isclose(np.abs(u), 1.0 / (4.0 * beta))
    regular = ~(at_zero | singular)

    ur = u[regular]
    num = np.sin(np.pi * ur * (1 - beta)) + 4 * beta * ur * np.cos(np.pi * ur * (1 + beta))
    den = np.pi * ur * (1 - (4 * beta * ur) ** 2)
    out[regular] = num / den
    out[at_zero] = peak
    out[singular] = beta / np.sqrt(2) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
    )
    return out / peak


class ChannelGenConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_paths: int = Field(5, ge=1)
    max_delay_s: float = Field(500e-9, gt=0)
    max_speed_mps: float = Field(300.0 / 3.6, ge=0)
    carrier_hz: float = Field(28e9, gt=0)
    antennas: int = Field(64, ge=1)
    rng_seed: int = Field(0, ge=0)
    snap_to_grid: bool = Field(False, description="Round delays/Dopplers to the integer sample grid")


class BinChannel(BaseModel):
    """Effective DD-bin channel h_bin[k, m] for Doppler bins k = 0..N-1.

    The delay axis starts at m = -delay_offset so that the acausal pulse taps of
    fractional-delay paths are kept.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    response: np.ndarray
    delay_offset: int = Field(..., ge=0)
    time_slots: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_shape(self) -> "BinChannel":
        if self.response.ndim != 3 or self.response.shape[0] != self.time_slots:
            raise ValueError("response must have shape (N, delays, antennas)")
        return self

    @property
    def num_delays(self) -> int:
        return self.response.shape[1]

    @property
    def num_antennas(self) -> int:
        return self.response.shape[2]

    @property
    def delays(self) -> np.ndarray:
        return np.arange(self.num_delays) - self.delay_offset

    def power(self) -> np.ndarray:
        return np.sum(np.abs(self.response) ** 2, axis=-1)

    def at(self, k: int, m: int) -> np.ndarray:
        """Bin vector; Doppler is cyclic, delays outside the support give zero."""
        j = m + self.delay_offset
        if j < 0 or j >= self.num_delays:
            return np.zeros(self.num_antennas, dtype=np.complex128)
        return self.response[k % self.time_slots, j]
