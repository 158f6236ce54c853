from typing import Any, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class AlignmentEntry(BaseModel):
    """One delay/Doppler compensation branch and the path or bin it targets."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delay_comp: int = Field(..., ge=0, description="kappa_d, samples")
    doppler_comp: float = Field(..., description="b_d, cycles per M*N samples")
    aligned_delay: int = Field(..., description="integer delay of the aligned path/bin")
    aligned_doppler: float = Field(..., description="Doppler of the aligned path/bin in bins")
    beamformer: Optional[np.ndarray] = None

    @field_validator("beamformer", mode="before")
    @classmethod
    def _as_vector(cls, value: Any) -> Optional[np.ndarray]:
        if value is None:
            return None
        return np.asarray(value, dtype=np.complex128).reshape(-1)

    def to_json(self) -> dict:
        f = self.beamformer if self.beamformer is not None else np.zeros(0, dtype=complex)
        return {
            "kappa": self.delay_comp,
            "b": self.doppler_comp,
            "f_re": f.real.tolist(),
            "f_im": f.imag.tolist(),
        }


class AlignmentPlan(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mode: Literal["path", "bin"]
    entries: List[AlignmentEntry] = Field(..., min_length=1)
    n_max: int
    selected_bins: Optional[List[Tuple[int, int]]] = None

    @model_validator(mode="after")
    def _check_alignment(self) -> "AlignmentPlan":
        for entry in self.entries:
            if entry.delay_comp + entry.aligned_delay != self.n_max:
                raise ValueError("kappa + l must equal n_max for every entry")
            if entry.doppler_comp + entry.aligned_doppler != 0:
                raise ValueError("b + k must vanish for every entry")
            if self.mode == "bin" and entry.doppler_comp != round(entry.doppler_comp):
                raise ValueError("bin alignment uses integer Doppler compensation")
        if self.mode == "bin" and self.selected_bins is None:
            raise ValueError("bin alignment needs the selected bin set")
        return self

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def has_beamformers(self) -> bool:
        return all(e.beamformer is not None for e in self.entries)

    @property
    def beamformers(self) -> List[np.ndarray]:
        return [e.beamformer for e in self.entries]

    def with_beamformers(self, beamformers: List[np.ndarray]) -> "AlignmentPlan":
        if len(beamformers) != len(self.entries):
            raise ValueError(f"expected {len(self.entries)} beamformers, got {len(beamformers)}")
        entries = [e.model_copy(update={"beamformer": np.asarray(f, dtype=np.complex128)}) for e, f in zip(self.entries, beamformers)]
        return self.model_copy(update={"entries": entries})

    def to_json(self) -> dict:
        document = {
            "mode": self.mode,
            "n_max": self.n_max,
            "entries": [e.to_json() for e in self.entries],
        }
        if self.selected_bins is not None:
            document["selected_bins"] = [list(b) for b in self.selected_bins]
        return document


class BeamformerDesign(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    strategy: Literal["isi_zf", "isi_mrt"] = "isi_zf"
    total_power_w: float = Field(1.0, gt=0)


class BinSelectParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    threshold_ratio: float = Field(0.2, gt=0, lt=1)
