from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.schemas.channel import ChannelGenConfig, PulseShape
from app.schemas.frame import FeasibilityResult, FrameParams
from app.schemas.metrics import CcdfCurve


class DdamSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mode: Literal["path", "bin"] = "path"
    strategy: Literal["isi_zf", "isi_mrt"] = "isi_zf"
    threshold_ratio: float = Field(0.2, gt=0, lt=1, description="C in the bin selection rule")
    interference_delay_window: int = Field(2, ge=0, description="N_i")
    interference_doppler_window: int = Field(1, ge=0, description="K_i")
    pulse: PulseShape = PulseShape()
    original_denominator: bool = Field(True, description="DDAM CP overhead over the original M + B*tau denominator")


class PaprSettings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    baseline_slots: int = Field(16, ge=1)
    oversample: int = Field(4, ge=1)
    qam_order: int = Field(16, ge=4)
    frames: int = Field(10000, ge=1)
    threshold_min_db: float = 0.0
    threshold_max_db: float = 16.0
    threshold_step_db: float = Field(0.05, gt=0)

    @field_validator("qam_order")
    @classmethod
    def _square_qam(cls, value: int) -> int:
        root = int(round(value ** 0.5))
        if root * root != value or root & (root - 1):
            raise ValueError("qam_order must be a square power of two (4, 16, 64, ...)")
        return value

    def thresholds(self) -> List[float]:
        count = int(round((self.threshold_max_db - self.threshold_min_db) / self.threshold_step_db)) + 1
        return [round(self.threshold_min_db + i * self.threshold_step_db, 9) for i in range(count)]


def _desk_frame() -> FrameParams:
    return FrameParams.from_grid(64e6, 128, 16)


class ScenarioConfig(BaseModel):
    """Experiment description; field names are the JSON config keys."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    frame: FrameParams = Field(default_factory=_desk_frame)
    channel_gen: ChannelGenConfig = ChannelGenConfig()
    ddam: DdamSettings = DdamSettings()
    tx_power_dbm: float = 30.0
    noise_psd_dbm_hz: float = -174.0
    trials: int = Field(200, ge=1)
    base_seed: int = Field(0, ge=0)
    antenna_sweep: List[int] = Field(default_factory=lambda: [16, 32, 64], min_length=1)
    slot_sweep: List[int] = Field(default_factory=lambda: [2, 4, 8], min_length=1)
    papr: PaprSettings = PaprSettings()

    @field_validator("antenna_sweep", "slot_sweep")
    @classmethod
    def _positive_sorted(cls, values: List[int]) -> List[int]:
        if any(v < 1 for v in values):
            raise ValueError("sweep values must be positive")
        return sorted(set(values))

    @classmethod
    def full_profile(cls, **overrides) -> "ScenarioConfig":
        """Full-size numerology (M=512, N=128, i.e. a 1.024 ms frame at 64 MHz)."""
        overrides.setdefault("frame", FrameParams.from_grid(64e6, 512, 128))
        return cls(**overrides)

    @property
    def tx_power_w(self) -> float:
        return 10 ** ((self.tx_power_dbm - 30.0) / 10.0)

    @property
    def noise_power_w(self) -> float:
        """N0*B per complex sample."""
        return 10 ** ((self.noise_psd_dbm_hz - 30.0) / 10.0) * self.frame.bandwidth_hz


class SeRow(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    scheme: Literal["otfs_baseline", "ddam_path", "ddam_bin"]
    mt: int
    mean_se: float
    ci95: float = Field(..., ge=0)
    mean_sinr_db: float
    cp_overhead: float
    failures: int = 0


class PaprRow(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    scheme: Literal["otfs_baseline", "ddam"]
    n_slots: int
    subcarriers: int
    papr_at_1e2_db: float
    curve: CcdfCurve


class FeasibilityRow(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    label: Optional[str] = None
    delay_spread_s: float
    doppler_spread_hz: float
    result: FeasibilityResult
    min_slots_for_doppler: Optional[int] = None


class RunMetadata(BaseModel):
    config_hash: str
    seed: int
    version: str
    conventions: Dict[str, object]


class RunResult(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    kind: Literal["se", "papr"]
    se_rows: List[SeRow] = Field(default_factory=list)
    papr_rows: List[PaprRow] = Field(default_factory=list)
    metadata: RunMetadata
