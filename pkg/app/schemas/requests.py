from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.schemas.metrics import SinrReport
from app.schemas.scenario import ScenarioConfig


class LinkRequest(BaseModel):
    scenario: ScenarioConfig = ScenarioConfig()
    antennas: int = Field(64, ge=1, description="M_t")
    trial: int = Field(0, ge=0, description="Channel draw; the seed is scenario.base_seed + trial")
    include_plan: bool = Field(False, description="Return the alignment plan for scenario.ddam.mode with its beamformers")


class LinkResponse(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="null")

    seed: int
    antennas: int
    reports: Dict[str, Optional[SinrReport]]
    spectral_efficiency: Dict[str, Optional[float]]
    cp_overhead: Dict[str, float]
    selected_bins: int
    plan: Optional[dict] = None


class SweepRequest(BaseModel):
    scenario: ScenarioConfig = ScenarioConfig()


class CpOverheadResponse(BaseModel):
    cp_samples: int
    overhead: float
    overhead_reference: Optional[float] = None


class DopplerResponse(BaseModel):
    speed_mps: float
    max_doppler_hz: float
    doppler_spread_hz: float
    min_slots: Optional[int] = None
