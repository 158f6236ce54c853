from fastapi import APIRouter, HTTPException, Query
from typing import List, Optional

from app.core.errors import SimulationError
from app.harness.sweeps import run_feasibility_report
from app.schemas.frame import FeasibilityInputs
from app.schemas.requests import CpOverheadResponse, DopplerResponse
from app.schemas.scenario import FeasibilityRow
from app.sim import ddcore
from app.sim.channel import kmh_to_mps

router = APIRouter()


@router.post("/", response_model=List[FeasibilityRow])
async def check_feasibility(inputs: List[FeasibilityInputs]):
    """
    Evaluate the OTFS period constraints for each input.

    An empty body evaluates the built-in before/after alignment examples.
    """
    try:
        return run_feasibility_report(inputs or None)
    except SimulationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.get("/cp-overhead", response_model=CpOverheadResponse)
async def get_cp_overhead(
    bandwidth_hz: float = Query(..., gt=0, description="System bandwidth B"),
    delay_spread_s: float = Query(..., ge=0, description="Delay spread the CP must cover"),
    subcarriers: int = Query(..., ge=1, description="M"),
    reference_delay_spread_s: Optional[float] = Query(None, ge=0, description="Delay spread of the original slot length"),
):
    """CP length and overhead, optionally also against the original slot length."""
    reference = None
    if reference_delay_spread_s is not None:
        reference = ddcore.cp_overhead(bandwidth_hz, delay_spread_s, subcarriers, reference_delay_spread_s)
    return CpOverheadResponse(
        cp_samples=ddcore.cp_len_samples(bandwidth_hz, delay_spread_s),
        overhead=ddcore.cp_overhead(bandwidth_hz, delay_spread_s, subcarriers),
        overhead_reference=reference,
    )


@router.get("/doppler", response_model=DopplerResponse)
async def get_doppler(
    carrier_hz: float = Query(..., gt=0, description="Carrier frequency"),
    speed_kmh: float = Query(..., ge=0, description="Relative speed in km/h"),
    frame_duration_s: Optional[float] = Query(None, gt=0, description="Also report the minimum slot count"),
):
    speed = kmh_to_mps(speed_kmh)
    spread = ddcore.doppler_spread(carrier_hz, speed)
    min_slots = None
    if frame_duration_s is not None:
        min_slots = ddcore.min_slots_for_doppler(frame_duration_s, spread)
    return DopplerResponse(
        speed_mps=speed,
        max_doppler_hz=ddcore.max_doppler_shift(carrier_hz, speed),
        doppler_spread_hz=spread,
        min_slots=min_slots,
    )
