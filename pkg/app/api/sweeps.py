from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool

from app.core.config import settings
from app.core.errors import SimulationError
from app.harness.sweeps import run_papr_sweep, run_se_sweep
from app.schemas.requests import SweepRequest
from app.schemas.scenario import RunResult

router = APIRouter()


@router.post("/se", response_model=RunResult)
async def se_sweep(request: SweepRequest):
    """Mean spectral efficiency versus transmit antennas for every scheme."""
    scenario = request.scenario
    total = scenario.trials * len(scenario.antenna_sweep)
    if total > settings.MAX_API_TRIALS:
        raise HTTPException(
            status_code=400,
            detail=f"{total} trials requested, the limit is {settings.MAX_API_TRIALS}; use the CLI for larger runs",
        )
    try:
        return await run_in_threadpool(run_se_sweep, scenario)
    except SimulationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


@router.post("/papr", response_model=RunResult)
async def papr_sweep(request: SweepRequest):
    """PAPR CCDF per slot count, DDAM-OTFS against the plain OTFS baseline."""
    scenario = request.scenario
    total = scenario.papr.frames * (len(scenario.slot_sweep) + 1)
    if total > settings.MAX_API_PAPR_FRAMES:
        raise HTTPException(
            status_code=400,
            detail=f"{total} frames requested, the limit is {settings.MAX_API_PAPR_FRAMES}; use the CLI for larger runs",
        )
    try:
        return await run_in_threadpool(run_papr_sweep, scenario)
    except SimulationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
