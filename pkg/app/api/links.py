import logging

from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool

from app.core.errors import AlignmentError, SimulationError
from app.harness.links import build_plan, evaluate_link
from app.harness.sweeps import scheme_cp_overheads
from app.schemas.alignment import BeamformerDesign, BinSelectParams
from app.schemas.requests import LinkRequest, LinkResponse
from app.sim.channel import random_channel
from app.sim.metrics import spectral_efficiency

logger = logging.getLogger(__name__)

router = APIRouter()


def _plan_json(request: LinkRequest, seed: int):
    cfg = request.scenario
    gen = cfg.channel_gen.model_copy(update={"antennas": request.antennas, "rng_seed": seed})
    channel = random_channel(gen, cfg.frame)
    design = BeamformerDesign(strategy=cfg.ddam.strategy, total_power_w=cfg.tx_power_w)
    selection = BinSelectParams(threshold_ratio=cfg.ddam.threshold_ratio)
    try:
        plan = build_plan(channel, cfg.frame, cfg.ddam.mode, cfg.ddam.pulse, design, selection)
    except AlignmentError as exc:
        # evaluate_link reports this draw as a missing scheme.
        logger.warning("no %s plan for seed %d: %s", cfg.ddam.mode, seed, exc)
        return None
    return plan.to_json()


def _evaluate(request: LinkRequest) -> LinkResponse:
    cfg = request.scenario
    outcome = evaluate_link(cfg, request.antennas, request.trial)
    overheads = scheme_cp_overheads(cfg)
    se = {
        scheme: spectral_efficiency(report.sinr, overheads[scheme]) if report is not None else None
        for scheme, report in outcome.reports.items()
    }
    plan = _plan_json(request, outcome.seed) if request.include_plan else None
    return LinkResponse(
        seed=outcome.seed,
        antennas=outcome.antennas,
        reports=outcome.reports,
        spectral_efficiency=se,
        cp_overhead=overheads,
        selected_bins=outcome.selected_bins,
        plan=plan,
    )


@router.post("/sinr", response_model=LinkResponse)
async def link_sinr(request: LinkRequest):
    """
    SINR and spectral efficiency of plain OTFS and both alignment modes on one channel draw.

    The draw is reproducible: the same scenario, antenna count and trial give the same channel.
    """
    try:
        return await run_in_threadpool(_evaluate, request)
    except SimulationError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
