from fastapi import APIRouter, HTTPException
from datetime import datetime, timezone

from app.core.pool import trial_pool

router = APIRouter()


@router.get("/")
async def health_check():
    status = trial_pool.status()
    return {
        "status": "healthy",
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "pool": status,
    }


@router.get("/ready")
async def readiness_check():
    status = trial_pool.status()
    if not status["connected"]:
        raise HTTPException(status_code=503, detail="Trial pool not started")
    return {
        "ready": True,
        "timestamp": datetime.now(timezone.utc).isoformat()
    }
