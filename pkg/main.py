from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from contextlib import asynccontextmanager
import logging
import uvicorn

from app.core.config import settings
from app.core.pool import trial_pool
from app.api import feasibility, links, sweeps, health

logging.basicConfig(level=settings.LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


@asynccontextmanager
async def lifespan(app: FastAPI):
    # Startup
    trial_pool.connect()
    yield
    # Shutdown
    trial_pool.disconnect()


app = FastAPI(
    title=settings.PROJECT_NAME,
    openapi_tags=[
        {
            "name": "Feasibility",
            "description": "OTFS period constraints, CP overhead and Doppler helpers",
        },
        {
            "name": "Links",
            "description": "Single-link SINR of plain OTFS and delay-Doppler aligned OTFS",
        },
        {
            "name": "Sweeps",
            "description": "Spectral efficiency and PAPR sweeps (trial counts are capped)",
        },
        {
            "name": "Health",
            "description": "Service and worker pool status",
        },
    ],
    description="""
# DDAM-OTFS link-level simulator

Multi-antenna OTFS with delay-Doppler alignment modulation: the transmitter pre-compensates
the delay and Doppler of each channel path (or of each dominant delay-Doppler bin) and
steers a beam per branch so that all paths reach the receiver aligned.

**Quick start:**

```bash
curl -X POST http://localhost:8000/api/v1/feasibility/ \\
     -H "Content-Type: application/json" -d '[]'

curl -X POST http://localhost:8000/api/v1/links/sinr \\
     -H "Content-Type: application/json" -d '{"antennas": 32, "trial": 7}'
```

Large sweeps belong on the command line (`python -m app.cli se-sweep --out results/`).

**Common Status Codes:**
- `200` - Success
- `400` - Invalid scenario or a numerology the simulator rejects
- `422` - Request body failed validation
- `500` - Internal Server Error
    """,
    version=settings.VERSION,
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan
)

# CORS middleware
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(feasibility.router, prefix=f"{settings.API_V1_STR}/feasibility", tags=["Feasibility"])
app.include_router(links.router, prefix=f"{settings.API_V1_STR}/links", tags=["Links"])
app.include_router(sweeps.router, prefix=f"{settings.API_V1_STR}/sweeps", tags=["Sweeps"])
app.include_router(health.router, prefix="/health", tags=["Health"])


@app.get("/")
async def root():
    """API root endpoint - returns basic service information"""
    return {
        "name": settings.PROJECT_NAME,
        "version": settings.VERSION,
        "documentation": "/docs",
        "redoc": "/redoc",
        "status": "healthy",
    }


if __name__ == "__main__":
    uvicorn.run(
        "main:app",
        host="0.0.0.0",
        port=settings.PORT,
        reload=settings.DEBUG
    )
