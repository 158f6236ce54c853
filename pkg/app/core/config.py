from pydantic_settings import BaseSettings
from typing import List, Optional
import os


class Settings(BaseSettings):
    PROJECT_NAME: str = "DDAM-OTFS Simulator"
    VERSION: str = "1.0.0"
    DEBUG: bool = os.getenv("DEBUG", "False").lower() == "true"
    LOG_LEVEL: str = "INFO"
    API_V1_STR: str = "/api/v1"

    # Server
    PORT: int = int(os.getenv("PORT", "8000"))

    # CORS - plotting dashboards running locally
    ALLOWED_ORIGINS: List[str] = [
        "http://localhost:3000",
        "http://localhost:8000"
    ]

    # Seed fallback when --seed is not given on the command line
    DDAM_SIM_SEED: Optional[int] = None

    # Worker pool; None means one worker per available core
    DEFAULT_JOBS: Optional[int] = None

    OUTPUT_DIR: str = "results"

    # Request limits for the HTTP surface
    MAX_API_TRIALS: int = 500
    MAX_API_PAPR_FRAMES: int = 20000

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
