import os
from pydantic_settings import BaseSettings
from typing import Literal, Optional

class Settings(BaseSettings):
    # Numerics
    TOL: float = float(os.getenv("TOL", 1e-9))
    SEED: int = int(os.getenv("SEED", 0))
    MODE: Literal["exact", "float"] = os.getenv("MODE", "exact")
    MAX_HOLONOMY_ROUNDS: int = int(os.getenv("MAX_HOLONOMY_ROUNDS", 64))

    # Redis Configuration
    REDIS_HOST: str = os.getenv("REDIS_HOST", "localhost")
    REDIS_PORT: int = int(os.getenv("REDIS_PORT", 6379))
    REDIS_DB: int = int(os.getenv("REDIS_DB", 0))
    REDIS_PASSWORD: str = os.getenv("REDIS_PASSWORD", "")
    REDIS_URL: Optional[str] = os.getenv("REDIS_URL", None)
    CACHE_ENABLED: bool = True
    CACHE_TTL: int = 60 * 60 * 24  # 24 hours

    # API Settings
    API_TITLE: str = "Skew Torsion Algebra API"
    API_DESCRIPTION: str = "Exact verification of the algebra of geometries with parallel skew torsion"
    API_VERSION: str = "1.1.0"
    CORS_ORIGINS: str = os.getenv("CORS_ORIGINS", "*")

    class Config:
        env_file = ".env"

settings = Settings()
