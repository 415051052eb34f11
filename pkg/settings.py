"""
Runtime configuration, read from the environment (and an optional .env file).
"""
import os
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()

# ---------------------------
# Configuration
# ---------------------------
BASE_DIR = Path(__file__).parent
DEFAULT_ARTIFACTS_DIR = BASE_DIR / "artifacts"


class Settings(BaseModel):
    log_level: str = Field("INFO", description="Root logging level")
    weyl_order_limit: int = Field(3_628_800, ge=1, description="Largest Weyl group the engine will enumerate")
    reduced_word_limit: int = Field(100_000, ge=1, description="Largest reduced-word list the engine will build")
    condition_cap: int = Field(100_000, ge=1, description="Largest number of streamed conditions per verdict")
    artifacts_dir: Path = Field(DEFAULT_ARTIFACTS_DIR, description="Directory for persisted records")
    calibration_file: Path = Field(DEFAULT_ARTIFACTS_DIR / "calibration.json", description="Persisted calibration record")
    sample_seed: int = Field(20240101, description="Seed for any sampling mode")


def _from_env() -> Settings:
    artifacts_dir = Path(os.getenv("ARTIFACTS_DIR", str(DEFAULT_ARTIFACTS_DIR)))
    calibration_file = Path(os.getenv("CALIBRATION_FILE", str(artifacts_dir / "calibration.json")))
    return Settings(
        log_level=os.getenv("LOG_LEVEL", "INFO").upper(),
        weyl_order_limit=int(os.getenv("WEYL_ORDER_LIMIT", "3628800")),
        reduced_word_limit=int(os.getenv("REDUCED_WORD_LIMIT", "100000")),
        condition_cap=int(os.getenv("CONDITION_CAP", "100000")),
        artifacts_dir=artifacts_dir,
        calibration_file=calibration_file,
        sample_seed=int(os.getenv("SAMPLE_SEED", "20240101")),
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return _from_env()


def reset_settings() -> None:
    """Forget the cached settings so the next call re-reads the environment."""
    get_settings.cache_clear()
