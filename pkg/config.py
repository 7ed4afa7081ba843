import os
from typing import Dict, List, Optional
from dotenv import load_dotenv, dotenv_values

load_dotenv()

class Settings:
    """Experiment settings loaded from environment variables"""

    # Reproducibility
    DEFAULT_SEED: int = int(os.getenv("CRS_SEED", "0"))
    TRIAL_BLOCK_SIZE: int = int(os.getenv("CRS_TRIAL_BLOCK_SIZE", "1000"))

    # Parallelism
    WORKERS: int = int(os.getenv("CRS_WORKERS", str(os.cpu_count() or 1)))

    # Instance tolerances
    FEASIBILITY_TOL: float = float(os.getenv("CRS_FEASIBILITY_TOL", "1e-9"))
    SKIP_TOL: float = float(os.getenv("CRS_SKIP_TOL", "1e-12"))

    # OCRS engine
    VERTEX_LIMIT: int = int(os.getenv("CRS_VERTEX_LIMIT", "22"))
    MC_FLOOR: float = float(os.getenv("CRS_MC_FLOOR", "1e-6"))

    # Statistics
    Z_SCORE: float = float(os.getenv("CRS_Z", "1.96"))

    # Numerical analysis
    QUAD_TOL: float = float(os.getenv("CRS_QUAD_TOL", "1e-10"))
    FD_STEP: float = float(os.getenv("CRS_FD_STEP", "1e-5"))
    SIGN_DEADBAND: float = float(os.getenv("CRS_SIGN_DEADBAND", "1e-10"))
    Y_POINTS: int = int(os.getenv("CRS_Y_POINTS", "2001"))

    # Output
    OUTPUT_DIR: str = os.getenv("CRS_OUTPUT_DIR", "./results")

    # App Settings
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()
    TIMEZONE: str = os.getenv("TIMEZONE", "UTC")

    @classmethod
    def validate(cls) -> bool:
        """Validate settings ranges"""
        problems = []

        if cls.TRIAL_BLOCK_SIZE < 1:
            problems.append("CRS_TRIAL_BLOCK_SIZE")
        if cls.WORKERS < 1:
            problems.append("CRS_WORKERS")
        if cls.FEASIBILITY_TOL < 0:
            problems.append("CRS_FEASIBILITY_TOL")
        if cls.VERTEX_LIMIT < 1 or cls.VERTEX_LIMIT > 62:
            problems.append("CRS_VERTEX_LIMIT")
        if not 0 < cls.MC_FLOOR < 1:
            problems.append("CRS_MC_FLOOR")
        if cls.Z_SCORE <= 0:
            problems.append("CRS_Z")
        if cls.Y_POINTS < 3:
            problems.append("CRS_Y_POINTS")
        if cls.LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            problems.append("LOG_LEVEL")

        if problems:
            print(f"❌ Invalid settings: {', '.join(problems)}")
            return False

        return True

    @classmethod
    def get_warnings(cls) -> List[str]:
        """Get warnings for settings that work but are probably unintended"""
        warnings = []

        cpu_count = os.cpu_count() or 1
        if cls.WORKERS > cpu_count:
            warnings.append(f"CRS_WORKERS={cls.WORKERS} exceeds available CPUs ({cpu_count})")

        if cls.VERTEX_LIMIT > 26:
            warnings.append(f"CRS_VERTEX_LIMIT={cls.VERTEX_LIMIT} - exact OCRS DP may need a lot of memory")

        if cls.TRIAL_BLOCK_SIZE > 20000:
            warnings.append("CRS_TRIAL_BLOCK_SIZE is large - batch arrays may not fit in memory")

        return warnings


def load_config_file(path: Optional[str]) -> Dict[str, str]:
    """
    Read an optional key-value config file (dotenv syntax)

    Args:
        path: Config file path, or None

    Returns:
        Mapping of lower-cased keys with dashes turned into underscores
    """
    if not path:
        return {}

    if not os.path.exists(path):
        raise FileNotFoundError(f"Config file not found: {path}")

    values = dotenv_values(path)
    return {
        key.strip().lower().replace("-", "_"): value
        for key, value in values.items()
        if value is not None
    }

# Global settings instance
settings = Settings()
