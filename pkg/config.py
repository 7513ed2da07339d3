"""
Configuration Management
Loads environment variables for the solver and CLI
"""
import os


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "")
    if not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return -1


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "")
    if not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError:
        return float("nan")


class Config:
    """Application configuration"""

    # Application Settings
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Mode-level parallelism cap; 1 is the fully deterministic baseline
    ABC_CONTROL_THREADS: int = _env_int("ABC_CONTROL_THREADS", 1)

    # Default absolute tolerance of the Mittag-Leffler engine
    ABC_CONTROL_MLF_TOL: float = _env_float("ABC_CONTROL_MLF_TOL", 1e-13)

    @classmethod
    def reload(cls) -> None:
        """Re-read the environment (used by the CLI after argument parsing)"""
        cls.LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
        cls.ABC_CONTROL_THREADS = _env_int("ABC_CONTROL_THREADS", 1)
        cls.ABC_CONTROL_MLF_TOL = _env_float("ABC_CONTROL_MLF_TOL", 1e-13)

    @classmethod
    def validate(cls) -> bool:
        """Validate configuration"""
        invalid = []
        if cls.ABC_CONTROL_THREADS < 1:
            invalid.append("ABC_CONTROL_THREADS")
        if not cls.ABC_CONTROL_MLF_TOL > 0:
            invalid.append("ABC_CONTROL_MLF_TOL")
        if cls.LOG_LEVEL.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            invalid.append("LOG_LEVEL")

        if invalid:
            raise ValueError(f"Invalid configuration: {', '.join(invalid)}")

        return True
