"""Load and validate environment variables. Single source for env handling."""
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

# Load .env from project root (parent of src/)
_root = Path(__file__).resolve().parent.parent.parent
load_dotenv(_root / ".env")

# Settings field -> environment key
_ENV_KEYS = {
    "initial_bits": "TVR_BITS",
    "tau": "TVR_TAU",
    "zero_threshold": "TVR_ZERO_THRESHOLD",
    "max_bits": "TVR_MAX_BITS",
    "threads": "TVR_THREADS",
    "seed": "TVR_SEED",
    "mc_samples": "TVR_MC_SAMPLES",
    "optimize_steps": "TVR_OPTIMIZE_STEPS",
    "log_level": "TVR_LOG_LEVEL",
}


def _get(key: str, default: str = "") -> str:
    return os.getenv(key, default).strip()


def load_env() -> None:
    """Ensure .env is loaded. Call at CLI startup."""
    load_dotenv(_root / ".env")


def get_settings(overrides: Optional[Dict[str, Any]] = None) -> "Settings":
    """Return validated settings: explicit overrides, then TVR_* env vars, then defaults.

    Overrides whose value is None are ignored so argparse namespaces can be passed as-is.
    """
    from src.config.settings import Settings

    values: Dict[str, Any] = {}
    for field_name, env_key in _ENV_KEYS.items():
        raw = _get(env_key)
        if raw:
            values[field_name] = raw
    for field_name, value in (overrides or {}).items():
        if value is not None:
            values[field_name] = value
    return Settings(**values)
