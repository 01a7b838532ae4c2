"""Settings for the tvr package: TVR_* environment keys, .env file, and CLI overrides."""
from src.config.env import get_settings, load_env
from src.config.settings import DEFAULT_DILATIONS, QHAT, Settings

__all__ = ["load_env", "get_settings", "Settings", "QHAT", "DEFAULT_DILATIONS"]
