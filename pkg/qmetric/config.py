"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Configuration: .env loading, environment overrides and validation.
"""

import os
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from .constants import SUPPORTED_GAUGES
from .models import ToleranceConfig
from .modes import get_available_mode_names, is_mode_valid

ENV_TOLERANCES = {
    "QMETRIC_EQ_TOL": ("eq_tol", float),
    "QMETRIC_PSD_TOL": ("psd_tol", float),
    "QMETRIC_STRICT_FLOOR": ("strict_floor", float),
    "QMETRIC_SAMPLE_COUNT": ("sample_count", int),
    "QMETRIC_SEED": ("seed", int),
}


def load_env(verbose: bool = False) -> bool:
    """
    Load the environment variables from the .env file.

    Returns:
        True if a .env file was found.
    """
    env_loaded = load_dotenv(dotenv_path=".env")
    if verbose:
        if env_loaded:
            print("🔧 Environment variables loaded from .env file.")
        else:
            print("🔧 No .env file found. Using default tolerances.")
    return env_loaded


def tolerances_from_env(
    overrides: Optional[Dict[str, Any]] = None,
) -> ToleranceConfig:
    """
    Build the ToleranceConfig: overrides beat QMETRIC_* variables, which beat
    the defaults in constants.py.

    Args:
        overrides: Field values from the command line; None entries are ignored.

    Raises:
        ValueError: If a variable does not parse or a value is out of range.
    """
    values: Dict[str, Any] = {}
    for variable, (field, cast) in ENV_TOLERANCES.items():
        raw = os.environ.get(variable)
        if raw is None or raw.strip() == "":
            continue
        try:
            values[field] = cast(raw)
        except ValueError:
            raise ValueError(f"{variable}={raw!r} is not a valid {cast.__name__}.")
    for field, value in (overrides or {}).items():
        if value is not None:
            values[field] = value
    return ToleranceConfig(**values)


def validate_config(config: Dict[str, Any]) -> None:
    """
    Validate a run configuration.

    Args:
        config: Keys mode, gauge, eps and r are checked when present.

    Raises:
        ValueError: If a value is invalid.
    """
    mode = config.get("mode")
    if mode is not None and not is_mode_valid(mode):
        raise ValueError(f"Invalid mode. Available: {get_available_mode_names()}")

    gauge = config.get("gauge")
    if gauge is not None and gauge not in SUPPORTED_GAUGES:
        raise ValueError(f"Invalid gauge. Available: {SUPPORTED_GAUGES}")

    eps = config.get("eps")
    if eps is not None and not eps > 0.0:
        raise ValueError("eps must be positive.")

    r = config.get("r")
    if r is not None and not r > 0.0:
        raise ValueError("r must be positive.")
