#!/usr/bin/env python3
"""
Solver Settings - INI defaults, environment overrides and logging setup
Reads orlicz_config.ini (or $ORLICZ_CONFIG) once at import time.
"""

import configparser
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

PROJECT_ROOT = Path(__file__).parent.parent

load_dotenv(PROJECT_ROOT / ".env")


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").lower() in ["1", "true", "yes"]


def load_config() -> configparser.ConfigParser:
    """Load solver configuration from file."""
    config = configparser.ConfigParser()
    config_file = Path(os.environ.get("ORLICZ_CONFIG", PROJECT_ROOT / "orlicz_config.ini"))

    if config_file.exists():
        config.read(config_file)
        logging.debug(f"✅ Loaded config from: {config_file}")
    else:
        logging.warning(f"⚠️  Config file not found: {config_file}, using defaults")

    return config


class SolverConfig:
    _config = load_config()

    # Quadrature
    QUAD_ABS_TOLERANCE = _config.getfloat("QUADRATURE", "ABS_TOLERANCE", fallback=1e-12)
    QUAD_MAX_SUBINTERVALS = _config.getint(
        "QUADRATURE", "MAX_SUBINTERVALS", fallback=200
    )

    # Root finding
    ROOT_MAX_ITERATIONS = _config.getint("ROOT_FINDING", "MAX_ITERATIONS", fallback=200)
    NORM_RELATIVE_TOLERANCE = _config.getfloat(
        "ROOT_FINDING", "NORM_RELATIVE_TOLERANCE", fallback=1e-12
    )

    # Gradient descent on I_λ
    RESIDUAL_TOLERANCE = _config.getfloat("DESCENT", "RESIDUAL_TOLERANCE", fallback=1e-6)
    DESCENT_MAX_ITERATIONS = _config.getint("DESCENT", "MAX_ITERATIONS", fallback=50000)
    STEP_TOLERANCE = _config.getfloat("DESCENT", "STEP_TOLERANCE", fallback=1e-12)
    ARMIJO_CONSTANT = _config.getfloat("DESCENT", "ARMIJO_CONSTANT", fallback=1e-4)
    BACKTRACK_FACTOR = _config.getfloat("DESCENT", "BACKTRACK_FACTOR", fallback=0.5)
    POLISH_THRESHOLD = _config.getfloat("DESCENT", "POLISH_THRESHOLD", fallback=1e-3)

    # Mountain pass on J_λ
    PATH_POINTS = _config.getint("MOUNTAIN_PASS", "PATH_POINTS", fallback=20)
    PATH_MAX_ITERATIONS = _config.getint("MOUNTAIN_PASS", "MAX_ITERATIONS", fallback=2000)
    DOUBLING_BUDGET = _config.getint("MOUNTAIN_PASS", "DOUBLING_BUDGET", fallback=20)

    # Bump u1
    BUMP_T0 = _config.getfloat("BUMP", "T0", fallback=2.0)
    BUMP_INNER_FRACTION = _config.getfloat("BUMP", "INNER_FRACTION", fallback=0.5)

    # Logging
    LOG_DIR = os.environ.get(
        "ORLICZ_LOG_DIR", _config.get("LOGGING", "LOG_DIR", fallback="logs")
    )
    WRITE_TRACES = _config.getboolean("LOGGING", "WRITE_TRACES", fallback=False)
    DEBUG = _env_flag("ORLICZ_DEBUG")


def setup_logging(name: str = "orlicz") -> None:
    """Route logs to <LOG_DIR>/<name>.out, <name>.err and stderr.

    stderr keeps stdout free for the JSON/CSV the CLI prints.
    """
    log_dir = Path(SolverConfig.LOG_DIR)
    log_dir.mkdir(parents=True, exist_ok=True)

    logging.basicConfig(
        level=logging.DEBUG if SolverConfig.DEBUG else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=[
            logging.FileHandler(log_dir / f"{name}.out"),
            logging.StreamHandler(sys.stderr),
        ],
        force=True,
    )

    error_handler = logging.FileHandler(log_dir / f"{name}.err")
    error_handler.setLevel(logging.ERROR)
    logging.getLogger().addHandler(error_handler)
