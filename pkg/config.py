"""
Configuration for the community detection toolkit

Values are read from the environment (and an optional .env file).
Command-line flags override everything defined here.
"""

import os
from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return default


# Algorithm defaults
DEFAULT_TRANSFORM = os.getenv("RMS_DEFAULT_TRANSFORM", "reciprocal")
DEFAULT_KERNEL = os.getenv("RMS_DEFAULT_KERNEL", "gaussian")
DEFAULT_TIE_RULE = os.getenv("RMS_TIE_RULE", "lowest_index")

# Execution
THREADS = max(1, _env_int("RMS_THREADS", 1))
VERBOSE = _env_int("RMS_VERBOSE", 1)
RECORD_TIMINGS = _env_int("RMS_RECORD_TIMINGS", 0) == 1

# Locations
DATASET_DIR = os.getenv("RMS_DATASET_DIR", "datasets")
SCHEMA_DIR = os.getenv(
    "RMS_SCHEMA_DIR",
    os.path.join(os.path.dirname(os.path.abspath(__file__)), "schemas"),
)
MANIFEST_FILE = "manifest.json"

# Sweeps
RADIUS_STEPS = max(1, _env_int("RMS_RADIUS_STEPS", 31))
SWEEP_K_MAX = max(1, _env_int("RMS_SWEEP_K_MAX", 20))

# Reproduction tolerances
NMI_TOLERANCE = 0.08
MODULARITY_TOLERANCE = 0.05
CLUSTER_COUNT_TOLERANCE = 2


def effective_config() -> dict:
    """Snapshot of the configuration, echoed into output metadata"""
    return {
        "transform": DEFAULT_TRANSFORM,
        "kernel": DEFAULT_KERNEL,
        "tie_rule": DEFAULT_TIE_RULE,
        "threads": THREADS,
        "record_timings": RECORD_TIMINGS,
        "radius_steps": RADIUS_STEPS,
        "sweep_k_max": SWEEP_K_MAX,
    }
