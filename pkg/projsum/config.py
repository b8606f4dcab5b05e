"""
Configuration from environment. Used by the samplers (thread cap, atom tolerance) and the CLI.
"""
import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env from project root (parent of projsum/)
_root = Path(__file__).resolve().parent.parent
load_dotenv(_root / ".env")


def _get(key: str, default: str = "") -> str:
    return os.environ.get(key, default).strip()


def thread_count() -> int:
    """Worker cap for replicate execution. Read on every call so PROJSUM_THREADS can change between runs."""
    raw = _get("PROJSUM_THREADS")
    if not raw:
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"PROJSUM_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"PROJSUM_THREADS must be a positive integer, got {raw!r}")
    return value


def debug_enabled() -> bool:
    return _get("PROJSUM_DEBUG").lower() in ("1", "true", "yes", "on")


PROJECT_ROOT = _root

# Default --out-dir for the experiment command
OUTPUT_DIR = Path(_get("PROJSUM_OUTPUT_DIR", "./runs"))

LOG_LEVEL = _get("PROJSUM_LOG_LEVEL", "WARNING").upper()

# Computed eigenvalues within this distance of 0 / theta count as atoms
ATOM_TOL = float(_get("PROJSUM_ATOM_TOL", "1e-8"))
