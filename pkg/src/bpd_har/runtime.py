import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# a local .env may carry BPD_THREADS for batch runs
load_dotenv()

THREADS_ENV_VAR = "BPD_THREADS"


def default_thread_count() -> int:
    """Worker threads for per-subject loading and fold parallelism."""
    raw = os.getenv(THREADS_ENV_VAR)
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"ignoring non-integer {THREADS_ENV_VAR}={raw!r}")
        return 1
    return max(1, value)
