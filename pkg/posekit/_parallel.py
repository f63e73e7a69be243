import logging
import os
from concurrent.futures import ThreadPoolExecutor

from posekit.exceptions import InvalidConfig

logger = logging.getLogger(__name__)

THREADS_ENV = "POSEKIT_THREADS"


def thread_count() -> int | None:
    """Worker cap from POSEKIT_THREADS: None means auto (unset or 0), 1 means serial."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise InvalidConfig(f"[!] {THREADS_ENV} must be a non-negative integer, got '{raw}'.") from None
    if value < 0:
        raise InvalidConfig(f"[!] {THREADS_ENV} must be a non-negative integer, got {value}.")
    return value or None


def ordered_map(fn, items) -> list:
    """Apply `fn` to every item, possibly concurrently; results keep the input order."""
    items = list(items)
    workers = thread_count()
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
