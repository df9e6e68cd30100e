# gr2/workers.py
import logging
from concurrent.futures import ThreadPoolExecutor

from gr2 import config

logger = logging.getLogger("gr2")


def parallel_map(fn, items, threads=None):
    """Map `fn` over `items`, keeping input order whatever the thread count."""
    items = list(items)
    threads = config.thread_count() if threads is None else threads
    if threads <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    logger.debug(f"parallel_map: {len(items)} items on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def chunked(items, size):
    items = list(items)
    return [items[i:i + size] for i in range(0, len(items), size)]
