"""Thread-pool map capped by the SKEWFLOW_THREADS environment variable."""
import os
from concurrent.futures import ThreadPoolExecutor


def thread_count(requested=None):
    if requested is not None:
        return max(1, int(requested))
    try:
        return max(1, int(os.environ.get("SKEWFLOW_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items, threads=None):
    """Ordered map; serial when only one thread is allowed."""
    n = min(thread_count(threads), len(items)) if items else 1
    if n <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
