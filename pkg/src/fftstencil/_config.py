import os

_threads = None


def get_threads() -> int:
    """Worker count for FFTs: explicit setting, else ``FFTSTENCIL_THREADS``, else all cores."""
    if _threads is not None:
        return _threads
    env = os.environ.get("FFTSTENCIL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def set_threads(k: int | None) -> None:
    global _threads
    if k is not None and int(k) < 1:
        raise ValueError("thread count must be positive")
    _threads = None if k is None else int(k)
