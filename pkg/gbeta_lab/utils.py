from functools import wraps
from logging import Logger
import os
from pathlib import Path
import tempfile
from time import time_ns
from typing import Union


def format_bytes(num: float, suffix="B"):
    for unit in ["", "K", "M", "G", "T", "P", "E", "Z"]:
        if abs(num) < 1024.0:
            return f"{num:3.1f}{unit}{suffix}"
        num /= 1024.0
    return f"{num:.1f}Y{suffix}"


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def timed(logger: Logger):
    def timed_inner(f):
        @wraps(f)
        def wrapper(*args, **kwds):
            start = time_ns()

            result = f(*args, **kwds)

            elapsed = (time_ns() - start) / 1_000_000

            logger.debug(f"{f.__name__} took {elapsed} ms")

            return result

        return wrapper

    return timed_inner


def atomic_write(path: Union[str, Path], data: Union[str, bytes]) -> int:
    """Write `data` next to `path` and rename it into place.

    A failure halfway leaves the previous file (or no file) behind, never a
    truncated one. Returns the number of bytes written.
    """
    path = Path(path)
    payload = data.encode("utf-8") if isinstance(data, str) else data

    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise

    return len(payload)
