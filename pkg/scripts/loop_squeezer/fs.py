"""File system utilities for loop-squeezer reports."""

import csv
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO

import numpy as np

from loop_squeezer.constants import FLOAT_DIGITS, METRIC_DIGITS, METRIC_KEYS

# File locking (platform-specific)
if sys.platform == "win32":
    import msvcrt

    def _lock_file(f: TextIO) -> None:
        msvcrt.locking(f.fileno(), msvcrt.LK_NBLCK, 1)

    def _unlock_file(f: TextIO) -> None:
        msvcrt.locking(f.fileno(), msvcrt.LK_UNLCK, 1)
else:
    import fcntl

    def _lock_file(f: TextIO) -> None:
        fcntl.flock(f.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)

    def _unlock_file(f: TextIO) -> None:
        fcntl.flock(f.fileno(), fcntl.LOCK_UN)


class FileLock:
    """Lock an output directory so two runs do not interleave their reports."""

    def __init__(self, path: Path, timeout: int = 5) -> None:
        self.lock_path = Path(path) / ".loop-squeezer.lock"
        self.timeout = timeout
        self._lock_file: Optional[TextIO] = None

    def acquire(self) -> bool:
        start = time.time()
        while time.time() - start < self.timeout:
            try:
                # Stale lock (>60s old)
                if self.lock_path.exists():
                    age = time.time() - self.lock_path.stat().st_mtime
                    if age > 60:
                        self.lock_path.unlink()

                self._lock_file = open(self.lock_path, "w")
                _lock_file(self._lock_file)
                self._lock_file.write(str(os.getpid()))
                self._lock_file.flush()
                return True
            except OSError:
                time.sleep(0.1)
        return False

    def release(self) -> None:
        if self._lock_file:
            try:
                _unlock_file(self._lock_file)
                self._lock_file.close()
                if self.lock_path.exists():
                    self.lock_path.unlink()
            except OSError:
                pass
            self._lock_file = None

    def __enter__(self) -> "FileLock":
        if not self.acquire():
            raise OSError(f"Could not acquire lock on {self.lock_path} (timeout {self.timeout}s)")
        return self

    def __exit__(self, *args: Any) -> None:
        self.release()


def ensure_out_dir(path: Path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def round_floats(value: Any, key: Optional[str] = None) -> Any:
    """Round floats for stable output: metric keys to 4 digits, the rest to 6.

    NaN and infinities become None.
    """
    if isinstance(value, dict):
        return {k: round_floats(v, k) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, key) for v in value]
    if isinstance(value, np.ndarray):
        return round_floats(value.tolist(), key)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if not math.isfinite(x):
            return None
        digits = METRIC_DIGITS if key in METRIC_KEYS else FLOAT_DIGITS
        rounded = round(x, digits)
        return 0.0 if rounded == 0 else rounded
    return value


def write_json(path: Path, data: Dict[str, Any]) -> None:
    """Write sorted, rounded JSON atomically."""
    path = Path(path)
    text = json.dumps(round_floats(data), indent=2, sort_keys=True) + "\n"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path: Path) -> Dict[str, Any]:
    with open(path) as f:
        return json.load(f)


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return "" if not math.isfinite(x) else repr(round(x, 10))
    return value


def write_csv(path: Path, headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    """Header always written, even with no rows."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(list(headers))
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def read_csv_rows(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
