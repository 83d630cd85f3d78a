"""
Simple file-based locking for batch output files.

Prevents two classify runs from appending to the same JSONL stream.
"""

from __future__ import annotations

import getpass                              # Get user ID
import socket                               # Get machine ID
from pathlib import Path

from scripts.report_utils import utc_now_iso


# Raised when the output is already locked by another run.
class RunLockedError(RuntimeError):
    pass


### Internal Function: Given an output path, return the default lock file path
# (same directory, same name, plus ".lock").
def _default_lock_path(out_path: Path) -> Path:
    return out_path.with_name(out_path.name + ".lock")


### Public Function: Checks if .lock file exists
# Raises RunLockedError if it does
# If not: creates it and returns the lock file Path
def acquire_lock(
    out_path: str | Path,                   # Path of the output being written
    lock_path: str | Path | None = None,    # Optional explicit lock file path
    purpose: str | None = None,             # Optional short description of the run
) -> Path:

    out_path = Path(out_path)
    lock_file = Path(lock_path) if lock_path else _default_lock_path(out_path)

    if lock_file.exists():
        message = lock_file.read_text(errors="ignore")
        raise RunLockedError(
            f"Output is already locked by another run.\n\n"
            f"Lock file: {lock_file}\n\n"
            f"{message}\n"
            f"If no run is active, delete the lock file and retry."
        )

    contents = [
        "RUN LOCK",
        f"Output: {out_path}",
        f"Locked by: {getpass.getuser()}@{socket.gethostname()}",
        f"Time (UTC): {utc_now_iso()}",
    ]
    if purpose:
        contents.append(f"Purpose: {purpose}")

    lock_file.parent.mkdir(parents=True, exist_ok=True)
    lock_file.write_text("\n".join(contents) + "\n", encoding="utf-8")
    return lock_file


### Public Function: Removes lock file
def release_lock(lock_file: str | Path) -> None:
    lock_file = Path(lock_file)

    if lock_file.exists():
        lock_file.unlink()
