"""
report_utils.py

Helper utilities shared by the report writers.

Provides:
- UTC timestamps for the volatile report section
- content hashes of algebra files and of canonical JSON documents
- canonical JSON text (sorted keys, two-space indent, trailing newline)
"""

from __future__ import annotations

import hashlib   # SHA-256 for source ids and fingerprints
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any


# --------------------------------------------------
# Create UTC time
def utc_now_iso() -> str:
    """Returns current date/time as ISO-8601 string in UTC."""
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")


# --------------------------------------------------
# Content hash of an input file
def compute_source_id(file_path: Path, chunk_size: int = 1024 * 1024) -> str:
    """
    Compute SHA-256 hash (64 char hex string) of file contents.
    (Chunks first to avoid loading the entire file into memory.)

    Note: identical file contents -> identical source_id
    (so any file change -> new source_id)
    """
    file_path = Path(file_path)
    h = hashlib.sha256()
    with file_path.open("rb") as f:
        while True:
            chunk = f.read(chunk_size)
            if not chunk:
                break
            h.update(chunk)
    return h.hexdigest()


# --------------------------------------------------
# Canonical JSON
def canonical_json(document: Any, *, indent: int | None = 2) -> str:
    """Sorted keys, no ASCII escaping; two-space indent plus newline unless ``indent`` is None."""
    if indent is None:
        return json.dumps(document, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return json.dumps(document, sort_keys=True, ensure_ascii=False, indent=indent) + "\n"


def fingerprint_document(document: Any) -> str:
    """
    SHA-256 of the compact canonical JSON of ``document``.

    Used for algebra fingerprints: two algebras with the same size and
    operation tables get the same fingerprint whatever file they came from.
    """
    return hashlib.sha256(canonical_json(document, indent=None).encode("utf-8")).hexdigest()
