"""
backend/hashing.py

Stable hashes of run inputs.
"""

import hashlib
import json
from pathlib import Path


def canonical_json(data) -> bytes:
    """
    Stable JSON serialization for hashing.

    Guarantees:
    - Sorted keys
    - No whitespace noise
    - UTF-8 stable encoding
    """
    return json.dumps(
        data,
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    ).encode("utf-8")


def git_blob_hash(data: bytes) -> str:
    """SHA-1 of `blob <len>\\0<data>`, as `git hash-object` computes it."""
    header = f"blob {len(data)}\0".encode("ascii")
    return hashlib.sha1(header + data).hexdigest()


def input_hash(config: dict, files=()) -> str:
    """Blob hash over the canonical config plus the blob hash of every input file."""
    payload = {
        "config": config,
        "inputs": {str(p): git_blob_hash(Path(p).expanduser().read_bytes()) for p in files},
    }
    return git_blob_hash(canonical_json(payload))
