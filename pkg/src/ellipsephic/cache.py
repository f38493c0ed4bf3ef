"""Append-only JSON-lines result cache keyed by canonical parameter hashes."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .serialize import dumps_canonical


def cache_key(command: str, params: dict, version: str) -> str:
    """sha256 over the canonical serialization of (command, params, version)."""
    blob = dumps_canonical(
        {"command": command, "params": params, "version": version}
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class RunCache:
    """One JSON object per line; the "key" field indexes the record.

    Records are never rewritten. A key seen twice keeps its first record,
    which is safe because keys hash the full parameter set and version and
    payloads are deterministic functions of those.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._records: dict[str, dict] = {}
        if self.path.exists():
            with self.path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if not line:
                        continue
                    record = json.loads(line)
                    self._records.setdefault(record["key"], record)

    def __len__(self) -> int:
        return len(self._records)

    def get(self, key: str) -> dict | None:
        return self._records.get(key)

    def put(self, key: str, record: dict) -> None:
        if key in self._records:
            return
        record = dict(record, key=key)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(dumps_canonical(record) + "\n")
        self._records[key] = record
