"""Line-delimited record store for pipeline stages.

Each stage lives in ``<stage>.ndjson`` under the store directory. Records
are self-describing (stage, key, schema version, payload). Appends go
through :meth:`RecordStore.put_record`; full stage rewrites go through
:meth:`RecordStore.stage_writer`, which writes a temp file and renames it
into place so a stage file is always either the old or the new complete
version. Writers take an advisory per-stage file lock; readers don't.
"""

from __future__ import annotations

import json
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator

from filelock import FileLock

from .errors import StoreError

__all__ = ["SCHEMA_VERSION", "StoreRecord", "RecordStore"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class StoreRecord:
    stage: str
    key: str
    payload: Any


def _encode(stage: str, key: str, payload: Any) -> str:
    doc = {"stage": stage, "key": key, "schema": SCHEMA_VERSION, "payload": payload}
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


class RecordStore:
    def __init__(self, root: str | Path, create: bool = True):
        self.root = Path(root)
        if create:
            try:
                self.root.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise StoreError(f"cannot create store directory {self.root}: {exc}") from exc
        if not self.root.is_dir():
            raise StoreError(f"store directory does not exist: {self.root}")

    def stage_path(self, stage: str) -> Path:
        return self.root / f"{stage}.ndjson"

    def _lock(self, stage: str) -> FileLock:
        return FileLock(self.root / f"{stage}.lock")

    def put_record(self, stage: str, key: str, payload: Any) -> None:
        """Append one record to a stage file (created on first use)."""
        line = _encode(stage, key, payload)
        try:
            with self._lock(stage):
                with self.stage_path(stage).open("a", encoding="utf-8", newline="") as fh:
                    fh.write(line)
        except OSError as exc:
            raise StoreError(f"cannot write stage {stage!r}: {exc}") from exc

    @contextmanager
    def stage_writer(self, stage: str):
        """Atomically replace a stage file.

        Yields a ``put(key, payload)`` callable; the stage file is swapped in
        only if the block completes without raising.
        """
        tmp_fd, tmp_name = None, None
        try:
            with self._lock(stage):
                tmp_fd, tmp_name = tempfile.mkstemp(
                    prefix=f".{stage}.", suffix=".tmp", dir=self.root
                )
                with os.fdopen(tmp_fd, "w", encoding="utf-8", newline="") as fh:
                    tmp_fd = None

                    def put(key: str, payload: Any) -> None:
                        fh.write(_encode(stage, str(key), payload))

                    yield put
                os.replace(tmp_name, self.stage_path(stage))
                tmp_name = None
        except OSError as exc:
            raise StoreError(f"cannot write stage {stage!r}: {exc}") from exc
        finally:
            if tmp_name is not None and os.path.exists(tmp_name):
                os.unlink(tmp_name)

    def write_stage(self, stage: str, records: Iterator[tuple[str, Any]] | list[tuple[str, Any]]) -> int:
        """Atomically write a whole stage from (key, payload) pairs."""
        count = 0
        with self.stage_writer(stage) as put:
            for key, payload in records:
                put(key, payload)
                count += 1
        return count

    def get_records(self, stage: str) -> list[StoreRecord]:
        """All records of a stage in file order; missing stage reads empty."""
        path = self.stage_path(stage)
        if not path.exists():
            return []
        records: list[StoreRecord] = []
        with path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise StoreError(f"{path}:{lineno}: corrupt record: {exc}") from exc
                if doc.get("schema") != SCHEMA_VERSION:
                    raise StoreError(
                        f"{path}:{lineno}: schema version {doc.get('schema')!r}, "
                        f"expected {SCHEMA_VERSION}"
                    )
                records.append(StoreRecord(doc["stage"], doc["key"], doc["payload"]))
        return records

    def latest(self, stage: str) -> dict[str, Any]:
        """Last payload per key (append semantics: later records win)."""
        out: dict[str, Any] = {}
        for rec in self.get_records(stage):
            out[rec.key] = rec.payload
        return out

    def has_stage(self, stage: str) -> bool:
        return self.stage_path(stage).exists()
