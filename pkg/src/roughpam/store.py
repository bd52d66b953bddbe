"""Artifact persistence: deterministic CSV/JSON payloads, append-only index.

Payload files are bit-reproducible for a fixed (config, seed): floats are
rendered with ``repr`` (shortest round-trip form), keys are sorted, and no
timestamps enter payloads.  Timestamps live only in the results index,
which is append-only; re-registering the same (fingerprint, command) with
different payload bytes is an integrity error.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import IntegrityError

ARTIFACT_VERSION = 1
INDEX_NAME = "index.jsonl"


def format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(header_fields: dict, columns: list[str], rows: list[tuple]) -> str:
    """Render a payload CSV with a commented header block."""
    lines = [f"# {k} = {format_value(v)}" for k, v in header_fields.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def payload_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class ResultRecord:
    fingerprint: str
    command: str
    files: dict          # name -> sha256 of payload bytes
    artifact_version: int
    timestamp: float


class ResultStore:
    """Append-only store of payload files plus a JSONL index."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _index_path(self) -> Path:
        return self.root / INDEX_NAME

    def _existing(self, fingerprint: str, command: str) -> dict | None:
        path = self._index_path()
        if not path.exists():
            return None
        found = None
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec["fingerprint"] == fingerprint and rec["command"] == command:
                found = rec
        return found

    def write(self, fingerprint: str, command: str, payloads: dict[str, str]) -> ResultRecord:
        """Persist named payloads and register them in the index.

        A prior record with the same (fingerprint, command) must match
        byte for byte; a mismatch raises ``IntegrityError``.
        """
        hashes = {name: payload_hash(text.encode()) for name, text in payloads.items()}
        prior = self._existing(fingerprint, command)
        if prior is not None and prior["files"] != hashes:
            raise IntegrityError(
                f"fingerprint {fingerprint} for command {command!r} already recorded "
                f"with different payload bytes")
        outdir = self.root / fingerprint
        outdir.mkdir(parents=True, exist_ok=True)
        for name, text in payloads.items():
            (outdir / name).write_text(text)
        record = ResultRecord(fingerprint=fingerprint, command=command,
                              files=hashes, artifact_version=ARTIFACT_VERSION,
                              timestamp=time.time())
        with self._index_path().open("a") as fh:
            fh.write(json.dumps({
                "fingerprint": record.fingerprint,
                "command": record.command,
                "files": record.files,
                "artifact_version": record.artifact_version,
                "timestamp": record.timestamp,
            }, sort_keys=True) + "\n")
        return record
