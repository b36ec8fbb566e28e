"""Census checkpoint files.

Layout: an 8-byte magic, then length-prefixed records (4-byte big-endian
length followed by a UTF-8 JSON payload), then a trailing 32-byte SHA-256 of
everything before it.  The first record is the run header; each later record
is one completed interval.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
from pathlib import Path

MAGIC = b"DBSPCK01"
_LEN = struct.Struct(">I")


class CheckpointError(RuntimeError):
    """A checkpoint file is corrupt or belongs to a different run."""


def write_records(path: Path, records: list[dict]) -> None:
    body = bytearray(MAGIC)
    for rec in records:
        payload = json.dumps(rec, sort_keys=True, separators=(",", ":")).encode()
        body += _LEN.pack(len(payload)) + payload
    body += hashlib.sha256(body).digest()
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(body)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_records(path: Path) -> list[dict]:
    data = Path(path).read_bytes()
    if len(data) < len(MAGIC) + 32 or not data.startswith(MAGIC):
        raise CheckpointError(f"{path}: not a census checkpoint")
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CheckpointError(f"{path}: content hash mismatch")
    records = []
    pos = len(MAGIC)
    while pos < len(body):
        if pos + 4 > len(body):
            raise CheckpointError(f"{path}: truncated record header at byte {pos}")
        (n,) = _LEN.unpack_from(body, pos)
        pos += 4
        if pos + n > len(body):
            raise CheckpointError(f"{path}: truncated record at byte {pos}")
        try:
            records.append(json.loads(body[pos : pos + n]))
        except ValueError as exc:
            raise CheckpointError(f"{path}: undecodable record at byte {pos}") from exc
        pos += n
    return records
