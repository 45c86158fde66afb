"""Model checkpoint files shared by both classifiers.

Layout: one header line
    PANACEA-CKPT v1 <kind> <text|binary> <header-json>
followed by one block per array. Text mode writes each matrix row as decimal
floats (repr round-trips float64 exactly); binary mode writes raw
little-endian float64. Loading validates declared shapes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import BadCheckpoint

MAGIC = "PANACEA-CKPT"
VERSION = "v1"


def save_checkpoint(path: str | Path, kind: str, header: dict,
                    arrays: dict[str, np.ndarray], binary: bool = False) -> None:
    mode = "binary" if binary else "text"
    with Path(path).open("wb") as fh:
        head = f"{MAGIC} {VERSION} {kind} {mode} {json.dumps(header, sort_keys=True)}\n"
        fh.write(head.encode("utf-8"))
        for name in sorted(arrays):
            arr = np.ascontiguousarray(arrays[name], dtype=np.float64)
            shape = " ".join(str(s) for s in arr.shape) or "0"
            fh.write(f"@ {name} {arr.ndim} {shape}\n".encode("utf-8"))
            if binary:
                fh.write(arr.astype("<f8").tobytes())
                fh.write(b"\n")
            else:
                flat = arr.reshape(-1, arr.shape[-1]) if arr.ndim > 1 else arr.reshape(1, -1)
                for row in flat:
                    fh.write((" ".join(repr(float(x)) for x in row) + "\n").encode("utf-8"))


def load_checkpoint(path: str | Path) -> tuple[str, dict, dict[str, np.ndarray]]:
    raw = Path(path).read_bytes()
    newline = raw.find(b"\n")
    if newline < 0:
        raise BadCheckpoint("empty checkpoint file")
    head = raw[:newline].decode("utf-8").split(" ", 4)
    if len(head) != 5 or head[0] != MAGIC or head[1] != VERSION:
        raise BadCheckpoint(f"bad header: {raw[:newline]!r}")
    kind, mode = head[2], head[3]
    try:
        header = json.loads(head[4])
    except json.JSONDecodeError as exc:
        raise BadCheckpoint(f"bad header json: {exc}") from exc

    arrays: dict[str, np.ndarray] = {}
    pos = newline + 1
    while pos < len(raw):
        line_end = raw.find(b"\n", pos)
        if line_end < 0:
            raise BadCheckpoint("truncated array header")
        fields = raw[pos:line_end].decode("utf-8").split()
        if not fields or fields[0] != "@":
            raise BadCheckpoint(f"expected array header at byte {pos}")
        name = fields[1]
        ndim = int(fields[2])
        shape = tuple(int(x) for x in fields[3:3 + ndim])
        count = int(np.prod(shape)) if shape else 0
        pos = line_end + 1
        if mode == "binary":
            nbytes = count * 8
            data = np.frombuffer(raw[pos:pos + nbytes], dtype="<f8")
            if data.size != count:
                raise BadCheckpoint(f"array {name}: expected {count} values")
            arrays[name] = data.reshape(shape).copy()
            pos += nbytes + 1  # trailing newline
        else:
            rows = shape[0] if ndim > 1 else 1
            values = []
            for _ in range(max(rows, 1) if count else 0):
                line_end = raw.find(b"\n", pos)
                if line_end < 0:
                    raise BadCheckpoint(f"array {name}: truncated rows")
                values.extend(float(x) for x in raw[pos:line_end].split())
                pos = line_end + 1
            data = np.array(values, dtype=np.float64)
            if data.size != count:
                raise BadCheckpoint(f"array {name}: expected {count} values, got {data.size}")
            arrays[name] = data.reshape(shape)
    return kind, header, arrays


def expect_shape(arrays: dict[str, np.ndarray], name: str, shape: tuple[int, ...]) -> np.ndarray:
    if name not in arrays:
        raise BadCheckpoint(f"missing array {name}")
    if arrays[name].shape != shape:
        raise BadCheckpoint(f"array {name}: shape {arrays[name].shape}, expected {shape}")
    return arrays[name]
