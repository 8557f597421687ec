"""Trace files: 0/1 text lines and binary portable graymap space-time diagrams."""
from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Any, Mapping

import numpy as np

from .core import Trace


def header_lines(header: Mapping[str, Any] | None) -> str:
    if not header:
        return ""
    return "".join(f"# {k}: {json.dumps(v, sort_keys=True)}\n" for k, v in header.items())


def format_trace(trace: Trace | np.ndarray, header: Mapping[str, Any] | None = None) -> str:
    """One line of 0/1 characters per snapshot, preceded by ``#`` header lines."""
    rows = trace.snapshots if isinstance(trace, Trace) else np.asarray(trace)
    body = "".join("".join("1" if x else "0" for x in row) + "\n" for row in rows.tolist())
    return header_lines(header) + body


def read_trace(text: str) -> np.ndarray:
    rows = [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]
    return np.array([[int(ch) for ch in row] for row in rows], dtype=np.uint8)


def to_pgm(trace: Trace | np.ndarray, comment: Mapping[str, Any] | None = None) -> bytes:
    """Binary (P5) graymap: rows are time steps, 0 is white and 1 is black."""
    rows = trace.snapshots if isinstance(trace, Trace) else np.asarray(trace)
    height, width = rows.shape
    head = b"P5\n"
    if comment:
        head += b"# " + json.dumps(dict(comment), sort_keys=True).encode() + b"\n"
    head += f"{width} {height}\n255\n".encode()
    pixels = np.where(rows.astype(bool), 0, 255).astype(np.uint8)
    return head + pixels.tobytes()


def read_pgm(data: bytes) -> np.ndarray:
    """Read a P5 graymap written by :func:`to_pgm` back into 0/1 states."""
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end : end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ValueError(f"not a binary graymap (magic {fields[0]!r})")
    width, height = int(fields[1]), int(fields[2])
    pixels = np.frombuffer(data[pos + 1 : pos + 1 + width * height], dtype=np.uint8)
    return (pixels.reshape(height, width) < 128).astype(np.uint8)


class TraceWriter:
    """Run sink that streams each snapshot to a text file as it is produced."""

    def __init__(self, stream: IO[str]):
        self.stream = stream

    def __call__(self, t: int, snapshot: np.ndarray) -> None:
        self.stream.write("".join("1" if x else "0" for x in snapshot.tolist()) + "\n")


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
