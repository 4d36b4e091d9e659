"""Binary interleaved-IQ capture files.

Layout (little-endian), 16-byte header then payload:

    offset  0  4s  magic "NCCB"
    offset  4  u16 format version (currently 1)
    offset  6  u16 M, antenna count
    offset  8  u32 K, snapshots per antenna
    offset 12  u32 reserved, written as zero
    offset 16  M*K complex64 samples, antenna-major (row m then row m+1)

Samples are stored at single precision; readers upcast to complex128, so a
write/read round trip of a complex128 block quantizes once and is exact
thereafter.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import IQFormatError

MAGIC = b"NCCB"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHII")
HEADER_SIZE = _HEADER.size  # 16
_SAMPLE_BYTES = 8  # complex64


def write_iq(path, samples) -> int:
    """Write an (M, K) complex block; returns the number of bytes written."""
    arr = np.asarray(samples)
    if arr.ndim != 2:
        raise ValueError(f"samples must be 2-D, got shape {arr.shape}")
    m, k = arr.shape
    if m < 1 or k < 1:
        raise ValueError(f"samples need at least one antenna and snapshot, got {arr.shape}")
    if m > 0xFFFF or k > 0xFFFFFFFF:
        raise ValueError(f"shape {arr.shape} exceeds the header field widths")
    if not np.isfinite(arr).all():
        raise ValueError("samples contain non-finite entries")
    payload = np.ascontiguousarray(arr, dtype=np.complex64)
    blob = _HEADER.pack(MAGIC, FORMAT_VERSION, m, k, 0) + payload.tobytes()
    Path(path).write_bytes(blob)
    return len(blob)


def read_iq(path) -> np.ndarray:
    """Read a capture file back as an (M, K) complex128 array.

    Malformed files raise IQFormatError naming the offending byte offset.
    """
    data = Path(path).read_bytes()
    if len(data) < HEADER_SIZE:
        raise IQFormatError(
            f"{path}: truncated header, {len(data)} of {HEADER_SIZE} bytes (offset {len(data)})"
        )
    magic, version, m, k, _reserved = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise IQFormatError(f"{path}: bad magic {magic!r} at offset 0")
    if version != FORMAT_VERSION:
        raise IQFormatError(f"{path}: unsupported format version {version} at offset 4")
    if m < 1:
        raise IQFormatError(f"{path}: antenna count must be >= 1, got {m} at offset 6")
    if k < 1:
        raise IQFormatError(f"{path}: snapshot count must be >= 1, got {k} at offset 8")
    expected = m * k * _SAMPLE_BYTES
    actual = len(data) - HEADER_SIZE
    if actual < expected:
        raise IQFormatError(
            f"{path}: truncated payload, {actual} of {expected} bytes (offset {len(data)})"
        )
    if actual > expected:
        raise IQFormatError(
            f"{path}: {actual - expected} trailing bytes at offset {HEADER_SIZE + expected}"
        )
    flat = np.frombuffer(data, dtype="<c8", count=m * k, offset=HEADER_SIZE)
    bad = np.flatnonzero(~np.isfinite(flat))
    if bad.size:
        off = HEADER_SIZE + int(bad[0]) * _SAMPLE_BYTES
        raise IQFormatError(f"{path}: non-finite sample at offset {off}")
    return flat.reshape(m, k).astype(np.complex128)
