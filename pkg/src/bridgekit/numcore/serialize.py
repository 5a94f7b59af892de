"""Flat binary tensor format.

Layout (all integers little-endian):
  8 bytes  magic "BKTENSR1"
  u32      rank
  u64*rank dims
  payload  row-major float64, little-endian

The payload is always float64; float32 tensors are up-cast on save.
"""

import struct

import numpy as np

from ..errors import ShapeError

MAGIC = b"BKTENSR1"


def tensor_to_bytes(arr):
    arr = np.ascontiguousarray(arr, dtype="<f8")
    header = MAGIC + struct.pack("<I", arr.ndim)
    header += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    return header + arr.tobytes()


def tensor_from_bytes(buf, offset=0):
    """Parse one tensor; returns (array, next_offset)."""
    if buf[offset:offset + 8] != MAGIC:
        raise ShapeError("bad tensor magic; not a BKTENSR1 blob")
    offset += 8
    (rank,) = struct.unpack_from("<I", buf, offset)
    offset += 4
    dims = struct.unpack_from(f"<{rank}Q", buf, offset)
    offset += 8 * rank
    count = 1
    for d in dims:
        count *= d
    arr = np.frombuffer(buf, dtype="<f8", count=count, offset=offset)
    offset += 8 * count
    return arr.reshape(dims).astype(np.float64), offset


def save_tensor(path, arr):
    with open(path, "wb") as fh:
        fh.write(tensor_to_bytes(arr))


def load_tensor(path):
    with open(path, "rb") as fh:
        arr, _ = tensor_from_bytes(fh.read())
    return arr
