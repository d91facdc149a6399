"""
Binary parameter checkpoints.

Layout (all integers little-endian):
    b"HMARL-CKPT-1\\n"
    uint32 entry count
    per entry: uint16 name length, utf-8 name, uint8 ndim, uint32 extent * ndim,
               float64 values in row-major order
"""
import struct
from pathlib import Path
from typing import Dict, Mapping, Union

import numpy as np

from src.diffcore.params import ParamStore
from src.utils.errors import CheckpointError
from src.utils.io import write_bytes

MAGIC = b"HMARL-CKPT-1\n"


def encode_arrays(arrays: Mapping[str, np.ndarray]) -> bytes:
    """Serialize named arrays into the checkpoint byte format."""
    chunks = [MAGIC, struct.pack("<I", len(arrays))]
    for name, value in arrays.items():
        value = np.asarray(value, dtype="<f8")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<B", value.ndim))
        chunks.append(struct.pack(f"<{value.ndim}I", *value.shape))
        chunks.append(np.ascontiguousarray(value).tobytes())
    return b"".join(chunks)


def decode_arrays(payload: bytes) -> Dict[str, np.ndarray]:
    """
    Parse checkpoint bytes.

    @param payload - Full file content
    @return Arrays keyed by name, in file order
    """
    if not payload.startswith(MAGIC):
        raise CheckpointError("Not an HMARL-CKPT-1 checkpoint", {"header": payload[:16].decode("latin-1")})
    offset = len(MAGIC)
    try:
        (count,) = struct.unpack_from("<I", payload, offset)
        offset += 4
        arrays: Dict[str, np.ndarray] = {}
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", payload, offset)
            offset += 2
            name = payload[offset:offset + name_len].decode("utf-8")
            offset += name_len
            (ndim,) = struct.unpack_from("<B", payload, offset)
            offset += 1
            shape = struct.unpack_from(f"<{ndim}I", payload, offset)
            offset += 4 * ndim
            n_values = int(np.prod(shape)) if ndim else 1
            values = np.frombuffer(payload, dtype="<f8", count=n_values, offset=offset)
            offset += 8 * n_values
            arrays[name] = values.astype(np.float64).reshape(shape)
    except (struct.error, ValueError) as e:
        raise CheckpointError(f"Truncated or corrupt checkpoint: {e}") from e
    return arrays


def save_params(path: Union[str, Path], params: ParamStore) -> Path:
    """
    Write a parameter store to disk.

    @param path - Destination file
    @param params - Parameters to save
    @return The written path
    """
    return write_bytes(path, encode_arrays(params.to_arrays()))


def load_arrays(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """Read named arrays from a checkpoint file."""
    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}", {"path": str(path)}) from e
    return decode_arrays(payload)


def load_params(path: Union[str, Path], params: ParamStore) -> ParamStore:
    """
    Overwrite a parameter store with values from disk.

    @param path - Source file
    @param params - Store with the expected layout
    @return The same store, updated
    """
    params.load_arrays(load_arrays(path))
    return params
