"""
File writes with retry, shared by checkpoints, metrics and plots.
"""
import json
from pathlib import Path
from typing import Any, Union

from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from src.utils.errors import CheckpointError

_write_retry = retry(
    retry=retry_if_exception_type(OSError),
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=0.1, min=0.1, max=1),
    reraise=True,
)


@_write_retry
def _write(path: Path, payload: Union[str, bytes]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, bytes):
        path.write_bytes(payload)
    else:
        path.write_text(payload, encoding="utf-8")


def write_bytes(path: Union[str, Path], payload: bytes) -> Path:
    """
    Write binary content, retrying transient OS failures.

    @param path - Destination
    @param payload - Bytes to write
    @return The written path
    """
    path = Path(path)
    try:
        _write(path, payload)
    except OSError as e:
        raise CheckpointError(f"Failed to write {path}: {e}", {"path": str(path)}) from e
    return path


def write_text(path: Union[str, Path], payload: str) -> Path:
    """
    Write text content, retrying transient OS failures.

    @param path - Destination
    @param payload - Text to write
    @return The written path
    """
    path = Path(path)
    try:
        _write(path, payload)
    except OSError as e:
        raise CheckpointError(f"Failed to write {path}: {e}", {"path": str(path)}) from e
    return path


def write_json(path: Union[str, Path], payload: Any) -> Path:
    """Write a JSON document with stable key order."""
    return write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_json(path: Union[str, Path]) -> Any:
    """
    Read a JSON document.

    @param path - Source file
    @return Parsed content
    """
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CheckpointError(f"Failed to read {path}: {e}", {"path": str(path)}) from e
