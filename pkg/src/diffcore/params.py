"""
Named parameter storage and initializers.
"""
import hashlib
from typing import Dict, Iterator, Mapping, Optional, Tuple

import numpy as np

from src.diffcore.tensor import DTYPE, Tensor
from src.utils.errors import CheckpointError, ConfigError, DimensionError


class ParamStore:
    """
    Ordered collection of named parameter tensors.

    Iteration order is insertion order, so it is deterministic for a fixed
    construction sequence.
    """
    def __init__(self):
        self._params: Dict[str, Tensor] = {}

    def add(self, name: str, value: np.ndarray) -> Tensor:
        """
        Register a new parameter.

        @param name - Unique name
        @param value - Initial values
        @return The parameter tensor
        """
        if name in self._params:
            raise ConfigError(f"Duplicate parameter name: {name}", {"name": name})
        tensor = Tensor(value, requires_grad=True, name=name)
        self._params[name] = tensor
        return tensor

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def __iter__(self) -> Iterator[str]:
        return iter(self._params)

    def names(self) -> Tuple[str, ...]:
        return tuple(self._params)

    def items(self) -> Iterator[Tuple[str, Tensor]]:
        return iter(self._params.items())

    def scope(self, prefix: str) -> "ParamScope":
        """Return a view that resolves short keys under prefix."""
        return ParamScope(self, prefix)

    def to_arrays(self) -> Dict[str, np.ndarray]:
        """Copy all values out as plain arrays."""
        return {name: t.data.copy() for name, t in self._params.items()}

    def load_arrays(self, arrays: Mapping[str, np.ndarray], prefix: str = "") -> None:
        """
        Overwrite parameter values in place.

        @param arrays - Values keyed by (prefix-stripped) name; must cover every parameter
        @param prefix - Optional prefix the keys carry
        """
        for name, tensor in self._params.items():
            key = prefix + name
            if key not in arrays:
                raise CheckpointError(f"Missing parameter {key}", {"name": key})
            value = np.asarray(arrays[key], dtype=DTYPE)
            if value.shape != tensor.shape:
                raise DimensionError(f"load:{key}", tensor.shape, value.shape)
            tensor.data[...] = value

    def copy_from(self, other: "ParamStore") -> None:
        """Deep-copy every value from a store with the same layout."""
        self.load_arrays(other.to_arrays())

    def clone(self) -> "ParamStore":
        """Return an independent store with the same names and values."""
        twin = ParamStore()
        for name, tensor in self._params.items():
            twin.add(name, tensor.data.copy())
        return twin

    def checksum(self) -> str:
        """SHA-256 over names, shapes and little-endian values."""
        digest = hashlib.sha256()
        for name, tensor in self._params.items():
            digest.update(name.encode("utf-8"))
            digest.update(str(tensor.shape).encode("utf-8"))
            digest.update(tensor.data.astype("<f8").tobytes())
        return digest.hexdigest()


class ParamScope(Mapping[str, Tensor]):
    """Read-only view of a ParamStore restricted to one prefix."""
    def __init__(self, store: ParamStore, prefix: str):
        self.store = store
        self.prefix = prefix

    def __getitem__(self, key: str) -> Tensor:
        return self.store[f"{self.prefix}.{key}"]

    def __iter__(self) -> Iterator[str]:
        head = self.prefix + "."
        return (name[len(head):] for name in self.store if name.startswith(head))

    def __len__(self) -> int:
        return sum(1 for _ in self)


def _uniform(rng: np.random.Generator, fan_in: int, shape: Tuple[int, ...]) -> np.ndarray:
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape)


def init_linear(
    store: ParamStore, prefix: str, d_in: int, d_out: int, rng: Optional[np.random.Generator]
) -> ParamScope:
    """
    Register w (d_in, d_out) and b (d_out,).

    Weights are uniform in ±1/√fan_in and biases zero; rng=None gives all zeros.
    """
    w = np.zeros((d_in, d_out)) if rng is None else _uniform(rng, d_in, (d_in, d_out))
    store.add(f"{prefix}.w", w)
    store.add(f"{prefix}.b", np.zeros(d_out))
    return store.scope(prefix)


def init_gru(
    store: ParamStore, prefix: str, d_in: int, hidden: int, rng: Optional[np.random.Generator]
) -> ParamScope:
    """Register w_x, w_h, b_x, b_h for a GRU cell."""
    if rng is None:
        w_x, w_h = np.zeros((d_in, 3 * hidden)), np.zeros((hidden, 3 * hidden))
    else:
        w_x = _uniform(rng, d_in, (d_in, 3 * hidden))
        w_h = _uniform(rng, hidden, (hidden, 3 * hidden))
    store.add(f"{prefix}.w_x", w_x)
    store.add(f"{prefix}.w_h", w_h)
    store.add(f"{prefix}.b_x", np.zeros(3 * hidden))
    store.add(f"{prefix}.b_h", np.zeros(3 * hidden))
    return store.scope(prefix)


def init_lstm(
    store: ParamStore, prefix: str, d_in: int, hidden: int, rng: Optional[np.random.Generator]
) -> ParamScope:
    """Register w_x, w_h, b for an LSTM cell; the forget-gate bias starts at 1."""
    if rng is None:
        w_x, w_h = np.zeros((d_in, 4 * hidden)), np.zeros((hidden, 4 * hidden))
        b = np.zeros(4 * hidden)
    else:
        w_x = _uniform(rng, d_in, (d_in, 4 * hidden))
        w_h = _uniform(rng, hidden, (hidden, 4 * hidden))
        b = np.zeros(4 * hidden)
        b[hidden:2 * hidden] = 1.0
    store.add(f"{prefix}.w_x", w_x)
    store.add(f"{prefix}.w_h", w_h)
    store.add(f"{prefix}.b", b)
    return store.scope(prefix)
