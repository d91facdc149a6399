"""
Reverse-mode differentiation core.

A Tensor wraps a float64 numpy array. When a Tape is active, every primitive
that touches a tensor requiring gradients records itself on the tape together
with a closure mapping the output gradient to its inputs' gradients. The
reverse pass walks the tape backwards, which is a valid reverse topological
order because nodes are appended in creation order.
"""
import threading
from typing import Callable, Dict, Iterable, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from src.utils.errors import DimensionError, NumericalError

DTYPE = np.float64

GradFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]
ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence[float]]

_state = threading.local()


def _tape_stack() -> List["Tape"]:
    stack = getattr(_state, "stack", None)
    if stack is None:
        stack = []
        _state.stack = stack
    return stack


def active_tape() -> Optional["Tape"]:
    """Return the innermost active tape, if any."""
    stack = _tape_stack()
    return stack[-1] if stack else None


class Tensor:
    """
    Dense real array with optional gradient tracking.

    @param data - Values, copied into a float64 array
    @param requires_grad - Whether gradients flow into this tensor
    @param name - Optional label (parameters carry their store name)
    """
    __slots__ = ("data", "requires_grad", "name", "_parents", "_grad_fn")

    def __init__(self, data: ArrayLike, requires_grad: bool = False, name: Optional[str] = None):
        if isinstance(data, Tensor):
            data = data.data
        self.data = np.array(data, dtype=DTYPE)
        self.requires_grad = requires_grad
        self.name = name
        self._parents: Tuple["Tensor", ...] = ()
        self._grad_fn: Optional[GradFn] = None

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def numpy(self) -> np.ndarray:
        """Return a copy of the values."""
        return self.data.copy()

    def item(self) -> float:
        """Return the value of a single-element tensor."""
        if self.data.size != 1:
            raise DimensionError("item", "1 element", self.data.shape)
        return float(self.data.reshape(-1)[0])

    def detach(self) -> "Tensor":
        """Return a tensor sharing no graph history."""
        return Tensor(self.data)

    def __repr__(self) -> str:
        label = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}{label})"

    # Operator sugar delegates to the primitives in ops.
    def __add__(self, other: ArrayLike) -> "Tensor":
        from src.diffcore import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other: ArrayLike) -> "Tensor":
        from src.diffcore import ops
        return ops.sub(self, other)

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        from src.diffcore import ops
        return ops.sub(other, self)

    def __mul__(self, other: ArrayLike) -> "Tensor":
        from src.diffcore import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        from src.diffcore import ops
        return ops.neg(self)

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        from src.diffcore import ops
        return ops.matmul(self, other)

    def __getitem__(self, key) -> "Tensor":
        from src.diffcore import ops
        return ops.index(self, key)


def as_tensor(value: ArrayLike) -> Tensor:
    """Wrap constants; tensors pass through untouched."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def make_node(op: str, out: np.ndarray, parents: Sequence[Tensor], grad_fn: GradFn) -> Tensor:
    """
    Create the output tensor of a primitive and record it when needed.

    @param op - Primitive name, used in error messages
    @param out - Forward value
    @param parents - Input tensors
    @param grad_fn - Maps the output gradient to one gradient per parent
    @return Output tensor
    """
    if not np.all(np.isfinite(out)):
        raise NumericalError(f"{op} produced non-finite values", {"op": op})
    node = Tensor.__new__(Tensor)
    node.data = out
    node.name = None
    node.requires_grad = any(p.requires_grad for p in parents)
    node._parents = ()
    node._grad_fn = None
    tape = active_tape()
    if tape is not None and node.requires_grad:
        node._parents = tuple(parents)
        node._grad_fn = grad_fn
        tape.record(node)
    return node


class Tape:
    """
    Records primitive operations for one reverse pass.

    Used as a context manager; nesting is allowed and the innermost tape
    receives the records.
    """
    def __init__(self):
        self.nodes: List[Tensor] = []

    def record(self, node: Tensor) -> None:
        self.nodes.append(node)

    def __len__(self) -> int:
        return len(self.nodes)

    def __enter__(self) -> "Tape":
        _tape_stack().append(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        stack = _tape_stack()
        if stack and stack[-1] is self:
            stack.pop()


class ParamStoreLike(Protocol):
    """Anything exposing items() of (name, Tensor)."""
    def items(self) -> Iterable[Tuple[str, Tensor]]: ...


def backward(tape: Tape, loss: Tensor, params: ParamStoreLike) -> Dict[str, np.ndarray]:
    """
    Run the reverse pass from a scalar loss.

    @param tape - Tape the loss was recorded on
    @param loss - Scalar output
    @param params - Parameter store the gradients are keyed by
    @return Gradient per parameter name; zeros for parameters not in the graph
    """
    if loss.data.size != 1:
        raise DimensionError("backward", "scalar loss", loss.shape)
    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(tape.nodes):
        g = grads.pop(id(node), None)
        if g is None or node._grad_fn is None:
            continue
        parent_grads = node._grad_fn(g)
        for parent, pg in zip(node._parents, parent_grads):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + pg
            else:
                grads[key] = pg
    out: Dict[str, np.ndarray] = {}
    for name, param in params.items():
        g = grads.get(id(param))
        out[name] = np.zeros_like(param.data) if g is None else np.asarray(g, dtype=DTYPE).reshape(param.shape)
    return out
