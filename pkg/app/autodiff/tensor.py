"""Dense 2-D tensors and the reverse-mode tape."""

from contextvars import ContextVar, Token
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from exceptions.exceptions import NumericException, ShapeException

BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]

_ACTIVE_TAPE: ContextVar[Optional["Tape"]] = ContextVar("active_tape", default=None)


def _as_matrix(data) -> np.ndarray:
    array = np.array(data, dtype=np.float64)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        return array.reshape(1, -1)
    if array.ndim != 2:
        raise ShapeException("tensor", array.shape)
    return array


class Tensor:
    """Row-major matrix of 64-bit floats with an optional gradient."""

    __slots__ = ("data", "requires_grad", "grad", "name", "op", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        """Copy ``data`` into a 2-D float64 matrix of finite values."""
        self.data = _as_matrix(data)
        if not np.all(np.isfinite(self.data)):
            label = f" {name}" if name else ""
            raise NumericException(f"leaf tensor{label} holds non-finite values")
        self.requires_grad = requires_grad
        self.grad = np.zeros_like(self.data) if requires_grad else None
        self.name = name
        self.op = "leaf"
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[BackwardFn] = None

    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        parents: Sequence["Tensor"],
        backward: BackwardFn,
        op: str,
    ) -> "Tensor":
        """Result of an op, recorded on the active tape when gradients flow."""
        if not np.all(np.isfinite(data)):
            raise NumericException(f"{op} produced non-finite values")
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.name = None
        out.op = op
        out.requires_grad = False
        out._parents = ()
        out._backward = None
        tape = _ACTIVE_TAPE.get()
        if tape is not None and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
            tape.record(out)
        return out

    @property
    def shape(self) -> Tuple[int, int]:
        """``(rows, cols)``."""
        return self.data.shape  # type: ignore[return-value]

    def item(self) -> float:
        """Value of a 1x1 tensor."""
        if self.shape != (1, 1):
            raise ShapeException("item", self.shape, (1, 1))
        return float(self.data[0, 0])

    def numpy(self) -> np.ndarray:
        """Copy of the data."""
        return self.data.copy()

    def zero_grad(self) -> None:
        """Reset the gradient accumulator."""
        if self.requires_grad:
            self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        """Short description."""
        label = f" {self.name}" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, op={self.op})"

    def __add__(self, other: "Tensor") -> "Tensor":
        """Elementwise sum."""
        from app.autodiff import ops

        return ops.add(self, other)

    def __sub__(self, other: "Tensor") -> "Tensor":
        """Elementwise difference."""
        from app.autodiff import ops

        return ops.subtract(self, other)

    def __mul__(self, other) -> "Tensor":
        """Elementwise product, or scalar multiply for numbers."""
        from app.autodiff import ops

        if isinstance(other, Tensor):
            return ops.multiply(self, other)
        return ops.scale(self, float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        """Negation."""
        from app.autodiff import ops

        return ops.scale(self, -1.0)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        """Matrix product."""
        from app.autodiff import ops

        return ops.matmul(self, other)

    @property
    def T(self) -> "Tensor":
        """Transpose."""
        from app.autodiff import ops

        return ops.transpose(self)


def const(data) -> Tensor:
    """Constant tensor, never differentiated."""
    return Tensor(data, requires_grad=False)


class Tape:
    """Ordered record of executed ops for one backward pass.

    Used as a context manager; the active tape is a context variable, so each
    thread records onto its own tape. Gradients of leaf tensors are kept on the
    tape instead of being written into shared parameters.
    """

    def __init__(self):
        """Start an empty record."""
        self.nodes: List[Tensor] = []
        self.leaf_grads: Dict[int, Tuple[Tensor, np.ndarray]] = {}
        self._token: Optional[Token] = None

    def __enter__(self) -> "Tape":
        """Activate this tape."""
        self._token = _ACTIVE_TAPE.set(self)
        return self

    def __exit__(self, *exc) -> None:
        """Deactivate this tape."""
        if self._token is not None:
            _ACTIVE_TAPE.reset(self._token)
            self._token = None

    def record(self, node: Tensor) -> None:
        """Append an executed op."""
        self.nodes.append(node)

    def backward(self, output: Tensor) -> Dict[int, Tuple[Tensor, np.ndarray]]:
        """Propagate d(output)/d(node) through the record in reverse order."""
        if output.shape != (1, 1):
            raise ShapeException("backward", output.shape, (1, 1))
        if not output.requires_grad:
            self.leaf_grads = {}
            return self.leaf_grads
        grads: Dict[int, np.ndarray] = {id(output): np.ones((1, 1))}
        owners: Dict[int, Tensor] = {id(output): output}
        for node in reversed(self.nodes):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            node.grad = grad
            for parent, parent_grad in zip(node._parents, node._backward(grad)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                owners[key] = parent
                if key in grads:
                    grads[key] = grads[key] + parent_grad
                else:
                    grads[key] = parent_grad
        self.leaf_grads = {key: (owners[key], grad) for key, grad in grads.items()}
        return self.leaf_grads

    def grad(self, tensor: Tensor) -> np.ndarray:
        """Gradient of a leaf from the last backward pass (zeros if unused)."""
        entry = self.leaf_grads.get(id(tensor))
        if entry is None:
            return np.zeros_like(tensor.data)
        return entry[1]

    def accumulate(self) -> None:
        """Add leaf gradients into their ``grad`` accumulators."""
        for tensor, grad in self.leaf_grads.values():
            if tensor.grad is None:
                tensor.grad = np.zeros_like(tensor.data)
            tensor.grad += grad


def active_tape() -> Optional[Tape]:
    """Tape currently recording in this context."""
    return _ACTIVE_TAPE.get()
