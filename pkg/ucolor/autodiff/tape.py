"""Dense tensors and the reverse-mode gradient tape."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from ucolor.errors import NumericError, ShapeError

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

# Non-finite checks after every recorded op; enabled with UCOLOR_DEBUG=1.
CHECK_FINITE = os.environ.get("UCOLOR_DEBUG", "") == "1"


@dataclass(eq=False)
class Tensor:
    """N-dimensional float64 array, optionally linked into a :class:`Tape`.

    Feature maps use channels × height × width layout. A tensor without a tape
    is a constant: ops accept it but no gradient flows into it.
    """

    data: ArrayLike
    node_id: Optional[int] = None
    tape: Optional["Tape"] = field(default=None, repr=False)
    name: Optional[str] = None

    def __post_init__(self) -> None:
        self.data = np.asarray(self.data, dtype=np.float64)
        if any(extent < 1 for extent in self.data.shape):
            raise ShapeError(f"tensor extents must be >= 1; got {self.data.shape}", axis="extent")
        if self.tape is not None:
            self.data.flags.writeable = False

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(int(extent) for extent in self.data.shape)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def requires_grad(self) -> bool:
        return self.tape is not None

    def numpy(self) -> np.ndarray:
        """Return a writable copy of the values."""
        return np.array(self.data, copy=True)

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item() needs a single element; got shape {self.shape}", axis="extent")
        return float(self.data.reshape(()))

    def __add__(self, other):
        from ucolor.autodiff import ops

        return ops.add(self, other)

    def __radd__(self, other):
        from ucolor.autodiff import ops

        return ops.add(self, other)

    def __sub__(self, other):
        from ucolor.autodiff import ops

        return ops.sub(self, other)

    def __mul__(self, other):
        from ucolor.autodiff import ops

        return ops.mul(self, other)

    def __rmul__(self, other):
        from ucolor.autodiff import ops

        return ops.mul(self, other)

    def __neg__(self):
        from ucolor.autodiff import ops

        return ops.scale(self, -1.0)


@dataclass
class _Record:
    op: str
    inputs: Tuple[Optional[int], ...]
    output: int
    backward: BackwardFn


class Tape:
    """Single-writer record of primitive ops for reverse-mode differentiation.

    Records are appended in execution order, which is a topological order of
    the graph, so :meth:`backward` is a single reverse sweep.
    """

    def __init__(self) -> None:
        self._records: list[_Record] = []
        self._shapes: Dict[int, tuple[int, ...]] = {}
        self._leaves: Dict[int, Tensor] = {}
        self._next_id = 0

    def __len__(self) -> int:
        return len(self._records)

    def _new_id(self, shape: tuple[int, ...]) -> int:
        node_id = self._next_id
        self._next_id += 1
        self._shapes[node_id] = shape
        return node_id

    @property
    def leaves(self) -> Mapping[int, Tensor]:
        return dict(self._leaves)

    def watch(self, data: ArrayLike | Tensor, name: Optional[str] = None) -> Tensor:
        """Register a leaf tensor whose gradient :meth:`backward` will report."""
        values = data.data if isinstance(data, Tensor) else data
        array = np.array(values, dtype=np.float64, copy=True)
        node_id = self._new_id(array.shape)
        leaf = Tensor(array, node_id=node_id, tape=self, name=name)
        self._leaves[node_id] = leaf
        return leaf

    def record(
        self,
        op: str,
        inputs: Sequence[Tensor],
        output: np.ndarray,
        backward: BackwardFn,
    ) -> Tensor:
        """Append one primitive op and return its output tensor."""
        input_ids: list[Optional[int]] = []
        for tensor in inputs:
            if tensor.tape is None:
                input_ids.append(None)
                continue
            if tensor.tape is not self:
                raise ShapeError(f"{op}: input belongs to a different tape", axis="tape")
            if tensor.node_id not in self._shapes:
                raise ShapeError(f"{op}: dangling input node {tensor.node_id}", axis="tape")
            input_ids.append(tensor.node_id)
        if CHECK_FINITE and not np.all(np.isfinite(output)):
            raise NumericError(f"{op} produced non-finite values")
        node_id = self._new_id(tuple(output.shape))
        self._records.append(_Record(op=op, inputs=tuple(input_ids), output=node_id, backward=backward))
        return Tensor(output, node_id=node_id, tape=self, name=op)

    def backward(self, loss: Tensor) -> Dict[int, np.ndarray]:
        """Return ``d loss / d leaf`` for every watched leaf, keyed by node id."""
        if loss.tape is not self or loss.node_id is None:
            raise ShapeError("loss was not recorded on this tape", axis="tape")
        if loss.size != 1:
            raise ShapeError(f"loss must be scalar; got shape {loss.shape}", axis="extent")
        grads: Dict[int, np.ndarray] = {loss.node_id: np.ones(loss.shape, dtype=np.float64)}
        for record in reversed(self._records):
            if record.output > loss.node_id:
                continue
            upstream = grads.pop(record.output, None)
            if upstream is None:
                continue
            contributions = record.backward(upstream)
            for node_id, contribution in zip(record.inputs, contributions):
                if node_id is None or contribution is None:
                    continue
                contribution = np.reshape(contribution, self._shapes[node_id])
                if node_id in grads:
                    grads[node_id] = grads[node_id] + contribution
                else:
                    grads[node_id] = np.array(contribution, dtype=np.float64)
        return {
            node_id: grads.get(node_id, np.zeros(self._shapes[node_id], dtype=np.float64))
            for node_id in self._leaves
        }

    def gradient(self, loss: Tensor, tensors: Sequence[Tensor]) -> list[np.ndarray]:
        """Convenience wrapper returning gradients for ``tensors`` in order."""
        grads = self.backward(loss)
        out = []
        for tensor in tensors:
            if tensor.node_id not in self._leaves:
                raise ShapeError("gradient requested for a tensor that is not a watched leaf", axis="tape")
            out.append(grads[tensor.node_id])
        return out


def constant(data: ArrayLike) -> Tensor:
    """Wrap an array as a tape-free tensor."""
    return Tensor(np.array(data, dtype=np.float64, copy=True))


def numerical_gradient(
    fn: Callable[[np.ndarray], float],
    point: ArrayLike,
    *,
    step: float = 1e-5,
    indices: Optional[Sequence[tuple[int, ...]]] = None,
) -> np.ndarray:
    """Central-difference gradient of a scalar function of one array.

    When ``indices`` is given only those entries are perturbed; the others
    stay zero in the returned array.
    """
    base = np.array(point, dtype=np.float64, copy=True)
    grad = np.zeros_like(base)
    targets = indices if indices is not None else list(np.ndindex(*base.shape))
    for index in targets:
        original = base[index]
        base[index] = original + step
        upper = fn(base)
        base[index] = original - step
        lower = fn(base)
        base[index] = original
        grad[index] = (upper - lower) / (2.0 * step)
    return grad
