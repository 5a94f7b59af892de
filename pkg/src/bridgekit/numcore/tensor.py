"""Dense tensor values and the reverse-mode computation tape.

A ``Tensor`` wraps a C-contiguous row-major float array (float64 by default;
float32 is an optional speed mode, with float64 required wherever gradients
are verified). Differentiable ops in ``ops`` record one entry per primitive
on the active ``Tape``; the backward pass replays entries in exact reverse
order. Tensors that were never recorded on a tape are plain immutable values
and are safe to share across threads.
"""

import threading

import numpy as np

from ..errors import FrozenTensorError, NonFiniteError, ShapeError

_DEBUG = False


def set_debug(enabled):
    """Toggle NaN/Inf detection on every recorded op (slows things down)."""
    global _DEBUG
    _DEBUG = bool(enabled)


def debug_enabled():
    return _DEBUG


class Tensor:
    __slots__ = ("data", "grad", "_requires_grad", "_frozen")

    def __init__(self, data, requires_grad=False, dtype=None):
        arr = np.ascontiguousarray(data, dtype=dtype)
        if arr.dtype not in (np.float64, np.float32):
            arr = arr.astype(np.float64)
        self.data = arr
        self.grad = None
        self._requires_grad = bool(requires_grad)
        self._frozen = False

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def requires_grad(self):
        return self._requires_grad

    @requires_grad.setter
    def requires_grad(self, value):
        if value and self._frozen:
            raise FrozenTensorError("cannot attach gradients to a frozen tensor")
        self._requires_grad = bool(value)

    @property
    def frozen(self):
        return self._frozen

    def mark_frozen(self):
        """Permanently exclude this tensor from gradient tracking."""
        self._requires_grad = False
        self._frozen = True
        self.grad = None
        return self

    def accumulate_grad(self, delta):
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += delta

    def zero_grad(self):
        self.grad = None

    def item(self):
        return float(self.data.reshape(-1)[0])

    def numpy(self):
        return self.data

    def __repr__(self):
        tag = " frozen" if self._frozen else (" grad" if self._requires_grad else "")
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype.name}{tag})"


class _Entry:
    __slots__ = ("name", "inputs", "out", "backward")

    def __init__(self, name, inputs, out, backward):
        self.name = name
        self.inputs = inputs
        self.out = out
        self.backward = backward


_tls = threading.local()


def current_tape():
    stack = getattr(_tls, "stack", None)
    return stack[-1] if stack else None


class Tape:
    """Ordered record of primitive ops; backward replays it in reverse."""

    def __init__(self):
        self.entries = []

    def __enter__(self):
        stack = getattr(_tls, "stack", None)
        if stack is None:
            stack = _tls.stack = []
        stack.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _tls.stack.pop()
        return False

    def record(self, name, inputs, out, backward):
        if _DEBUG and not np.all(np.isfinite(out.data)):
            raise NonFiniteError(f"non-finite value produced by op '{name}'")
        out._requires_grad = True
        self.entries.append(_Entry(name, inputs, out, backward))

    def backward(self, loss):
        """Seed d(loss)=1 and accumulate gradients into requires-grad leaves."""
        if loss.size != 1:
            raise ShapeError(
                f"backward needs a scalar loss, got shape {loss.data.shape}")
        loss.grad = np.ones_like(loss.data)
        for entry in reversed(self.entries):
            g = entry.out.grad
            if g is None:
                continue
            if _DEBUG and not np.all(np.isfinite(g)):
                raise NonFiniteError(
                    f"non-finite gradient entering op '{entry.name}'")
            entry.backward(g)
            # intermediate grads are not needed once consumed
            if not any(entry.out is i for i in entry.inputs):
                entry.out.grad = None

    def clear(self):
        self.entries.clear()


def as_tensor(value, dtype=np.float64):
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=dtype))
