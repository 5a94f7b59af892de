"""Dense-tensor numerics with reverse-mode differentiation.

The kernel backend (compiled Cython core or pure-Python numpy fallback) is
selected at import; see ``backend``. Public surface: the ``Tensor``/``Tape``
pair, the primitive ops, small trainable modules, Adam, finite-difference
gradient checking, and the flat tensor serialization format.
"""

from . import backend, modules, ops, optim, serialize
from .gradcheck import GradcheckReport, gradcheck
from .tensor import Tape, Tensor, as_tensor, current_tape, debug_enabled, set_debug

__all__ = [
    "backend", "modules", "ops", "optim", "serialize",
    "GradcheckReport", "gradcheck",
    "Tape", "Tensor", "as_tensor", "current_tape", "debug_enabled", "set_debug",
]
