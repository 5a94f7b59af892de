"""Finite-difference verification of tape gradients.

Compares the gradient of a scalar function computed by the tape against
central finite differences, elementwise, reporting the max relative error
per parameter block: |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|).
Only meaningful in float64.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError
from . import ops
from .tensor import Tape, debug_enabled, set_debug


@dataclass
class GradcheckReport:
    per_block: dict = field(default_factory=dict)

    @property
    def max_rel_err(self):
        return max(self.per_block.values()) if self.per_block else 0.0

    def ok(self, threshold=1e-4):
        return self.max_rel_err <= threshold

    def lines(self):
        width = max((len(n) for n in self.per_block), default=0)
        return [f"{n:<{width}}  {e:.3e}" for n, e in sorted(self.per_block.items())]


def _scalar(f):
    out = f()
    if out.size != 1:
        out = ops.sum_all(out)
    return out


def gradcheck(f, named_params, eps=1e-5):
    """Check d f / d p for every tensor in ``named_params``.

    ``f`` is a zero-argument callable returning a tensor (summed to a scalar
    if needed); it must be deterministic and read the parameters in place.
    """
    named_params = list(named_params)
    for name, p in named_params:
        if p.dtype != np.float64:
            raise ShapeError(f"gradcheck requires float64 parameters ({name})")
        p.zero_grad()

    was_debug = debug_enabled()
    set_debug(True)
    try:
        with Tape() as tape:
            out = _scalar(f)
            tape.backward(out)
        analytic = {}
        for name, p in named_params:
            analytic[name] = (np.zeros_like(p.data) if p.grad is None
                              else p.grad.copy())
            p.zero_grad()

        report = GradcheckReport()
        for name, p in named_params:
            g_ad = analytic[name]
            worst = 0.0
            flat = p.data.reshape(-1)
            g_flat = g_ad.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                f_plus = _scalar(f).item()
                flat[i] = orig - eps
                f_minus = _scalar(f).item()
                flat[i] = orig
                g_fd = (f_plus - f_minus) / (2.0 * eps)
                denom = max(1e-8, abs(g_flat[i]) + abs(g_fd))
                worst = max(worst, abs(g_flat[i] - g_fd) / denom)
            report.per_block[name] = worst
    finally:
        set_debug(was_debug)
    return report
