"""Adam optimizer with linear warmup.

Hyperparameters are the fixed beta1=0.9, beta2=0.999, eps=1e-8 used across
the whole kit; the learning rate ramps linearly over ``warmup_steps`` and is
constant afterwards. Frozen tensors are rejected at construction.
"""

import numpy as np

from ..errors import FrozenTensorError, ConfigError


class Adam:
    BETA1 = 0.9
    BETA2 = 0.999
    EPS = 1e-8

    def __init__(self, named_params, lr, warmup_steps=0):
        self.named_params = list(named_params)
        for name, p in self.named_params:
            if p.frozen:
                raise FrozenTensorError(f"cannot optimize frozen tensor {name!r}")
            if not p.requires_grad:
                raise ConfigError(f"tensor {name!r} does not require gradients")
        self.lr = float(lr)
        self.warmup_steps = int(warmup_steps)
        self.t = 0
        self._m = [np.zeros_like(p.data) for _, p in self.named_params]
        self._v = [np.zeros_like(p.data) for _, p in self.named_params]

    def current_lr(self):
        if self.warmup_steps > 0 and self.t < self.warmup_steps:
            return self.lr * (self.t + 1) / self.warmup_steps
        return self.lr

    def step(self):
        lr = self.current_lr()
        self.t += 1
        b1, b2, eps = self.BETA1, self.BETA2, self.EPS
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for i, (_, p) in enumerate(self.named_params):
            g = p.grad
            if g is None:
                continue
            m = self._m[i]
            v = self._v[i]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p.data -= lr * (m / c1) / (np.sqrt(v / c2) + eps)

    def zero_grad(self):
        for _, p in self.named_params:
            p.grad = None
