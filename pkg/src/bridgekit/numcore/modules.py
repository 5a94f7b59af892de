"""Small trainable building blocks and their initialisers.

Initialisation: linear/attention weights are U[-1/sqrt(fan_in), +1/sqrt(fan_in)]
with zero biases; embedding-like tables are N(0, 0.02^2).
"""

from dataclasses import dataclass

import numpy as np

from .tensor import Tensor
from . import ops


def uniform_weight(rng, fan_in, fan_out, dtype=np.float64):
    bound = 1.0 / np.sqrt(fan_in)
    w = rng.uniform(-bound, bound, size=(fan_in, fan_out)).astype(dtype)
    return Tensor(w, requires_grad=True)


def normal_table(rng, rows, cols, std=0.02, dtype=np.float64):
    return Tensor(rng.normal(0.0, std, size=(rows, cols)).astype(dtype),
                  requires_grad=True)


def zero_bias(n, dtype=np.float64):
    return Tensor(np.zeros(n, dtype=dtype), requires_grad=True)


@dataclass
class Linear:
    w: Tensor
    b: Tensor

    @classmethod
    def new(cls, rng, fan_in, fan_out):
        return cls(uniform_weight(rng, fan_in, fan_out), zero_bias(fan_out))

    def __call__(self, x):
        return ops.add_bias(ops.matmul(x, self.w), self.b)

    def params(self, prefix):
        return [(f"{prefix}.w", self.w), (f"{prefix}.b", self.b)]


@dataclass
class LayerNorm:
    gain: Tensor
    bias: Tensor
    eps: float = 1e-5

    @classmethod
    def new(cls, dim):
        return cls(Tensor(np.ones(dim), requires_grad=True),
                   Tensor(np.zeros(dim), requires_grad=True))

    def __call__(self, x):
        return ops.layernorm(x, self.gain, self.bias, self.eps)

    def params(self, prefix):
        return [(f"{prefix}.gain", self.gain), (f"{prefix}.bias", self.bias)]


@dataclass
class AttentionParams:
    """Projections for multi_head_attention: query/key/value in, context out."""
    wq: Tensor
    bq: Tensor
    wk: Tensor
    bk: Tensor
    wv: Tensor
    bv: Tensor
    wo: Tensor
    bo: Tensor

    @classmethod
    def new(cls, rng, d_query, d_key, d_value, d_model, d_out=None):
        d_out = d_model if d_out is None else d_out
        return cls(
            uniform_weight(rng, d_query, d_model), zero_bias(d_model),
            uniform_weight(rng, d_key, d_model), zero_bias(d_model),
            uniform_weight(rng, d_value, d_model), zero_bias(d_model),
            uniform_weight(rng, d_model, d_out), zero_bias(d_out),
        )

    def params(self, prefix):
        names = ("wq", "bq", "wk", "bk", "wv", "bv", "wo", "bo")
        return [(f"{prefix}.{n}", getattr(self, n)) for n in names]


@dataclass
class FeedForward:
    """Two-layer position-wise MLP with a GELU in between."""
    lin1: Linear
    lin2: Linear

    @classmethod
    def new(cls, rng, dim, hidden):
        return cls(Linear.new(rng, dim, hidden), Linear.new(rng, hidden, dim))

    def __call__(self, x):
        return self.lin2(ops.gelu(self.lin1(x)))

    def params(self, prefix):
        return self.lin1.params(f"{prefix}.lin1") + self.lin2.params(f"{prefix}.lin2")
