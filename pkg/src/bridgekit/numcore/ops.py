"""Differentiable primitive operations.

Each op computes its value through the active kernel backend, and, when a
tape is active and some input requires gradients, records a backward closure.
Backward closures accumulate into ``Tensor.grad`` so parameters can gather
gradients across a whole batch before an optimizer step.
"""

import math

import numpy as np

from ..errors import ConfigError, EmptyInputError, ShapeError
from . import backend
from .tensor import Tensor, current_tape


def _recording(*tensors):
    tape = current_tape()
    if tape is None:
        return None
    if any(t._requires_grad for t in tensors):
        return tape
    return None


def _check_same_dtype(name, *tensors):
    dtypes = {t.dtype for t in tensors}
    if len(dtypes) > 1:
        raise ShapeError(f"{name}: mixed dtypes {sorted(d.name for d in dtypes)}")


def matmul(a, b, transpose_b=False):
    """Matrix product a @ b (or a @ b.T when transpose_b)."""
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul needs 2-D tensors, got {a.shape} and {b.shape}")
    _check_same_dtype("matmul", a, b)
    K = backend.K
    if transpose_b:
        if a.shape[1] != b.shape[1]:
            raise ShapeError(
                f"matmul(transpose_b): inner dims disagree for {a.shape} x "
                f"{b.shape}^T")
        out = Tensor(K.matmul_nt(a.data, b.data))
    else:
        if a.shape[1] != b.shape[0]:
            raise ShapeError(
                f"matmul: inner dims disagree for {a.shape} x {b.shape}")
        out = Tensor(K.matmul(a.data, b.data))
    tape = _recording(a, b)
    if tape is not None:
        def bwd(g):
            Kb = backend.K
            if transpose_b:
                if a._requires_grad:
                    a.accumulate_grad(Kb.matmul(g, b.data))
                if b._requires_grad:
                    b.accumulate_grad(Kb.matmul_tn(g, a.data))
            else:
                if a._requires_grad:
                    a.accumulate_grad(Kb.matmul_nt(g, b.data))
                if b._requires_grad:
                    b.accumulate_grad(Kb.matmul_tn(a.data, g))
        tape.record("matmul", (a, b), out, bwd)
    return out


def add(a, b):
    """Elementwise sum of two same-shape tensors."""
    if a.shape != b.shape:
        raise ShapeError(f"add: shapes {a.shape} and {b.shape} differ")
    _check_same_dtype("add", a, b)
    out = Tensor(a.data + b.data)
    tape = _recording(a, b)
    if tape is not None:
        def bwd(g):
            if a._requires_grad:
                a.accumulate_grad(g)
            if b._requires_grad:
                b.accumulate_grad(g)
        tape.record("add", (a, b), out, bwd)
    return out


def add_bias(x, bias):
    """Add a length-n vector to every row of an [m, n] tensor."""
    if x.ndim != 2 or bias.ndim != 1 or x.shape[1] != bias.shape[0]:
        raise ShapeError(f"add_bias: shapes {x.shape} and {bias.shape} disagree")
    _check_same_dtype("add_bias", x, bias)
    out = Tensor(backend.K.add_bias(x.data, bias.data))
    tape = _recording(x, bias)
    if tape is not None:
        def bwd(g):
            if x._requires_grad:
                x.accumulate_grad(g)
            if bias._requires_grad:
                bias.accumulate_grad(backend.K.col_sum(g))
        tape.record("add_bias", (x, bias), out, bwd)
    return out


def scale(a, c):
    """Multiply by a python scalar."""
    c = float(c)
    out = Tensor(a.data * c)
    tape = _recording(a)
    if tape is not None:
        def bwd(g):
            a.accumulate_grad(g * c)
        tape.record("scale", (a,), out, bwd)
    return out


def relu(a):
    out = Tensor(backend.K.relu_fwd(a.data))
    tape = _recording(a)
    if tape is not None:
        def bwd(g):
            a.accumulate_grad(backend.K.relu_bwd(a.data, g))
        tape.record("relu", (a,), out, bwd)
    return out


def gelu(a):
    """tanh-approximate GELU (identical formula in both kernel backends)."""
    out = Tensor(backend.K.gelu_fwd(a.data))
    tape = _recording(a)
    if tape is not None:
        def bwd(g):
            a.accumulate_grad(backend.K.gelu_bwd(a.data, g))
        tape.record("gelu", (a,), out, bwd)
    return out


def softmax_rows(a):
    """Row-wise softmax with per-row max subtraction for stability."""
    if a.ndim != 2:
        raise ShapeError(f"softmax_rows needs a 2-D tensor, got {a.shape}")
    y = backend.K.softmax_rows(a.data)
    out = Tensor(y)
    tape = _recording(a)
    if tape is not None:
        def bwd(g):
            a.accumulate_grad(backend.K.softmax_rows_bwd(y, g))
        tape.record("softmax_rows", (a,), out, bwd)
    return out


def layernorm(a, gain, bias, eps=1e-5):
    """Per-row standardisation followed by an elementwise affine map."""
    if a.ndim != 2 or gain.shape != (a.shape[1],) or bias.shape != (a.shape[1],):
        raise ShapeError(
            f"layernorm: got input {a.shape}, gain {gain.shape}, bias {bias.shape}")
    y, mu, rstd = backend.K.layernorm_fwd(a.data, gain.data, bias.data, eps)
    out = Tensor(y)
    tape = _recording(a, gain, bias)
    if tape is not None:
        def bwd(g):
            dx, dgain, dbias = backend.K.layernorm_bwd(
                a.data, gain.data, mu, rstd, g)
            if a._requires_grad:
                a.accumulate_grad(dx)
            if gain._requires_grad:
                gain.accumulate_grad(dgain)
            if bias._requires_grad:
                bias.accumulate_grad(dbias)
        tape.record("layernorm", (a, gain, bias), out, bwd)
    return out


def attention_core(q, k, v, n_heads, mask=None):
    """Scaled dot-product attention over already-projected q/k/v.

    Heads are contiguous column chunks of width d/n_heads; the scale is
    1/sqrt(head_dim). ``mask`` is an optional additive [a, b] numpy array
    (0 for visible, large negative for blocked) shared by all heads.
    """
    a_n, d = q.shape
    if k.shape != v.shape or k.shape[1] != d:
        raise ShapeError(
            f"attention_core: q {q.shape}, k {k.shape}, v {v.shape} disagree")
    if d % n_heads != 0:
        raise ConfigError(f"attention dim {d} not divisible by {n_heads} heads")
    if mask is not None and mask.shape != (a_n, k.shape[0]):
        raise ShapeError(f"attention mask {mask.shape} does not match "
                         f"({a_n}, {k.shape[0]})")
    sc = 1.0 / math.sqrt(d // n_heads)
    out_data, probs = backend.K.attention_fwd(q.data, k.data, v.data,
                                              n_heads, sc, mask)
    out = Tensor(out_data)
    tape = _recording(q, k, v)
    if tape is not None:
        def bwd(g):
            dq, dk, dv = backend.K.attention_bwd(
                q.data, k.data, v.data, probs, n_heads, sc, g)
            if q._requires_grad:
                q.accumulate_grad(dq)
            if k._requires_grad:
                k.accumulate_grad(dk)
            if v._requires_grad:
                v.accumulate_grad(dv)
        tape.record("attention_core", (q, k, v), out, bwd)
    return out


def multi_head_attention(query, key, value, params, n_heads, mask=None):
    """Full multi-head attention with learned projections.

    ``params`` carries the four projection layers (see modules.AttentionParams);
    query/key/value may have different input widths. No mask is applied unless
    one is passed in.
    """
    q = add_bias(matmul(query, params.wq), params.bq)
    k = add_bias(matmul(key, params.wk), params.bk)
    v = add_bias(matmul(value, params.wv), params.bv)
    ctx = attention_core(q, k, v, n_heads, mask=mask)
    return add_bias(matmul(ctx, params.wo), params.bo)


def concat_rows(parts):
    """Stack 2-D tensors vertically."""
    if not parts:
        raise EmptyInputError("concat_rows: no tensors given")
    cols = {p.shape[1] for p in parts}
    if len(cols) > 1:
        raise ShapeError(f"concat_rows: column counts differ: {sorted(cols)}")
    out = Tensor(np.concatenate([p.data for p in parts], axis=0))
    tape = _recording(*parts)
    if tape is not None:
        offsets = np.cumsum([0] + [p.shape[0] for p in parts])
        def bwd(g):
            for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
                if p._requires_grad:
                    p.accumulate_grad(g[lo:hi])
        tape.record("concat_rows", tuple(parts), out, bwd)
    return out


def slice_rows(a, start, stop):
    """Copy of rows [start, stop)."""
    if not (0 <= start <= stop <= a.shape[0]):
        raise ShapeError(f"slice_rows [{start}:{stop}] out of range for {a.shape}")
    out = Tensor(a.data[start:stop].copy())
    tape = _recording(a)
    if tape is not None:
        def bwd(g):
            if a.grad is None:
                a.grad = np.zeros_like(a.data)
            a.grad[start:stop] += g
        tape.record("slice_rows", (a,), out, bwd)
    return out


def gather_rows(table, ids):
    """Select rows of an embedding table by integer index."""
    ids = np.asarray(ids, dtype=np.intp)
    if ids.ndim != 1:
        raise ShapeError(f"gather_rows: ids must be 1-D, got {ids.shape}")
    out = Tensor(table.data[ids])
    tape = _recording(table)
    if tape is not None:
        def bwd(g):
            if table.grad is None:
                table.grad = np.zeros_like(table.data)
            np.add.at(table.grad, ids, g)
        tape.record("gather_rows", (table,), out, bwd)
    return out


def sum_all(a):
    """Sum every element into a scalar tensor."""
    out = Tensor(np.asarray(a.data.sum()))
    tape = _recording(a)
    if tape is not None:
        def bwd(g):
            a.accumulate_grad(np.full_like(a.data, float(g)))
        tape.record("sum_all", (a,), out, bwd)
    return out


def cross_entropy_logits(logits, targets, mask=None):
    """Mean cross-entropy of integer targets under row-wise softmax.

    ``mask`` (optional, per-row 0/1) drops padded rows from both the mean
    and the gradient. Returns a scalar tensor.
    """
    if logits.ndim != 2:
        raise ShapeError(f"cross_entropy_logits needs 2-D logits, got {logits.shape}")
    targets = np.asarray(targets, dtype=np.intp)
    n, v = logits.shape
    if targets.shape != (n,):
        raise ShapeError(f"targets shape {targets.shape} does not match {n} rows")
    if n == 0:
        raise EmptyInputError("cross_entropy_logits: no target positions")
    if mask is None:
        mask = np.ones(n, dtype=logits.dtype)
    else:
        mask = np.asarray(mask, dtype=logits.dtype)
    denom = mask.sum()
    if denom <= 0:
        raise EmptyInputError("cross_entropy_logits: mask removes every position")
    x = logits.data
    m = x.max(axis=1, keepdims=True)
    e = np.exp(x - m)
    z = e.sum(axis=1, keepdims=True)
    logp = (x - m) - np.log(z)
    picked = logp[np.arange(n), targets]
    loss = -(picked * mask).sum() / denom
    out = Tensor(np.asarray(loss))
    tape = _recording(logits)
    if tape is not None:
        probs = e / z
        def bwd(g):
            d = probs.copy()
            d[np.arange(n), targets] -= 1.0
            d *= (mask / denom * float(g))[:, None]
            logits.accumulate_grad(d)
        tape.record("cross_entropy_logits", (logits,), out, bwd)
    return out
