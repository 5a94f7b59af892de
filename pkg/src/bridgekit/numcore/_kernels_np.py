"""Pure-Python kernel fallback, vectorised with numpy.

Implements the same surface as the compiled core in ``_kernels_cy``; the
active implementation is chosen at import time by ``backend``. All arrays
are C-contiguous 2-D float64 (or float32 in speed mode) unless noted.
"""

import numpy as np

NAME = "np"

# tanh-approximate GELU constants (same formula as the compiled core, so the
# two backends agree to machine precision modulo summation order)
_GELU_C = 0.7978845608028654  # sqrt(2/pi)
_GELU_A = 0.044715


def matmul(a, b):
    return a @ b


def matmul_nt(a, b):
    """a @ b.T"""
    return a @ b.T


def matmul_tn(a, b):
    """a.T @ b"""
    return a.T @ b


def add_bias(x, bias):
    return x + bias


def col_sum(x):
    return x.sum(axis=0)


def relu_fwd(x):
    return np.maximum(x, 0.0)


def relu_bwd(x, dy):
    return np.where(x > 0.0, dy, 0.0)


def gelu_fwd(x):
    u = _GELU_C * (x + _GELU_A * x * x * x)
    return 0.5 * x * (1.0 + np.tanh(u))


def gelu_bwd(x, dy):
    x2 = x * x
    u = _GELU_C * (x + _GELU_A * x * x2)
    t = np.tanh(u)
    du = _GELU_C * (1.0 + 3.0 * _GELU_A * x2)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du)


def softmax_rows(x):
    m = x.max(axis=1, keepdims=True)
    e = np.exp(x - m)
    return e / e.sum(axis=1, keepdims=True)


def softmax_rows_bwd(y, dy):
    s = (y * dy).sum(axis=1, keepdims=True)
    return y * (dy - s)


def layernorm_fwd(x, gain, bias, eps):
    mu = x.mean(axis=1)
    xc = x - mu[:, None]
    var = (xc * xc).mean(axis=1)
    rstd = 1.0 / np.sqrt(var + eps)
    y = xc * rstd[:, None] * gain + bias
    return y, mu, rstd


def layernorm_bwd(x, gain, mu, rstd, dy):
    xhat = (x - mu[:, None]) * rstd[:, None]
    dgain = (dy * xhat).sum(axis=0)
    dbias = dy.sum(axis=0)
    dxhat = dy * gain
    m1 = dxhat.mean(axis=1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=1, keepdims=True)
    dx = rstd[:, None] * (dxhat - m1 - xhat * m2)
    return dx, dgain, dbias


def attention_fwd(q, k, v, n_heads, scale, mask):
    """Scaled dot-product attention over column-chunked heads.

    q: [a, d], k/v: [b, d]; head h uses columns [h*dh, (h+1)*dh).
    mask, when given, is an additive [a, b] matrix applied to every head.
    Returns (out [a, d], probs [n_heads, a, b]); probs are kept for backward.
    """
    a, d = q.shape
    b = k.shape[0]
    dh = d // n_heads
    probs = np.empty((n_heads, a, b), dtype=q.dtype)
    out = np.empty((a, d), dtype=q.dtype)
    for h in range(n_heads):
        sl = slice(h * dh, (h + 1) * dh)
        scores = (q[:, sl] @ k[:, sl].T) * scale
        if mask is not None:
            scores = scores + mask
        p = softmax_rows(scores)
        probs[h] = p
        out[:, sl] = p @ v[:, sl]
    return out, probs


def attention_bwd(q, k, v, probs, n_heads, scale, dout):
    a, d = q.shape
    dh = d // n_heads
    dq = np.empty_like(q)
    dk = np.empty_like(k)
    dv = np.empty_like(v)
    for h in range(n_heads):
        sl = slice(h * dh, (h + 1) * dh)
        p = probs[h]
        dv[:, sl] = p.T @ dout[:, sl]
        dp = dout[:, sl] @ v[:, sl].T
        ds = softmax_rows_bwd(p, dp) * scale
        dq[:, sl] = ds @ k[:, sl]
        dk[:, sl] = ds.T @ q[:, sl]
    return dq, dk, dv
