# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled kernel core.

Twin of ``_kernels_np`` with identical signatures and formulas; operates on
C-contiguous float32/float64 arrays via typed memoryviews. Selected at import
time by ``bridgekit.numcore.backend`` when the extension built successfully.
"""

from libc.math cimport exp, sqrt, tanh

import numpy as np

NAME = "cy"

ctypedef fused floating:
    float
    double

cdef double GELU_C = 0.7978845608028654  # sqrt(2/pi)
cdef double GELU_A = 0.044715


cdef inline object _like(floating[:, ::1] a, Py_ssize_t m, Py_ssize_t n, bint zero):
    dtype = np.float32 if floating is float else np.float64
    if zero:
        return np.zeros((m, n), dtype=dtype)
    return np.empty((m, n), dtype=dtype)


def matmul(floating[:, ::1] a, floating[:, ::1] b):
    cdef Py_ssize_t m = a.shape[0], kk = a.shape[1], n = b.shape[1]
    out = _like(a, m, n, True)
    cdef floating[:, ::1] c = out
    cdef Py_ssize_t i, r, j
    cdef floating av
    for i in range(m):
        for r in range(kk):
            av = a[i, r]
            for j in range(n):
                c[i, j] += av * b[r, j]
    return out


def matmul_nt(floating[:, ::1] a, floating[:, ::1] b):
    """a @ b.T"""
    cdef Py_ssize_t m = a.shape[0], kk = a.shape[1], n = b.shape[0]
    out = _like(a, m, n, False)
    cdef floating[:, ::1] c = out
    cdef Py_ssize_t i, j, r
    cdef floating acc
    for i in range(m):
        for j in range(n):
            acc = 0.0
            for r in range(kk):
                acc += a[i, r] * b[j, r]
            c[i, j] = acc
    return out


def matmul_tn(floating[:, ::1] a, floating[:, ::1] b):
    """a.T @ b"""
    cdef Py_ssize_t kk = a.shape[0], m = a.shape[1], n = b.shape[1]
    out = _like(a, m, n, True)
    cdef floating[:, ::1] c = out
    cdef Py_ssize_t i, r, j
    cdef floating av
    for r in range(kk):
        for i in range(m):
            av = a[r, i]
            for j in range(n):
                c[i, j] += av * b[r, j]
    return out


def add_bias(floating[:, ::1] x, floating[::1] bias):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    out = _like(x, m, n, False)
    cdef floating[:, ::1] y = out
    cdef Py_ssize_t i, j
    for i in range(m):
        for j in range(n):
            y[i, j] = x[i, j] + bias[j]
    return out


def col_sum(floating[:, ::1] x):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    dtype = np.float32 if floating is float else np.float64
    out = np.zeros(n, dtype=dtype)
    cdef floating[::1] s = out
    cdef Py_ssize_t i, j
    for i in range(m):
        for j in range(n):
            s[j] += x[i, j]
    return out


def relu_fwd(floating[:, ::1] x):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    out = _like(x, m, n, False)
    cdef floating[:, ::1] y = out
    cdef Py_ssize_t i, j
    for i in range(m):
        for j in range(n):
            y[i, j] = x[i, j] if x[i, j] > 0.0 else 0.0
    return out


def relu_bwd(floating[:, ::1] x, floating[:, ::1] dy):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    out = _like(x, m, n, False)
    cdef floating[:, ::1] dx = out
    cdef Py_ssize_t i, j
    for i in range(m):
        for j in range(n):
            dx[i, j] = dy[i, j] if x[i, j] > 0.0 else 0.0
    return out


def gelu_fwd(floating[:, ::1] x):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    out = _like(x, m, n, False)
    cdef floating[:, ::1] y = out
    cdef Py_ssize_t i, j
    cdef double xv, u
    for i in range(m):
        for j in range(n):
            xv = x[i, j]
            u = GELU_C * (xv + GELU_A * xv * xv * xv)
            y[i, j] = <floating> (0.5 * xv * (1.0 + tanh(u)))
    return out


def gelu_bwd(floating[:, ::1] x, floating[:, ::1] dy):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    out = _like(x, m, n, False)
    cdef floating[:, ::1] dx = out
    cdef Py_ssize_t i, j
    cdef double xv, x2, u, t, du
    for i in range(m):
        for j in range(n):
            xv = x[i, j]
            x2 = xv * xv
            u = GELU_C * (xv + GELU_A * xv * x2)
            t = tanh(u)
            du = GELU_C * (1.0 + 3.0 * GELU_A * x2)
            dx[i, j] = <floating> (dy[i, j] * (0.5 * (1.0 + t)
                                               + 0.5 * xv * (1.0 - t * t) * du))
    return out


cdef inline void _softmax_row(floating[::1] row) noexcept:
    cdef Py_ssize_t n = row.shape[0]
    cdef Py_ssize_t j
    cdef double mx = row[0]
    cdef double s = 0.0
    for j in range(1, n):
        if row[j] > mx:
            mx = row[j]
    for j in range(n):
        row[j] = <floating> exp(row[j] - mx)
        s += row[j]
    for j in range(n):
        row[j] = <floating> (row[j] / s)


def softmax_rows(floating[:, ::1] x):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    out = np.array(x, copy=True)
    cdef floating[:, ::1] y = out
    cdef Py_ssize_t i
    for i in range(m):
        _softmax_row(y[i])
    return out


def softmax_rows_bwd(floating[:, ::1] y, floating[:, ::1] dy):
    cdef Py_ssize_t m = y.shape[0], n = y.shape[1]
    out = _like(y, m, n, False)
    cdef floating[:, ::1] dx = out
    cdef Py_ssize_t i, j
    cdef double s
    for i in range(m):
        s = 0.0
        for j in range(n):
            s += y[i, j] * dy[i, j]
        for j in range(n):
            dx[i, j] = <floating> (y[i, j] * (dy[i, j] - s))
    return out


def layernorm_fwd(floating[:, ::1] x, floating[::1] gain, floating[::1] bias,
                  double eps):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    dtype = np.float32 if floating is float else np.float64
    out = np.empty((m, n), dtype=dtype)
    mu_np = np.empty(m, dtype=dtype)
    rstd_np = np.empty(m, dtype=dtype)
    cdef floating[:, ::1] y = out
    cdef floating[::1] mu = mu_np
    cdef floating[::1] rstd = rstd_np
    cdef Py_ssize_t i, j
    cdef double s, var, xc, r
    for i in range(m):
        s = 0.0
        for j in range(n):
            s += x[i, j]
        s /= n
        var = 0.0
        for j in range(n):
            xc = x[i, j] - s
            var += xc * xc
        var /= n
        r = 1.0 / sqrt(var + eps)
        mu[i] = <floating> s
        rstd[i] = <floating> r
        for j in range(n):
            y[i, j] = <floating> ((x[i, j] - s) * r * gain[j] + bias[j])
    return out, mu_np, rstd_np


def layernorm_bwd(floating[:, ::1] x, floating[::1] gain, floating[::1] mu,
                  floating[::1] rstd, floating[:, ::1] dy):
    cdef Py_ssize_t m = x.shape[0], n = x.shape[1]
    dtype = np.float32 if floating is float else np.float64
    dx_np = np.empty((m, n), dtype=dtype)
    dgain_np = np.zeros(n, dtype=dtype)
    dbias_np = np.zeros(n, dtype=dtype)
    cdef floating[:, ::1] dx = dx_np
    cdef floating[::1] dgain = dgain_np
    cdef floating[::1] dbias = dbias_np
    cdef Py_ssize_t i, j
    cdef double m1, m2, xhat, dxh, r
    for i in range(m):
        r = rstd[i]
        m1 = 0.0
        m2 = 0.0
        for j in range(n):
            xhat = (x[i, j] - mu[i]) * r
            dxh = dy[i, j] * gain[j]
            dgain[j] += dy[i, j] * xhat
            dbias[j] += dy[i, j]
            m1 += dxh
            m2 += dxh * xhat
        m1 /= n
        m2 /= n
        for j in range(n):
            xhat = (x[i, j] - mu[i]) * r
            dxh = dy[i, j] * gain[j]
            dx[i, j] = <floating> (r * (dxh - m1 - xhat * m2))
    return dx_np, dgain_np, dbias_np


def attention_fwd(floating[:, ::1] q, floating[:, ::1] k, floating[:, ::1] v,
                  Py_ssize_t n_heads, double scale, object mask):
    """Per-head scaled dot-product attention; heads are column chunks."""
    cdef Py_ssize_t a = q.shape[0], d = q.shape[1], b = k.shape[0]
    cdef Py_ssize_t dh = d // n_heads
    dtype = np.float32 if floating is float else np.float64
    out_np = np.zeros((a, d), dtype=dtype)
    probs_np = np.empty((n_heads, a, b), dtype=dtype)
    cdef floating[:, ::1] out = out_np
    cdef floating[:, :, ::1] probs = probs_np
    cdef floating[:, ::1] mview = None
    cdef bint has_mask = mask is not None
    if has_mask:
        mview = mask
    cdef Py_ssize_t h, i, j, r, c0
    cdef double acc
    for h in range(n_heads):
        c0 = h * dh
        for i in range(a):
            for j in range(b):
                acc = 0.0
                for r in range(dh):
                    acc += q[i, c0 + r] * k[j, c0 + r]
                acc *= scale
                if has_mask:
                    acc += mview[i, j]
                probs[h, i, j] = <floating> acc
            _softmax_row(probs[h, i])
        for i in range(a):
            for j in range(b):
                acc = probs[h, i, j]
                for r in range(dh):
                    out[i, c0 + r] += <floating> (acc * v[j, c0 + r])
    return out_np, probs_np


def attention_bwd(floating[:, ::1] q, floating[:, ::1] k, floating[:, ::1] v,
                  floating[:, :, ::1] probs, Py_ssize_t n_heads, double scale,
                  floating[:, ::1] dout):
    cdef Py_ssize_t a = q.shape[0], d = q.shape[1], b = k.shape[0]
    cdef Py_ssize_t dh = d // n_heads
    dtype = np.float32 if floating is float else np.float64
    dq_np = np.zeros((a, d), dtype=dtype)
    dk_np = np.zeros((b, d), dtype=dtype)
    dv_np = np.zeros((b, d), dtype=dtype)
    ds_np = np.empty((a, b), dtype=dtype)
    cdef floating[:, ::1] dq = dq_np
    cdef floating[:, ::1] dk = dk_np
    cdef floating[:, ::1] dv = dv_np
    cdef floating[:, ::1] ds = ds_np
    cdef Py_ssize_t h, i, j, r, c0
    cdef double acc, srow
    for h in range(n_heads):
        c0 = h * dh
        # dv += probs.T @ dout ; ds = softmax_bwd(probs, dout @ v.T) * scale
        for i in range(a):
            for j in range(b):
                acc = 0.0
                for r in range(dh):
                    acc += dout[i, c0 + r] * v[j, c0 + r]
                ds[i, j] = <floating> acc
        for i in range(a):
            srow = 0.0
            for j in range(b):
                srow += probs[h, i, j] * ds[i, j]
            for j in range(b):
                ds[i, j] = <floating> (probs[h, i, j] * (ds[i, j] - srow)
                                       * scale)
        for j in range(b):
            for i in range(a):
                acc = probs[h, i, j]
                for r in range(dh):
                    dv[j, c0 + r] += <floating> (acc * dout[i, c0 + r])
        for i in range(a):
            for j in range(b):
                acc = ds[i, j]
                for r in range(dh):
                    dq[i, c0 + r] += <floating> (acc * k[j, c0 + r])
        for j in range(b):
            for i in range(a):
                acc = ds[i, j]
                for r in range(dh):
                    dk[j, c0 + r] += <floating> (acc * q[i, c0 + r])
    return dq_np, dk_np, dv_np
