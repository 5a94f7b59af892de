"""Sinusoid position embeddings.

p[2k] = sin(pos / 10000^(2k/d)), p[2k+1] = cos(pos / 10000^(2k/d)); an odd
trailing channel gets the sin term only.
"""

import numpy as np


def sinusoid_row(pos, dim):
    p = np.empty(dim, dtype=np.float64)
    k = np.arange(0, dim, 2)
    angles = pos / np.power(10000.0, k / dim)
    p[0::2] = np.sin(angles)
    p[1::2] = np.cos(angles)[: dim // 2]
    return p


def sinusoid_table(n_positions, dim):
    return np.stack([sinusoid_row(i, dim) for i in range(n_positions)])


def segment_pe(index, d_x):
    """Embedding for 1-based segment index; the first segment sits at pos 0."""
    if index < 1:
        raise ValueError(f"segment index {index} must be >= 1")
    return sinusoid_row(index - 1, d_x)
