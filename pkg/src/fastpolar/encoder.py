"""Non-systematic polar encoding, x = u * F_2^{(x)log2 n} over GF(2)."""

from __future__ import annotations

import numpy as np

from .code import CodeSpec, is_power_of_two

GN_MATRIX_MAX = 1024


def polar_transform(u: np.ndarray) -> np.ndarray:
    """Apply the polar butterfly along the last axis (returns a new uint8 array).

    The transform is its own inverse over GF(2), so the same call maps a
    codeword estimate back to the u domain.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"length must be a power of two, got {n}")
    lead = x.shape[:-1]
    h = 1
    while h < n:
        blocks = x.reshape(*lead, n // (2 * h), 2, h)
        blocks[..., 0, :] ^= blocks[..., 1, :]
        h *= 2
    return x


def gn_matrix(n: int) -> np.ndarray:
    """Explicit generator matrix F_2^{(x)log2 n}; test-oracle scale only."""
    if not is_power_of_two(n):
        raise ValueError(f"n must be a power of two, got {n}")
    if n > GN_MATRIX_MAX:
        raise ValueError(f"gn_matrix is an oracle; n={n} exceeds {GN_MATRIX_MAX}")
    f2 = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.ones((1, 1), dtype=np.uint8)
    while g.shape[0] < n:
        g = np.kron(g, f2)
    return g


def place_message(spec: CodeSpec, msg) -> np.ndarray:
    """Scatter message bits into the information positions of u (ascending)."""
    msg = np.asarray(msg)
    if msg.shape[-1] != spec.k:
        raise ValueError(f"message length {msg.shape[-1]} != k = {spec.k}")
    u = np.zeros(msg.shape[:-1] + (spec.n,), dtype=np.uint8)
    u[..., spec.info_indices] = msg
    return u


def encode(spec: CodeSpec, msg) -> np.ndarray:
    """Encode one message of shape (k,) or a batch of shape (..., k)."""
    return polar_transform(place_message(spec, msg))


def extract_message(spec: CodeSpec, codeword) -> np.ndarray:
    return polar_transform(codeword)[..., spec.info_indices]
