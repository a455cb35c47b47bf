"""Per-instruction kernel specialisation for the unrolled executor.

Each builder receives the exact arena views an instruction touches and
returns a zero-argument closure that runs a fixed sequence of ``out=``
ufunc calls over preallocated scratch buffers.  Results are bit-identical
to the generic kernels in :mod:`fastpolar.kernels`.
"""

from __future__ import annotations

import numpy as np

from .kernels import LLR_MAX


def _f(a, b, out, sat):
    s1 = np.empty_like(out)
    s2 = np.empty_like(out)
    if sat:
        neg = np.empty(out.shape, dtype=bool)

        def step():
            np.abs(a, out=s1)
            np.abs(b, out=s2)
            np.minimum(s1, s2, out=out)
            np.bitwise_xor(a, b, out=s1)
            np.less(s1, 0, out=neg)
            np.negative(out, out=out, where=neg)
    else:
        def step():
            np.abs(a, out=s1)
            np.abs(b, out=s2)
            np.minimum(s1, s2, out=out)
            np.multiply(a, b, out=s1)
            np.copysign(out, s1, out=out)
    return step


def _g(a, b, beta_l, out, sat):
    neg = beta_l.view(bool)
    if sat:
        w1 = np.empty(out.shape, dtype=np.int16)
        w2 = np.empty(out.shape, dtype=np.int16)

        def step():
            np.copyto(w1, b)
            np.copyto(w2, a)
            np.negative(w2, out=w2, where=neg)
            np.add(w1, w2, out=w1)
            np.clip(w1, -LLR_MAX, LLR_MAX, out=w1)
            np.copyto(out, w1, casting="unsafe")
    else:
        s1 = np.empty_like(out)

        def step():
            np.copyto(s1, a)
            np.negative(s1, out=s1, where=neg)
            np.add(b, s1, out=out)
    return step


def _g_0r(a, b, out, sat):
    if sat:
        w1 = np.empty(out.shape, dtype=np.int16)

        def step():
            np.copyto(w1, b)
            np.add(w1, a, out=w1)
            np.clip(w1, -LLR_MAX, LLR_MAX, out=w1)
            np.copyto(out, w1, casting="unsafe")
    else:
        def step():
            np.add(b, a, out=out)
    return step


def _info(alpha, out):
    bits = out.view(bool)

    def step():
        np.less(alpha, 0, out=bits)
    return step


def _repetition(alpha, out, sat):
    acc = np.int32 if sat else alpha.dtype
    bits = out.view(bool)
    neg = np.empty((alpha.shape[0], 1), dtype=bool)

    def step():
        np.less(alpha.sum(axis=-1, dtype=acc, keepdims=True), 0, out=neg)
        np.copyto(bits, neg)
    return step


def _spc(alpha, out):
    bits = out.view(bool)
    mag = np.empty_like(alpha)
    rows = np.arange(alpha.shape[0])

    def step():
        np.less(alpha, 0, out=bits)
        np.abs(alpha, out=mag)
        idx = mag.argmin(axis=-1)
        parity = np.bitwise_xor.reduce(out, axis=-1)
        out[rows, idx] ^= parity
    return step


def _combine(left, right):
    def step():
        np.bitwise_xor(left, right, out=left)
    return step


def _combine_0r(left, right):
    def step():
        np.copyto(left, right)
    return step


def specialize(op, size, alpha_in, alpha_out, beta, o, kernels, sat):
    """Closure for one instruction; ``beta`` is the whole 2-D beta array."""
    h = size // 2
    if op in ("F", "G", "G_0R", "RSPC"):
        a, b = alpha_in[:, :h], alpha_in[:, h:]
    if op == "F":
        return _f(a, b, alpha_out, sat)
    if op == "G":
        return _g(a, b, beta[:, o : o + h], alpha_out, sat)
    if op == "G_0R":
        return _g_0r(a, b, alpha_out, sat)
    if op == "Combine":
        return _combine(beta[:, o : o + h], beta[:, o + h : o + size])
    if op == "Combine_0R":
        return _combine_0r(beta[:, o : o + h], beta[:, o + h : o + size])
    span = beta[:, o : o + size]
    if op == "Info":
        return _info(alpha_in, span)
    if op == "Repetition":
        return _repetition(alpha_in, span, sat)
    if op == "SPC":
        return _spc(alpha_in, span)
    if op == "RSPC":
        # g into scratch, SPC on the right half, then combine in place
        scratch = np.empty((alpha_in.shape[0], h), dtype=alpha_in.dtype)
        g = _g(a, b, beta[:, o : o + h], scratch, sat)
        spc = _spc(scratch, beta[:, o + h : o + size])
        comb = _combine(beta[:, o : o + h], beta[:, o + h : o + size])

        def step():
            g()
            spc()
            comb()
        return step
    fused = {"RepSPC": kernels.repspc, "P_01": kernels.p_01, "0SPC": kernels.zero_spc}[op]

    def step():
        fused(alpha_in, out=span)
    return step
