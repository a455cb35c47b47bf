"""Elementwise Fast-SSC decode kernels.

Every kernel works on the last axis, so a leading batch axis decodes many
frames at once.  Two arithmetic profiles are selected by the LLR dtype:

* real: ``float32`` (any floating dtype works), plain arithmetic;
* int8: saturating integer LLRs in [-LLR_MAX, LLR_MAX].

Bits are ``uint8`` arrays holding 0 or 1.  Kernels return a new array, or
write into ``out`` when given (``out`` may be a view into an arena).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LLR_MAX = 127
BIT = np.uint8


@dataclass(frozen=True)
class Profile:
    """Arithmetic profile: storage dtype and the widths used for memory planning."""

    name: str
    dtype: type
    w_alpha: int
    w_beta: int
    vector_width: int


PROFILES = {
    # 256-bit vectors: 8 floats or 32 int8 values per vector
    "float": Profile("float", np.float32, 32, 32, 8),
    "int8": Profile("int8", np.int8, 8, 8, 32),
}


def get_profile(name: str) -> Profile:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None


def quantize(llr, scale: float = 4.0) -> np.ndarray:
    """Map real LLRs to int8 via clamp(round(llr * scale), -127, 127)."""
    q = np.rint(np.asarray(llr, dtype=np.float64) * scale)
    return np.clip(q, -LLR_MAX, LLR_MAX).astype(np.int8)


def _put(res, out):
    if out is None:
        return res
    out[...] = res
    return out


def _bits(beta) -> np.ndarray:
    beta = np.asarray(beta)
    if beta.dtype == np.uint8:
        return beta.view(bool)
    return beta.astype(bool)


def _halves(x):
    h = x.shape[-1] // 2
    return x[..., :h], x[..., h:]


class KernelSet:
    """Kernels specialised for one arithmetic profile."""

    def __init__(self, saturating: bool):
        self.saturating = saturating

    def _sat(self, wide, dtype):
        np.clip(wide, -LLR_MAX, LLR_MAX, out=wide)
        return wide.astype(dtype, copy=False)

    def f(self, alpha, out=None):
        a, b = _halves(alpha)
        m = np.minimum(np.abs(a), np.abs(b))
        if self.saturating:
            np.negative(m, out=m, where=(a ^ b) < 0)
        else:
            m = np.copysign(m, a * b)
        return _put(m, out)

    def g(self, alpha, beta_l, out=None):
        a, b = _halves(alpha)
        neg = _bits(beta_l)
        if self.saturating:
            wide = b.astype(np.int16)
            res = self._sat(np.where(neg, wide - a, wide + a), alpha.dtype)
        else:
            res = np.where(neg, b - a, b + a)
        return _put(res, out)

    def g_0r(self, alpha, out=None):
        a, b = _halves(alpha)
        if self.saturating:
            res = self._sat(b.astype(np.int16) + a, alpha.dtype)
        else:
            res = b + a
        return _put(res, out)

    @staticmethod
    def info(alpha, out=None):
        return _put((alpha < 0).view(BIT), out)

    def repetition(self, alpha, out=None):
        acc = np.int32 if self.saturating else alpha.dtype
        neg = alpha.sum(axis=-1, dtype=acc) < 0
        res = np.broadcast_to(np.asarray(neg, dtype=BIT)[..., None], alpha.shape)
        return _put(np.array(res), out)

    @staticmethod
    def spc(alpha, out=None):
        bits = (alpha < 0).view(BIT)
        parity = np.bitwise_xor.reduce(bits, axis=-1)
        # argmin returns the first minimum: ties go to the lowest index
        idx = np.asarray(np.argmin(np.abs(alpha), axis=-1))[..., None]
        flipped = np.take_along_axis(bits, idx, axis=-1) ^ np.asarray(parity)[..., None]
        np.put_along_axis(bits, idx, flipped, axis=-1)
        return _put(bits, out)

    @staticmethod
    def combine(beta_l, beta_r, out=None):
        if out is None:
            return np.concatenate([beta_l ^ beta_r, beta_r], axis=-1)
        left, right = _halves(out)
        np.bitwise_xor(beta_l, beta_r, out=left)
        right[...] = beta_r
        return out

    @staticmethod
    def combine_0r(beta_r, out=None):
        if out is None:
            return np.concatenate([beta_r, beta_r], axis=-1)
        left, right = _halves(out)
        left[...] = beta_r
        right[...] = beta_r
        return out

    def p_01(self, alpha, out=None):
        return self.combine_0r(self.info(self.g_0r(alpha)), out)

    def zero_spc(self, alpha, out=None):
        return self.combine_0r(self.spc(self.g_0r(alpha)), out)

    def rspc(self, alpha, beta_l, out=None):
        beta_l = np.asarray(beta_l)
        return self.combine(beta_l, self.spc(self.g(alpha, beta_l)), out)

    def repspc(self, alpha, out=None):
        # Decode the right SPC under both repetition outcomes, then select.
        a, b = _halves(alpha)
        rep = self.repetition(self.f(alpha))[..., :1].view(bool)
        h = a.shape[-1]
        zeros = np.zeros(a.shape, dtype=BIT)
        spc_if0 = self.spc(self.g(alpha, zeros))
        spc_if1 = self.spc(self.g(alpha, zeros | 1))
        right = np.where(rep, spc_if1, spc_if0)
        left = np.broadcast_to(rep.view(BIT), right.shape[:-1] + (h,))
        return self.combine(left, right, out)


REAL = KernelSet(saturating=False)
INT8 = KernelSet(saturating=True)


def for_dtype(dtype) -> KernelSet:
    return INT8 if np.issubdtype(np.dtype(dtype), np.integer) else REAL


def _ks(alpha) -> KernelSet:
    return for_dtype(np.asarray(alpha).dtype)


def f(alpha, out=None):
    """Min-sum check-node update: sgn(a)sgn(b)min(|a|,|b|) over the two halves."""
    alpha = np.asarray(alpha)
    return _ks(alpha).f(alpha, out)


def g(alpha, beta_l, out=None):
    """Variable-node update: b + a when the left bit is 0, b - a otherwise."""
    alpha = np.asarray(alpha)
    return _ks(alpha).g(alpha, beta_l, out)


def g_0r(alpha, out=None):
    alpha = np.asarray(alpha)
    return _ks(alpha).g_0r(alpha, out)


def combine(beta_l, beta_r, out=None):
    return KernelSet.combine(np.asarray(beta_l, dtype=BIT), np.asarray(beta_r, dtype=BIT), out)


def combine_0r(beta_r, out=None):
    return KernelSet.combine_0r(np.asarray(beta_r, dtype=BIT), out)


def info(alpha, out=None):
    """Hard decision: 0 for LLR >= 0, else 1."""
    return KernelSet.info(np.asarray(alpha), out)


def repetition(alpha, out=None):
    alpha = np.asarray(alpha)
    return _ks(alpha).repetition(alpha, out)


def spc(alpha, out=None):
    """Single-parity-check ML decision (flip the least reliable bit on odd parity)."""
    return KernelSet.spc(np.asarray(alpha), out)


def repspc(alpha, out=None):
    alpha = np.asarray(alpha)
    return _ks(alpha).repspc(alpha, out)


def p_01(alpha, out=None):
    alpha = np.asarray(alpha)
    return _ks(alpha).p_01(alpha, out)


def zero_spc(alpha, out=None):
    alpha = np.asarray(alpha)
    return _ks(alpha).zero_spc(alpha, out)


def rspc(alpha, beta_l, out=None):
    alpha = np.asarray(alpha)
    return _ks(alpha).rspc(alpha, np.asarray(beta_l, dtype=BIT), out)
