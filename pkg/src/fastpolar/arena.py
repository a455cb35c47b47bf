"""Memory planning for the alpha stage memory and the shared beta array."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import is_power_of_two


@dataclass(frozen=True)
class MemoryPlan:
    """Layout of the alpha arena plus the closed-form footprints (in bits).

    Stage ``s`` holds one span of ``2**s`` LLRs padded up to ``a`` slots.
    Stages are laid out largest first so the channel LLRs sit at offset 0.
    """

    n: int
    a: int
    w_alpha: int
    w_beta: int
    stage_offsets: tuple[int, ...]
    stage_slots: tuple[int, ...]

    @property
    def stages(self) -> int:
        return self.n.bit_length() - 1

    @property
    def alpha_slots(self) -> int:
        return sum(self.stage_slots)

    @property
    def overhead_slots(self) -> int:
        return self.alpha_slots - (2 * self.n - 1)

    @property
    def m_beta(self) -> int:
        return self.n * self.w_beta

    @property
    def m_alpha(self) -> int:
        return self.alpha_slots * self.w_alpha

    @property
    def m_alpha_overhead(self) -> int:
        return self.overhead_slots * self.w_alpha

    @property
    def m_total(self) -> int:
        return self.m_alpha + self.m_beta

    @property
    def kbytes_approx(self) -> float:
        """Decimal-kilobyte approximation n (W_beta + 2 W_alpha) / 8000."""
        return self.n * (self.w_beta + 2 * self.w_alpha) / 8000

    def stage_size(self, s: int) -> int:
        return 1 << s

    def report(self) -> str:
        lines = [
            f"memory plan: n={self.n} a={self.a} w_alpha={self.w_alpha} w_beta={self.w_beta}",
            f"{'stage':>5} {'size':>7} {'slots':>7} {'offset':>8}",
        ]
        for s in range(self.stages, -1, -1):
            lines.append(
                f"{s:>5} {1 << s:>7} {self.stage_slots[s]:>7} {self.stage_offsets[s]:>8}"
            )
        lines += [
            f"alpha slots   {self.alpha_slots} ({self.overhead_slots} padding)",
            f"M_alpha       {self.m_alpha // 8} bytes (overhead {self.m_alpha_overhead // 8} bytes)",
            f"M_beta        {self.m_beta // 8} bytes",
            f"M_total       {self.m_total // 8} bytes (~{self.kbytes_approx:.0f} kB)",
        ]
        return "\n".join(lines)


def alpha_bits_closed_form(n: int, a: int, w_alpha: int) -> int:
    """[(2n - 1) + a log2 a - sum_{i < log2 a} 2^i] * w_alpha."""
    log_a = a.bit_length() - 1
    return ((2 * n - 1) + a * log_a - sum(2**i for i in range(log_a))) * w_alpha


def alpha_overhead_closed_form(n: int, a: int, w_alpha: int) -> int:
    log_a = a.bit_length() - 1
    return (a * log_a - sum(2**i for i in range(log_a))) * w_alpha


def plan(n: int, a: int, w_alpha: int, w_beta: int) -> MemoryPlan:
    if not is_power_of_two(n):
        raise ValueError(f"n must be a power of two, got {n}")
    if not is_power_of_two(a):
        raise ValueError(f"vector width must be a power of two, got {a}")
    stages = n.bit_length() - 1
    slots = [max(1 << s, a) for s in range(stages + 1)]
    offsets = [0] * (stages + 1)
    pos = 0
    for s in range(stages, -1, -1):
        offsets[s] = pos
        pos += slots[s]
    return MemoryPlan(n, a, w_alpha, w_beta, tuple(offsets), tuple(slots))


def _aligned_zeros(shape, dtype, align_bytes: int) -> np.ndarray:
    dtype = np.dtype(dtype)
    count = int(np.prod(shape))
    raw = np.zeros(count * dtype.itemsize + align_bytes, dtype=np.uint8)
    skip = (-raw.ctypes.data) % align_bytes
    return raw[skip : skip + count * dtype.itemsize].view(dtype).reshape(shape)


class Arena:
    """Alpha stage storage and the n-element beta array for ``batch`` frames.

    Each row of ``alpha`` and ``beta`` belongs to one frame.  Row starts
    and stage starts are aligned to the vector size in bytes.
    """

    def __init__(self, memory_plan: MemoryPlan, dtype, batch: int = 1):
        self.plan = memory_plan
        self.dtype = np.dtype(dtype)
        self.batch = batch
        align = memory_plan.a * self.dtype.itemsize
        self.alpha = _aligned_zeros((batch, memory_plan.alpha_slots), self.dtype, align)
        self.beta = _aligned_zeros((batch, memory_plan.n), np.uint8, max(memory_plan.a, 1))

    @property
    def n(self) -> int:
        return self.plan.n

    def stage(self, s: int) -> np.ndarray:
        off = self.plan.stage_offsets[s]
        return self.alpha[:, off : off + (1 << s)]

    @property
    def channel(self) -> np.ndarray:
        return self.stage(self.plan.stages)

    def beta_span(self, offset: int, size: int) -> np.ndarray:
        if offset < 0 or offset + size > self.n:
            raise IndexError(f"beta span [{offset}, {offset + size}) outside [0, {self.n})")
        return self.beta[:, offset : offset + size]

    def load(self, llr) -> None:
        """Copy channel LLRs (shape (n,) or (batch, n)) into the arena."""
        llr = np.asarray(llr)
        if llr.shape[-1] != self.n:
            raise ValueError(f"LLR frame length {llr.shape[-1]} != n = {self.n}")
        self.channel[...] = llr


def beta_combine_in_place(arena: Arena, node_offset: int, half: int) -> None:
    """beta[off + i] ^= beta[off + half + i] for i < half; right half untouched."""
    left = arena.beta_span(node_offset, 2 * half)[:, :half]
    np.bitwise_xor(left, arena.beta[:, node_offset + half : node_offset + 2 * half], out=left)
