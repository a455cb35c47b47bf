"""Shared plumbing for arena-backed decoders."""

from __future__ import annotations

import numpy as np

from .arena import Arena, plan
from .code import CodeSpec
from .encoder import extract_message
from .kernels import for_dtype, get_profile


class ArenaDecoder:
    """Owns one arena per batch size and handles frame copy-in / copy-out.

    Subclasses implement ``_run(arena)``, which leaves the codeword
    estimate in ``arena.beta``.  Instances are not thread-safe.
    """

    kind = "base"

    def __init__(self, spec: CodeSpec, profile: str = "float", vector_width: int | None = None):
        self.spec = spec
        self.profile = get_profile(profile)
        a = min(vector_width or self.profile.vector_width, spec.n)
        self.plan = plan(spec.n, a, self.profile.w_alpha, self.profile.w_beta)
        self.kernels = for_dtype(self.profile.dtype)
        self._arenas: dict[int, Arena] = {}

    def arena(self, batch: int = 1) -> Arena:
        arena = self._arenas.get(batch)
        if arena is None:
            arena = self._arenas[batch] = Arena(self.plan, self.profile.dtype, batch)
            self._bind(arena)
        return arena

    def _bind(self, arena: Arena) -> None:
        """Hook for per-arena precomputation."""

    def _run(self, arena: Arena) -> None:
        raise NotImplementedError

    def _frames(self, llr) -> tuple[np.ndarray, bool]:
        llr = np.asarray(llr)
        if llr.shape[-1] != self.spec.n:
            raise ValueError(f"LLR frame length {llr.shape[-1]} != n = {self.spec.n}")
        if self.profile.name == "int8" and not np.issubdtype(llr.dtype, np.integer):
            raise ValueError("int8 profile expects quantized integer LLRs (see kernels.quantize)")
        single = llr.ndim == 1
        return llr.reshape(1, -1) if single else llr.reshape(-1, self.spec.n), single

    def decode_codeword(self, llr) -> np.ndarray:
        """Copy frames in, decode, and copy the codeword estimate out."""
        frames, single = self._frames(llr)
        arena = self.arena(frames.shape[0])
        arena.load(frames)
        self._run(arena)
        out = arena.beta.copy()
        return out[0] if single else out

    def decode(self, llr) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(codeword, message)`` for one frame or a batch of frames."""
        codeword = self.decode_codeword(llr)
        return codeword, extract_message(self.spec, codeword)
