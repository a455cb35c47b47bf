"""Decoder factory."""

from __future__ import annotations

from .base import ArenaDecoder
from .code import CodeSpec
from .sc import ScDecoder
from .tree import FastSSCDecoder
from .unrolled import UnrolledDecoder

DECODERS = ("sc", "fast", "unrolled")


class HardDecisionDecoder(ArenaDecoder):
    """Uncoded baseline: threshold every channel LLR, ignore the frozen set."""

    kind = "hard"

    def _run(self, arena):
        self.kernels.info(arena.channel, out=arena.beta)


def make_decoder(
    spec: CodeSpec,
    kind: str = "fast",
    profile: str = "float",
    vector_width: int | None = None,
) -> ArenaDecoder:
    if kind == "sc":
        return ScDecoder(spec, profile, vector_width)
    if kind == "fast":
        return FastSSCDecoder(spec, profile, vector_width)
    if kind == "unrolled":
        return UnrolledDecoder(spec, profile, vector_width)
    if kind == "hard":
        return HardDecisionDecoder(spec, profile, vector_width)
    raise ValueError(f"unknown decoder {kind!r}; choose from {DECODERS + ('hard',)}")
