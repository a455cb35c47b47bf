"""Reference successive-cancellation decoder (unpruned, recursive)."""

from __future__ import annotations

import numpy as np

from .arena import Arena
from .base import ArenaDecoder


class ScDecoder(ArenaDecoder):
    """Plain SC over the full tree: f to the left, g to the right, combine upward.

    This is the correctness oracle for the pruned decoders, not a fast path.
    Leaf decisions are recorded in visit order, which is ascending index
    order, so the message comes straight from the u-domain decisions.
    """

    kind = "sc"

    def __init__(self, spec, profile="float", vector_width=None):
        super().__init__(spec, profile, vector_width)
        self._frozen = spec.mask

    def _run(self, arena: Arena, u: np.ndarray | None = None) -> None:
        stages = [arena.stage(s) for s in range(self.plan.stages + 1)]
        beta = arena.beta
        k = self.kernels
        frozen = self._frozen

        def visit(s, o):
            if s == 0:
                if frozen[o]:
                    beta[:, o] = 0
                else:
                    beta[:, o] = stages[0][:, 0] < 0
                if u is not None:
                    u[:, o] = beta[:, o]
                return
            h = 1 << (s - 1)
            k.f(stages[s], out=stages[s - 1])
            visit(s - 1, o)
            k.g(stages[s], beta[:, o : o + h], out=stages[s - 1])
            visit(s - 1, o + h)
            np.bitwise_xor(beta[:, o : o + h], beta[:, o + h : o + 2 * h], out=beta[:, o : o + h])

        visit(self.plan.stages, 0)

    def decode(self, llr):
        frames, single = self._frames(llr)
        arena = self.arena(frames.shape[0])
        arena.load(frames)
        u = np.zeros_like(arena.beta)
        self._run(arena, u)
        codeword = arena.beta.copy()
        message = u[:, self.spec.info_indices]
        if single:
            return codeword[0], message[0]
        return codeword, message


def decode_sc(decoder: ScDecoder, llr):
    return decoder.decode(llr)
