"""Constituent-code classification, pruned decoder trees and the tree interpreter."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .arena import Arena
from .base import ArenaDecoder
from .code import CodeSpec, is_power_of_two
from .encoder import extract_message
from .kernels import for_dtype


class NodeKind(enum.Enum):
    RATE0 = "Rate0"
    RATE1 = "Rate1"
    REPETITION = "Repetition"
    SPC = "SPC"
    REPSPC = "RepSPC"
    P01 = "P01"
    ZEROSPC = "ZeroSPC"
    RSPC = "RSPC"
    BRANCH0R = "Branch0R"
    BRANCH = "Branch"

    def __str__(self):
        return self.value


K = NodeKind

# Node vocabularies.  Size-1 leaves are always Rate0 / Rate1.
NODE_SETS = {
    "sc": frozenset({K.BRANCH}),
    "ssc": frozenset({K.RATE0, K.RATE1, K.BRANCH0R, K.BRANCH}),
    "fast-ssc": frozenset(K),
}

LEAF_KINDS = frozenset({K.RATE0, K.RATE1, K.REPETITION, K.SPC})
FUSED_KINDS = frozenset({K.P01, K.ZEROSPC, K.REPSPC})


def _node_set(node_set) -> frozenset:
    if isinstance(node_set, str):
        try:
            return NODE_SETS[node_set]
        except KeyError:
            raise ValueError(f"unknown node set {node_set!r}; choose from {sorted(NODE_SETS)}") from None
    return frozenset(node_set)


def classify(frozen_slice, kinds=NODE_SETS["fast-ssc"]) -> NodeKind:
    """Kind of the constituent code whose frozen mask is ``frozen_slice``.

    Checked in priority order: Rate0, Rate1, Repetition, SPC, then the
    two-child patterns P01, ZeroSPC, RepSPC, RSPC, Branch0R, Branch.
    """
    m = np.asarray(frozen_slice, dtype=bool)
    size = m.size
    if not is_power_of_two(size):
        raise ValueError(f"slice length must be a power of two, got {size}")
    kinds = _node_set(kinds)
    n_frozen = int(m.sum())
    if n_frozen == size and (size == 1 or K.RATE0 in kinds):
        return K.RATE0
    if n_frozen == 0 and (size == 1 or K.RATE1 in kinds):
        return K.RATE1
    if K.REPETITION in kinds and n_frozen == size - 1 and not m[-1]:
        return K.REPETITION
    if K.SPC in kinds and n_frozen == 1 and m[0]:
        return K.SPC
    h = size // 2
    left, right = classify(m[:h], kinds), classify(m[h:], kinds)
    if K.P01 in kinds and left is K.RATE0 and right is K.RATE1:
        return K.P01
    if K.ZEROSPC in kinds and left is K.RATE0 and right is K.SPC:
        return K.ZEROSPC
    if K.REPSPC in kinds and left is K.REPETITION and right is K.SPC:
        return K.REPSPC
    if K.RSPC in kinds and right is K.SPC:
        return K.RSPC
    if K.BRANCH0R in kinds and left is K.RATE0:
        return K.BRANCH0R
    return K.BRANCH


@dataclass
class Node:
    kind: NodeKind
    size: int
    offset: int
    left: Node | None = None
    right: Node | None = None

    @property
    def stage(self) -> int:
        return self.size.bit_length() - 1

    @property
    def children(self) -> tuple[Node, ...]:
        return tuple(c for c in (self.left, self.right) if c is not None)

    def walk(self) -> Iterator[Node]:
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass
class DecoderTree:
    spec: CodeSpec
    root: Node
    node_set: str

    @property
    def size(self) -> int:
        return self.root.size

    def nodes(self) -> Iterator[Node]:
        return self.root.walk()

    def node_count(self) -> int:
        return sum(1 for _ in self.nodes())

    def render(self) -> str:
        lines = []

        def emit(node, depth):
            lines.append(f"{'  ' * depth}{node.kind}<{node.size}> @{node.offset}")
            for c in node.children:
                emit(c, depth + 1)

        emit(self.root, 0)
        return "\n".join(lines)


def build_tree(spec: CodeSpec, node_set="fast-ssc") -> DecoderTree:
    """Classify the code top-down, stopping at every leaf-decodable node.

    Fused two-child kinds (P01, ZeroSPC, RepSPC) keep their two leaf
    children so a generator can still expand them; RSPC keeps a full left
    subtree and an SPC right child.
    """
    kinds = _node_set(node_set)
    mask = spec.mask

    def build(offset, size):
        m = mask[offset : offset + size]
        kind = classify(m, kinds)
        node = Node(kind, size, offset)
        if kind in LEAF_KINDS:
            return node
        h = size // 2
        node.left = build(offset, h)
        node.right = build(offset + h, h)
        return node

    name = node_set if isinstance(node_set, str) else "custom"
    return DecoderTree(spec, build(0, spec.n), name)


def interpret(tree: DecoderTree, arena: Arena) -> None:
    """Decode the frames already loaded in ``arena`` by walking the tree."""
    if arena.n != tree.size:
        raise ValueError(f"arena planned for n={arena.n}, tree has n={tree.size}")
    k = for_dtype(arena.dtype)
    beta = arena.beta
    stages = [arena.stage(s) for s in range(arena.plan.stages + 1)]

    def visit(node):
        s, o, size = node.stage, node.offset, node.size
        alpha = stages[s]
        span = beta[:, o : o + size]
        kind = node.kind
        if kind is K.RATE0:
            span[...] = 0
        elif kind is K.RATE1:
            k.info(alpha, out=span)
        elif kind is K.REPETITION:
            k.repetition(alpha, out=span)
        elif kind is K.SPC:
            k.spc(alpha, out=span)
        elif kind is K.P01:
            k.p_01(alpha, out=span)
        elif kind is K.ZEROSPC:
            k.zero_spc(alpha, out=span)
        elif kind is K.REPSPC:
            k.repspc(alpha, out=span)
        else:
            h = size // 2
            if kind is K.BRANCH0R:
                k.g_0r(alpha, out=stages[s - 1])
                visit(node.right)
                span[:, :h] = span[:, h:]
                return
            k.f(alpha, out=stages[s - 1])
            visit(node.left)
            if kind is K.RSPC:
                k.rspc(alpha, span[:, :h], out=span)
                return
            k.g(alpha, span[:, :h], out=stages[s - 1])
            visit(node.right)
            np.bitwise_xor(span[:, :h], span[:, h:], out=span[:, :h])

    visit(tree.root)


class FastSSCDecoder(ArenaDecoder):
    """Run-time configurable decoder: interprets a pruned tree per frame."""

    kind = "fast"

    def __init__(self, spec, profile="float", vector_width=None, node_set="fast-ssc"):
        super().__init__(spec, profile, vector_width)
        self.tree = build_tree(spec, node_set)

    def _run(self, arena):
        interpret(self.tree, arena)


def decode_fast(tree: DecoderTree, arena: Arena, llr):
    """Interpret ``tree`` on ``llr`` (shape (arena.batch, n) or (n,) with batch 1)."""
    llr = np.asarray(llr)
    arena.load(llr)
    interpret(tree, arena)
    codeword = arena.beta.copy()
    if llr.ndim == 1:
        codeword = codeword[0]
    return codeword, extract_message(tree.spec, codeword)
