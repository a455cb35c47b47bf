"""Code-specialized straight-line decoders.

``generate`` flattens a decoder tree into a list of kernel calls whose
operands are already resolved to alpha stages and beta offsets.  The list
can be run by ``UnrolledDecoder`` (a dispatch loop over pre-bound array
views), saved as text in the ``OP<size>(operands);`` notation, or rendered
as Python source with every slice written out as a constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .arena import Arena, MemoryPlan
from .base import ArenaDecoder
from .code import CodeSpec, is_power_of_two
from .encoder import extract_message
from .kernels import for_dtype
from .specialize import specialize
from .tree import DecoderTree, NodeKind, build_tree


class ProgramError(ValueError):
    """Malformed program text or a program that fails static verification."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


ALPHA, BETA = "α", "β"


class Operand(NamedTuple):
    space: str  # ALPHA (stage index) or BETA (offset into the beta array)
    index: int


# Operand signature per opcode, in written order.
SIGNATURES = {
    "F": (ALPHA, ALPHA),
    "G": (ALPHA, ALPHA, BETA),
    "G_0R": (ALPHA, ALPHA),
    "Combine": (BETA, BETA, BETA),
    "Combine_0R": (BETA, BETA),
    "Info": (ALPHA, BETA),
    "Repetition": (ALPHA, BETA),
    "SPC": (ALPHA, BETA),
    "RepSPC": (ALPHA, BETA),
    "P_01": (ALPHA, BETA),
    "0SPC": (ALPHA, BETA),
    "RSPC": (ALPHA, BETA),
}
OPCODES = tuple(SIGNATURES)


@dataclass(frozen=True)
class Instruction:
    op: str
    size: int
    args: tuple[Operand, ...]

    def render(self, channel_stage: int | None = None) -> str:
        parts = []
        for a in self.args:
            if a.space == ALPHA and a.index == channel_stage:
                parts.append("α_c")
            else:
                parts.append(f"{a.space}_{a.index}")
        return f"{self.op}<{self.size}>({', '.join(parts)});"


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instruction, ...]
    plan: MemoryPlan
    spec: CodeSpec | None = None
    digest: str = ""
    fused: bool = False

    @property
    def n(self) -> int:
        return self.plan.n

    @property
    def channel_stage(self) -> int:
        return self.plan.stages

    def ops(self) -> list[str]:
        return [f"{i.op}<{i.size}>" for i in self.instructions]

    def __len__(self):
        return len(self.instructions)


def _a(stage):
    return Operand(ALPHA, stage)


def _b(offset):
    return Operand(BETA, offset)


def generate(tree: DecoderTree, memory_plan: MemoryPlan, fuse: bool = False) -> Program:
    """Depth-first lowering of ``tree`` into instructions.

    With ``fuse=False`` two-child nodes are expanded into their generic
    F / G / G_0R / Combine / Combine_0R sequences; this is the lowering that
    yields ``F<8>, G_0R<4>, Info<2>, Combine_0R<4>, G<8>, SPC<4>, Combine<8>``
    for the (8,5) code with frozen set {0, 1, 4}.  With ``fuse=True`` the
    P_01, 0SPC, RepSPC and RSPC kernels are emitted as single instructions.
    Rate-0 nodes emit nothing: the executor clears beta once per frame.
    """
    if memory_plan.n != tree.size:
        raise ValueError(f"plan is for n={memory_plan.n}, tree has n={tree.size}")
    code: list[Instruction] = []

    def emit(op, size, *args):
        code.append(Instruction(op, size, args))

    def lower(node):
        s, o, size, kind = node.stage, node.offset, node.size, node.kind
        h = size // 2
        if kind is NodeKind.RATE0:
            return
        if kind is NodeKind.RATE1:
            emit("Info", size, _a(s), _b(o))
        elif kind is NodeKind.REPETITION:
            emit("Repetition", size, _a(s), _b(o))
        elif kind is NodeKind.SPC:
            emit("SPC", size, _a(s), _b(o))
        elif fuse and kind is NodeKind.P01:
            emit("P_01", size, _a(s), _b(o))
        elif fuse and kind is NodeKind.ZEROSPC:
            emit("0SPC", size, _a(s), _b(o))
        elif fuse and kind is NodeKind.REPSPC:
            emit("RepSPC", size, _a(s), _b(o))
        elif node.left.kind is NodeKind.RATE0:
            # Branch0R, and unfused P01 / ZeroSPC
            emit("G_0R", size, _a(s), _a(s - 1))
            lower(node.right)
            emit("Combine_0R", size, _b(o + h), _b(o))
        else:
            emit("F", size, _a(s), _a(s - 1))
            lower(node.left)
            if fuse and kind is NodeKind.RSPC:
                emit("RSPC", size, _a(s), _b(o))
                return
            emit("G", size, _a(s), _a(s - 1), _b(o))
            lower(node.right)
            emit("Combine", size, _b(o), _b(o + h), _b(o))

    lower(tree.root)
    return Program(tuple(code), memory_plan, tree.spec, tree.spec.digest, fuse)


def verify(prog: Program) -> None:
    """Static checks: operand shapes, bounds, and every read preceded by a write.

    Raises ``ProgramError`` naming the first offending instruction.
    """
    n = prog.n
    top = prog.channel_stage
    alpha_written = {top}
    beta_written = np.zeros(n, dtype=bool)
    # beta is cleared per frame, so an all-frozen (Rate-0) span reads as zeros
    zero_ok = prog.spec.mask if prog.spec is not None else np.zeros(n, dtype=bool)
    for line, ins in enumerate(prog.instructions, start=1):
        size, args = ins.size, ins.args
        if not is_power_of_two(size) or size > n:
            raise ProgramError(f"bad size {size}", line)
        s = size.bit_length() - 1
        h = size // 2
        if tuple(a.space for a in args) != SIGNATURES[ins.op]:
            raise ProgramError(f"{ins.op} operand kinds do not match its signature", line)
        for a in args:
            if a.space == ALPHA and not 0 <= a.index <= top:
                raise ProgramError(f"alpha stage {a.index} out of range", line)

        def need_alpha(stage):
            if stage != s:
                raise ProgramError(f"{ins.op}<{size}> reads stage {stage}, expected {s}", line)
            if stage not in alpha_written:
                raise ProgramError(f"stage {stage} read before written", line)

        def need_beta(o, length):
            if o % length or o + length > n:
                raise ProgramError(f"beta span [{o}, {o + length}) misaligned", line)
            span = slice(o, o + length)
            if not beta_written[span].all() and not zero_ok[span].all():
                raise ProgramError(f"beta span [{o}, {o + length}) read before written", line)

        def write_alpha(stage):
            if stage != s - 1:
                raise ProgramError(f"{ins.op}<{size}> writes stage {stage}, expected {s - 1}", line)
            alpha_written.add(stage)

        def write_beta(o, length):
            if o % length or o + length > n:
                raise ProgramError(f"beta span [{o}, {o + length}) misaligned", line)
            beta_written[o : o + length] = True

        op = ins.op
        if op in ("F", "G_0R"):
            need_alpha(args[0].index)
            write_alpha(args[1].index)
        elif op == "G":
            need_alpha(args[0].index)
            need_beta(args[2].index, h)
            write_alpha(args[1].index)
        elif op == "Combine":
            lo, hi, out = (a.index for a in args)
            if hi != lo + h or out != lo:
                raise ProgramError("Combine operands must be (β_o, β_o+h, β_o)", line)
            need_beta(lo, h)
            need_beta(hi, h)
            write_beta(out, size)
        elif op == "Combine_0R":
            src, out = args[0].index, args[1].index
            if src != out + h:
                raise ProgramError("Combine_0R operands must be (β_o+h, β_o)", line)
            need_beta(src, h)
            write_beta(out, size)
        elif op == "RSPC":
            need_alpha(args[0].index)
            need_beta(args[1].index, h)
            write_beta(args[1].index, size)
        else:
            need_alpha(args[0].index)
            write_beta(args[1].index, size)


def _bind_steps(prog: Program, arena: Arena) -> list:
    """Resolve every operand to an array view once; return zero-arg callables.

    Each callable owns preallocated scratch sized for its instruction, so a
    frame runs without per-call allocation or dispatch on shape.
    """
    k = for_dtype(arena.dtype)
    sat = k.saturating
    beta = arena.beta
    stage = [arena.stage(s) for s in range(prog.plan.stages + 1)]
    steps = []
    for ins in prog.instructions:
        op, size, args = ins.op, ins.size, ins.args
        if op in ("F", "G", "G_0R"):
            a_in, a_out = stage[args[0].index], stage[args[1].index]
            o = args[2].index if op == "G" else 0
        elif op in ("Combine", "Combine_0R"):
            a_in = a_out = None
            o = args[0].index if op == "Combine" else args[1].index
        else:
            a_in, a_out, o = stage[args[0].index], None, args[1].index
        steps.append(specialize(op, size, a_in, a_out, beta, o, k, sat))
    return steps


def _run_steps(steps, arena):
    arena.beta.fill(0)
    for step in steps:
        step()


class UnrolledDecoder(ArenaDecoder):
    """Executes a generated program for one fixed code."""

    kind = "unrolled"

    def __init__(self, spec, profile="float", vector_width=None, fuse=True, program=None):
        super().__init__(spec, profile, vector_width)
        if program is None:
            program = generate(build_tree(spec), self.plan, fuse=fuse)
        elif program.plan != self.plan:
            raise ValueError("program was generated for a different memory plan")
        self.program = program
        self._steps: dict[int, list] = {}

    def _bind(self, arena):
        self._steps[id(arena)] = _bind_steps(self.program, arena)

    def _run(self, arena):
        _run_steps(self._steps[id(arena)], arena)


def execute(prog: Program, arena: Arena, llr):
    """Run ``prog`` once on ``llr``; returns ``(codeword, message)``.

    The message needs the code's frozen set, so it is ``None`` for programs
    loaded without one.
    """
    if arena.plan != prog.plan:
        raise ValueError("arena does not match the program's memory plan")
    llr = np.asarray(llr)
    arena.load(llr)
    _run_steps(_bind_steps(prog, arena), arena)
    codeword = arena.beta.copy()
    if llr.ndim == 1:
        codeword = codeword[0]
    message = extract_message(prog.spec, codeword) if prog.spec is not None else None
    return codeword, message


# --------------------------------------------------------------------------
# text format

_LINE = re.compile(r"^\s*([A-Za-z0-9_]+)\s*<\s*(\d+)\s*>\s*\((.*)\)\s*;?\s*$")
_OPERAND = re.compile(r"^(α|β|a|b|alpha|beta)_(c|\d+)$")


def save_program(prog: Program) -> str:
    p = prog.plan
    head = [
        f"# program n={p.n} a={p.a} w_alpha={p.w_alpha} w_beta={p.w_beta} "
        f"fused={int(prog.fused)} digest={prog.digest or '-'}"
    ]
    if prog.spec is not None:
        head.append("# frozen " + " ".join(str(i) for i in prog.spec.frozen_indices))
    body = [ins.render(prog.channel_stage) for ins in prog.instructions]
    return "\n".join(head + body) + "\n"


def _parse_header(line, lineno):
    fields = {}
    for tok in line.split()[2:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise ProgramError(f"bad header field {tok!r}", lineno)
        fields[key] = val
    return fields


def load_program(text: str) -> Program:
    """Parse program text; also accepts bare instruction lines without headers.

    Without a header, ``n`` is the largest instruction size and the plan
    uses a = 1 with 32-bit widths.
    """
    from .arena import plan as make_plan

    header: dict = {}
    frozen = None
    raw: list[tuple[int, str, int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if stripped.startswith("# program"):
                header = _parse_header(stripped, lineno)
            elif stripped.startswith("# frozen"):
                try:
                    frozen = [int(t) for t in stripped.split()[2:]]
                except ValueError:
                    raise ProgramError("bad frozen list", lineno) from None
            continue
        m = _LINE.match(stripped)
        if not m:
            raise ProgramError(f"cannot parse {stripped!r}", lineno)
        op, size, operands = m.group(1), int(m.group(2)), m.group(3)
        if op not in SIGNATURES:
            raise ProgramError(f"unknown opcode {op!r}", lineno)
        if not is_power_of_two(size):
            raise ProgramError(f"size {size} is not a power of two", lineno)
        toks = [t.strip() for t in operands.split(",")] if operands.strip() else []
        if len(toks) != len(SIGNATURES[op]):
            raise ProgramError(f"{op} takes {len(SIGNATURES[op])} operands, got {len(toks)}", lineno)
        raw.append((lineno, op, size, toks))
    if not raw:
        raise ProgramError("program has no instructions")

    try:
        n = int(header.get("n", max(r[2] for r in raw)))
        a = int(header.get("a", 1))
        w_alpha = int(header.get("w_alpha", 32))
        w_beta = int(header.get("w_beta", 32))
        memory_plan = make_plan(n, a, w_alpha, w_beta)
    except ValueError as exc:
        raise ProgramError(f"bad program header: {exc}") from exc
    channel = memory_plan.stages

    instructions = []
    for lineno, op, size, toks in raw:
        args = []
        for tok, want in zip(toks, SIGNATURES[op]):
            m = _OPERAND.match(tok)
            if not m:
                raise ProgramError(f"bad operand {tok!r}", lineno)
            space = ALPHA if m.group(1) in ("α", "a", "alpha") else BETA
            if space != want:
                raise ProgramError(f"{op} expects {want} operand, got {tok!r}", lineno)
            idx = m.group(2)
            args.append(Operand(space, (channel if space == ALPHA else 0) if idx == "c" else int(idx)))
        instructions.append(Instruction(op, size, tuple(args)))

    spec = None
    if frozen is not None:
        try:
            spec = CodeSpec.from_frozen_indices(n, frozen)
        except ValueError as exc:
            raise ProgramError(f"bad frozen list: {exc}") from exc
    digest = header.get("digest", "")
    return Program(
        tuple(instructions),
        memory_plan,
        spec,
        "" if digest == "-" else digest,
        header.get("fused", "0") == "1",
    )


# --------------------------------------------------------------------------
# source emission

_KERNEL_NAMES = {
    "F": "f",
    "G_0R": "g_0r",
    "G": "g",
    "Info": "info",
    "Repetition": "repetition",
    "SPC": "spc",
    "RepSPC": "repspc",
    "P_01": "p_01",
    "0SPC": "zero_spc",
    "RSPC": "rspc",
}


def emit_source(prog: Program) -> str:
    """Render ``prog`` as a Python module with one straight-line function.

    The emitted ``decode(alpha, beta, k)`` takes the arena arrays and a
    kernel set (``fastpolar.kernels.for_dtype(dtype)``); every slice bound
    is a literal.
    """
    p = prog.plan
    off = p.stage_offsets

    def a(stage):
        return f"alpha[:, {off[stage]}:{off[stage] + (1 << stage)}]"

    def b(o, length):
        return f"beta[:, {o}:{o + length}]"

    lines = [
        f"# Generated unrolled decoder: n={p.n} k={prog.spec.k if prog.spec else '?'} "
        f"digest={prog.digest or '-'} ({len(prog)} instructions)",
        "import numpy as np",
        "",
        "",
        "def decode(alpha, beta, k):",
        "    beta.fill(0)",
    ]
    for ins in prog.instructions:
        op, size, args = ins.op, ins.size, ins.args
        h = size // 2
        lines.append(f"    # {ins.render(prog.channel_stage)}")
        if op in ("F", "G_0R"):
            call = f"k.{_KERNEL_NAMES[op]}({a(args[0].index)}, out={a(args[1].index)})"
        elif op == "G":
            call = f"k.g({a(args[0].index)}, {b(args[2].index, h)}, out={a(args[1].index)})"
        elif op == "Combine":
            o = args[0].index
            call = f"np.bitwise_xor({b(o, h)}, {b(o + h, h)}, out={b(o, h)})"
        elif op == "Combine_0R":
            o = args[1].index
            call = f"{b(o, h)} = {b(o + h, h)}"
        elif op == "RSPC":
            o = args[1].index
            call = f"k.rspc({a(args[0].index)}, {b(o, h)}, out={b(o, size)})"
        else:
            call = f"k.{_KERNEL_NAMES[op]}({a(args[0].index)}, out={b(args[1].index, size)})"
        lines.append(f"    {call}")
    return "\n".join(lines) + "\n"


def compile_source(source: str):
    """Compile emitted source and return its ``decode`` function."""
    namespace: dict = {}
    exec(compile(source, "<unrolled-decoder>", "exec"), namespace)
    return namespace["decode"]
