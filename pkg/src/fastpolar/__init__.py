"""Polar code construction, SC / Fast-SSC decoding and unrolled decoders."""

from .arena import Arena, MemoryPlan, plan
from .bench import BenchRecord, bench_decoder
from .code import CodeSpec, SpecFormatError, construct_bhattacharyya, construct_ga, load_spec, read_spec, save_spec, write_spec
from .decoders import DECODERS, make_decoder
from .encoder import encode, extract_message, polar_transform
from .kernels import PROFILES, get_profile, quantize
from .sc import ScDecoder
from .sim import ChannelParams, SimRecord, run_point, sweep
from .tree import DecoderTree, FastSSCDecoder, NodeKind, build_tree
from .unrolled import Program, ProgramError, UnrolledDecoder, emit_source, generate, load_program, save_program, verify

__version__ = "0.1.0"

__all__ = [
    "Arena", "MemoryPlan", "plan",
    "BenchRecord", "bench_decoder",
    "CodeSpec", "SpecFormatError", "construct_bhattacharyya", "construct_ga",
    "load_spec", "read_spec", "save_spec", "write_spec",
    "DECODERS", "make_decoder",
    "encode", "extract_message", "polar_transform",
    "PROFILES", "get_profile", "quantize",
    "ScDecoder",
    "ChannelParams", "SimRecord", "run_point", "sweep",
    "DecoderTree", "FastSSCDecoder", "NodeKind", "build_tree",
    "Program", "ProgramError", "UnrolledDecoder", "emit_source", "generate",
    "load_program", "save_program", "verify",
]
