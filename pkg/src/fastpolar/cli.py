"""Command-line front end.

File formats used by ``encode`` and ``decode``:

* bit files: one frame per line written as a run of ``0``/``1`` characters
  (whitespace between bits is also accepted on input);
* LLR files: one frame per line, whitespace-separated numbers.  int8 LLR
  files hold integers in [-127, 127].
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .arena import plan as make_plan
from .bench import bench_decoder, write_bench_csv
from .code import construct_bhattacharyya, construct_ga, read_spec, write_spec
from .decoders import DECODERS, make_decoder
from .encoder import encode
from .kernels import LLR_MAX, PROFILES, get_profile, quantize
from .sim import ChannelParams, channel_llrs, sweep, write_sim_csv
from .tree import NODE_SETS, build_tree
from .unrolled import emit_source, generate, save_program, verify

PROG = "fastpolar"


class CliError(Exception):
    pass


# --------------------------------------------------------------------------
# file helpers

def read_bits(path, width: int | None = None) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = "".join(line.split())
            if not text:
                continue
            if set(text) - {"0", "1"}:
                raise CliError(f"{path}:{lineno}: bit lines may only contain 0 and 1")
            if width is not None and len(text) != width:
                raise CliError(f"{path}:{lineno}: expected {width} bits, got {len(text)}")
            rows.append(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))
    if not rows:
        raise CliError(f"{path}: no frames")
    if len({len(r) for r in rows}) != 1:
        raise CliError(f"{path}: frames have different lengths")
    return np.stack(rows).astype(np.uint8)


def format_bits(bits) -> str:
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    return "".join((row + ord("0")).tobytes().decode() + "\n" for row in bits)


def write_text(path, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def format_llrs(llr) -> str:
    llr = np.atleast_2d(llr)
    if np.issubdtype(llr.dtype, np.integer):
        return "".join(" ".join(str(int(v)) for v in row) + "\n" for row in llr)
    # 9 significant digits round-trip float32 exactly
    return "".join(" ".join(f"{float(v):.9g}" for v in row) + "\n" for row in llr)


def read_llrs(path, n: int, profile: str) -> np.ndarray:
    try:
        llr = np.loadtxt(path, dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None
    if llr.size == 0:
        raise CliError(f"{path}: no frames")
    if llr.shape[1] != n:
        raise CliError(f"{path}: frames have {llr.shape[1]} LLRs, code length is {n}")
    if profile == "int8":
        if not np.all(llr == np.rint(llr)) or np.abs(llr).max() > LLR_MAX:
            raise CliError(f"{path}: int8 profile needs integer LLRs in [-{LLR_MAX}, {LLR_MAX}]")
        return llr.astype(np.int8)
    return llr.astype(np.float32)


# --------------------------------------------------------------------------
# subcommands

def cmd_construct(args):
    if args.method == "ga":
        spec = construct_ga(args.n, args.k, args.design_snr)
    else:
        spec = construct_bhattacharyya(args.n, args.k, args.erasure_prob)
    write_spec(spec, args.out)
    print(f"wrote {spec.name} ({args.method}) to {args.out}", file=sys.stderr)


def cmd_encode(args):
    spec = read_spec(args.spec)
    rng = np.random.default_rng(args.seed)
    if args.msg:
        msg = read_bits(args.msg, spec.k)
    else:
        msg = rng.integers(0, 2, size=(args.random, spec.k), dtype=np.uint8)
        if args.msg_out:
            write_text(args.msg_out, format_bits(msg))
    codeword = encode(spec, msg)
    write_text(args.out, format_bits(codeword))
    if args.llr_out:
        if args.ebn0 is None:
            llr = (1.0 - 2.0 * codeword).astype(np.float64)
            llr = quantize(llr, args.q_scale) if args.profile == "int8" else llr.astype(np.float32)
        else:
            params = ChannelParams(args.ebn0, spec.rate, args.q_scale)
            llr = channel_llrs(spec, msg, params, rng, args.profile)
        write_text(args.llr_out, format_llrs(llr))


def cmd_decode(args):
    spec = read_spec(args.spec)
    llr = read_llrs(args.llr, spec.n, args.profile)
    dec = make_decoder(spec, args.decoder, args.profile, args.vector_width)
    codeword, msg = dec.decode(llr)
    write_text(args.out, format_bits(msg))
    if args.codeword_out:
        write_text(args.codeword_out, format_bits(codeword))


def cmd_inspect(args):
    spec = read_spec(args.spec)
    tree = build_tree(spec, args.node_set)
    prof = get_profile(args.profile)
    mp = make_plan(spec.n, min(args.vector_width or prof.vector_width, spec.n), prof.w_alpha, prof.w_beta)
    print(f"code {spec.name}: rate {spec.rate:.4f}, digest {spec.digest}")
    print(f"decoder tree ({args.node_set}, {tree.node_count()} nodes):")
    print(tree.render())
    print(mp.report())


def cmd_gen(args):
    spec = read_spec(args.spec)
    prof = get_profile(args.profile)
    mp = make_plan(spec.n, min(args.vector_width or prof.vector_width, spec.n), prof.w_alpha, prof.w_beta)
    prog = generate(build_tree(spec), mp, fuse=args.fuse)
    verify(prog)
    write_text(args.out, save_program(prog))
    if args.source:
        write_text(args.source, emit_source(prog))


def cmd_simulate(args):
    spec = read_spec(args.spec)
    records = sweep(
        spec, args.decoder, args.profile, args.ebn0, args.frames, args.seed, args.q_scale,
        batch=args.batch, workers=args.workers, vector_width=args.vector_width,
    )
    if args.out == "-":
        write_sim_csv(records, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_sim_csv(records, fh)


def cmd_bench(args):
    records = []
    for path in args.spec:
        spec = read_spec(path)
        for decoder in args.decoder:
            rec = bench_decoder(
                spec, decoder, args.profile, args.runs, args.frames, args.ebn0, args.seed,
                args.vector_width,
            )
            print(
                f"{rec.code} {decoder} {args.profile}: {rec.latency_us:.2f} us/frame, "
                f"{rec.info_tp_mbps:.3f} Mbps info",
                file=sys.stderr,
            )
            records.append(rec)
    if args.out == "-":
        write_bench_csv(records, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_bench_csv(records, fh)


# --------------------------------------------------------------------------
# parser

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _power_of_two(text):
    v = _positive_int(text)
    if v & (v - 1):
        raise argparse.ArgumentTypeError(f"expected a power of two, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description="Polar code decoders and tooling.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    profile = argparse.ArgumentParser(add_help=False)
    profile.add_argument("--profile", choices=sorted(PROFILES), default="float")
    profile.add_argument("--vector-width", type=_power_of_two, default=None,
                         help="alpha padding in LLRs (default: profile width)")
    seed = argparse.ArgumentParser(add_help=False)
    seed.add_argument("--seed", type=int, default=0)
    qscale = argparse.ArgumentParser(add_help=False)
    qscale.add_argument("--q-scale", type=float, default=4.0, help="int8 LLR scale (default 4)")

    p = sub.add_parser("construct", help="build a code spec file")
    p.add_argument("--n", type=_power_of_two, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("ga", "bhattacharyya"), default="ga")
    p.add_argument("--design-snr", type=float, default=0.0, help="GA design Eb/N0 in dB")
    p.add_argument("--erasure-prob", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("encode", help="encode messages", parents=[profile, seed, qscale])
    p.add_argument("--spec", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--msg", help="bit file with k bits per line")
    src.add_argument("--random", type=_positive_int, metavar="COUNT", help="encode COUNT random messages")
    p.add_argument("--msg-out", help="where to write generated random messages")
    p.add_argument("--out", required=True, help="codeword bit file ('-' for stdout)")
    p.add_argument("--llr-out", help="also write channel LLRs")
    p.add_argument("--ebn0", type=float, default=None, help="AWGN Eb/N0 in dB for --llr-out (omit for noiseless)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode an LLR file", parents=[profile])
    p.add_argument("--spec", required=True)
    p.add_argument("--llr", required=True)
    p.add_argument("--decoder", choices=DECODERS, default="fast")
    p.add_argument("--out", default="-", help="message bit file (default stdout)")
    p.add_argument("--codeword-out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("inspect", help="print the decoder tree and memory plan", parents=[profile])
    p.add_argument("--spec", required=True)
    p.add_argument("--node-set", choices=sorted(NODE_SETS), default="fast-ssc")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("gen", help="generate an unrolled decoder program", parents=[profile])
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="program text ('-' for stdout)")
    p.add_argument("--fuse", action="store_true", help="emit fused node kernels")
    p.add_argument("--source", help="also write the program as Python source")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", help="FER/BER over BPSK-AWGN", parents=[profile, seed, qscale])
    p.add_argument("--spec", required=True)
    p.add_argument("--decoder", choices=DECODERS, default="fast")
    p.add_argument("--ebn0", type=float, nargs="*", default=[], metavar="DB")
    p.add_argument("--frames", type=_positive_int, default=10000)
    p.add_argument("--batch", type=_positive_int, default=1000)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--out", default="-", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="single-core latency and throughput", parents=[profile, seed])
    p.add_argument("--spec", required=True, nargs="+")
    p.add_argument("--decoder", choices=DECODERS, nargs="+", default=["unrolled"])
    p.add_argument("--runs", type=_positive_int, default=10)
    p.add_argument("--frames", type=_positive_int, default=1000, help="frames per run")
    p.add_argument("--ebn0", type=float, default=3.0)
    p.add_argument("--out", default="-", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"{PROG} {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
