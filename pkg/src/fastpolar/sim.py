"""Monte-Carlo BPSK / AWGN chain with FER and BER accounting."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .code import CodeSpec
from .decoders import make_decoder
from .encoder import encode
from .kernels import quantize

SIM_CSV_HEADER = (
    "ebn0_db", "frames", "frame_errors", "bit_errors", "fer", "ber",
    "decoder", "profile", "n", "k", "seed",
)


@dataclass(frozen=True)
class ChannelParams:
    """BPSK over real AWGN at a given Eb/N0.

    sigma^2 = 1 / (2 R 10^(EbN0/10)); channel LLR = 2 y / sigma^2; int8
    LLRs are clamp(round(LLR * q_scale), -127, 127).
    """

    ebn0_db: float
    rate: float
    q_scale: float = 4.0

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate}")
        if self.q_scale <= 0:
            raise ValueError("q_scale must be positive")

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 / (2.0 * self.rate * 10.0 ** (self.ebn0_db / 10.0)))

    @property
    def llr_scale(self) -> float:
        return 2.0 / self.sigma**2


@dataclass(frozen=True)
class SimRecord:
    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    k: int
    seed: int
    decoder: str = ""
    profile: str = ""
    n: int = 0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.k)

    def fer_stderr(self) -> float:
        p = self.fer
        return math.sqrt(p * (1 - p) / self.frames)

    def row(self) -> list:
        return [
            self.ebn0_db, self.frames, self.frame_errors, self.bit_errors,
            self.fer, self.ber, self.decoder, self.profile, self.n, self.k, self.seed,
        ]


def channel_llrs(spec: CodeSpec, msg: np.ndarray, params: ChannelParams, rng, profile="float"):
    """Encode, BPSK-map (x = 1 - 2c), add noise and return decoder-ready LLRs."""
    x = encode(spec, msg)
    y = (1.0 - 2.0 * x) + params.sigma * rng.standard_normal(x.shape)
    llr = y * params.llr_scale
    if profile == "int8":
        return quantize(llr, params.q_scale)
    return llr.astype(np.float32)


def _worker_rng(seed: int, stream: int):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))


def _run_stream(spec, decoder, profile, params, frames, seed, stream, batch, vector_width):
    dec = make_decoder(spec, decoder, profile, vector_width)
    rng = _worker_rng(seed, stream)
    frame_errors = bit_errors = 0
    done = 0
    while done < frames:
        b = min(batch, frames - done)
        msg = rng.integers(0, 2, size=(b, spec.k), dtype=np.uint8)
        llr = channel_llrs(spec, msg, params, rng, profile)
        _, est = dec.decode(llr)
        wrong = est != msg
        frame_errors += int(wrong.any(axis=1).sum())
        bit_errors += int(wrong.sum())
        done += b
    return frame_errors, bit_errors


def run_point(
    spec: CodeSpec,
    decoder: str = "fast",
    profile: str = "float",
    params: ChannelParams | float = 0.0,
    frames: int = 1000,
    seed: int = 0,
    batch: int = 1000,
    workers: int = 1,
    vector_width: int | None = None,
) -> SimRecord:
    """Simulate ``frames`` random codewords at one Eb/N0 point.

    ``params`` may be a bare Eb/N0 in dB.  Results are reproducible for a
    fixed (seed, workers, batch); worker w draws from stream (seed, w).
    """
    if frames < 1:
        raise ValueError("frames must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if not isinstance(params, ChannelParams):
        params = ChannelParams(float(params), spec.rate)
    shares = [frames // workers + (w < frames % workers) for w in range(workers)]
    jobs = [
        (spec, decoder, profile, params, share, seed, w, batch, vector_width)
        for w, share in enumerate(shares)
        if share
    ]
    if workers == 1:
        results = [_run_stream(*jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_stream, *zip(*jobs)))
    fe = sum(r[0] for r in results)
    be = sum(r[1] for r in results)
    return SimRecord(params.ebn0_db, frames, fe, be, spec.k, seed, decoder, profile, spec.n)


def sweep(
    spec: CodeSpec,
    decoder: str,
    profile: str,
    ebn0_list,
    frames_per_point: int,
    seed: int = 0,
    q_scale: float = 4.0,
    **kwargs,
) -> list[SimRecord]:
    """One record per Eb/N0 point; every point reuses ``seed``."""
    return [
        run_point(
            spec, decoder, profile, ChannelParams(float(e), spec.rate, q_scale),
            frames_per_point, seed, **kwargs,
        )
        for e in ebn0_list
    ]


def write_sim_csv(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SIM_CSV_HEADER)
    for r in records:
        w.writerow(r.row())


def sim_csv_text(records) -> str:
    buf = io.StringIO()
    write_sim_csv(records, buf)
    return buf.getvalue()
