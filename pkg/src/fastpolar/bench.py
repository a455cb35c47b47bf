"""Single-core latency / throughput measurement.

Latency per frame covers copying the LLRs into the decoder's arena,
decoding, and copying the codeword estimate back out.  It is averaged over
``frames_per_run`` frames and then over ``runs`` runs.
"""

from __future__ import annotations

import csv
import hashlib
import os
import platform
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .code import CodeSpec
from .decoders import make_decoder
from .sim import ChannelParams, channel_llrs

BENCH_CSV_HEADER = (
    "code", "decoder", "profile", "runs", "frames",
    "latency_us", "info_tp_mbps", "coded_tp_mbps", "host",
)


@dataclass(frozen=True)
class BenchRecord:
    code: str
    decoder: str
    profile: str
    n: int
    k: int
    runs: int
    frames_per_run: int
    latency_us: float
    run_latencies_us: tuple[float, ...] = ()
    payload_digest: str = ""
    host: str = ""
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def info_tp_mbps(self) -> float:
        # bits per microsecond == Mbit/s
        return self.k / self.latency_us

    @property
    def coded_tp_mbps(self) -> float:
        return self.n / self.latency_us

    def row(self) -> list:
        return [
            self.code, self.decoder, self.profile, self.runs, self.frames_per_run,
            f"{self.latency_us:.4f}", f"{self.info_tp_mbps:.4f}", f"{self.coded_tp_mbps:.4f}",
            self.host,
        ]


@contextmanager
def _pinned_core():
    """Pin to the current CPU for the duration (no-op where unsupported)."""
    if not hasattr(os, "sched_setaffinity"):
        yield None
        return
    before = os.sched_getaffinity(0)
    cpu = min(before)
    try:
        os.sched_setaffinity(0, {cpu})
    except OSError:
        yield None
        return
    try:
        yield cpu
    finally:
        os.sched_setaffinity(0, before)


def _code_id(spec: CodeSpec) -> str:
    return f"{spec.n}_{spec.k}"


def bench_decoder(
    spec: CodeSpec,
    decoder: str = "unrolled",
    profile: str = "float",
    runs: int = 10,
    frames_per_run: int = 1000,
    ebn0_db: float = 3.0,
    seed: int = 0,
    vector_width: int | None = None,
    pool_size: int = 256,
    workers: int = 1,
) -> BenchRecord:
    """Time one decoder on one core; frames cycle through a fixed noisy pool."""
    if workers != 1:
        raise ValueError("benchmarks are single-threaded; workers must be 1")
    if runs < 1 or frames_per_run < 1:
        raise ValueError("runs and frames_per_run must be >= 1")
    dec = make_decoder(spec, decoder, profile, vector_width)
    rng = np.random.default_rng(seed)
    msg = rng.integers(0, 2, size=(pool_size, spec.k), dtype=np.uint8)
    pool = channel_llrs(spec, msg, ChannelParams(ebn0_db, spec.rate), rng, profile)
    frames = [np.ascontiguousarray(f) for f in pool]
    decode = dec.decode_codeword

    # warm-up doubles as the payload fingerprint
    digest = hashlib.sha256()
    for f in frames:
        digest.update(decode(f).tobytes())

    per_run = []
    clock = time.perf_counter_ns
    with _pinned_core() as cpu:
        for _ in range(runs):
            t0 = clock()
            for i in range(frames_per_run):
                decode(frames[i % pool_size])
            per_run.append((clock() - t0) / 1e3 / frames_per_run)
    info = time.get_clock_info("perf_counter")
    return BenchRecord(
        code=_code_id(spec),
        decoder=decoder,
        profile=profile,
        n=spec.n,
        k=spec.k,
        runs=runs,
        frames_per_run=frames_per_run,
        latency_us=float(np.mean(per_run)),
        run_latencies_us=tuple(per_run),
        payload_digest=digest.hexdigest(),
        host=platform.node(),
        meta={
            "clock": info.implementation,
            "clock_resolution_s": info.resolution,
            "pinned_cpu": cpu,
            "python": platform.python_version(),
            "machine": platform.machine(),
        },
    )


def write_bench_csv(records, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(BENCH_CSV_HEADER)
    for r in records:
        w.writerow(r.row())
