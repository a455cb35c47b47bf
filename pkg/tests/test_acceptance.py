"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the collected lines
are repeated in the "acceptance criteria" section of the terminal summary.
"""

import itertools
import math
import time

import numpy as np
import pytest

from acceptance_log import report
from conftest import code_path
from fastpolar.arena import alpha_bits_closed_form, alpha_overhead_closed_form, plan
from fastpolar.bench import bench_decoder
from fastpolar.cli import main as cli_main
from fastpolar.code import construct_ga, read_spec
from fastpolar.encoder import encode, place_message
from fastpolar.kernels import INT8, REAL
from fastpolar.sc import ScDecoder
from fastpolar.sim import ChannelParams, channel_llrs, run_point, sim_csv_text, sweep
from fastpolar.tree import FastSSCDecoder, build_tree
from fastpolar.unrolled import UnrolledDecoder, generate
from oracles import correlation, encode_matrix, even_parity_words

FRAMES = 10_000
REFERENCE_OPS = ["F<8>", "G_0R<4>", "Info<2>", "Combine_0R<4>", "G<8>", "SPC<4>", "Combine<8>"]


def _noisy(spec, frames, ebn0, profile, seed):
    rng = np.random.default_rng(seed)
    msg = rng.integers(0, 2, (frames, spec.k), dtype=np.uint8)
    return channel_llrs(spec, msg, ChannelParams(ebn0, spec.rate), rng, profile)


def test_criterion_1_reference_program():
    t0 = time.perf_counter()
    spec = read_spec(code_path(8, 5))
    prog = generate(build_tree(spec), plan(8, 8, 32, 32))
    elapsed = time.perf_counter() - t0
    ops = prog.ops()
    ok = ops == REFERENCE_OPS and elapsed < 1.0
    report(1, "(8,5) program", ok, f"{', '.join(ops)} in {elapsed * 1e3:.1f} ms")
    assert ops == REFERENCE_OPS
    assert elapsed < 1.0


def test_criterion_2_memory_formulas():
    p = plan(32768, 8, 32, 32)
    m_alpha, overhead = p.m_alpha // 8, p.m_alpha_overhead // 8
    kb_2048 = round(plan(2048, 32, 8, 8).kbytes_approx)
    kb_32768 = round(plan(32768, 32, 8, 8).kbytes_approx)
    mismatches = []
    for e, a, w in itertools.product(range(4, 17), (4, 8, 16, 32), (8, 32)):
        n = 2**e
        q = plan(n, a, w, w)
        if (
            q.m_beta != n * w
            or q.m_alpha != alpha_bits_closed_form(n, a, w)
            or q.m_alpha_overhead != alpha_overhead_closed_form(n, a, w)
            or q.m_total != q.m_alpha + q.m_beta
        ):
            mismatches.append((n, a, w))
    ok = (m_alpha, overhead, kb_2048, kb_32768) == (262_208, 68, 6, 98) and not mismatches
    report(
        2, "Memory formulas", ok,
        f"M_alpha={m_alpha} B (overhead {overhead} B), approx kB: {kb_2048} / {kb_32768}, "
        f"sweep mismatches={len(mismatches)} of 104",
    )
    assert (m_alpha, overhead) == (262_208, 68)
    assert (kb_2048, kb_32768) == (6, 98)
    assert not mismatches


def test_criterion_3_oracle_equivalence():
    details, ok = [], True

    # encoder vs explicit Kronecker matrix
    rng = np.random.default_rng(0)
    enc_ok = True
    for e in range(1, 9):
        n = 2**e
        spec = construct_ga(n, max(1, n // 2), 1.0)
        msg = rng.integers(0, 2, (FRAMES, spec.k), dtype=np.uint8)
        enc_ok &= np.array_equal(encode(spec, msg), encode_matrix(place_message(spec, msg), n))
    details.append(f"encoder n<=256 {'ok' if enc_ok else 'MISMATCH'}")
    ok &= enc_ok

    # SSC-restricted interpreter vs SC (real-valued profile: no LLR ties)
    ssc_ok = True
    for spec in (construct_ga(128, 64, 2.0), read_spec(code_path(1024, 512))):
        llr = _noisy(spec, FRAMES, 1.5, "float", spec.n)
        ssc = FastSSCDecoder(spec, node_set="ssc").decode_codeword(llr)
        sc = ScDecoder(spec).decode_codeword(llr)
        ssc_ok &= np.array_equal(ssc, sc)
    details.append(f"SSC==SC {'ok' if ssc_ok else 'MISMATCH'}")
    ok &= ssc_ok

    # unrolled executor vs interpreter, both profiles, both lowerings
    un_ok = True
    for n, k in ((8, 5), (2048, 1024), (2048, 1707)):
        spec = read_spec(code_path(n, k))
        for profile in ("float", "int8"):
            llr = _noisy(spec, FRAMES, 2.0 if n > 8 else 1.0, profile, k)
            ref = FastSSCDecoder(spec, profile).decode_codeword(llr)
            for fuse in (True, False):
                got = UnrolledDecoder(spec, profile, fuse=fuse).decode_codeword(llr)
                un_ok &= np.array_equal(got, ref)
    details.append(f"unrolled==interpreter {'ok' if un_ok else 'MISMATCH'}")
    ok &= un_ok

    report(3, "Oracle equivalence", ok, f"{'; '.join(details)} ({FRAMES} frames each)")
    assert enc_ok and ssc_ok and un_ok


def test_criterion_4_ml_node_oracles():
    rng = np.random.default_rng(4)
    failures = []

    for nv in (2, 4, 8, 16):
        words = even_parity_words(nv)
        for ks, make in ((REAL, lambda: rng.normal(0, 3, (300, nv)).astype(np.float32)),
                         (INT8, lambda: rng.integers(-8, 9, (300, nv)).astype(np.int8))):
            alpha = make()
            out = ks.spc(alpha)
            best = (correlation(alpha.T, words).max(axis=0)).astype(np.float64)
            got = np.einsum("ij,ij->i", 1 - 2.0 * out, alpha.astype(np.float64))
            if not np.allclose(got, best) or (out.sum(axis=1) % 2).any():
                failures.append(f"spc N_v={nv}")
            rep = ks.repetition(alpha)
            rep_best = np.maximum(alpha.sum(axis=1, dtype=np.float64), -alpha.sum(axis=1, dtype=np.float64))
            rep_got = np.einsum("ij,ij->i", 1 - 2.0 * rep, alpha.astype(np.float64))
            if not np.allclose(rep_got, rep_best) or (rep != rep[:, :1]).any():
                failures.append(f"repetition N_v={nv}")

    grid = np.array(list(itertools.product(range(-2, 3), repeat=4)))
    for ks, dtype in ((REAL, np.float32), (INT8, np.int8)):
        for alpha in (grid.astype(dtype), _random_alpha(rng, dtype, 8), _random_alpha(rng, dtype, 32)):
            h = alpha.shape[1] // 2
            left = ks.repetition(ks.f(alpha))
            checks = {
                "p_01": (ks.p_01(alpha), ks.combine_0r(ks.info(ks.g_0r(alpha)))),
                "0spc": (ks.zero_spc(alpha), ks.combine_0r(ks.spc(ks.g_0r(alpha)))),
                "repspc": (ks.repspc(alpha), ks.combine(left, ks.spc(ks.g(alpha, left)))),
            }
            for bl in itertools.product((0, 1), repeat=min(h, 2)):
                beta_l = np.resize(np.array(bl, np.uint8), (alpha.shape[0], h))
                checks[f"rspc{bl}"] = (ks.rspc(alpha, beta_l), ks.combine(beta_l, ks.spc(ks.g(alpha, beta_l))))
            for name, (fused, ref) in checks.items():
                if not np.array_equal(fused, ref):
                    failures.append(f"{name} N_v={alpha.shape[1]} {dtype.__name__}")

    ok = not failures
    report(4, "ML node oracles", ok,
           "SPC/Repetition ML for N_v<=16, fused kernels == compositions (N_v=4 grid, 8, 32)"
           if ok else ", ".join(failures))
    assert not failures


def _random_alpha(rng, dtype, nv):
    if dtype is np.float32:
        return rng.normal(0, 4, (2000, nv)).astype(np.float32)
    return rng.integers(-127, 128, (2000, nv)).astype(np.int8)


def test_criterion_5_quantization_parity():
    spec = read_spec(code_path(2048, 1024))
    frames, point, seed = 20_000, 2.35, 2024
    f = run_point(spec, "fast", "float", ChannelParams(point, spec.rate), frames, seed)
    q = run_point(spec, "fast", "int8", ChannelParams(point, spec.rate, 4.0), frames, seed)
    lo = run_point(spec, "fast", "float", point - 0.1, frames, seed)
    hi = run_point(spec, "fast", "float", point + 0.1, frames, seed)

    in_regime = 0.005 <= f.fer <= 0.02
    se = math.sqrt(f.fer_stderr() ** 2 + q.fer_stderr() ** 2)
    within_se = abs(q.fer - f.fer) <= 3 * se
    slope = (math.log10(lo.fer) - math.log10(hi.fer)) / 0.2  # decades per dB
    shift = abs(math.log10(q.fer) - math.log10(f.fer)) / slope
    ok = in_regime and (within_se or shift <= 0.1)
    report(
        5, "Quantization parity", ok,
        f"(2048,1024) @ {point} dB, {frames} frames: float FER {f.fer:.4g}, int8 FER {q.fer:.4g}, "
        f"|diff|={abs(q.fer - f.fer):.2e} vs 3 SE={3 * se:.2e}, implied shift {shift:.3f} dB",
    )
    assert in_regime, f"float FER {f.fer} not near 1e-2"
    assert within_se or shift <= 0.1


@pytest.mark.slow
def test_criterion_6_performance_orderings():
    s1024 = read_spec(code_path(2048, 1024))
    s1707 = read_spec(code_path(2048, 1707))
    kw = dict(runs=10, frames_per_run=200)
    ratios = {}
    for profile in ("float", "int8"):
        interp = bench_decoder(s1707, "fast", profile, **kw)
        unrolled = bench_decoder(s1707, "unrolled", profile, **kw)
        ratios[profile] = unrolled.info_tp_mbps / interp.info_tp_mbps
        if profile == "float":
            lat_1707 = unrolled.latency_us
    lat_1024 = bench_decoder(s1024, "unrolled", "float", **kw).latency_us
    ok = all(r > 1 for r in ratios.values()) and lat_1707 < lat_1024
    report(
        6, "Performance orderings", ok,
        f"unrolled/interpreter throughput on (2048,1707): float {ratios['float']:.2f}x, "
        f"int8 {ratios['int8']:.2f}x (reference 1041/210 = {1041 / 210:.2f}x); "
        f"unrolled latency (2048,1707) {lat_1707:.0f} us < (2048,1024) {lat_1024:.0f} us",
    )
    assert all(r > 1 for r in ratios.values())
    assert lat_1707 < lat_1024


def test_criterion_7_determinism(tmp_path, capsys):
    spec = read_spec(code_path(1024, 512))
    mismatched = []
    for decoder in ("sc", "fast", "unrolled"):
        for profile in ("float", "int8"):
            a = sim_csv_text(sweep(spec, decoder, profile, [1.0, 2.0], 600, seed=77))
            b = sim_csv_text(sweep(spec, decoder, profile, [1.0, 2.0], 600, seed=77))
            if a != b:
                mismatched.append(f"simulate {decoder}/{profile}")

    llr = tmp_path / "llr.txt"
    cli_main(["encode", "--spec", str(code_path(1024, 512)), "--random", "50", "--seed", "3",
              "--out", str(tmp_path / "cw.txt"), "--llr-out", str(llr), "--ebn0", "1.5"])
    outputs = []
    for decoder in ("sc", "fast", "unrolled"):
        for _ in range(2):
            capsys.readouterr()
            cli_main(["decode", "--spec", str(code_path(1024, 512)), "--llr", str(llr), "--decoder", decoder])
            outputs.append((decoder, capsys.readouterr().out))
    for d in ("sc", "fast", "unrolled"):
        runs = [o for dd, o in outputs if dd == d]
        if runs[0] != runs[1]:
            mismatched.append(f"decode {d}")

    for path in ("simulate_a.csv", "simulate_b.csv"):
        cli_main(["simulate", "--spec", str(code_path(1024, 512)), "--ebn0", "1.5", "--frames", "500",
                  "--seed", "5", "--profile", "int8", "--decoder", "unrolled", "--out", str(tmp_path / path)])
    if (tmp_path / "simulate_a.csv").read_bytes() != (tmp_path / "simulate_b.csv").read_bytes():
        mismatched.append("cli simulate")

    digests = {
        bench_decoder(spec, d, "int8", runs=1, frames_per_run=1, pool_size=64, seed=1).payload_digest
        for d in ("fast", "unrolled", "fast")
    }
    if len(digests) != 1:
        mismatched.append("bench payload")

    ok = not mismatched
    report(7, "Determinism", ok,
           "simulate CSVs, CLI decode output and bench payloads byte-identical under fixed seeds"
           if ok else ", ".join(mismatched))
    assert not mismatched
