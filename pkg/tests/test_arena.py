import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastpolar import kernels as K
from fastpolar.arena import (
    Arena,
    alpha_bits_closed_form,
    alpha_overhead_closed_form,
    beta_combine_in_place,
    plan,
)

GRID = [(2**e, a) for e in range(4, 17) for a in (4, 8, 16, 32)]


def test_32768_float_footprint():
    p = plan(32768, 8, 32, 32)
    assert p.m_alpha // 8 == 262_208
    assert p.m_alpha_overhead // 8 == 68
    assert p.m_alpha % 8 == 0


@pytest.mark.parametrize("n,kb", [(2048, 6), (32768, 98)])
def test_kbytes_approximation_int8(n, kb):
    for a in (4, 8, 16, 32):
        assert round(plan(n, a, 8, 8).kbytes_approx) == kb


@pytest.mark.parametrize("n,a", GRID)
def test_formula_sweep(n, a):
    for w in (8, 32):
        p = plan(n, a, w, w)
        assert p.m_beta == n * w
        assert p.m_alpha == alpha_bits_closed_form(n, a, w)
        assert p.m_alpha_overhead == alpha_overhead_closed_form(n, a, w)
        assert p.m_total == p.m_alpha + p.m_beta
        assert p.alpha_slots == (2 * n - 1) + p.overhead_slots


@pytest.mark.parametrize("n,a", GRID)
def test_layout(n, a):
    p = plan(n, a, 32, 32)
    spans = sorted((p.stage_offsets[s], p.stage_offsets[s] + p.stage_slots[s]) for s in range(p.stages + 1))
    assert spans[0][0] == 0 and spans[-1][1] == p.alpha_slots
    for (_, end), (start, _) in zip(spans, spans[1:]):
        assert end == start
    for s in range(p.stages + 1):
        assert p.stage_offsets[s] % a == 0
        assert p.stage_slots[s] == max(1 << s, a)
    # largest stage first: the channel LLRs sit at offset 0
    assert p.stage_offsets[p.stages] == 0


def test_plan_rejects():
    with pytest.raises(ValueError):
        plan(24, 8, 32, 32)
    with pytest.raises(ValueError):
        plan(32, 6, 32, 32)



def test_vector_wider_than_code_pads_every_stage():
    p = plan(16, 32, 32, 32)
    assert p.stage_slots == (32,) * 5
    assert p.m_alpha == alpha_bits_closed_form(16, 32, 32)


def test_report_lists_every_stage():
    text = plan(64, 8, 32, 32).report()
    assert "M_alpha" in text and "M_beta" in text
    assert len([ln for ln in text.splitlines() if ln.strip()[:1].isdigit()]) == 7


@pytest.mark.parametrize("dtype", [np.float32, np.int8])
def test_arena_alignment_and_views(dtype):
    p = plan(256, 8, 32, 32)
    ar = Arena(p, dtype, batch=3)
    assert ar.alpha.shape == (3, p.alpha_slots)
    assert ar.beta.shape == (3, 256) and ar.beta.dtype == np.uint8
    assert ar.alpha.ctypes.data % (8 * np.dtype(dtype).itemsize) == 0
    for s in range(p.stages + 1):
        assert ar.stage(s).shape == (3, 1 << s)
        assert np.shares_memory(ar.stage(s), ar.alpha)
    llr = np.arange(3 * 256).reshape(3, 256).astype(dtype)
    ar.load(llr)
    assert np.array_equal(ar.channel, llr)
    with pytest.raises(ValueError):
        ar.load(np.zeros(128, dtype))


def test_beta_span_bounds():
    ar = Arena(plan(16, 4, 32, 32), np.float32)
    assert ar.beta_span(8, 8).shape == (1, 8)
    with pytest.raises(IndexError):
        ar.beta_span(12, 8)


def test_in_place_combine_example():
    ar = Arena(plan(4, 4, 32, 32), np.float32)
    ar.beta[0] = [1, 0, 1, 1]
    beta_combine_in_place(ar, 0, 2)
    assert ar.beta[0].tolist() == [0, 1, 1, 1]


def test_in_place_combine_zero_left():
    ar = Arena(plan(8, 4, 32, 32), np.float32)
    ar.beta[0] = [0, 0, 0, 0, 1, 0, 1, 1]
    beta_combine_in_place(ar, 0, 4)
    assert ar.beta[0].tolist() == [1, 0, 1, 1, 1, 0, 1, 1]


@given(st.integers(1, 7), st.data())
@settings(max_examples=100, deadline=None)
def test_in_place_combine_matches_out_of_place(log_n, data):
    n = 2**log_n
    half = 2 ** data.draw(st.integers(0, log_n - 1))
    off = data.draw(st.integers(0, n // (2 * half) - 1)) * 2 * half
    bits = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)), dtype=np.uint8)
    ar = Arena(plan(n, 1, 32, 32), np.float32)
    ar.beta[0] = bits
    beta_combine_in_place(ar, off, half)
    want = bits.copy()
    want[off : off + 2 * half] = K.combine(bits[off : off + half], bits[off + half : off + 2 * half])
    assert np.array_equal(ar.beta[0], want)
