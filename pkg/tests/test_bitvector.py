"""Rank/select bitvector behaviour against naive linear scans."""

import numpy as np
import pytest

from pemb import build_rank_select, pack_bits

from oracles import naive_rank, naive_select


def sample_positions(rng, length, count):
    if length == 0:
        return []
    return sorted(set(rng.integers(1, length + 1, size=count).tolist()))


@pytest.mark.parametrize("pattern", [
    [], [0], [1], [0, 1], [1, 1, 1, 1], [0] * 70, [1] * 70,
    [0, 1] * 40, [1] * 511 + [0], [0] * 513 + [1, 0, 1],
])
def test_small_patterns(pattern):
    bits = np.array(pattern, np.uint8)
    bv = build_rank_select(bits)
    assert bv.length == len(pattern)
    assert bv.ones == sum(pattern)
    assert bv.zeros == len(pattern) - sum(pattern)
    for i in range(len(pattern) + 1):
        for b in (0, 1):
            assert bv.rank(b, i) == naive_rank(bits, b, i)
    for b in (0, 1):
        total = bv.ones if b else bv.zeros
        for j in range(total + 1):
            assert bv.select(b, j) == naive_select(bits, b, j)
    assert np.array_equal(bv.bits(), bits)


def test_access_matches_input(rng):
    bits = (rng.random(3000) < 0.3).astype(np.uint8)
    bv = build_rank_select(bits)
    for i in rng.integers(1, 3001, size=200):
        assert bv.access(int(i)) == int(bits[int(i) - 1])


def test_random_against_scan(rng):
    for density in (0.01, 0.5, 0.99):
        bits = (rng.random(50_000) < density).astype(np.uint8)
        bv = build_rank_select(bits)
        ones = np.flatnonzero(bits == 1) + 1
        zeros = np.flatnonzero(bits == 0) + 1
        csum = np.cumsum(bits)
        for i in sample_positions(rng, len(bits), 300):
            assert bv.rank(1, i) == int(csum[i - 1])
            assert bv.rank(0, i) == i - int(csum[i - 1])
        for j in rng.integers(1, len(ones) + 1, size=300):
            assert bv.select(1, int(j)) == int(ones[int(j) - 1])
        for j in rng.integers(1, len(zeros) + 1, size=300):
            assert bv.select(0, int(j)) == int(zeros[int(j) - 1])


def test_inverse_identities(rng):
    bits = (rng.random(10_000) < 0.4).astype(np.uint8)
    bv = build_rank_select(bits)
    for b in (0, 1):
        total = bv.ones if b else bv.zeros
        for j in rng.integers(1, total + 1, size=200):
            assert bv.rank(b, bv.select(b, int(j))) == int(j)
        for i in rng.integers(1, len(bits) + 1, size=200):
            r = bv.rank(b, int(i))
            assert bv.select(b, r) <= int(i)


def test_select_zero_is_sentinel():
    bv = build_rank_select(np.array([1, 0, 1], np.uint8))
    assert bv.select(0, 0) == 0
    assert bv.select(1, 0) == 0


def test_rejects_non_binary_input():
    with pytest.raises(ValueError):
        build_rank_select(np.array([0, 2, 1], np.uint8))


def test_pack_roundtrip(rng):
    bits = (rng.random(1000) < 0.5).astype(np.uint8)
    words = pack_bits(bits)
    bv = build_rank_select(bits)
    assert np.array_equal(bv.words, words)


def test_thread_count_does_not_change_structure(rng):
    bits = (rng.random(200_000) < 0.37).astype(np.uint8)
    base = build_rank_select(bits, threads=1)
    for p in (2, 4, 8):
        other = build_rank_select(bits, threads=p)
        assert np.array_equal(other.words, base.words)
        assert np.array_equal(other._ones_cum, base._ones_cum)
        assert np.array_equal(other._zeros_cum, base._zeros_cum)


def test_space_overhead_is_small(rng):
    bits = (rng.random(1_000_000) < 0.5).astype(np.uint8)
    bv = build_rank_select(bits)
    assert bv.payload_bytes == 125_000
    # directories stay a small fraction of the payload
    assert bv.support_bytes <= 0.30 * bv.payload_bytes
