"""Plain bitvector with rank/select support.

Bits are packed LSB-first into 64-bit words.  The directory stores, for every
512-bit block, the number of ones (and valid zeros) before it; rank finishes
with at most eight word popcounts and select binary-searches the directory.
Positions are 1-based at the API, ``select(b, 0) == 0`` serves as a sentinel.
"""

import numpy as np

from . import _kernels

BLOCK_BITS = 512
WORDS_PER_BLOCK = BLOCK_BITS // 64

_POP8 = [bin(i).count("1") for i in range(256)]


def _select_in_word(word: int, r: int) -> int:
    """0-based index of the r-th (1-based) set bit of ``word``."""
    idx = 0
    while True:
        byte = word & 0xFF
        c = _POP8[byte]
        if c >= r:
            for t in range(8):
                if (byte >> t) & 1:
                    r -= 1
                    if r == 0:
                        return idx + t
        r -= c
        word >>= 8
        idx += 8


class BitSequence:
    """Immutable bit sequence with O(1)-directory rank and select."""

    def __init__(self, words, length, ones_before, zeros_before):
        self.words = words
        self.length = length
        self._ones_cum = ones_before
        self._zeros_cum = zeros_before
        self.ones = int(ones_before[-1])
        self.zeros = length - self.ones

    def access(self, i: int) -> int:
        if i < 1 or i > self.length:
            raise IndexError(f"bit position {i} out of range 1..{self.length}")
        p = i - 1
        return (int(self.words[p >> 6]) >> (p & 63)) & 1

    def rank(self, b: int, i: int) -> int:
        """Occurrences of bit value ``b`` in positions 1..i (i may be 0)."""
        if i < 0 or i > self.length:
            raise IndexError(f"rank position {i} out of range 0..{self.length}")
        r1 = self._rank1(i)
        return r1 if b else i - r1

    def _rank1(self, i: int) -> int:
        blk = i >> 9
        r = int(self._ones_cum[blk])
        w0 = blk << 3
        full = (i >> 6) - w0
        words = self.words
        for k in range(w0, w0 + full):
            r += int(words[k]).bit_count()
        rem = i & 63
        if rem:
            r += (int(words[w0 + full]) & ((1 << rem) - 1)).bit_count()
        return r

    def select(self, b: int, j: int) -> int:
        """Position of the j-th occurrence of ``b``; select(b, 0) == 0."""
        if j == 0:
            return 0
        total = self.ones if b else self.zeros
        if j < 0 or j > total:
            raise ValueError(f"select({b}, {j}) out of range 0..{total}")
        cum = self._ones_cum if b else self._zeros_cum
        blk = int(np.searchsorted(cum, j, side="left")) - 1
        r = j - int(cum[blk])
        w0 = blk << 3
        w_end = min(w0 + WORDS_PER_BLOCK, len(self.words))
        last_word = (self.length - 1) >> 6
        tail = self.length & 63
        for k in range(w0, w_end):
            wv = int(self.words[k])
            if not b:
                wv = ~wv & 0xFFFFFFFFFFFFFFFF
                if k == last_word and tail:
                    wv &= (1 << tail) - 1
            c = wv.bit_count()
            if c >= r:
                return (k << 6) + _select_in_word(wv, r) + 1
            r -= c
        raise AssertionError("select directory out of sync")

    def bits(self) -> np.ndarray:
        """Unpacked copy as a uint8 array of 0/1."""
        raw = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return raw[: self.length]

    @property
    def payload_bytes(self) -> int:
        return self.words.nbytes

    @property
    def support_bytes(self) -> int:
        return self._ones_cum.nbytes + self._zeros_cum.nbytes


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a uint8 0/1 array into LSB-first uint64 words."""
    packed = np.packbits(bits, bitorder="little")
    pad = (-len(packed)) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, np.uint8)])
    return packed.view(np.uint64)


def build_rank_select(bits: np.ndarray, threads: int = 1) -> BitSequence:
    """Build a BitSequence from a raw 0/1 array.

    Block counts are written to disjoint slots and combined by one scan, so
    the result is bit-identical for every thread count.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.size and bits.max() > 1:
        raise ValueError("bit array entries must be 0 or 1")
    length = len(bits)
    if length >= 1 << 31:
        raise ValueError("sequences beyond 2^31 bits are not supported")
    words = pack_bits(bits) if length else np.zeros(0, np.uint64)
    nblocks = (length + BLOCK_BITS - 1) // BLOCK_BITS
    per_block = np.zeros(nblocks, np.int64)
    if nblocks:
        chunks = max(1, int(threads))
        _kernels.set_pool(chunks)
        _kernels.block_ones(bits, per_block, chunks)
    ones_cum = np.zeros(nblocks + 1, np.int64)
    np.cumsum(per_block, out=ones_cum[1:])
    starts = np.minimum(np.arange(nblocks + 1, dtype=np.int64) * BLOCK_BITS, length)
    zeros_cum = starts - ones_cum
    return BitSequence(words, length, ones_cum, zeros_cum)


def bitseq_from_words(words: np.ndarray, length: int, threads: int = 1) -> BitSequence:
    """Rebuild the directory for an already packed payload (file loads)."""
    if length:
        raw = np.unpackbits(words.view(np.uint8), bitorder="little")[:length]
    else:
        raw = np.zeros(0, np.uint8)
    return build_rank_select(raw, threads)
