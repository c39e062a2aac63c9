"""Balanced parentheses over a bitvector, 0 = open, 1 = close.

Supports match (the twin parenthesis) and parent (the enclosing open) via a
per-block excess summary plus a range-min tree over block minima.  All
searched excess targets lie below the running excess, so block skipping only
needs minima; within a block the scan moves byte-wise with small lookup
tables.
"""

import numpy as np

from . import _kernels
from .bitvector import BitSequence, build_rank_select, bitseq_from_words

BLOCK_BITS = 512

_INF = np.int32(2 ** 30)

# per byte value (bits LSB-first, 0 counts +1): total excess, min/max prefix
_BYTE_TOT = [0] * 256
_BYTE_MIN = [0] * 256
_BYTE_MAX = [0] * 256
for _v in range(256):
    _e = 0
    _mn = 8
    _mx = -8
    for _t in range(8):
        _e += 1 if ((_v >> _t) & 1) == 0 else -1
        _mn = min(_mn, _e)
        _mx = max(_mx, _e)
    _BYTE_TOT[_v] = _e
    _BYTE_MIN[_v] = _mn
    _BYTE_MAX[_v] = _mx


class ParenSequence:
    """Balanced parenthesis sequence with match/parent navigation."""

    def __init__(self, bitseq: BitSequence, block_start, block_min, seg, p2):
        self.bits = bitseq
        self.length = bitseq.length
        self._block_start = block_start   # excess at each block boundary
        self._block_min = block_min
        self._seg = seg
        self._p2 = p2

    # -- plain bitvector facade ------------------------------------------

    def access(self, i: int) -> int:
        return self.bits.access(i)

    def rank(self, b: int, i: int) -> int:
        return self.bits.rank(b, i)

    def select(self, b: int, j: int) -> int:
        return self.bits.select(b, j)

    @property
    def opens(self) -> int:
        return self.bits.zeros

    # -- excess machinery -------------------------------------------------

    def excess(self, i: int) -> int:
        """Opens minus closes over positions 1..i."""
        return i - 2 * self.bits.rank(1, i)

    def match(self, i: int) -> int:
        """Position of the parenthesis matching the one at ``i``."""
        if i < 1 or i > self.length:
            raise IndexError(f"position {i} out of range 1..{self.length}")
        if self.bits.access(i) == 0:
            j = self._fwd_excess(i, self.excess(i) - 1)
            if j is None:
                raise ValueError("unmatched open parenthesis")
            return j
        j = self._bwd_excess(i, self.excess(i))
        if j is None:
            raise ValueError("unmatched close parenthesis")
        return j + 1

    def parent(self, v: int) -> int:
        """Preorder id of the parent of node ``v``; 0 for forest roots."""
        if v < 1 or v > self.opens:
            raise IndexError(f"node {v} out of range 1..{self.opens}")
        o = self.bits.select(0, v)
        d = self.excess(o)
        if d < 2:
            return 0
        j = self._bwd_excess(o, d - 2)
        if j is None:
            return 0
        return self.bits.rank(0, j + 1)

    # -- searches ----------------------------------------------------------

    def _fwd_excess(self, i, target):
        """Smallest j > i with excess(j) == target (target below excess(i))."""
        blk = (i - 1) >> 9 if i > 0 else 0
        j = self._scan_fwd(blk, i, self.excess(i), target)
        if j is not None:
            return j
        b = self._seg_next(blk + 1, target)
        if b is None:
            return None
        return self._scan_fwd(b, b << 9, int(self._block_start[b]), target)

    def _bwd_excess(self, i, target):
        """Largest j < i with excess(j) == target; j == 0 counts (excess 0)."""
        if i > 1:
            blk = (i - 1) >> 9
            j = self._scan_bwd(blk, i, target)
            if j is not None:
                return j
            if blk > 0:
                b = self._seg_prev(blk - 1, target)
                if b is not None:
                    j = self._scan_bwd(b, (b + 1 << 9) + 1, target)
                    if j is not None:
                        return j
        return 0 if target == 0 else None

    def _scan_fwd(self, blk, start, e, target):
        """Scan positions start+1 .. end of block for excess == target."""
        end = min((blk + 1) << 9, self.length)
        p = start
        words = self.bits.words
        while p < end:
            woff = p & 63
            w = int(words[p >> 6]) >> woff
            avail = min(64 - woff, end - p)
            while avail >= 8:
                byte = w & 0xFF
                if e + _BYTE_MIN[byte] <= target:
                    ee = e
                    for t in range(8):
                        ee += 1 if ((byte >> t) & 1) == 0 else -1
                        if ee == target:
                            return p + t + 1
                e += _BYTE_TOT[byte]
                w >>= 8
                p += 8
                avail -= 8
            while avail > 0:
                e += 1 if (w & 1) == 0 else -1
                p += 1
                w >>= 1
                avail -= 1
                if e == target:
                    return p
        return None

    def _scan_bwd(self, blk, from_pos, target):
        """Largest j with block_start(blk) < j < from_pos, excess(j) == target."""
        bs = blk << 9
        top = min(from_pos - 1, min((blk + 1) << 9, self.length))
        if top <= bs:
            return None
        nbytes = (top - bs + 7) >> 3
        # little-endian words make tobytes() yield the scan order directly
        raw = self.bits.words[bs >> 6:((top - 1) >> 6) + 1].tobytes()
        e_end = self.excess(top)
        tot = _BYTE_TOT
        for k in range(nbytes - 1, -1, -1):
            byte = raw[k]
            lim = top - (bs + 8 * k)
            if lim >= 8:
                lim = 8
                e0 = e_end - tot[byte]
            else:
                byte &= (1 << lim) - 1
                e0 = e_end - tot[byte] + 8 - lim
            if e0 + _BYTE_MIN[byte] <= target <= e0 + _BYTE_MAX[byte]:
                e = e0
                best = None
                for t in range(lim):
                    e += 1 if ((byte >> t) & 1) == 0 else -1
                    if e == target:
                        best = bs + 8 * k + t + 1
                if best is not None:
                    return best
            e_end = e0
        return None

    def _seg_next(self, b, target):
        """First block index >= b whose minimum excess is <= target."""
        nb = len(self._block_min)
        if b >= nb:
            return None
        p2 = self._p2
        seg = self._seg
        node = p2 + b
        if seg[node] <= target:
            return b
        found = False
        while node > 1:
            if (node & 1) == 0 and seg[node + 1] <= target:
                node += 1
                found = True
                break
            node >>= 1
        if not found:
            return None
        while node < p2:
            node <<= 1
            if seg[node] > target:
                node += 1
        res = node - p2
        return res if res < nb else None

    def _seg_prev(self, b, target):
        """Last block index <= b whose minimum excess is <= target."""
        if b < 0:
            return None
        p2 = self._p2
        seg = self._seg
        node = p2 + b
        if seg[node] <= target:
            return b
        found = False
        while node > 1:
            if (node & 1) == 1 and seg[node - 1] <= target:
                node -= 1
                found = True
                break
            node >>= 1
        if not found:
            return None
        while node < p2:
            node = (node << 1) + 1
            if seg[node] > target:
                node -= 1
        return node - p2

    @property
    def payload_bytes(self) -> int:
        return self.bits.payload_bytes

    @property
    def support_bytes(self) -> int:
        return (self.bits.support_bytes + self._block_start.nbytes
                + self._block_min.nbytes + self._seg.nbytes)


def build_bp(bits: np.ndarray, threads: int = 1) -> ParenSequence:
    """Build a ParenSequence from a raw 0/1 array; raises if unbalanced."""
    bitseq = build_rank_select(bits, threads)
    return _attach_excess(bitseq, threads)


def bp_from_words(words: np.ndarray, length: int, threads: int = 1) -> ParenSequence:
    return _attach_excess(bitseq_from_words(words, length, threads), threads)


def _attach_excess(bitseq: BitSequence, threads: int = 1) -> ParenSequence:
    length = bitseq.length
    nblocks = (length + BLOCK_BITS - 1) // BLOCK_BITS
    if length == 0:
        seg = np.full(2, _INF, np.int32)
        return ParenSequence(bitseq, np.zeros(1, np.int32),
                             np.zeros(0, np.int32), seg, 1)
    chunks = max(1, int(threads))
    _kernels.set_pool(chunks)
    tot = np.empty(nblocks, np.int32)
    rel_min = np.empty(nblocks, np.int32)
    _kernels.paren_block_stats(bitseq.words.view(np.int64), length,
                               tot, rel_min, chunks)
    block_start = np.zeros(nblocks + 1, np.int32)
    np.cumsum(tot, out=block_start[1:])
    block_min = block_start[:-1] + rel_min
    if int(block_start[-1]) != 0 or int(block_min.min()) < 0:
        raise ValueError("parenthesis sequence is not balanced")
    p2 = 1
    while p2 < nblocks:
        p2 <<= 1
    seg = np.full(2 * p2, _INF, np.int32)
    seg[p2:p2 + nblocks] = block_min
    for node in range(p2 - 1, 0, -1):
        seg[node] = min(seg[node << 1], seg[(node << 1) + 1])
    return ParenSequence(bitseq, block_start, block_min, seg, p2)
