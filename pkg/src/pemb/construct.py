"""Builds the compact embedding from a rooted spanning tree.

The structure is three bit sequences over the closed walk that visits every
directed edge once, turning around the spanning tree: A holds one bit per
tick (1 = tree edge), B collects the tree ticks as balanced parentheses
(0 going down, 1 coming back up), and B* pairs the two visits of every
non-tree edge (0 first visit, 1 second).  Together they take exactly 4m bits
plus small rank/select and excess directories.

The parallel path never materializes the walk.  It seeds each directed tree
edge with its tour successor and additive weights, resolves global positions
by list ranking, and scatters bits to their final positions in disjoint
parallel chunks; the runs of non-tree edges between tree ticks are placed
relative to their preceding tree edge.  A direct sequential walk provides
the reference implementation the parallel path must match bit for bit.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .accounting import MemoryAccountant
from .bitvector import BitSequence, build_rank_select, bitseq_from_words
from .embedding import PlanarEmbedding
from .parens import ParenSequence, build_bp, bp_from_words
from .spanning import SpanningTreeData, sequential_dfs_tree

MAGIC = b"PEMB1"


@dataclass
class EulerTour:
    """Per-tree-edge tour entries: direction bit, successor, additive weights.

    After ranking, rank_a is the entry's inclusive tick count (own gap
    included) and rank_b its inclusive tree-tick count, both from the head.
    """
    value: np.ndarray
    succ: np.ndarray
    rank_a: np.ndarray
    rank_b: np.ndarray
    head: int


@dataclass
class CompactEmbedding:
    n: int
    m: int
    a: BitSequence
    b: ParenSequence
    bstar: ParenSequence

    @property
    def payload_bits(self) -> int:
        return self.a.length + self.b.length + self.bstar.length

    @property
    def support_bits(self) -> int:
        return 8 * (self.a.support_bytes + self.b.support_bytes
                    + self.bstar.support_bytes)

    @property
    def total_bits(self) -> int:
        return self.payload_bits + self.support_bits

    @property
    def total_bytes(self) -> int:
        return (self.total_bits + 7) // 8

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(np.array([self.n, self.m], dtype="<u8").tobytes())
            for seq in (self.a, self.b.bits, self.bstar.bits):
                fh.write(seq.words.astype("<u8").tobytes())

    @classmethod
    def load(cls, path, threads: int = 1) -> "CompactEmbedding":
        with open(path, "rb") as fh:
            if fh.read(len(MAGIC)) != MAGIC:
                raise ValueError("not a compact embedding file")
            header = fh.read(16)
            if len(header) != 16:
                raise ValueError("truncated compact embedding file")
            n, m = (int(x) for x in np.frombuffer(header, dtype="<u8"))
            lengths = (2 * m, 2 * (n - 1), 2 * (m - n + 1))
            seqs = []
            for length in lengths:
                nwords = (length + 63) // 64
                words = np.frombuffer(fh.read(8 * nwords), dtype="<u8")
                if words.shape[0] != nwords:
                    raise ValueError("truncated compact embedding file")
                seqs.append(words.astype(np.uint64))
        a = bitseq_from_words(seqs[0], lengths[0], threads)
        b = bp_from_words(seqs[1], lengths[1], threads)
        bstar = bp_from_words(seqs[2], lengths[2], threads)
        return cls(n, m, a, b, bstar)


def _leading_nontree(emb: PlanarEmbedding, tree: SpanningTreeData, root: int) -> int:
    """Ticks before the first tree tick: the run of non-tree edges opening
    the root's rotation."""
    gs, ge = int(emb.vfirst[root]), int(emb.vlast[root])
    return int(np.argmax(tree.tree_mark[gs:ge + 1]))


def build_euler_tour(emb: PlanarEmbedding, tree: SpanningTreeData,
                     threads: int = 1, accountant=None) -> EulerTour:
    """Seed value/succ/weights for every directed tree edge."""
    k = tree.ref.shape[0]
    chunks = max(1, int(threads))
    _kernels.set_pool(chunks)
    ac = accountant if accountant is not None else MemoryAccountant()
    value = ac.track(np.empty(k, np.uint8))
    succ = ac.track(np.empty(k, np.int32))
    rank_a = ac.track(np.empty(k, np.int32))
    rank_b = ac.track(np.empty(k, np.int32))
    if k:
        _kernels.fill_euler_entries(tree.ref, tree.et_cmp, tree.gap,
                                    tree.tfirst, tree.tlast,
                                    emb.esrc, emb.etgt, tree.root,
                                    value, succ, rank_a, rank_b, chunks)
    head = int(tree.tfirst[tree.root]) if k else 0
    return EulerTour(value, succ, rank_a, rank_b, head)


def list_ranking(tour: EulerTour, threads: int = 1, accountant=None) -> EulerTour:
    """Replace weights by inclusive sums along the cycle, broken before head.

    Independent sublists are walked in parallel from evenly spaced heads;
    their totals are then chained sequentially (few of them) and the offsets
    applied back in parallel.  Raises if the successor pointers do not close
    into one cycle covering every entry.
    """
    k = tour.succ.shape[0]
    if k == 0:
        return tour
    chunks = max(1, int(threads))
    _kernels.set_pool(chunks)
    ac = accountant if accountant is not None else MemoryAccountant()
    target = min(k, 8 * chunks)
    step = max(1, k // target)
    heads = np.unique(np.concatenate([np.array([tour.head], np.int64),
                                      np.arange(0, k, step, dtype=np.int64)]))
    nsub = heads.shape[0]
    head_idx = ac.track(np.full(k, -1, np.int32))
    head_idx[heads] = np.arange(nsub, dtype=np.int32)
    is_head = head_idx >= 0
    ac.alloc(is_head.nbytes)
    sub_id = ac.track(np.empty(k, np.int32))
    sub_next = np.full(nsub, -1, np.int32)
    sub_len = np.zeros(nsub, np.int64)
    sub_tot_a = np.zeros(nsub, np.int64)
    sub_tot_b = np.zeros(nsub, np.int64)
    err = np.zeros(1, np.uint8)
    _kernels.rank_sublists(tour.succ, heads, head_idx, is_head,
                           tour.rank_a, tour.rank_b, sub_id, sub_next,
                           sub_len, sub_tot_a, sub_tot_b, err)
    if err[0]:
        raise ValueError("successor pointers do not form a single cycle")
    off_a = np.zeros(nsub, np.int64)
    off_b = np.zeros(nsub, np.int64)
    start = int(head_idx[tour.head])
    cur = start
    acc_a = 0
    acc_b = 0
    acc_len = 0
    count = 0
    while True:
        off_a[cur] = acc_a
        off_b[cur] = acc_b
        acc_a += int(sub_tot_a[cur])
        acc_b += int(sub_tot_b[cur])
        acc_len += int(sub_len[cur])
        count += 1
        cur = int(sub_next[cur])
        if cur == start:
            break
        if cur < 0 or count > nsub:
            raise ValueError("successor pointers do not form a single cycle")
    if count != nsub or acc_len != k:
        raise ValueError("successor pointers do not form a single cycle")
    _kernels.apply_sublist_offsets(tour.rank_a, tour.rank_b, sub_id,
                                   off_a, off_b, chunks)
    ac.free(head_idx.nbytes + is_head.nbytes + sub_id.nbytes)
    return tour


def assemble(n: int, m: int, a_bits, b_bits, s_bits, threads: int = 1) -> CompactEmbedding:
    a = build_rank_select(a_bits, threads)
    b = build_bp(b_bits, threads)
    bstar = build_bp(s_bits, threads)
    return CompactEmbedding(n, m, a, b, bstar)


def sequential_build(emb: PlanarEmbedding, tree: SpanningTreeData = None,
                     init: int = 1, timings: dict = None,
                     accountant: MemoryAccountant = None) -> CompactEmbedding:
    """Reference builder: one direct walk emits every bit in order."""
    if tree is None:
        tree = sequential_dfs_tree(emb, init)
    root = init - 1
    if tree.root != root:
        raise ValueError("tree is rooted at a different vertex")
    n, m = emb.n, emb.m
    ac = accountant if accountant is not None else MemoryAccountant(emb.input_bytes)
    tm = timings if timings is not None else {}
    t_start = time.perf_counter()
    a_bits = ac.track(np.zeros(2 * m, np.uint8))
    b_bits = ac.track(np.zeros(2 * (n - 1), np.uint8))
    s_bits = ac.track(np.zeros(2 * (m - n + 1), np.uint8))
    _kernels.euler_tour_seq(emb.vfirst, emb.vlast, emb.esrc, emb.etgt,
                            emb.ecmp, tree.tree_mark, root,
                            a_bits, b_bits, s_bits, np.empty(0, np.int32), False)
    tm["euler"] = time.perf_counter() - t_start
    tm["list-rank"] = 0.0
    tm["scatter"] = 0.0
    tm["bstar"] = 0.0
    t0 = time.perf_counter()
    # packing holds two packed copies at once and the directories are built
    # from the packed words, so one byte per bit is a safe ceiling
    support_transient = a_bits.shape[0] + b_bits.shape[0] + s_bits.shape[0]
    ac.alloc(support_transient)
    compact = assemble(n, m, a_bits, b_bits, s_bits, 1)
    ac.free(support_transient)
    ac.free(a_bits.nbytes + b_bits.nbytes + s_bits.nbytes)
    tm["support"] = time.perf_counter() - t0
    tm["total"] = time.perf_counter() - t_start
    return compact


def tour_edge_ids(emb: PlanarEmbedding, tree: SpanningTreeData, init: int = 1) -> np.ndarray:
    """Edge id visited at every tick of the walk, for cross-checking."""
    n, m = emb.n, emb.m
    tick_edge = np.empty(2 * m, np.int32)
    a_bits = np.zeros(2 * m, np.uint8)
    b_bits = np.zeros(2 * (n - 1), np.uint8)
    s_bits = np.zeros(2 * (m - n + 1), np.uint8)
    _kernels.euler_tour_seq(emb.vfirst, emb.vlast, emb.esrc, emb.etgt,
                            emb.ecmp, tree.tree_mark, init - 1,
                            a_bits, b_bits, s_bits, tick_edge, True)
    return tick_edge


def build_compact(emb: PlanarEmbedding, tree: SpanningTreeData, init: int = 1,
                  threads: int = 1, timings: dict = None,
                  accountant: MemoryAccountant = None) -> CompactEmbedding:
    """Parallel builder; output is bit-identical to sequential_build.

    The number of chunks equals the requested thread count and every kernel
    writes disjoint positions, so results do not depend on scheduling or on
    how many hardware threads actually back the pool.
    """
    root = init - 1
    if tree.root != root:
        raise ValueError("tree is rooted at a different vertex")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    n, m = emb.n, emb.m
    chunks = max(1, int(threads))
    _kernels.set_pool(chunks)
    ac = accountant if accountant is not None else MemoryAccountant(emb.input_bytes)
    tm = timings if timings is not None else {}
    t_start = time.perf_counter()

    t0 = time.perf_counter()
    tour = build_euler_tour(emb, tree, threads, ac)
    lead = _leading_nontree(emb, tree, root) if n > 1 else 0
    tm["euler"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    list_ranking(tour, threads, ac)
    ac.drop(tour.succ)
    tour.succ = None
    tm["list-rank"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    a_stage = ac.track(np.zeros(2 * m, np.uint8))
    b_stage = ac.track(np.zeros(2 * (n - 1), np.uint8))
    if n > 1:
        _kernels.scatter_tree_bits(tour.rank_a, tour.rank_b, tour.value,
                                   tree.gap, tree.et_cmp, lead,
                                   a_stage, b_stage, chunks)
    ac.drop(tour.value)
    tour.value = None
    tm["scatter"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    nn = 2 * (m - n + 1)
    s_stage = ac.track(np.zeros(nn, np.uint8))
    if nn > 0:
        d_pos = ac.track(np.zeros(2 * m, np.int32))
        d_edge = ac.track(np.empty(nn, np.int32))
        _kernels.scatter_nontree_positions(tour.rank_a, tour.rank_b,
                                           tree.gap, tree.et_cmp, tree.ref,
                                           emb.esrc, emb.vfirst, emb.vlast,
                                           lead, nn, d_pos, d_edge, chunks)
        _kernels.fill_nontree_bits(d_edge, d_pos, emb.ecmp, s_stage, chunks)
        ac.free(d_pos.nbytes + d_edge.nbytes)
        del d_pos, d_edge
    ac.free(tour.rank_a.nbytes + tour.rank_b.nbytes)
    tour.rank_a = None
    tour.rank_b = None
    tm["bstar"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    # packing holds two packed copies at once and the directories are built
    # from the packed words, so one byte per bit is a safe ceiling; it is
    # the same for every thread count
    support_transient = 2 * m + 2 * (n - 1) + nn
    ac.alloc(support_transient)
    compact = assemble(n, m, a_stage, b_stage, s_stage, threads)
    ac.free(support_transient)
    ac.free(a_stage.nbytes + b_stage.nbytes + s_stage.nbytes)
    del a_stage, b_stage, s_stage
    tm["support"] = time.perf_counter() - t0
    tm["total"] = time.perf_counter() - t_start
    return compact
