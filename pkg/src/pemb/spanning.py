"""Rooted spanning trees over a planar embedding.

The tree is computed either by a sequential counterclockwise DFS or by a
task-parallel claiming traversal seeded from a small sequentially grown stub.
Claims are plain first-writer-wins stores; every vertex claims its parent
only after being claimed itself, so parent links always point strictly
earlier in time and cannot close a cycle.  The result is validated anyway and
falls back to the sequential tree if a pathological interleaving slips
through.

From the parent links this module derives the per-vertex tree rotations
(parent edge first, counterclockwise order preserved), the twin map inside
those rotations, and the count of non-tree edges that follow each tree edge
in its source rotation.  Those arrays drive the tour construction.
"""

import queue
import threading
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .accounting import MemoryAccountant
from .embedding import PlanarEmbedding


@dataclass
class SpanningTreeData:
    n: int
    root: int                 # 0-based
    parents: np.ndarray       # 1-based parent vertex per vertex, 0 at the root
    parent_ref: np.ndarray    # edge v->parent(v) in the embedding, -1 at the root
    tree_mark: np.ndarray     # uint8 per directed edge, 1 iff tree edge
    tfirst: np.ndarray        # per-vertex bounds into the tree rotation arrays
    tlast: np.ndarray         # inclusive
    ref: np.ndarray           # tree rotation position -> embedding edge
    et_cmp: np.ndarray        # twin position inside the tree rotation arrays
    gap: np.ndarray           # non-tree edges ccw-following each tree edge

    @property
    def tree_size(self) -> int:
        return self.ref.shape[0]


def prefix_sum(values, threads: int = 1) -> np.ndarray:
    """Exclusive prefix sums, identical for every thread count."""
    values = np.ascontiguousarray(values, dtype=np.int64)
    k = values.shape[0]
    out = np.empty(k, np.int64)
    if k == 0:
        return out
    chunks = max(1, int(threads))
    _kernels.set_pool(chunks)
    totals = np.empty(chunks, np.int64)
    _kernels.chunk_totals(values, totals, chunks)
    offsets = np.zeros(chunks, np.int64)
    np.cumsum(totals[:-1], out=offsets[1:])
    _kernels.exclusive_scan_chunked(values, offsets, out, chunks)
    return out


def dfs_parent_edges(emb: PlanarEmbedding, root: int = 0,
                     accountant=None) -> np.ndarray:
    """Deterministic ccw DFS; returns the parent edge of every vertex."""
    ac = accountant if accountant is not None else MemoryAccountant()
    parent_ref = ac.track(np.full(emb.n, -1, np.int32))
    visited = np.zeros(emb.n, np.uint8)
    ac.alloc(visited.nbytes)
    seen = _kernels.dfs_tree_seq(emb.vfirst, emb.vlast, emb.etgt, emb.ecmp,
                                 root, parent_ref, visited)
    ac.free(visited.nbytes)
    if seen != emb.n:
        raise ValueError(f"graph is not connected ({seen} of {emb.n} reachable)")
    return parent_ref


def claim_parent_edges(emb: PlanarEmbedding, threads: int, root: int = 0,
                       accountant=None) -> np.ndarray:
    """Parallel claiming traversal; any run returns some valid spanning tree."""
    n = emb.n
    ac = accountant if accountant is not None else MemoryAccountant()
    parent_ref = ac.track(np.full(n, -1, np.int32))
    visited = np.zeros(n, np.uint8)
    ac.alloc(visited.nbytes)
    visited[root] = 1
    stub = [root]
    while stub and len(stub) < threads:
        v = stub.pop()
        for e in range(int(emb.vfirst[v]), int(emb.vlast[v]) + 1):
            w = int(emb.etgt[e])
            if visited[w] == 0:
                visited[w] = 1
                parent_ref[w] = emb.ecmp[e]
                stub.append(w)
    if stub:
        limit = max(n // threads, 64)
        maxdeg = int((emb.vlast - emb.vfirst).max()) + 1
        cap = limit + maxdeg + 2
        # live worker stacks: one task buffer and one split buffer per thread
        ac.alloc(2 * max(1, threads) * cap * 4)
        tasks = queue.Queue()
        for v in stub:
            buf = np.empty(cap, np.int32)
            buf[0] = v
            tasks.put((buf, 1))

        def work():
            split = np.empty(cap, np.int32)
            while True:
                item = tasks.get()
                if item is None:
                    tasks.task_done()
                    return
                buf, slen = item
                while slen > 0:
                    slen, h = _kernels.dfs_claim_step(
                        emb.vfirst, emb.vlast, emb.etgt, emb.ecmp,
                        visited, parent_ref, buf, slen, limit, split)
                    if h > 0:
                        # ship the split half before finishing this task so
                        # the queue's unfinished count never dips to zero early
                        tasks.put((split, h))
                        split = np.empty(cap, np.int32)
                tasks.task_done()

        workers = [threading.Thread(target=work, daemon=True)
                   for _ in range(max(1, threads))]
        for t in workers:
            t.start()
        tasks.join()
        for _ in workers:
            tasks.put(None)
        for t in workers:
            t.join()
        ac.free(2 * max(1, threads) * cap * 4)
    ac.free(visited.nbytes)
    reach = _kernels.tree_reach_count(emb.vfirst, emb.vlast, emb.etgt,
                                      emb.ecmp, parent_ref, root)
    if reach != n:
        # not expected on coherent hardware; keep the contract regardless
        ac.drop(parent_ref)
        return dfs_parent_edges(emb, root, ac)
    return parent_ref


def tree_structures_from_edges(emb: PlanarEmbedding, parent_ref: np.ndarray,
                               threads: int = 1, root: int = 0,
                               accountant=None) -> SpanningTreeData:
    """Derive rotations, twin map and gap counts from parent edges."""
    n, m = emb.n, emb.m
    chunks = max(1, int(threads))
    _kernels.set_pool(chunks)
    ac = accountant if accountant is not None else MemoryAccountant()
    mark = ac.track(np.zeros(2 * m, np.uint8))
    tdeg = ac.track(np.empty(n, np.int32))
    _kernels.fill_tree_marks(parent_ref, emb.ecmp, mark, chunks)
    _kernels.count_tree_degrees(emb.vfirst, emb.vlast, mark, tdeg, chunks)
    starts = ac.track(prefix_sum(tdeg, threads))
    tfirst = ac.track(starts.astype(np.int32))
    tlast = ac.track((starts + tdeg - 1).astype(np.int32))
    ac.free(starts.nbytes + tdeg.nbytes)
    del starts, tdeg
    k = 2 * (n - 1)
    ref = ac.track(np.empty(k, np.int32))
    inv = ac.track(np.full(2 * m, -1, np.int32))
    _kernels.fill_tree_rotations(emb.vfirst, emb.vlast, mark, parent_ref,
                                 tfirst, ref, inv, chunks)
    et_cmp = ac.track(np.empty(k, np.int32))
    _kernels.fill_tree_cmp(ref, inv, emb.ecmp, et_cmp, chunks)
    gap = ac.track(np.zeros(k, np.int32))
    _kernels.fill_gaps(emb.vfirst, emb.vlast, mark, inv, gap, chunks)
    ac.free(inv.nbytes)
    del inv
    parents = ac.track(np.where(parent_ref >= 0,
                                emb.etgt[np.maximum(parent_ref, 0)] + 1,
                                0).astype(np.int32))
    return SpanningTreeData(n, root, parents, parent_ref, mark,
                            tfirst, tlast, ref, et_cmp, gap)


def sequential_dfs_tree(emb: PlanarEmbedding, root: int = 1,
                        accountant=None) -> SpanningTreeData:
    """DFS tree plus all derived arrays, fully deterministic."""
    r = root - 1
    parent_ref = dfs_parent_edges(emb, r, accountant)
    return tree_structures_from_edges(emb, parent_ref, 1, r, accountant)


def parallel_spanning_tree(emb: PlanarEmbedding, root: int = 1, threads: int = 1,
                           deterministic: bool = False) -> np.ndarray:
    """Parent vertex per vertex (1-based, 0 at the root).

    Deterministic mode reproduces the sequential DFS tree exactly; otherwise
    the claiming traversal returns whichever valid tree the race produced.
    """
    r = root - 1
    if deterministic:
        parent_ref = dfs_parent_edges(emb, r)
    else:
        parent_ref = claim_parent_edges(emb, threads, r)
    return np.where(parent_ref >= 0,
                    emb.etgt[np.maximum(parent_ref, 0)] + 1, 0).astype(np.int32)


def build_tree_adjacency(emb: PlanarEmbedding, parents, threads: int = 1) -> SpanningTreeData:
    """SpanningTreeData from a 1-based parent array.

    With parallel edges the first rotation edge toward the parent is taken.
    Raises ValueError when the array is not a spanning tree of the embedding.
    """
    parents = np.asarray(parents, dtype=np.int64)
    if parents.shape[0] != emb.n:
        raise ValueError(f"expected {emb.n} parent entries, got {parents.shape[0]}")
    roots = np.flatnonzero(parents == 0)
    if roots.shape[0] != 1:
        raise ValueError(f"expected exactly one root entry, found {roots.shape[0]}")
    root = int(roots[0])
    want = parents - 1
    cand = np.flatnonzero(emb.etgt == want[emb.esrc])
    parent_ref = np.full(emb.n, -1, np.int32)
    srcs, first = np.unique(emb.esrc[cand], return_index=True)
    parent_ref[srcs] = cand[first]
    missing = np.flatnonzero((parents > 0) & (parent_ref < 0))
    if missing.shape[0]:
        v = int(missing[0])
        raise ValueError(f"vertex {v + 1} has no edge to claimed parent {int(parents[v])}")
    reach = _kernels.tree_reach_count(emb.vfirst, emb.vlast, emb.etgt,
                                      emb.ecmp, parent_ref, root)
    if reach != emb.n:
        raise ValueError("parent array does not form a spanning tree")
    return tree_structures_from_edges(emb, parent_ref, threads, root)
