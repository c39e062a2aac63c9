"""Compiled kernels shared by the construction and traversal code paths.

Every parallel kernel is chunked by an explicit ``chunks`` argument and only
writes to disjoint positions, so the output is identical for any chunk count
and any hardware thread pool.  ``cache=True`` keeps compilation costs to the
first run in a given environment.
"""

import numba
import numpy as np
from numba import njit, prange


def set_pool(threads: int):
    """Size the worker pool, capped at what the runtime allows.

    Chunk counts, not pool size, decide every kernel's output, so capping
    never changes results; it only limits physical parallelism.
    """
    numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


@njit(cache=True)
def dfs_tree_seq(vfirst, vlast, etgt, ecmp, root, parent_ref, visited):
    """Counterclockwise depth-first spanning tree from ``root`` (0-based).

    Children of a vertex are explored in rotation order starting right after
    the arrival edge; the root scans its group from the start.  Fills
    ``parent_ref[v]`` with the edge v->parent(v) (-1 at the root) and returns
    the number of visited vertices (== n iff connected).
    """
    n = vfirst.shape[0]
    stk_v = np.empty(n, np.int32)
    stk_p = np.empty(n, np.int32)   # parent edge position, -1 at root
    stk_k = np.empty(n, np.int32)   # edges scanned so far
    top = 0
    stk_v[0] = root
    stk_p[0] = -1
    stk_k[0] = 0
    visited[root] = 1
    seen = 1
    while top >= 0:
        v = stk_v[top]
        p = stk_p[top]
        k = stk_k[top]
        gs = vfirst[v]
        glen = vlast[v] - gs + 1
        limit = glen if p < 0 else glen - 1
        if k >= limit or glen <= 0:
            top -= 1
            continue
        stk_k[top] = k + 1
        if p < 0:
            e = gs + k
        else:
            e = gs + (p - gs + 1 + k) % glen
        w = etgt[e]
        if visited[w] == 0:
            visited[w] = 1
            parent_ref[w] = ecmp[e]
            seen += 1
            top += 1
            stk_v[top] = w
            stk_p[top] = ecmp[e]
            stk_k[top] = 0
    return seen


@njit(nogil=True, cache=True)
def dfs_claim_step(vfirst, vlast, etgt, ecmp, visited, parent_ref,
                   stack, slen, limit, split_out):
    """One bounded round of claiming DFS for a worker thread.

    Pops claimed vertices, claims unvisited neighbours (plain coherent
    writes; concurrent duplicate claims are benign), and splits the bottom
    half of the stack into ``split_out`` once it grows past ``limit``.
    Returns (remaining stack length, split length).
    """
    while slen > 0:
        if slen > limit:
            h = slen // 2
            for i in range(h):
                split_out[i] = stack[i]
            for i in range(h, slen):
                stack[i - h] = stack[i]
            return slen - h, h
        slen -= 1
        v = stack[slen]
        for e in range(vfirst[v], vlast[v] + 1):
            w = etgt[e]
            if visited[w] == 0:
                visited[w] = 1
                parent_ref[w] = ecmp[e]
                stack[slen] = w
                slen += 1
    return 0, 0


@njit(cache=True)
def bfs_reach_count(vfirst, vlast, etgt, start):
    n = vfirst.shape[0]
    seen = np.zeros(n, np.uint8)
    queue = np.empty(n, np.int32)
    seen[start] = 1
    queue[0] = start
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(vfirst[v], vlast[v] + 1):
            w = etgt[e]
            if seen[w] == 0:
                seen[w] = 1
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True)
def tree_reach_count(vfirst, vlast, etgt, ecmp, parent_ref, root):
    """Vertices reachable from the root along claimed parent links.

    A child edge is any e = v->w whose twin is w's parent edge, so a return
    value of n certifies that parent_ref encodes a spanning tree.
    """
    n = vfirst.shape[0]
    seen = np.zeros(n, np.uint8)
    queue = np.empty(n, np.int32)
    seen[root] = 1
    queue[0] = root
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        for e in range(vfirst[v], vlast[v] + 1):
            w = etgt[e]
            if seen[w] == 0 and parent_ref[w] == ecmp[e]:
                seen[w] = 1
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True)
def face_orbit_count(vfirst, vlast, esrc, ecmp):
    """Number of orbits of the face permutation e -> rot_next(cmp(e))."""
    ne = esrc.shape[0]
    seen = np.zeros(ne, np.uint8)
    faces = 0
    for e0 in range(ne):
        if seen[e0]:
            continue
        faces += 1
        cur = e0
        while seen[cur] == 0:
            seen[cur] = 1
            c = ecmp[cur]
            v = esrc[c]
            gs = vfirst[v]
            glen = vlast[v] - gs + 1
            cur = gs + (c - gs + 1) % glen
    return faces


@njit(parallel=True, cache=True)
def fill_tree_marks(parent_ref, ecmp, mark, chunks):
    n = parent_ref.shape[0]
    chk = (n + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, n)
        for v in range(lo, hi):
            p = parent_ref[v]
            if p >= 0:
                mark[p] = 1
                mark[ecmp[p]] = 1


@njit(parallel=True, cache=True)
def count_tree_degrees(vfirst, vlast, mark, tdeg, chunks):
    n = vfirst.shape[0]
    chk = (n + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, n)
        for v in range(lo, hi):
            c = 0
            for e in range(vfirst[v], vlast[v] + 1):
                c += mark[e]
            tdeg[v] = c


@njit(parallel=True, cache=True)
def fill_tree_rotations(vfirst, vlast, mark, parent_ref, tfirst, ref, inv, chunks):
    """Per-vertex tree rotations, parent edge first, ccw order preserved."""
    n = vfirst.shape[0]
    chk = (n + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, n)
        for v in range(lo, hi):
            gs = vfirst[v]
            glen = vlast[v] - gs + 1
            if glen <= 0:
                continue
            idx = tfirst[v]
            p = parent_ref[v]
            start = p - gs if p >= 0 else 0
            for step in range(glen):
                e = gs + (start + step) % glen
                if mark[e]:
                    ref[idx] = e
                    inv[e] = idx
                    idx += 1


@njit(parallel=True, cache=True)
def fill_tree_cmp(ref, inv, ecmp, et_cmp, chunks):
    k = ref.shape[0]
    chk = (k + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, k)
        for j in range(lo, hi):
            et_cmp[j] = inv[ecmp[ref[j]]]


@njit(parallel=True, cache=True)
def fill_gaps(vfirst, vlast, mark, inv, gap, chunks):
    """gap[j] = non-tree edges that ccw-follow tree edge j inside its source
    rotation, counted cyclically up to the next tree edge."""
    n = vfirst.shape[0]
    chk = (n + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, n)
        for v in range(lo, hi):
            gs = vfirst[v]
            glen = vlast[v] - gs + 1
            if glen <= 0:
                continue
            f0 = -1
            for off in range(glen):
                if mark[gs + off]:
                    f0 = off
                    break
            if f0 < 0:
                continue
            last = f0
            cnt = 0
            for step in range(1, glen + 1):
                off = (f0 + step) % glen
                if mark[gs + off]:
                    gap[inv[gs + last]] = cnt
                    last = off
                    cnt = 0
                else:
                    cnt += 1


@njit(parallel=True, cache=True)
def fill_euler_entries(ref, et_cmp, gap, tfirst, tlast, esrc, etgt, root,
                       value, succ, rank_a, rank_b, chunks):
    """Algorithm step that seeds the tour entries.

    Each directed tree edge gets its parenthesis bit, its successor in the
    Euler tour and its initial ranking weights (rank_a carries the edge plus
    the non-tree gap that follows it, rank_b counts tree edges only).
    """
    k = ref.shape[0]
    chk = (k + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, k)
        for j in range(lo, hi):
            e = ref[j]
            src = esrc[e]
            tgt = etgt[e]
            rank_a[j] = gap[et_cmp[j]] + 1
            rank_b[j] = 1
            if src == root or tfirst[src] != j:
                value[j] = 0                      # toward the child
                if tfirst[tgt] == tlast[tgt]:     # child is a leaf
                    succ[j] = et_cmp[j]
                else:
                    succ[j] = tfirst[tgt] + 1
            else:
                value[j] = 1                      # back toward the parent
                c = et_cmp[j]
                if c == tlast[tgt]:
                    succ[j] = tfirst[tgt]
                else:
                    succ[j] = c + 1


@njit(parallel=True, cache=True)
def rank_sublists(succ, heads, head_idx, is_head, rank_a, rank_b, sub_id,
                  sub_next, sub_len, sub_tot_a, sub_tot_b, err):
    """Local pass of the sublist ranking: walk each sublist, storing local
    inclusive sums and the id of the sublist every entry belongs to."""
    k = succ.shape[0]
    for h in prange(heads.shape[0]):
        cur = heads[h]
        acc_a = np.int64(0)
        acc_b = np.int64(0)
        steps = 0
        while True:
            acc_a += rank_a[cur]
            acc_b += rank_b[cur]
            rank_a[cur] = acc_a
            rank_b[cur] = acc_b
            sub_id[cur] = h
            nxt = succ[cur]
            steps += 1
            if nxt < 0 or nxt >= k or steps > k:
                err[0] = 1
                break
            if is_head[nxt]:
                sub_next[h] = head_idx[nxt]
                sub_len[h] = steps
                sub_tot_a[h] = acc_a
                sub_tot_b[h] = acc_b
                break
            cur = nxt


@njit(parallel=True, cache=True)
def block_ones(bits, tot, chunks):
    """Ones per 512-bit block, without any full-width temporary."""
    nb = tot.shape[0]
    length = bits.shape[0]
    chk = (nb + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, nb)
        for b in range(lo, hi):
            end = min((b + 1) << 9, length)
            s = 0
            for p in range(b << 9, end):
                s += bits[p]
            tot[b] = s


@njit(parallel=True, cache=True)
def paren_block_stats(words, length, tot, rel_min, chunks):
    """Per 512-bit block: total excess and minimum prefix excess relative to
    the block start, read straight from the packed payload so the directory
    build never unpacks the sequence."""
    nb = tot.shape[0]
    chk = (nb + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, nb)
        for b in range(lo, hi):
            start = b << 9
            end = min(start + 512, length)
            e = 0
            mn = end - start + 1
            w = np.int64(0)
            for p in range(start, end):
                sh = p & 63
                if sh == 0:
                    w = words[p >> 6]
                if ((w >> sh) & 1) == 0:
                    e += 1
                else:
                    e -= 1
                if e < mn:
                    mn = e
            tot[b] = e
            rel_min[b] = mn


@njit(parallel=True, cache=True)
def apply_sublist_offsets(rank_a, rank_b, sub_id, off_a, off_b, chunks):
    k = rank_a.shape[0]
    chk = (k + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, k)
        for j in range(lo, hi):
            s = sub_id[j]
            rank_a[j] += off_a[s]
            rank_b[j] += off_b[s]


@njit(parallel=True, cache=True)
def scatter_tree_bits(rank_a, rank_b, value, gap, et_cmp, lead, a_bits, b_bits, chunks):
    """Place each tree edge's 1 in A and its parenthesis in B.

    rank_a points at the end of the edge's gap block, so the true tick is
    rank_a - gap(after) shifted by the root's leading non-tree run.
    """
    k = rank_a.shape[0]
    chk = (k + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, k)
        for j in range(lo, hi):
            a_bits[rank_a[j] - gap[et_cmp[j]] + lead - 1] = 1
            b_bits[rank_b[j] - 1] = value[j]


@njit(parallel=True, cache=True)
def scatter_nontree_positions(rank_a, rank_b, gap, et_cmp, ref, esrc, vfirst,
                              vlast, lead, n_nontree, d_pos, d_edge, chunks):
    """Assign consecutive B* positions to the non-tree run after each tree
    edge; the run that crosses the tour boundary wraps modulo |B*|."""
    k = rank_a.shape[0]
    chk = (k + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, k)
        for j in range(lo, hi):
            c_edges = gap[et_cmp[j]]
            if c_edges == 0:
                continue
            tw = ref[et_cmp[j]]
            u = esrc[tw]
            gs = vfirst[u]
            glen = vlast[u] - gs + 1
            base = rank_a[j] - rank_b[j] - c_edges + lead
            for r in range(1, c_edges + 1):
                eg = gs + (tw - gs + r) % glen
                idx = (base + r - 1) % n_nontree
                d_pos[eg] = idx
                d_edge[idx] = eg


@njit(parallel=True, cache=True)
def fill_nontree_bits(d_edge, d_pos, ecmp, s_bits, chunks):
    nn = d_edge.shape[0]
    chk = (nn + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, nn)
        for j in range(lo, hi):
            s_bits[j] = 1 if j > d_pos[ecmp[d_edge[j]]] else 0


@njit(cache=True)
def euler_tour_seq(vfirst, vlast, esrc, etgt, ecmp, mark, root,
                   a_bits, b_bits, s_bits, tick_edge, want_edges):
    """Direct single-pass tour: at every tick emit the A bit and the B or B*
    bit, then step to the rotation successor (of the twin, for tree edges).

    Used as the sequential algorithm and as the oracle the chunked path is
    checked against.  Optionally records the edge id of every tick.
    """
    ne = esrc.shape[0]
    seen = np.zeros(ne, np.uint8)
    if ne == 0:
        return
    cur = vfirst[root]
    nb = 0
    ns = 0
    for t in range(ne):
        if want_edges:
            tick_edge[t] = cur
        c = ecmp[cur]
        if mark[cur]:
            a_bits[t] = 1
            b_bits[nb] = 1 if seen[c] else 0
            nb += 1
            hop = c
        else:
            a_bits[t] = 0
            s_bits[ns] = 1 if seen[c] else 0
            ns += 1
            hop = cur
        seen[cur] = 1
        v = esrc[hop]
        gs = vfirst[v]
        glen = vlast[v] - gs + 1
        cur = gs + (hop - gs + 1) % glen


@njit(parallel=True, cache=True)
def chunk_totals(values, totals, chunks):
    n = values.shape[0]
    chk = (n + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, n)
        acc = np.int64(0)
        for i in range(lo, hi):
            acc += values[i]
        totals[t] = acc


@njit(parallel=True, cache=True)
def exclusive_scan_chunked(values, offsets, out, chunks):
    n = values.shape[0]
    chk = (n + chunks - 1) // chunks
    for t in prange(chunks):
        lo = t * chk
        hi = min(lo + chk, n)
        acc = offsets[t]
        for i in range(lo, hi):
            out[i] = acc
            acc += values[i]
