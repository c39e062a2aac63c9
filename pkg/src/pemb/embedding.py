"""Connected planar embeddings given as rotation systems.

A graph with n vertices and m undirected edges is stored as 2m directed
half-edges grouped by source vertex, each group listing the outgoing edges in
counterclockwise rotation order.  Twin half-edges are linked by an involution
``ecmp``.  Vertex 1 is on the outer face by convention; all arrays here are
0-based, the text format and the public API are 1-based.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels


class PgFormatError(ValueError):
    """Raised on malformed or inconsistent embedding input."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


@dataclass
class PlanarEmbedding:
    n: int
    m: int
    esrc: np.ndarray      # int32[2m] source vertex of each directed edge
    etgt: np.ndarray      # int32[2m]
    ecmp: np.ndarray      # int32[2m] twin edge involution
    vfirst: np.ndarray    # int32[n] first edge of each vertex group
    vlast: np.ndarray     # int32[n] last edge, inclusive; empty group when < vfirst

    def degree(self, v: int) -> int:
        """Number of edge endpoints at 1-based vertex v (loops would count twice)."""
        i = v - 1
        return int(self.vlast[i] - self.vfirst[i] + 1)

    def rotation(self, v: int):
        """1-based neighbours of v in ccw order."""
        i = v - 1
        return [int(self.etgt[e]) + 1
                for e in range(self.vfirst[i], self.vlast[i] + 1)]

    def face_count(self) -> int:
        if self.m == 0:
            return 1
        return int(_kernels.face_orbit_count(self.vfirst, self.vlast,
                                             self.esrc, self.ecmp))

    @property
    def input_bytes(self) -> int:
        """Size of the adjacency representation held in memory."""
        return (self.esrc.nbytes + self.etgt.nbytes + self.ecmp.nbytes
                + self.vfirst.nbytes + self.vlast.nbytes)


def _group_index(esrc, n):
    counts = np.bincount(esrc, minlength=n)
    starts = np.zeros(n + 1, np.int64)
    np.cumsum(counts, out=starts[1:])
    return starts[:n].astype(np.int32), (starts[1:] - 1).astype(np.int32)


def _structural_problems(n, m, esrc, etgt, ecmp, lines=None):
    """Shared invariant checks; yields (line, reason) pairs.

    ``lines`` maps edge index to its 1-based source line for parser error
    reporting; validation of in-memory instances passes None and gets 0.
    """
    ne = 2 * m
    if ne == 0:
        return []
    # vectorized gate; the per-edge loop below only runs to locate failures
    clean = bool(((ecmp >= 0) & (ecmp < ne)).all())
    if clean:
        ids = np.arange(ne)
        clean = ((ecmp[ecmp] == ids).all() and not (ecmp == ids).any()
                 and (esrc[ecmp] == etgt).all() and (etgt[ecmp] == esrc).all()
                 and not (np.diff(esrc) < 0).any())
    if clean:
        return []
    ln = (lambda e: lines[e]) if lines is not None else (lambda e: 0)
    problems = []
    for e in range(ne):
        c = int(ecmp[e])
        if c < 0 or c >= ne:
            problems.append((ln(e), f"edge {e + 1}: twin index {c + 1} out of range"))
            continue
        if c == e:
            problems.append((ln(e), f"edge {e + 1}: edge is its own twin"))
        elif int(ecmp[c]) != e:
            problems.append((ln(e), f"edge {e + 1}: twin pointer is not an involution"))
        elif esrc[c] != etgt[e] or etgt[c] != esrc[e]:
            problems.append((ln(e), f"edge {e + 1}: twin endpoints do not mirror"))
        if e + 1 < ne and esrc[e] > esrc[e + 1]:
            problems.append((ln(e + 1), "edges are not grouped by ascending source vertex"))
    return problems


def _global_problems(emb: PlanarEmbedding):
    problems = []
    if emb.m == 0:
        if emb.n != 1:
            problems.append((0, "graph is disconnected"))
        return problems
    reach = int(_kernels.bfs_reach_count(emb.vfirst, emb.vlast, emb.etgt, 0))
    if reach != emb.n:
        problems.append((0, f"graph is disconnected ({reach} of {emb.n} vertices reachable)"))
        return problems
    f = emb.face_count()
    if emb.n - emb.m + f != 2:
        problems.append((0, f"rotation system is not planar: n - m + f = "
                            f"{emb.n} - {emb.m} + {f} != 2"))
    return problems


def parse_embedding(text: str) -> PlanarEmbedding:
    """Parse the .pg text format; raises PgFormatError with a line number."""
    header = None
    rows = []
    row_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if header is None:
            if parts[0] != "pg" or len(parts) != 3:
                raise PgFormatError(lineno, "expected header 'pg <n> <m>'")
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise PgFormatError(lineno, "header counts must be integers") from None
            if n < 1 or m < 0:
                raise PgFormatError(lineno, f"invalid sizes n={n} m={m}")
            header = (n, m)
            continue
        if len(parts) != 3:
            raise PgFormatError(lineno, f"expected '<src> <tgt> <cmp>', got {len(parts)} fields")
        try:
            row = (int(parts[0]), int(parts[1]), int(parts[2]))
        except ValueError:
            raise PgFormatError(lineno, "edge fields must be integers") from None
        rows.append(row)
        row_lines.append(lineno)
    if header is None:
        raise PgFormatError(0, "missing 'pg <n> <m>' header")
    n, m = header
    if len(rows) != 2 * m:
        raise PgFormatError(0, f"expected {2 * m} edge lines, found {len(rows)}")
    esrc = np.empty(2 * m, np.int32)
    etgt = np.empty(2 * m, np.int32)
    ecmp = np.empty(2 * m, np.int32)
    for e, (s, t, c) in enumerate(rows):
        if not (1 <= s <= n and 1 <= t <= n):
            raise PgFormatError(row_lines[e], f"vertex id out of range 1..{n}")
        if not (1 <= c <= 2 * m):
            raise PgFormatError(row_lines[e], f"dangling twin reference {c}")
        esrc[e] = s - 1
        etgt[e] = t - 1
        ecmp[e] = c - 1
    for line, reason in _structural_problems(n, m, esrc, etgt, ecmp, row_lines):
        raise PgFormatError(line, reason)
    vfirst, vlast = _group_index(esrc, n)
    emb = PlanarEmbedding(n, m, esrc, etgt, ecmp, vfirst, vlast)
    for line, reason in _global_problems(emb):
        raise PgFormatError(line, reason)
    return emb


def load_pg(path) -> PlanarEmbedding:
    with open(path, "r", encoding="ascii") as fh:
        return parse_embedding(fh.read())


def write_embedding(emb: PlanarEmbedding) -> str:
    out = [f"pg {emb.n} {emb.m}"]
    for e in range(2 * emb.m):
        out.append(f"{int(emb.esrc[e]) + 1} {int(emb.etgt[e]) + 1} {int(emb.ecmp[e]) + 1}")
    return "\n".join(out) + "\n"


def save_pg(emb: PlanarEmbedding, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(write_embedding(emb))


def validate_embedding(emb: PlanarEmbedding) -> list:
    """Every violated structural invariant, as human-readable strings."""
    report = [reason for _, reason in
              _structural_problems(emb.n, emb.m, emb.esrc, emb.etgt, emb.ecmp)]
    grouped = True
    for v in range(emb.n):
        lo, hi = int(emb.vfirst[v]), int(emb.vlast[v])
        for e in range(lo, hi + 1):
            if emb.esrc[e] != v:
                grouped = False
    if not grouped:
        report.append("vertex group index does not match edge sources")
    if not report:
        report.extend(reason for _, reason in _global_problems(emb))
    return report


# direction ranks, ccw starting East, for grid coordinates with y pointing up
_DIR_RANK = np.full((3, 3), -1, np.int32)
for _rank, (_dx, _dy) in enumerate(
        [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]):
    _DIR_RANK[_dx + 1, _dy + 1] = _rank


def generate_grid_triangulation(side: int, seed: int = 0) -> PlanarEmbedding:
    """g x g grid with one pseudo-random diagonal per cell.

    Vertices are numbered row-major from the top-left corner, which lies on
    the outer face.  n = g^2, m = (g-1)(3g-1).  Same seed, same arrays.
    """
    g = side
    if g < 2:
        raise ValueError(f"side must be >= 2, got {g}")
    n = g * g
    idx = np.arange(n, dtype=np.int64).reshape(g, g)
    horiz = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    vert = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    rng = np.random.default_rng(seed)
    diag_kind = rng.integers(0, 2, size=(g - 1, g - 1))
    # kind 0 ties top-left to bottom-right, kind 1 bottom-left to top-right
    tl, tr = idx[:-1, :-1], idx[:-1, 1:]
    bl, br = idx[1:, :-1], idx[1:, 1:]
    d_u = np.where(diag_kind == 0, tl, bl).ravel()
    d_v = np.where(diag_kind == 0, br, tr).ravel()
    diag = np.stack([d_u, d_v], axis=1)
    und = np.concatenate([horiz, vert, diag], axis=0)
    m = und.shape[0]

    src = np.empty(2 * m, np.int64)
    tgt = np.empty(2 * m, np.int64)
    src[0::2], tgt[0::2] = und[:, 0], und[:, 1]
    src[1::2], tgt[1::2] = und[:, 1], und[:, 0]
    dx = (tgt % g) - (src % g)
    dy = (src // g) - (tgt // g)
    rank = _DIR_RANK[dx + 1, dy + 1]
    order = np.argsort(src * 8 + rank)
    pos = np.empty(2 * m, np.int64)
    pos[order] = np.arange(2 * m)
    esrc = src[order].astype(np.int32)
    etgt = tgt[order].astype(np.int32)
    ecmp = pos[np.arange(2 * m)[order] ^ 1].astype(np.int32)
    vfirst, vlast = _group_index(esrc, n)
    return PlanarEmbedding(n, m, esrc, etgt, ecmp, vfirst, vlast)


def _tick_slots(compact):
    """Map every tick to an edge slot, rotations grouped by source vertex."""
    from .queries import Navigator

    nav = Navigator(compact)
    n, m = compact.n, compact.m
    slot = {}
    esrc = np.empty(2 * m, np.int32)
    e = 0
    for v in range(1, n + 1):
        for tick in nav.rotation_ticks(v):
            slot[tick] = e
            esrc[e] = v - 1
            e += 1
    if e != 2 * m:
        raise ValueError("tick walk did not cover every directed edge")
    return nav, slot, esrc


def decode(compact) -> PlanarEmbedding:
    """Rebuild the rotation system that a compact structure encodes.

    Walks every vertex rotation through the tick algebra and resolves twins
    through mate, so re-encoding with the same tree, root and starting edge
    must reproduce the bits.
    """
    nav, slot, esrc = _tick_slots(compact)
    n, m = compact.n, compact.m
    etgt = np.empty(2 * m, np.int32)
    ecmp = np.empty(2 * m, np.int32)
    for tick, e in slot.items():
        mt = nav.mate(tick)
        etgt[e] = esrc[slot[mt]]
        ecmp[e] = slot[mt]
    vfirst, vlast = _group_index(esrc, n)
    return PlanarEmbedding(n, m, esrc, etgt, ecmp, vfirst, vlast)


def decode_tree(compact) -> np.ndarray:
    """Parent edge of every vertex in decode's edge numbering, -1 at the root.

    The encoded tree need not be any DFS tree of the embedding, so roundtrips
    must reuse it instead of recomputing one; the upward traversal of each
    tree edge pins down which parallel edge carries the tree.
    """
    nav, slot, _ = _tick_slots(compact)
    parent_ref = np.full(compact.n, -1, np.int32)
    b = compact.b
    for v in range(2, compact.n + 1):
        up_tick = compact.a.select(1, b.match(b.select(0, v - 1)))
        parent_ref[v - 1] = slot[up_tick]
    return parent_ref
