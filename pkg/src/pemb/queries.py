"""Navigation over a compact embedding.

Positions in A are called ticks and run 1..2m along the construction walk.
Every directed edge owns exactly one tick; tree ticks map to parentheses in
B through rank over A's ones, non-tree ticks map to B* through rank over the
zeros.  Vertices are 1-based; the root of the encoding is vertex 1 and the
opens of B are vertices 2..n in tour order.

All queries run on the three sequences alone: degrees by walking a rotation,
neighbour listings in counterclockwise order, and face walks by alternating
mate with the rotation successor.
"""


class Navigator:
    def __init__(self, compact):
        self.c = compact
        self.a = compact.a
        self.b = compact.b
        self.bstar = compact.bstar
        self.ticks = 2 * compact.m

    # -- tick algebra ------------------------------------------------------

    def _check_tick(self, i: int):
        if i < 1 or i > self.ticks:
            raise IndexError(f"tick {i} out of range 1..{self.ticks}")

    def first(self, v: int):
        """First tick of v's rotation; None when the graph has no edges."""
        if v < 1 or v > self.c.n:
            raise IndexError(f"vertex {v} out of range 1..{self.c.n}")
        if self.ticks == 0:
            return None
        return self.a.select(1, self.b.select(0, v - 1)) + 1

    def next(self, i: int):
        """Tick after i inside the same rotation; None past the last one."""
        self._check_tick(i)
        if self.a.access(i) == 0:
            j = i + 1
        elif self.b.access(self.a.rank(1, i)) == 0:
            j = self.mate(i) + 1
        else:
            return None
        return j if j <= self.ticks else None

    def mate(self, i: int) -> int:
        """Tick of the same edge traversed in the other direction."""
        self._check_tick(i)
        if self.a.access(i) == 0:
            return self.a.select(0, self.bstar.match(self.a.rank(0, i)))
        return self.a.select(1, self.b.match(self.a.rank(1, i)))

    def vertex(self, i: int) -> int:
        """Source vertex of the directed edge at tick i."""
        self._check_tick(i)
        r = self.a.rank(1, i)
        if self.a.access(i) == 1:
            if self.b.access(r) == 0:
                # entering a subtree: source is the new node's parent
                return self.b.parent(self.b.rank(0, r)) + 1
            # leaving a subtree: source is the node being closed
            return self.b.rank(0, self.b.match(r)) + 1
        if r == 0:
            return 1
        if self.b.access(r) == 0:
            return self.b.rank(0, r) + 1
        return self.b.parent(self.b.rank(0, self.b.match(r))) + 1

    def rot_next(self, i: int) -> int:
        """Rotation successor with wrap-around to the start of the rotation."""
        j = self.next(i)
        if j is not None:
            return j
        return self.first(self.vertex(i))

    # -- queries -----------------------------------------------------------

    def rotation_ticks(self, v: int) -> list:
        out = []
        t = self.first(v)
        while t is not None:
            out.append(t)
            t = self.next(t)
        return out

    def counting(self, v: int) -> int:
        """Degree of v (parallel edges counted separately)."""
        d = 0
        t = self.first(v)
        while t is not None:
            d += 1
            t = self.next(t)
        return d

    def listing(self, v: int) -> list:
        """Neighbours of v in counterclockwise order."""
        out = []
        t = self.first(v)
        while t is not None:
            out.append(self.vertex(self.mate(t)))
            t = self.next(t)
        return out

    def face(self, i: int) -> list:
        """Vertices of the face on the left of the directed edge at tick i."""
        self._check_tick(i)
        orbit = []
        t = i
        while t != i or not orbit:
            orbit.append(self.vertex(t))
            t = self.rot_next(self.mate(t))
        return orbit
