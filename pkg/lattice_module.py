# file: lattice_module.py
"""
Triangular lattice geometry in axial coordinates.

Vertices are integer pairs (x, y) standing for x*e1 + y*e2 with e1 = (1, 0) and
e2 = (1/2, sqrt(3)/2). Unit cells are up or down triangles. Sector k at a vertex is
the cell between directions DIRECTIONS[k] and DIRECTIONS[k+1].
"""

import math
from typing import NamedTuple

UNITS = 6

DIRECTIONS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))

# line families: a lattice line is a level set of one of these coordinates
FAMILIES = ("x", "y", "x+y")


# -------------------------
# CELLS
# -------------------------
class Cell(NamedTuple):
    a: int
    b: int
    up: bool

    def __str__(self):
        return f"{self.a},{self.b},{'up' if self.up else 'down'}"


def cell_vertices(cell):
    """Counterclockwise vertices of a unit cell."""
    a, b, up = cell
    if up:
        return ((a, b), (a + 1, b), (a, b + 1))
    return ((a + 1, b), (a + 1, b + 1), (a, b + 1))


def cell_from_vertices(vertices):
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    a, b = min(xs), min(ys)
    return Cell(a, b, (a, b) in set(map(tuple, vertices)))


def cell_at(vertex, sector):
    x, y = vertex
    sector %= UNITS
    if sector == 0:
        return Cell(x, y, True)
    if sector == 1:
        return Cell(x - 1, y, False)
    if sector == 2:
        return Cell(x - 1, y, True)
    if sector == 3:
        return Cell(x - 1, y - 1, False)
    if sector == 4:
        return Cell(x, y - 1, True)
    return Cell(x, y - 1, False)


# sector occupied by each corner of a cell, in cell_vertices order
_UP_SECTORS = (0, 2, 4)
_DOWN_SECTORS = (1, 3, 5)


def cell_sectors(cell):
    return _UP_SECTORS if cell.up else _DOWN_SECTORS


def sector_of(cell, vertex):
    for v, s in zip(cell_vertices(cell), cell_sectors(cell)):
        if v == tuple(vertex):
            return s
    raise ValueError(f"{vertex} is not a vertex of {cell}")


def cell_neighbors(cell):
    """Neighbours across edge i, where edge i joins vertices i and i+1."""
    a, b, up = cell
    if up:
        return (Cell(a, b - 1, False), Cell(a, b, False), Cell(a - 1, b, False))
    return (Cell(a + 1, b, True), Cell(a, b + 1, True), Cell(a, b, True))


def shared_edge(c1, c2):
    common = set(cell_vertices(c1)) & set(cell_vertices(c2))
    if len(common) != 2:
        return None
    return tuple(sorted(common))


def edge_index(cell, neighbor):
    for i, n in enumerate(cell_neighbors(cell)):
        if n == neighbor:
            return i
    return None


def cell_centroid3(cell):
    """Three times the centroid, in axial coordinates (stays integral)."""
    vs = cell_vertices(cell)
    return (sum(v[0] for v in vs), sum(v[1] for v in vs))


def to_euclidean(vertex):
    x, y = vertex
    return (x + 0.5 * y, y * math.sqrt(3) / 2)


# -------------------------
# DISTANCE AND BALLS
# -------------------------
def vertex_distance(v, w):
    dx, dy = w[0] - v[0], w[1] - v[1]
    return (abs(dx) + abs(dy) + abs(dx + dy)) // 2


def vertex_ball(centers, radius):
    """All vertices within lattice distance `radius` of some center."""
    ball = set()
    for cx, cy in centers:
        for dx in range(-radius, radius + 1):
            for dy in range(-radius, radius + 1):
                if (abs(dx) + abs(dy) + abs(dx + dy)) // 2 <= radius:
                    ball.add((cx + dx, cy + dy))
    return ball


def cells_within(centers, radius):
    """Cells whose three vertices all lie within `radius` of the centers."""
    ball = vertex_ball(centers, radius)
    cells = set()
    for v in ball:
        for s in range(UNITS):
            c = cell_at(v, s)
            if all(u in ball for u in cell_vertices(c)):
                cells.add(c)
    return cells


def interior_vertices(cells):
    """Vertices all six of whose cells belong to `cells`."""
    cells = set(cells)
    seen = set()
    for c in cells:
        seen.update(cell_vertices(c))
    return {v for v in seen if all(cell_at(v, s) in cells for s in range(UNITS))}


# -------------------------
# POINT GROUP
# -------------------------
class Symmetry(NamedTuple):
    """Reflect (optionally) across the e1 axis, then rotate by `turns` sixths."""
    turns: int
    flip: bool

    def vertex(self, v):
        x, y = v
        if self.flip:
            x, y = x + y, -y
        for _ in range(self.turns % UNITS):
            x, y = -y, x + y
        return (x, y)

    def sector(self, s):
        if self.flip:
            s = -s - 1
        return (s + self.turns) % UNITS

    def cell(self, c):
        return cell_from_vertices([self.vertex(v) for v in cell_vertices(c)])


POINT_GROUP = tuple(Symmetry(k, f) for f in (False, True) for k in range(UNITS))
ROTATIONS = tuple(g for g in POINT_GROUP if not g.flip)


def symmetries(reflections=True):
    return POINT_GROUP if reflections else ROTATIONS


def translate_cell(cell, dx, dy):
    return Cell(cell.a + dx, cell.b + dy, cell.up)


# -------------------------
# LOZENGES
# -------------------------
def lozenge_polygon(cell, neighbor):
    """Counterclockwise (p, u, q, w) of the lozenge cell+neighbor, acute at p and q."""
    i = edge_index(cell, neighbor)
    if i is None:
        raise ValueError(f"{cell} and {neighbor} do not share an edge")
    vs = cell_vertices(cell)
    u, w = vs[i], vs[(i + 1) % 3]
    p = vs[(i + 2) % 3]
    q = next(v for v in cell_vertices(neighbor) if v not in (u, w))
    return (p, u, q, w)


def obtuse_sectors(cell, neighbor, vertex):
    """The two sectors at `vertex` covered by a lozenge, in counterclockwise order."""
    s1, s2 = sector_of(cell, vertex), sector_of(neighbor, vertex)
    if (s1 + 1) % UNITS == s2:
        return (s1, s2)
    return (s2, s1)


def lozenge_bands(cells):
    """Band index per line family in which the lozenge spans exactly one band."""
    vertices = set()
    for c in cells:
        vertices.update(cell_vertices(c))
    bands = {}
    for family in FAMILIES:
        values = [_coordinate(v, family) for v in vertices]
        if max(values) - min(values) == 1:
            bands[family] = min(values)
    return bands


def _coordinate(v, family):
    if family == "x":
        return v[0]
    if family == "y":
        return v[1]
    return v[0] + v[1]


def line_through(vertex, direction):
    """(family, level) of the lattice line through `vertex` along DIRECTIONS[direction]."""
    family = ("y", "x", "x+y")[direction % 3]
    return family, _coordinate(vertex, family)


# -------------------------
# PERIODS
# -------------------------
class Period(NamedTuple):
    """Translations generated by (c, 0) and, when h > 0, (s, h)."""
    c: int
    s: int = 0
    h: int = 0

    def vertex(self, v):
        x, y = v
        if self.h:
            k = y // self.h
            x, y = x - k * self.s, y - k * self.h
        return (x % self.c, y)

    def cell(self, cell):
        x, y = self.vertex((cell.a, cell.b))
        return Cell(x, y, cell.up)

    def vectors(self, reach):
        """Lattice translations with both coordinates within `reach`."""
        rows = range(-(reach // self.h), reach // self.h + 1) if self.h else (0,)
        found = []
        for j in rows:
            lo = -((reach + j * self.s) // self.c)
            hi = (reach - j * self.s) // self.c
            for i in range(lo, hi + 1):
                found.append((i * self.c + j * self.s, j * self.h))
        return sorted(found, key=lambda t: (abs(t[0]) + abs(t[1]), t))

    def __str__(self):
        if self.h:
            return f"({self.c},0)+({self.s},{self.h})"
        return f"({self.c},0)"


def period_family(k):
    """Periods with c, h <= k and shear 0 <= s < c, smallest fundamental domain first."""
    found = [Period(c, s, h) for h in range(1, k + 1) for c in range(1, k + 1) for s in range(c)]
    return sorted(found, key=lambda p: (p.c * p.h, p.h, p.c, p.s))
