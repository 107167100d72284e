# file: patch_engine_module.py

import math
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Any, NamedTuple, Optional

import networkx as nx
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from config import DEFAULT_COMPLETION_CAP, MAX_BLOCK_CELLS, SHOW_PROGRESS, get_logger, search_budget
from errors_module import (
    BudgetExceededError,
    ClassificationError,
    ContradictionError,
    IllegalVertexError,
    InstanceSyntaxError,
    OverlapError,
    PatchError,
)
from instance_model_module import Arc, PlacedArc
from lattice_module import (
    DIRECTIONS,
    FAMILIES,
    UNITS,
    Cell,
    Symmetry,
    cell_at,
    cell_neighbors,
    cell_sectors,
    cell_vertices,
    cells_within,
    interior_vertices,
    line_through,
    lozenge_bands,
    lozenge_polygon,
    obtuse_sectors,
    sector_of,
    symmetries,
    translate_cell,
    vertex_ball,
)

logger = get_logger(__name__)

FULL = (1 << UNITS) - 1


# -------------------------
# PLACEMENTS
# -------------------------
class Corner(NamedTuple):
    vertex: tuple
    sectors: tuple
    arc: Arc


class Placement(NamedTuple):
    """One piece on the lattice. cells[0] is the primary cell used by the patch file."""
    shape: str
    kind: str
    cells: tuple
    corners: tuple
    rot: int = 0
    flip: bool = False
    axis: Optional[int] = None

    @property
    def key(self):
        return (self.shape, frozenset(self.cells), frozenset(self.corners))

    def placed_arcs(self):
        for c in self.corners:
            yield c.vertex, PlacedArc(c.sectors[0], c.arc.color, c.arc.length)


def build_placement(shape, cell, rot=0, flip=False, axis=None):
    """Lay `shape` on `cell` (and its neighbour across edge `axis` for lozenges)."""
    if shape.kind == "triangle":
        polygon = cell_vertices(cell)
        sectors = [(s,) for s in cell_sectors(cell)]
        cells = (cell,)
    else:
        if axis is None:
            raise PatchError(f"lozenge {shape.name} needs an axis")
        neighbor = cell_neighbors(cell)[axis]
        p, u, q, w = lozenge_polygon(cell, neighbor)
        polygon = (p, u, q, w)
        sectors = [(sector_of(cell, p),), obtuse_sectors(cell, neighbor, u),
                   (sector_of(neighbor, q),), obtuse_sectors(cell, neighbor, w)]
        cells = (cell, neighbor)

    n = len(polygon)
    corners = []
    for j in range(n):
        k = (rot - j) % n if flip else (j + rot) % n
        arc = shape.corners[k]
        if arc.length != len(sectors[j]):
            return None
        corners.append(Corner(polygon[j], tuple(sectors[j]), arc))
    return Placement(shape.name, shape.kind, cells, tuple(corners), rot % n, flip, axis)


@lru_cache(maxsize=100_000)
def placements_covering(inst, cell):
    """Every distinct placement of an instance shape whose primary cell is `cell`."""
    flips = (False, True) if inst.reflections else (False,)
    seen = set()
    result = []
    for shape in inst.shapes:
        axes = (None,) if shape.kind == "triangle" else (0, 1, 2)
        for axis in axes:
            for flip in flips:
                for rot in range(len(shape.corners)):
                    p = build_placement(shape, cell, rot, flip, axis)
                    if p is None or p.key in seen:
                        continue
                    seen.add(p.key)
                    result.append(p)
    return tuple(result)


def placements_at_arc(inst, vertex, arc):
    """Placements realising the placed arc `arc` at `vertex`."""
    target = Corner(tuple(vertex), arc.sectors(), Arc(arc.color, arc.length))
    return [p for p in placements_covering(inst, cell_at(vertex, arc.start))
            if target in p.corners]


# -------------------------
# PATCHES
# -------------------------
class VertexStar(NamedTuple):
    vertex: tuple
    sectors: tuple  # 6 slots, each None or (color, piece_id)
    status: str


class Patch:
    """Immutable set of non-overlapping placements with per-vertex arc sets."""

    __slots__ = ("inst", "placements", "owner", "arcs")

    def __init__(self, inst, placements=(), owner=None, arcs=None):
        self.inst = inst
        self.placements = tuple(placements)
        self.owner = owner if owner is not None else {}
        self.arcs = arcs if arcs is not None else {}

    @classmethod
    def empty(cls, inst):
        return cls(inst)

    @classmethod
    def from_placements(cls, inst, placements, check=True):
        patch = cls(inst)
        for p in placements:
            patch = place(patch, p) if check else _place_unchecked(patch, p)
        return patch

    def __len__(self):
        return len(self.placements)

    def __repr__(self):
        return f"Patch({len(self.placements)} pieces, {len(self.owner)} cells)"

    @property
    def cells(self):
        return set(self.owner)

    @property
    def vertices(self):
        return set(self.arcs)

    def keys(self):
        return {p.key for p in self.placements}

    def contains(self, p):
        return p.key in self.keys()

    def arcs_at(self, vertex):
        return self.arcs.get(tuple(vertex), frozenset())

    def occupied(self, vertex):
        mask = 0
        for arc in self.arcs_at(vertex):
            for s in arc.sectors():
                mask |= 1 << s
        return mask

    def is_complete(self, vertex):
        return self.occupied(vertex) == FULL

    def complete_vertices(self):
        return {v for v in self.arcs if self.occupied(v) == FULL}

    def lozenges(self):
        return [i for i, p in enumerate(self.placements) if p.kind == "lozenge"]

    def star(self, vertex):
        vertex = tuple(vertex)
        slots = [None] * UNITS
        for pid, p in enumerate(self.placements):
            for c in p.corners:
                if c.vertex == vertex:
                    for s in c.sectors:
                        slots[s] = (c.arc.color, pid)
        arcs = self.arcs_at(vertex)
        if not self.inst.embeds(arcs):
            status = "illegal"
        elif self.occupied(vertex) == FULL:
            status = "complete-legal"
        else:
            status = "partial-legal"
        return VertexStar(vertex, tuple(slots), status)


def _place_unchecked(patch, p):
    idx = len(patch.placements)
    arcs = dict(patch.arcs)
    for v, arc in p.placed_arcs():
        arcs[v] = arcs.get(v, frozenset()) | {arc}
    owner = dict(patch.owner)
    for c in p.cells:
        owner[c] = idx
    return Patch(patch.inst, patch.placements + (p,), owner, arcs)


def place(patch, p):
    """Return patch + p; raises on overlap or when some vertex admits no ring."""
    for c in p.cells:
        if c in patch.owner:
            raise OverlapError(f"cell {c} is already covered")
    arcs = dict(patch.arcs)
    for v, arc in p.placed_arcs():
        joined = arcs.get(v, frozenset()) | {arc}
        if not patch.inst.embeds(joined):
            raise IllegalVertexError(v)
        arcs[v] = joined
    owner = dict(patch.owner)
    idx = len(patch.placements)
    for c in p.cells:
        owner[c] = idx
    return Patch(patch.inst, patch.placements + (p,), owner, arcs)


def try_place(patch, p):
    try:
        return place(patch, p)
    except (OverlapError, IllegalVertexError):
        return None


def transform_placement(inst, p, g, dx=0, dy=0):
    """Image of a placement under the isometry v -> g(v) + (dx, dy)."""
    def move(v):
        x, y = g.vertex(v)
        return (x + dx, y + dy)

    primary = g.cell(p.cells[0])
    primary = Cell(primary.a + dx, primary.b + dy, primary.up)
    corners = set()
    for c in p.corners:
        sectors = [g.sector(s) for s in c.sectors]
        if len(sectors) == 2 and (sectors[0] + 1) % UNITS != sectors[1]:
            sectors.reverse()
        corners.add(Corner(move(c.vertex), tuple(sectors), c.arc))
    cells = {primary}
    if len(p.cells) == 2:
        other = g.cell(p.cells[1])
        cells.add(Cell(other.a + dx, other.b + dy, other.up))
    key = (p.shape, frozenset(cells), frozenset(corners))
    for candidate in placements_covering(inst, primary):
        if candidate.key == key:
            return candidate
    raise PatchError(f"no placement of {p.shape} matches the image of {p}")


def transform_patch(patch, g, dx=0, dy=0):
    moved = [transform_placement(patch.inst, p, g, dx, dy) for p in patch.placements]
    return Patch.from_placements(patch.inst, moved, check=False)


def translate_placement(p, dx, dy):
    cells = tuple(translate_cell(c, dx, dy) for c in p.cells)
    corners = tuple(c._replace(vertex=(c.vertex[0] + dx, c.vertex[1] + dy)) for c in p.corners)
    return p._replace(cells=cells, corners=corners)


def place_many(patch, placements):
    """patch + every placement at once, checked like place."""
    placements = tuple(placements)
    owner = dict(patch.owner)
    arcs = dict(patch.arcs)
    touched = set()
    for i, p in enumerate(placements, start=len(patch.placements)):
        for c in p.cells:
            if c in owner:
                raise OverlapError(f"cell {c} is already covered")
            owner[c] = i
        for v, arc in p.placed_arcs():
            arcs[v] = arcs.get(v, frozenset()) | {arc}
            touched.add(v)
    for v in touched:
        if not patch.inst.embeds(arcs[v]):
            raise IllegalVertexError(v)
    return Patch(patch.inst, patch.placements + placements, owner, arcs)


# -------------------------
# FORCED EXTENSION
# -------------------------
def max_run(mask):
    """Longest cyclic run of occupied sectors, in units."""
    if mask == FULL:
        return UNITS
    best = run = 0
    for s in range(2 * UNITS):
        if mask & (1 << (s % UNITS)):
            run += 1
            best = max(best, run)
        else:
            run = 0
    return min(best, UNITS)


def _no_filter(p):
    return True


def _forced_at(patch, vertex, eager, allowed):
    arcs = patch.arcs_at(vertex)
    mask = patch.occupied(vertex)
    if mask == FULL:
        return []
    embeddings = patch.inst.embeds(arcs)
    if not embeddings:
        raise ContradictionError(vertex)
    if not eager and max_run(mask) <= patch.inst.theta0:
        return []
    missing = {e.arcs - arcs for e in embeddings}
    if len(missing) != 1:
        return []

    forced = []
    for arc in sorted(next(iter(missing))):
        candidates = [p for p in placements_at_arc(patch.inst, vertex, arc)
                      if allowed(p) and try_place(patch, p) is not None]
        if not candidates:
            raise ContradictionError(vertex, f"no piece realises {arc.color}:{arc.length} at {vertex}")
        if len(candidates) == 1:
            forced.append(candidates[0])
    return forced


def propagate(patch, eager=False, scope=None, allowed=_no_filter):
    """Apply forced placements until nothing changes. Returns (patch, applied)."""
    applied = []
    changed = True
    while changed:
        changed = False
        for v in sorted(patch.arcs):
            if scope is not None and v not in scope:
                continue
            if patch.occupied(v) == FULL:
                continue
            for p in _forced_at(patch, v, eager, allowed):
                try:
                    patch = place(patch, p)
                except (OverlapError, IllegalVertexError) as e:
                    raise ContradictionError(v, f"forced {p.shape} at {v} fails: {e}") from e
                applied.append(p)
                changed = True
    return patch, applied


def forced_moves(patch, eager=False, horizon=0):
    """Forced placements at vertices within `horizon` of the patch, iterated to a fixed point."""
    base = set(patch.arcs)
    scope = base if horizon <= 0 else vertex_ball(base, horizon)
    _, applied = propagate(patch, eager=eager, scope=scope)
    return applied


# -------------------------
# ENUMERATION
# -------------------------
class EnumerationResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    completions: list[Any]
    keys: list[str]
    multiplicity: list[int]
    radius: Optional[int] = None
    cap: int
    cap_exceeded: bool = False
    nodes: int = 0

    @property
    def count(self):
        return len(self.completions)


class _CapReached(Exception):
    pass


class _Search:
    def __init__(self, inst, region, cap, budget, allowed, eager=True, first_only=False):
        self.inst = inst
        self.region = sorted(region)
        self.region_set = set(region)
        self.scope = interior_vertices(region)
        self.cap = cap
        self.budget = budget
        self.allowed = allowed
        self.eager = eager
        self.first_only = first_only
        self.nodes = 0
        self.found = {}
        self.order = []
        self.cap_exceeded = False

    def run(self, patch):
        try:
            self._visit(patch)
        except _CapReached:
            pass

    def _record(self, patch):
        key = canonical_form(patch)
        if key in self.found:
            self.found[key][1] += 1
            return
        if len(self.found) >= self.cap:
            self.cap_exceeded = True
            raise _CapReached()
        self.found[key] = [patch, 1]
        self.order.append(key)
        if self.first_only:
            raise _CapReached()

    def _choose_cell(self, patch, uncovered):
        best = None
        for c in uncovered:
            for v in cell_vertices(c):
                if v not in patch.arcs:
                    continue
                rank = (len(self.inst.embeds(patch.arcs[v])), v)
                if best is None or rank < best[0]:
                    best = (rank, v)
        if best is None:
            return uncovered[0]
        v = best[1]
        for s in range(UNITS):
            c = cell_at(v, s)
            if c in self.region_set and c not in patch.owner:
                return c
        return uncovered[0]

    def _visit(self, patch):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(self.budget, "completion search")
        try:
            patch, _ = propagate(patch, eager=self.eager, scope=self.scope, allowed=self.allowed)
        except ContradictionError:
            return
        uncovered = [c for c in self.region if c not in patch.owner]
        if not uncovered:
            self._record(patch)
            return
        cell = self._choose_cell(patch, uncovered)
        for p in placements_covering(self.inst, cell):
            if not self.allowed(p):
                continue
            child = try_place(patch, p)
            if child is not None:
                self._visit(child)


def _triangle_filter(triangle_cells):
    triangle_cells = frozenset(triangle_cells)
    if not triangle_cells:
        return _no_filter

    def allowed(p):
        return p.kind != "lozenge" or not (set(p.cells) & triangle_cells)

    return allowed


def completion_region(patch, radius):
    seeds = patch.vertices or {(0, 0)}
    return cells_within(seeds, radius)


def _completion_shard(args):
    patch, region, cap, budget, triangle_cells, eager = args
    search = _Search(patch.inst, region, cap, budget, _triangle_filter(triangle_cells), eager)
    search.run(patch)
    found = [(k, search.found[k][0], search.found[k][1]) for k in search.order]
    return found, search.nodes, search.cap_exceeded


def _root_children(search, patch):
    """Propagated root and its children on the first branching cell; None when nothing branches."""
    try:
        root, _ = propagate(patch, eager=search.eager, scope=search.scope, allowed=search.allowed)
    except ContradictionError:
        return None, []
    uncovered = [c for c in search.region if c not in root.owner]
    if not uncovered:
        return root, None
    cell = search._choose_cell(root, uncovered)
    children = []
    for p in placements_covering(search.inst, cell):
        if search.allowed(p):
            child = try_place(root, p)
            if child is not None:
                children.append(child)
    return root, children


def _enumerate_sharded(search, patch, triangle_cells, jobs):
    root, children = _root_children(search, patch)
    if children is None:
        search.run(root)
        return [(k, search.found[k][0], search.found[k][1]) for k in search.order], search.nodes, False
    shards = [(child, search.region_set, search.cap, search.budget, frozenset(triangle_cells), search.eager)
              for child in children]
    merged, nodes, cap_hit = {}, 1, False
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for found, shard_nodes, shard_cap in pool.map(_completion_shard, shards):
            nodes += shard_nodes
            cap_hit = cap_hit or shard_cap
            for key, completion, multiplicity in found:
                if key in merged:
                    merged[key][1] += multiplicity
                elif len(merged) < search.cap:
                    merged[key] = [completion, multiplicity]
                else:
                    cap_hit = True
    return [(k, v[0], v[1]) for k, v in merged.items()], nodes, cap_hit


def enumerate_completions(patch, radius=None, cap=DEFAULT_COMPLETION_CAP, region=None,
                          triangle_cells=frozenset(), budget=None, eager=True, jobs=1):
    """All ways, up to isometry, to cover every region cell with a legal extension of patch.

    With jobs > 1 the branches of the first choice point are searched in worker processes
    and merged by canonical form.
    """
    if region is None:
        if radius is None:
            raise ValueError("either radius or region is required")
        region = completion_region(patch, radius)
    budget = budget or search_budget()
    search = _Search(patch.inst, region, cap, budget, _triangle_filter(triangle_cells), eager)
    if not all(search.allowed(p) for p in patch.placements):
        return EnumerationResult(completions=[], keys=[], multiplicity=[], radius=radius,
                                 cap=cap, nodes=0)
    if jobs > 1:
        found, nodes, cap_hit = _enumerate_sharded(search, patch, triangle_cells, jobs)
    else:
        search.run(patch)
        found = [(k, search.found[k][0], search.found[k][1]) for k in search.order]
        nodes, cap_hit = search.nodes, search.cap_exceeded
    logger.debug("enumerate_completions radius=%s region=%d jobs=%d nodes=%d found=%d cap_hit=%s",
                 radius, len(region), jobs, nodes, len(found), cap_hit)
    return EnumerationResult(
        completions=[completion for _, completion, _ in found],
        keys=[key.hex() for key, _, _ in found],
        multiplicity=[m for _, _, m in found],
        radius=radius,
        cap=cap,
        cap_exceeded=cap_hit,
        nodes=nodes,
    )


def find_completion(patch, region, triangle_cells=frozenset(), budget=None):
    """First completion covering `region`, or None."""
    search = _Search(patch.inst, region, 1, budget or search_budget(),
                     _triangle_filter(triangle_cells), first_only=True)
    search.run(patch)
    if not search.order:
        return None
    return search.found[search.order[0]][0]


class _PeriodicSearch(_Search):
    """Tilings of a ball invariant under a period: each placement is laid with its whole orbit."""

    def __init__(self, inst, period, radius, cap, budget):
        super().__init__(inst, cells_within([(0, 0)], radius), cap, budget, _no_filter)
        self.period = period
        self.shifts = period.vectors(2 * radius + 4)

    def _orbit(self, p):
        images = []
        for dx, dy in self.shifts:
            q = translate_placement(p, dx, dy)
            if any(c in self.region_set for c in q.cells):
                images.append(q)
        return images

    def _visit(self, patch):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceededError(self.budget, f"periodic search {self.period}")
        uncovered = [c for c in self.region if c not in patch.owner]
        if not uncovered:
            self._record(patch)
            return
        cell = self._choose_cell(patch, uncovered)
        for p in placements_covering(self.inst, cell):
            try:
                child = place_many(patch, self._orbit(p))
            except (OverlapError, IllegalVertexError):
                continue
            self._visit(child)


def periodic_completions(inst, period, radius, cap=DEFAULT_COMPLETION_CAP, budget=None):
    """Legal tilings of the ball of `radius` about the origin that are invariant under `period`."""
    search = _PeriodicSearch(inst, period, radius, cap, budget or search_budget())
    search.run(Patch.empty(inst))
    logger.debug("periodic_completions %s r=%d nodes=%d found=%d",
                 period, radius, search.nodes, len(search.found))
    return EnumerationResult(
        completions=[search.found[k][0] for k in search.order],
        keys=[k.hex() for k in search.order],
        multiplicity=[search.found[k][1] for k in search.order],
        radius=radius,
        cap=cap,
        cap_exceeded=search.cap_exceeded,
        nodes=search.nodes,
    )


# -------------------------
# CANONICAL FORM
# -------------------------
def _records(patch, g):
    records = []
    for p in patch.placements:
        record = []
        for c in p.corners:
            sectors = tuple(sorted(g.sector(s) for s in c.sectors))
            record.append((g.vertex(c.vertex), sectors, c.arc.color, c.arc.length))
        records.append(record)
    return records


def canonical_form(patch):
    """Encoding invariant under translations and the lattice point group."""
    if not patch.placements:
        return b"()"
    best = None
    for g in symmetries(patch.inst.reflections):
        records = _records(patch, g)
        ox, oy = min(r[0] for record in records for r in record)
        shifted = tuple(sorted(
            tuple(sorted(((x - ox, y - oy), s, color, length) for (x, y), s, color, length in record))
            for record in records
        ))
        if best is None or shifted < best:
            best = shifted
    return repr(best).encode("utf-8")


# -------------------------
# DIAMOND COMPONENTS
# -------------------------
class ShapeTag(NamedTuple):
    kind: str
    m: int = 0
    n: int = 0
    detail: str = ""

    def __str__(self):
        if self.kind == "parallelogram":
            return f"parallelogram({self.m},{self.n})"
        if self.kind in ("biinfinite-strip", "semiinfinite-strip"):
            return f"{self.kind}({self.m})"
        if self.kind == "sector":
            return f"sector({self.detail})"
        return self.kind


class DiamondComponent(NamedTuple):
    pieces: tuple
    cells: frozenset
    shape_tag: Optional[ShapeTag] = None


def _component_graph(patch):
    graph = nx.Graph()
    lozenges = patch.lozenges()
    graph.add_nodes_from(lozenges)
    for i in lozenges:
        for c in patch.placements[i].cells:
            for nb in cell_neighbors(c):
                j = patch.owner.get(nb)
                if j is not None and j != i and patch.placements[j].kind == "lozenge":
                    graph.add_edge(i, j)
    return graph


def diamond_components(patch, tag=True):
    """Edge-connected components of the patch's lozenges."""
    graph = _component_graph(patch)
    components = []
    for nodes in nx.connected_components(graph):
        pieces = tuple(sorted(nodes))
        cells = frozenset(c for i in pieces for c in patch.placements[i].cells)
        components.append(DiamondComponent(pieces, cells))
    components.sort(key=lambda comp: min(comp.cells))
    if tag:
        components = [comp._replace(shape_tag=classify_component(comp, patch)) for comp in components]
    return components


def _runs(mask):
    """Maximal cyclic runs of set bits as (start, length); empty for a full mask."""
    if mask == FULL or mask == 0:
        return []
    start = next(s for s in range(UNITS) if not mask & (1 << s))
    runs = []
    run_start, length = None, 0
    for i in range(1, UNITS + 1):
        s = (start + i) % UNITS
        if mask & (1 << s):
            if run_start is None:
                run_start, length = s, 0
            length += 1
        elif run_start is not None:
            runs.append((run_start, length))
            run_start = None
    if run_start is not None:
        runs.append((run_start, length))
    return runs


def boundary_angles(comp):
    """(vertex, start sector, length) for every boundary angle of a component."""
    masks = {}
    for c in comp.cells:
        for v, s in zip(cell_vertices(c), cell_sectors(c)):
            masks[v] = masks.get(v, 0) | (1 << s)
    angles = []
    for v in sorted(masks):
        for start, length in _runs(masks[v]):
            angles.append((v, start, length))
    return angles


def touches_boundary(comp, window):
    return any(nb not in comp.cells and nb not in window.owner
               for c in comp.cells for nb in cell_neighbors(c))


def _parallelogram_tag(comp, angles):
    corners = [a for a in angles if a[2] in (1, 2)]
    count = len(comp.pieces)
    half = len(angles) // 2
    disc = half * half - 4 * count
    root = math.isqrt(max(disc, 0))
    m, n = (half - root) // 2, (half + root) // 2
    if len(corners) != 4 or disc < 0 or root * root != disc or m * n != count:
        raise ClassificationError(f"component of {count} lozenges is not a parallelogram")
    return ShapeTag("parallelogram", m, n)


def _open_tag(comp, window, complete, angles):
    """Tag of a component the window cuts, read from its complete boundary vertices only."""
    corners = component_corners(comp, window)
    undetermined = ShapeTag("finite-window-undetermined", detail=f"{len(corners)} visible corners")
    if not corners:
        lines = {line_through(v, start) for v, start, length in angles if length == 3 and v in complete}
        if not lines:
            if any(p.kind == "triangle" for p in window.placements):
                return undetermined
            return ShapeTag("plane")
        if len(lines) == 1:
            return ShapeTag("halfplane", detail=next(iter(lines))[0])
        if len(lines) == 2 and len({family for family, _ in lines}) == 1:
            (family, a), (_, b) = sorted(lines)
            return ShapeTag("biinfinite-strip", b - a, detail=family)
        return undetermined

    if len(corners) == 1 and not any(corners[0].closed):
        return ShapeTag("sector", detail="acute" if corners[0].angle == 1 else "obtuse")

    if len(corners) == 2 and {c.angle for c in corners} == {1, 2}:
        closed = [(c, i) for c in corners for i in (0, 1) if c.closed[i]]
        open_dirs = {c.side_direction(i) for c in corners for i in (0, 1) if not c.closed[i]}
        # both corners see the same closed side; the two open sides run parallel
        if (len(closed) == 2 and closed[0][0].vertex != closed[1][0].vertex
                and closed[0][1] != closed[1][1] and len(open_dirs) == 1):
            c, i = closed[0]
            family = line_through(c.vertex, c.side_direction(i))[0]
            return ShapeTag("semiinfinite-strip", c.sides[i], detail=family)
    return undetermined


def classify_component(comp, window):
    """Footprint tag of a component.

    Fully visible components are parallelograms. A component the window cuts is tagged from
    its complete boundary vertices: plane, halfplane, biinfinite-strip, semiinfinite-strip or
    sector, else finite-window-undetermined.
    """
    complete = window.complete_vertices()
    angles = boundary_angles(comp)
    for v, _, length in angles:
        if v in complete and length not in (1, 2, 3):
            raise ClassificationError(f"boundary angle of {length} units at {v}")
    if touches_boundary(comp, window):
        return _open_tag(comp, window, complete, angles)
    return _parallelogram_tag(comp, angles)


class CornerInfo(NamedTuple):
    vertex: tuple
    angle: int
    start: int
    sides: tuple  # visible length along each of the two sides
    closed: tuple = (False, False)  # side ends at another complete corner

    def side_direction(self, i):
        return (self.start + (self.angle if i else 0)) % UNITS


def _side_length(comp, window, vertex, direction, inner, outer, limit=12):
    dx, dy = DIRECTIONS[direction % UNITS]
    x, y = vertex
    length = 0
    while length < limit:
        a = (x + length * dx, y + length * dy)
        inner_cell, outer_cell = cell_at(a, inner), cell_at(a, outer)
        if inner_cell not in comp.cells or outer_cell in comp.cells or outer_cell not in window.owner:
            break
        length += 1
    return length


def component_corners(comp, window):
    """Acute and obtuse corners at complete vertices, with visible side lengths and closure."""
    complete = window.complete_vertices()
    found = []
    for v, start, length in boundary_angles(comp):
        if length not in (1, 2) or v not in complete:
            continue
        end = (start + length) % UNITS
        first = _side_length(comp, window, v, start, start, start - 1)
        second = _side_length(comp, window, v, end, end - 1, end)
        found.append(CornerInfo(v, length, start, (first, second)))
    at = {c.vertex for c in found}
    corners = []
    for c in found:
        closed = []
        for i, length in enumerate(c.sides):
            dx, dy = DIRECTIONS[c.side_direction(i)]
            end = (c.vertex[0] + length * dx, c.vertex[1] + length * dy)
            closed.append(length >= 1 and end in at)
        corners.append(c._replace(closed=tuple(closed)))
    return corners


def acute_turn(patch, vertex, sector, reference=1):
    """Which way the obtuse arc facing an acute corner leans: +1, -1, or None while unplaced.

    The acute corner sits on `sector` at `vertex`; the sign is read against its second side,
    or against the first with reference=0, so it survives reflections that swap the two.
    """
    for arc in patch.arcs_at(vertex):
        if arc.length != 2:
            continue
        offset = (arc.start - sector) % UNITS
        if offset in (2, 3):
            turn = 1 if offset == 3 else -1
            return turn if reference == 1 else -turn
    return None


def set_acute_turn(patch, vertex, sector, turn, reference=1):
    """patch with the obtuse arc that gives the acute corner at (vertex, sector) the turn `turn`."""
    if reference != 1:
        turn = -turn
    start = (sector + (3 if turn > 0 else 2)) % UNITS
    colors = {a.color for shape in patch.inst.shapes for a in shape.corners if a.length == 2}
    for color in sorted(colors):
        for p in placements_at_arc(patch.inst, vertex, PlacedArc(start, color, 2)):
            child = try_place(patch, p)
            if child is not None:
                return child
    raise ContradictionError(vertex, f"no obtuse arc gives turn {turn:+d} at {vertex}")


def period_keys(comp, patch, period):
    """Each piece of the component moved onto its representative under `period`."""
    keys = []
    for i in comp.pieces:
        p = patch.placements[i]
        first = min(p.cells)
        x, y = period.vertex((first.a, first.b))
        keys.append(translate_placement(p, x - first.a, y - first.b).key)
    return keys


def wraps(comp, patch, period):
    """True when two pieces of the component are translates of each other under `period`."""
    keys = period_keys(comp, patch, period)
    return len(set(keys)) < len(keys)


def strip_band_heights(comp, window):
    """Number of distinct bands per line family shared by every lozenge of the component."""
    bands = [lozenge_bands(window.placements[i].cells) for i in comp.pieces]
    heights = {}
    for family in FAMILIES:
        if bands and all(family in b for b in bands):
            heights[family] = len({b[family] for b in bands})
    return heights


# -------------------------
# FORWARD ANALYTIC BLOCKS
# -------------------------
class ForwardBlock(NamedTuple):
    patch: Any
    direction: Symmetry
    steps: tuple  # classes found at each forward step


def _row_key(cell):
    # six times the x coordinate of the centroid, in steps of 3 along a row
    a, b, up = cell
    return 6 * a + 3 * b + (3 if up else 6)


def forward_regions(patch, depth):
    """Cells of the block's rows lying 1..depth steps past its eastmost cell."""
    rows = {c.b for c in patch.owner}
    front = max(_row_key(c) for c in patch.owner)
    regions = []
    for k in range(1, depth + 1):
        region = set(patch.owner)
        for b in rows:
            lo = (front - 3 * b - 6) // 6
            hi = (front + 3 * k - 3 * b) // 6 + 1
            for a in range(lo, hi + 1):
                for up in (True, False):
                    c = Cell(a, b, up)
                    if front < _row_key(c) <= front + 3 * k:
                        region.add(c)
        regions.append(region)
    return regions


def grow_blocks(inst, max_cells, budget=None):
    """Connected legal patches with at most max_cells cells, one per isometry class."""
    budget = budget or search_budget()
    level = {}
    for seed in (Cell(0, 0, True), Cell(0, 0, False)):
        for p in placements_covering(inst, seed):
            patch = try_place(Patch.empty(inst), p)
            if patch is not None and len(patch.owner) <= max_cells:
                level.setdefault(canonical_form(patch), patch)
    found = dict(level)
    while level:
        nxt = {}
        for patch in level.values():
            frontier = {nb for c in patch.owner for nb in cell_neighbors(c)} - set(patch.owner)
            for cell in sorted(frontier):
                for p in placements_covering(inst, cell):
                    if len(patch.owner) + len(p.cells) > max_cells:
                        continue
                    child = try_place(patch, p)
                    if child is None:
                        continue
                    key = canonical_form(child)
                    if key not in found:
                        found[key] = child
                        nxt[key] = child
                        if len(found) > budget:
                            raise BudgetExceededError(budget, "block growth")
        level = nxt
    return sorted(found.values(), key=lambda p: (len(p.owner), canonical_form(p)))


def is_forward_analytic(patch, depth, budget=None):
    """Steps of forward growth with exactly one completion class, or None if some step branches."""
    steps = []
    for region in forward_regions(patch, depth):
        result = enumerate_completions(patch, region=region, cap=2, budget=budget)
        steps.append(result.count)
        if result.count != 1:
            return None
    return tuple(steps)


def find_forward_analytic_blocks(inst, max_cells=MAX_BLOCK_CELLS, depth=6, limit=None, budget=None):
    """Blocks whose growth towards one side is forced for `depth` steps, smallest first."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    blocks = grow_blocks(inst, max_cells, budget)
    logger.info("checking %d blocks of <= %d cells for forward analyticity", len(blocks), max_cells)
    found = []
    for block in tqdm(blocks, desc="forward blocks", disable=not SHOW_PROGRESS):
        for g in symmetries(inst.reflections):
            turned = transform_patch(block, g)
            try:
                steps = is_forward_analytic(turned, depth, budget)
            except BudgetExceededError:
                logger.warning("budget exhausted on a %d-cell block", len(block.owner))
                continue
            if steps is not None:
                found.append(ForwardBlock(turned, g, steps))
                break
        if limit is not None and len(found) >= limit:
            break
    return found


# -------------------------
# PATCH FILES
# -------------------------
def format_patch(patch):
    lines = []
    for p in patch.placements:
        a, b, up = p.cells[0]
        line = f"piece {p.shape} at {a},{b},{'up' if up else 'down'} rot={p.rot}"
        if p.flip:
            line += " flip"
        if p.axis is not None:
            line += f" axis={p.axis}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_patch(text, inst, check=True):
    placements = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) < 4 or tokens[0] != "piece" or tokens[2] != "at":
            raise InstanceSyntaxError(f"bad piece line {line!r}", line_no)
        try:
            shape = inst.shape(tokens[1])
        except KeyError:
            raise InstanceSyntaxError(f"unknown shape {tokens[1]!r}", line_no) from None
        try:
            a, b, orientation = tokens[3].split(",")
            cell = Cell(int(a), int(b), orientation == "up")
            if orientation not in ("up", "down"):
                raise ValueError(orientation)
        except ValueError:
            raise InstanceSyntaxError(f"bad cell {tokens[3]!r}", line_no) from None
        rot, flip, axis = 0, False, None
        for token in tokens[4:]:
            if token == "flip":
                flip = True
            elif token.startswith("rot="):
                rot = int(token[4:])
            elif token.startswith("axis="):
                axis = int(token[5:])
            else:
                raise InstanceSyntaxError(f"unknown field {token!r}", line_no)
        p = build_placement(shape, cell, rot, flip, axis)
        if p is None:
            raise InstanceSyntaxError("corner lengths do not fit the cell", line_no)
        placements.append(p)
    return Patch.from_placements(inst, placements, check=check)


def load_patch(path, inst, check=True):
    with open(path, "r", encoding="utf-8") as f:
        return parse_patch(f.read(), inst, check=check)


def save_patch(patch, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_patch(patch))


# -------------------------
# BUILDERS
# -------------------------
def lozenge_block(inst, rows, cols, origin=(0, 0), shape_name=None):
    """rows x cols block of U(a,b)+D(a,b) lozenges, acute corners on the first colour."""
    shape = _lozenge_shape(inst, shape_name)
    ox, oy = origin
    placements = []
    for b in range(oy, oy + rows):
        for a in range(ox, ox + cols):
            placements.append(diamond_at(inst, Cell(a, b, True), axis=1, shape=shape))
    return placements


def diamond_at(inst, cell, axis, shape=None):
    """The lozenge on cell and its axis neighbour whose acute corners are the 1-unit corners."""
    shape = shape or _lozenge_shape(inst)
    for rot in range(4):
        p = build_placement(shape, cell, rot, False, axis)
        if p is not None:
            return p
    raise PatchError(f"{shape.name} does not fit {cell}")


def _lozenge_shape(inst, name=None):
    for shape in inst.shapes:
        if shape.kind == "lozenge" and (name is None or shape.name == name):
            return shape
    raise PatchError("instance has no lozenge shape")


def collar(cells):
    """Cells across the boundary edges of a cell set."""
    cells = set(cells)
    return {nb for c in cells for nb in cell_neighbors(c)} - cells


if __name__ == "__main__":
    from instance_model_module import load_instance

    instance = load_instance()
    block = Patch.from_placements(instance, lozenge_block(instance, 2, 3))
    print("--- Patch engine ---")
    print(format_patch(block))
    for comp in diamond_components(block):
        print(f"  component of {len(comp.pieces)} lozenges: {comp.shape_tag}")
    print(f"forced moves: {len(forced_moves(block))}")
