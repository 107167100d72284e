# file: development_module.py
"""
Developments of a ring complex on the triangular lattice.

A development lays complex faces on lattice cells, optionally modulo a period
lattice. Neighbouring faces must share the complex edge carried by their common
lattice edge, with matching ends, and every lattice vertex must read a simple path of
its link (a simple full-turn cycle once all six cells are covered). Strip immersions,
cylinder search and flat tori are all searches over developments.
"""

from collections import defaultdict
from typing import List, NamedTuple, Optional, Tuple

from pydantic import BaseModel
from tqdm import tqdm

from classification_module import PuzzleWindow, classify_periodic
from config import (
    FLAT_WINDOW_RADIUS,
    MAX_CYLINDER_CIRCUMFERENCE,
    MAX_CYLINDER_HEIGHT,
    MAX_TORUS_PERIOD,
    SHOW_PROGRESS,
    get_logger,
    search_budget,
)
from errors_module import BudgetExceededError, InconsistentSpecError, PatchError
from instance_model_module import load_instance
from lattice_module import (
    DIRECTIONS,
    POINT_GROUP,
    Cell,
    Period,
    cell_neighbors,
    cell_vertices,
    cells_within,
    lozenge_polygon,
    period_family,
    translate_cell,
)
from patch_engine_module import Patch, canonical_form, placements_covering

logger = get_logger(__name__)


class _Free:
    """No identifications."""

    @staticmethod
    def vertex(v):
        return tuple(v)

    @staticmethod
    def cell(cell):
        return cell


FREE = _Free()


def _edge_key(period, p1, p2):
    """(reduced base vertex, direction 0..2) and the unreduced base."""
    d = (p2[0] - p1[0], p2[1] - p1[1])
    k = DIRECTIONS.index(d)
    if k < 3:
        return (period.vertex(p1), k), p1
    return (period.vertex(p2), k - 3), p2


# -------------------------
# PIECES
# -------------------------
class Piece(NamedTuple):
    """A complex face laid on lattice cells; polygon[i] is where face corner i lands."""
    face: int
    cells: tuple
    polygon: tuple


def face_pieces(X, cell):
    """Every way to lay a triangle or lozenge face of X with `cell` as primary cell."""
    pieces = []
    for face in X.faces:
        n = len(face.word)
        if face.kind == "triangle":
            shapes = [((cell,), cell_vertices(cell))]
        elif face.kind == "lozenge":
            shapes = []
            for nb in cell_neighbors(cell):
                shapes.append(((cell, nb), lozenge_polygon(cell, nb)))
        else:
            continue
        for cells, poly in shapes:
            for r in range(n):
                for flip in (False, True):
                    slots = [(r - i) % n if flip else (r + i) % n for i in range(n)]
                    if face.kind == "lozenge" and face.corners is not None:
                        # acute corners land on p and q, polygon slots 0 and 2
                        if any((face.corners[i].length == 1) != (slots[i] % 2 == 0)
                               for i in range(n)):
                            continue
                    pieces.append(Piece(face.index, cells, tuple(poly[j] for j in slots)))
    return pieces


# -------------------------
# DEVELOPMENTS
# -------------------------
class Development:
    """Faces laid so far. Updates return a new development or None when illegal."""

    __slots__ = ("X", "period", "pieces", "owner", "edges", "vmap")

    def __init__(self, X, period=None, pieces=(), owner=None, edges=None, vmap=None):
        self.X = X
        self.period = period or FREE
        self.pieces = tuple(pieces)
        self.owner = owner or {}
        self.edges = edges or {}
        self.vmap = vmap or {}

    def __len__(self):
        return len(self.pieces)

    def faces_used(self):
        return sorted({p.face for p in self.pieces})

    def germs_at(self, vertex):
        """Germs on the six rays out of a reduced vertex; None where no edge is laid."""
        germs = []
        for k, (dx, dy) in enumerate(DIRECTIONS):
            q = (vertex[0] + dx, vertex[1] + dy)
            key, base = _edge_key(self.period, vertex, q)
            record = self.edges.get(key)
            if record is None:
                germs.append(None)
                continue
            edge, tail_is_base, _ = record
            at_tail = tail_is_base if base == vertex else not tail_is_base
            germs.append((edge, "t" if at_tail else "h"))
        return germs

    def place(self, piece):
        period = self.period
        face = self.X.faces[piece.face]
        reduced = [period.cell(c) for c in piece.cells]
        if len(set(reduced)) != len(reduced) or any(c in self.owner for c in reduced):
            return None

        pid = len(self.pieces)
        edges = dict(self.edges)
        n = len(face.word)
        for i, use in enumerate(face.word):
            p1, p2 = piece.polygon[i], piece.polygon[(i + 1) % n]
            tail = p1 if use.forward else p2
            key, base = _edge_key(period, p1, p2)
            side = (face.index, i)
            record = edges.get(key)
            if record is None:
                edges[key] = (use.edge, tail == base, frozenset([side]))
                continue
            edge, tail_is_base, sides = record
            if edge != use.edge or tail_is_base != (tail == base) or side in sides or len(sides) >= 2:
                return None
            edges[key] = (edge, tail_is_base, sides | {side})

        vmap = dict(self.vmap)
        for i, corner in enumerate(piece.polygon):
            v = period.vertex(corner)
            target = self.X.corner_vertex(face, i)
            if vmap.setdefault(v, target) != target:
                return None

        owner = dict(self.owner)
        for c in reduced:
            owner[c] = pid
        dev = Development(self.X, self.period, self.pieces + (piece,), owner, edges, vmap)
        for v in {period.vertex(c) for c in piece.polygon}:
            germs = [g for g in dev.germs_at(v) if g is not None]
            if len(set(germs)) != len(germs):
                return None
        return dev


class _DevelopmentSearch:
    def __init__(self, X, region, period, allowed, cap, first_only, budget):
        self.X = X
        self.region = frozenset(region)
        self.period = period
        self.allowed = allowed
        self.cap = cap
        self.first_only = first_only
        self.budget = budget
        self.nodes = 0
        self.found = []

    def run(self):
        self._visit(Development(self.X, self.period), sorted(self.region))
        logger.debug("development search: %d nodes, %d found", self.nodes, len(self.found))
        return self.found

    def _done(self):
        if self.first_only and self.found:
            return True
        return self.cap is not None and len(self.found) >= self.cap

    def _visit(self, dev, order):
        if self._done():
            return
        cell = next((c for c in order if c not in dev.owner), None)
        if cell is None:
            self.found.append(dev)
            return
        for piece in face_pieces(self.X, cell):
            reduced = frozenset(self.period.cell(c) for c in piece.cells)
            if not reduced <= self.region:
                continue
            if self.allowed is not None and frozenset(piece.cells) not in self.allowed:
                continue
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceededError(self.budget, "development search")
            nxt = dev.place(piece)
            if nxt is not None:
                self._visit(nxt, order)
                if self._done():
                    return


def develop(X, region, period=None, allowed=None, cap=None, first_only=False, budget=None):
    """All developments covering `region` (reduced cells) by faces of X."""
    period = period or FREE
    search = _DevelopmentSearch(X, region, period, allowed, cap, first_only,
                                budget or search_budget())
    return search.run()


# -------------------------
# STRIPS
# -------------------------
class StripTemplate(NamedTuple):
    name: str
    length: int
    pieces: frozenset    # cell sets a single face must cover
    units: tuple         # (cells, origin) of each comparison unit

    @property
    def cells(self):
        return frozenset(c for piece in self.pieces for c in piece)


def diamond_strip(k):
    """k lozenges in a row, consecutive ones glued along parallel sides."""
    pieces = [frozenset({Cell(i, 0, True), Cell(i, 0, False)}) for i in range(k)]
    units = tuple((piece, (i, 0)) for i, piece in enumerate(pieces))
    return StripTemplate("diamond_strip", k, frozenset(pieces), units)


def triangle_strip(k):
    """k triangles alternating up and down along a row."""
    cells = [Cell(i // 2, 0, i % 2 == 0) for i in range(k)]
    units = tuple((frozenset(cells[2 * j:2 * j + 2]), (j, 0)) for j in range(k // 2))
    return StripTemplate("triangle_strip", k, frozenset(frozenset([c]) for c in cells), units)


TEMPLATES = {"diamond_strip": diamond_strip, "triangle_strip": triangle_strip}


def template(name, k):
    if name not in TEMPLATES:
        raise ValueError(f"unknown strip template {name!r}")
    if k < 1:
        raise ValueError("strip length must be at least 1")
    return TEMPLATES[name](k)


def _move(g, dx, dy):
    def move(v):
        x, y = g.vertex(v)
        return (x + dx, y + dy)
    return move


def template_symmetries(tmpl):
    """Lattice isometries mapping the template's pieces onto themselves."""
    cells = tmpl.cells
    anchor = min(cells)
    result = []
    for g in POINT_GROUP:
        image = {g.cell(c) for c in cells}
        low = min(image)
        if low.up != anchor.up:
            continue
        dx, dy = anchor.a - low.a, anchor.b - low.b
        move = _move(g, dx, dy)
        moved = frozenset(frozenset(translate_cell(g.cell(c), dx, dy) for c in piece)
                          for piece in tmpl.pieces)
        if moved == tmpl.pieces:
            result.append(move)
    return result


class StripEmbedding(NamedTuple):
    template: str
    length: int
    pieces: tuple   # (face, polygon) per laid face, sorted

    def faces(self):
        return [f for f, _ in self.pieces]


def _canonical_strip(dev, moves):
    best = None
    for move in moves:
        record = tuple(sorted((p.face, tuple(move(v) for v in p.polygon)) for p in dev.pieces))
        if best is None or record < best:
            best = record
    return best


def raw_immersions(X, tmpl, budget=None):
    """Every locally injective immersion of the template, without identifying symmetric ones."""
    return develop(X, tmpl.cells, allowed=tmpl.pieces, budget=budget)


def strip_immersions(X, template_name, k, budget=None):
    """Immersions of a length-k strip up to the template's symmetries."""
    tmpl = template(template_name, k)
    moves = template_symmetries(tmpl)
    seen = {}
    for dev in raw_immersions(X, tmpl, budget):
        key = _canonical_strip(dev, moves)
        seen.setdefault(key, StripEmbedding(tmpl.name, k, key))
    logger.info("%s of length %d: %d immersions", tmpl.name, k, len(seen))
    return [seen[key] for key in sorted(seen)]


class EmbeddabilityCertificate(BaseModel):
    template: str
    length: int
    immersions: int
    passed: bool
    witness: Optional[str] = None


def _unit_records(dev, tmpl):
    unit_of = {}
    for u, (cells, _) in enumerate(tmpl.units):
        for c in cells:
            unit_of[c] = u
    buckets = defaultdict(list)
    for p in dev.pieces:
        u = unit_of.get(p.cells[0])
        if u is None:
            continue
        ox, oy = tmpl.units[u][1]
        buckets[u].append((p.face, tuple((x - ox, y - oy) for x, y in p.polygon)))
    return [tuple(sorted(buckets[u])) for u in range(len(tmpl.units))]


def unique_embeddability_check(X, template_name, k, budget=None):
    """
    Whenever two immersions agree on one unit up to a shift along the strip, they
    must agree on every unit where both are defined.
    """
    tmpl = template(template_name, k)
    records = [_unit_records(dev, tmpl) for dev in raw_immersions(X, tmpl, budget)]
    index = defaultdict(list)
    for f, recs in enumerate(records):
        for u, rec in enumerate(recs):
            index[rec].append((f, u))

    checked = set()
    witness = None
    for g, recs in enumerate(records):
        for u, rec in enumerate(recs):
            for f, w in index[rec]:
                shift = w - u
                if (g, f, shift) in checked:
                    continue
                checked.add((g, f, shift))
                for m in range(len(recs)):
                    if 0 <= m + shift < len(recs) and recs[m] != records[f][m + shift]:
                        witness = (f"immersions {f} and {g} agree on unit {w} (shift {shift}) "
                                   f"but differ at unit {m + shift}")
                        break
                if witness:
                    break
            if witness:
                break
        if witness:
            break

    cert = EmbeddabilityCertificate(template=tmpl.name, length=k, immersions=len(records),
                                    passed=witness is None, witness=witness)
    if witness:
        logger.warning("unique embeddability fails for %s k=%d: %s", tmpl.name, k, witness)
    return cert


# -------------------------
# CYLINDERS
# -------------------------
class CylinderFinding(BaseModel):
    circumference: int
    height: int
    faces: List[int]
    pieces: int


class CylinderReport(BaseModel):
    max_circumference: int
    max_height: int
    findings: List[CylinderFinding] = []
    searched: List[Tuple[int, int]] = []
    budget_hits: List[Tuple[int, int]] = []

    @property
    def acylindrical_at_scale(self):
        return not self.findings and not self.budget_hits


def band_region(c, h):
    return {Cell(a, b, up) for a in range(c) for b in range(h) for up in (True, False)}


def cylinder_search(X, max_circumference=MAX_CYLINDER_CIRCUMFERENCE,
                    max_height=MAX_CYLINDER_HEIGHT, budget=None):
    """Closed bands of height h wrapping with circumference c, for every c and h in range."""
    report = CylinderReport(max_circumference=max_circumference, max_height=max_height)
    shapes = [(c, h) for h in range(1, max_height + 1) for c in range(1, max_circumference + 1)]
    for c, h in tqdm(shapes, desc="cylinders", disable=not SHOW_PROGRESS, leave=False):
        report.searched.append((c, h))
        try:
            found = develop(X, band_region(c, h), Period(c), first_only=True, budget=budget)
        except BudgetExceededError:
            logger.warning("cylinder search budget exhausted at c=%d h=%d", c, h)
            report.budget_hits.append((c, h))
            continue
        if found:
            dev = found[0]
            report.findings.append(CylinderFinding(circumference=c, height=h,
                                                   faces=dev.faces_used(), pieces=len(dev)))
    logger.info("cylinder search up to (%d, %d): %d findings",
                max_circumference, max_height, len(report.findings))
    return report


# -------------------------
# FLATS
# -------------------------
class FlatWindow(NamedTuple):
    period: Period
    window: PuzzleWindow
    classes: list


class FlatWindowReport(BaseModel):
    period: str
    classes: List[str]


def _instance_placement(inst, X, piece):
    face = X.faces[piece.face]
    wanted = {v: arc for v, arc in zip(piece.polygon, face.corners)}
    for p in placements_covering(inst, piece.cells[0]):
        if set(p.cells) != set(piece.cells):
            continue
        if {c.vertex: c.arc for c in p.corners} == wanted:
            return p
    raise InconsistentSpecError(f"face {piece.face} matches no instance shape where it is laid")


def unfold(dev, inst, radius=FLAT_WINDOW_RADIUS):
    """The periodic development read as a window about the origin."""
    period = dev.period
    placements = {}
    for cell in cells_within([(0, 0)], radius):
        reduced = period.cell(cell)
        piece = dev.pieces[dev.owner[reduced]]
        anchor = next(c for c in piece.cells if period.cell(c) == reduced)
        dx, dy = cell.a - anchor.a, cell.b - anchor.b
        moved = Piece(piece.face, tuple(Cell(c.a + dx, c.b + dy, c.up) for c in piece.cells),
                      tuple((x + dx, y + dy) for x, y in piece.polygon))
        p = _instance_placement(inst, dev.X, moved)
        placements.setdefault(p.key, p)
    patch = Patch.from_placements(inst, placements.values())
    return PuzzleWindow(patch, (0, 0), radius, None, period)


def flats_from_strips(X, k=MAX_TORUS_PERIOD, inst=None, per_period=2, budget=None):
    """Doubly periodic developments with periods up to k, unfolded and classified."""
    inst = inst or load_instance()
    flats = []
    seen = set()
    for period in tqdm(period_family(k), desc="flats", disable=not SHOW_PROGRESS, leave=False):
        region = band_region(period.c, period.h)
        try:
            devs = develop(X, region, period, cap=per_period, budget=budget)
        except BudgetExceededError:
            logger.warning("flat search budget exhausted at %s", period)
            continue
        for dev in devs:
            try:
                window = unfold(dev, inst)
            except (PatchError, InconsistentSpecError) as e:
                logger.warning("torus %s does not unfold to a legal window: %s", period, e)
                continue
            key = canonical_form(window.patch)
            if key in seen:
                continue
            seen.add(key)
            flats.append(FlatWindow(period, window, classify_periodic(window, period)))
    logger.info("flats up to period %d: %d distinct windows", k, len(flats))
    return flats


def flat_reports(flats):
    return [FlatWindowReport(period=str(f.period), classes=[str(m.type) for m in f.classes])
            for f in flats]

