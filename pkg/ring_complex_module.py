# file: ring_complex_module.py
"""
Coloured 2-complexes given by face boundary words.

A complex file lists faces as cyclic words of edge symbols. Edge ends are glued into
vertices by closing every boundary word, the link of each vertex is read off the face
corners, and the corner colouring can be solved against an instance when the file
leaves it out.
"""

import re
from collections import defaultdict
from typing import Dict, List, NamedTuple, Optional

import networkx as nx
from pydantic import BaseModel

from config import COLORING_CHOICE, EXPLICIT_COMPLEX_FILE, UNITS_PER_TURN, get_logger, search_budget
from errors_module import (
    AmbiguousSpecError,
    BudgetExceededError,
    ComplexSpecError,
    InconsistentSpecError,
)
from instance_model_module import Arc, canonical_ring, load_instance, rotations

logger = get_logger(__name__)

FACE_KINDS = {"triangle": 3, "lozenge": 4, "polygon": None}
PRIME_READINGS = ("inverse", "distinct")
SOLUTION_CAP = 256


# -------------------------
# FACES
# -------------------------
class EdgeUse(NamedTuple):
    edge: str
    forward: bool

    def __str__(self):
        return self.edge if self.forward else f"{self.edge}'"

    @property
    def start(self):
        return (self.edge, "t" if self.forward else "h")

    @property
    def end(self):
        return (self.edge, "h" if self.forward else "t")


class Face(NamedTuple):
    """Corner i sits where side i starts."""
    index: int
    kind: str
    word: tuple
    corners: Optional[tuple] = None
    line: Optional[int] = None

    def with_corners(self, corners):
        return self._replace(corners=tuple(corners))


class LinkCycle(NamedTuple):
    vertex: str
    arcs: tuple   # (face, corner) keys in traversal order
    word: tuple   # Arc per traversed corner

    @property
    def length(self):
        return sum(a.length for a in self.word)

    def __str__(self):
        return " ".join(f"{a.color}:{a.length}" for a in self.word)


# -------------------------
# COMPLEX
# -------------------------
class RingComplexData:
    """Vertices, edges with end vertices, and coloured faces. Immutable after build."""

    def __init__(self, vertices, edge_ends, faces, primes="inverse", source="<text>",
                 colourings=1, choice=0, truncated=False):
        self.vertices = tuple(vertices)
        self.edge_ends = dict(edge_ends)
        self.faces = tuple(faces)
        self.primes = primes
        self.source = source
        self.colourings = colourings
        self.choice = choice
        self.truncated = truncated

    def __repr__(self):
        return (f"RingComplexData({len(self.vertices)} vertices, {len(self.edge_ends)} edges, "
                f"{len(self.triangles)} triangles, {len(self.lozenges)} lozenges)")

    @property
    def triangles(self):
        return [f for f in self.faces if f.kind == "triangle"]

    @property
    def lozenges(self):
        return [f for f in self.faces if f.kind == "lozenge"]

    @property
    def coloured(self):
        return all(f.corners is not None for f in self.faces)

    def germ_vertex(self, germ):
        tail, head = self.edge_ends[germ[0]]
        return tail if germ[1] == "t" else head

    def corner_vertex(self, face, i):
        return self.germ_vertex(face.word[i].start)

    def germs_at(self, v):
        germs = []
        for edge in sorted(self.edge_ends):
            tail, head = self.edge_ends[edge]
            if tail == v:
                germs.append((edge, "t"))
            if head == v:
                germs.append((edge, "h"))
        return germs

    def corners_at(self, v):
        return [(f, i) for f in self.faces for i in range(len(f.word))
                if self.corner_vertex(f, i) == v]

    def summary(self):
        return ComplexBuildReport(
            vertices=len(self.vertices), edges=len(self.edge_ends),
            triangles=len(self.triangles), lozenges=len(self.lozenges),
            other_faces=len(self.faces) - len(self.triangles) - len(self.lozenges),
            primes=self.primes, colourings=self.colourings, choice=self.choice,
            truncated=self.truncated)


class ComplexBuildReport(BaseModel):
    vertices: int
    edges: int
    triangles: int
    lozenges: int
    other_faces: int = 0
    primes: str
    colourings: int
    choice: int
    truncated: bool = False


# -------------------------
# PARSING
# -------------------------
_SYMBOL_RE = re.compile(r"^([A-Za-z_][\w]*)('?)$")
_ARC_RE = re.compile(r"^([A-Za-z_][\w-]*):(\d+)$")


def _edge_use(token, primes, line_no):
    match = _SYMBOL_RE.match(token)
    if not match:
        raise ComplexSpecError(f"bad edge symbol {token!r}", line_no)
    name, prime = match.groups()
    if primes == "distinct":
        return EdgeUse(name + prime, True)
    return EdgeUse(name, not prime)


def _colours(spec, line_no):
    arcs = []
    for token in spec.split(","):
        match = _ARC_RE.match(token.strip())
        if not match:
            raise ComplexSpecError(f"bad colour token {token!r}", line_no)
        arcs.append(Arc(match.group(1), int(match.group(2))))
    return tuple(arcs)


def _check_corner_lengths(kind, corners, line_no):
    lengths = [a.length for a in corners]
    if kind == "triangle" and lengths != [1, 1, 1]:
        raise InconsistentSpecError(f"triangle corners must be 1 unit each, got {lengths}", line_no)
    if kind == "lozenge" and lengths not in ([1, 2, 1, 2], [2, 1, 2, 1]):
        raise InconsistentSpecError(f"lozenge corners must alternate 1 and 2 units, got {lengths}",
                                    line_no)


def parse_faces(text, primes=None):
    """Face list and prime reading of a complex file. `primes` overrides the file option."""
    option = None
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *rest = line.split()
        if keyword == "option":
            for token in rest:
                key, _, value = token.partition("=")
                if key != "primes" or value not in PRIME_READINGS:
                    raise ComplexSpecError(f"unknown option {token!r}", line_no)
                option = value
        elif keyword in FACE_KINDS:
            symbols = [t for t in rest if "=" not in t]
            fields = dict(t.split("=", 1) for t in rest if "=" in t)
            unknown = set(fields) - {"colors"}
            if unknown:
                raise ComplexSpecError(f"unknown field {sorted(unknown)[0]!r}", line_no)
            arity = FACE_KINDS[keyword]
            if arity is not None and len(symbols) != arity:
                raise ComplexSpecError(f"{keyword} needs {arity} edges, got {len(symbols)}", line_no)
            if len(symbols) < 2:
                raise ComplexSpecError("a face needs at least two edges", line_no)
            rows.append((keyword, symbols, fields.get("colors"), line_no))
        else:
            raise ComplexSpecError(f"unknown keyword {keyword!r}", line_no)

    primes = primes or option or "inverse"
    if primes not in PRIME_READINGS:
        raise ComplexSpecError(f"unknown prime reading {primes!r}")

    faces = []
    for kind, symbols, colour_spec, line_no in rows:
        word = tuple(_edge_use(s, primes, line_no) for s in symbols)
        corners = None
        if colour_spec is not None:
            corners = _colours(colour_spec, line_no)
            if len(corners) != len(word):
                raise ComplexSpecError(f"{len(word)} edges but {len(corners)} colours", line_no)
            _check_corner_lengths(kind, corners, line_no)
        faces.append(Face(len(faces), kind, word, corners, line_no))
    return faces, primes


def _resolve_vertices(faces):
    """Glue edge ends so every boundary word closes; returns (vertex names, edge ends)."""
    ends = nx.Graph()
    for face in faces:
        for use in face.word:
            ends.add_nodes_from([(use.edge, "t"), (use.edge, "h")])
        n = len(face.word)
        for i, use in enumerate(face.word):
            nxt = face.word[(i + 1) % n]
            if use.edge == nxt.edge and use.forward != nxt.forward:
                raise InconsistentSpecError(
                    f"face word backtracks on edge {use.edge!r}", face.line)
            ends.add_edge(use.end, nxt.start)

    components = sorted((sorted(c) for c in nx.connected_components(ends)), key=lambda c: c[0])
    name_of = {}
    names = []
    for k, comp in enumerate(components):
        name = f"v{k}"
        names.append(name)
        for germ in comp:
            name_of[germ] = name
    edge_ends = {e: (name_of[(e, "t")], name_of[(e, "h")])
                 for e in sorted({germ[0] for germ in name_of})}
    return names, edge_ends


def parse_complex(text, primes=None, source="<text>"):
    """Complex structure only; faces keep whatever colours the file gives."""
    faces, primes = parse_faces(text, primes)
    vertices, edge_ends = _resolve_vertices(faces)
    X = RingComplexData(vertices, edge_ends, faces, primes, source)
    logger.debug("parsed %r from %s", X, source)
    return X


def build_complex(text, inst=None, primes=None, choice=COLORING_CHOICE, strict=False,
                  source="<text>", budget=None):
    """
    Parse a complex and colour its corners. Faces without colours get the colouring
    that passes the type check; all passing colourings are counted and `choice`
    picks one of them.
    """
    X = parse_complex(text, primes, source)
    if X.coloured:
        return X
    inst = inst or load_instance()
    solutions, truncated = solve_colouring(X, inst, budget=budget)
    if not solutions:
        raise InconsistentSpecError("no corner colouring passes the type check")
    if strict and len(solutions) > 1:
        raise AmbiguousSpecError(f"{len(solutions)} corner colourings pass the type check")
    if len(solutions) > 1:
        logger.info("%d corner colourings pass; using choice %d", len(solutions), choice)
    if not 0 <= choice < len(solutions):
        raise ComplexSpecError(f"colouring choice {choice} out of range 0..{len(solutions) - 1}")
    faces = solutions[choice]
    return RingComplexData(X.vertices, X.edge_ends, faces, X.primes, source,
                           colourings=len(solutions), choice=choice, truncated=truncated)


def load_complex(path=None, inst=None, primes=None, choice=COLORING_CHOICE, colour=True):
    path = path or EXPLICIT_COMPLEX_FILE
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    if not colour:
        return parse_complex(text, primes, source=str(path))
    return build_complex(text, inst, primes, choice, source=str(path))


def format_complex(X):
    """Complex file text with explicit colours; parse_complex reads it back."""
    lines = [f"option primes={X.primes}"]
    for face in X.faces:
        symbols = []
        for use in face.word:
            if X.primes == "distinct":
                symbols.append(use.edge)
            else:
                symbols.append(str(use))
        line = f"{face.kind} {' '.join(symbols)}"
        if face.corners is not None:
            line += " colors=" + ",".join(f"{a.color}:{a.length}" for a in face.corners)
        lines.append(line)
    return "\n".join(lines) + "\n"


# -------------------------
# LINKS
# -------------------------
def link(X, v):
    """Link multigraph at v: nodes are edge germs, one arc per face corner."""
    if v not in X.vertices:
        raise KeyError(f"no vertex {v!r}")
    graph = nx.MultiGraph(vertex=v)
    graph.add_nodes_from(X.germs_at(v))
    for face, i in X.corners_at(v):
        n = len(face.word)
        incoming = face.word[(i - 1) % n].end
        outgoing = face.word[i].start
        arc = face.corners[i] if face.corners is not None else None
        graph.add_edge(incoming, outgoing, key=(face.index, i), face=face.index, corner=i,
                       color=arc.color if arc else None, length=arc.length if arc else None)
    return graph


def simple_cycles(graph, limit, weight):
    """
    Simple cycles of total weight <= limit in a multigraph, each once, as tuples of
    (node, next node, key). Parallel arcs give 2-cycles.
    """
    order = {n: k for k, n in enumerate(sorted(graph.nodes))}
    found = {}

    def walk(start, node, total, path, used, visited):
        for _, nxt, key, data in graph.edges(node, keys=True, data=True):
            if key in used:
                continue
            t = total + weight(data)
            if t > limit:
                continue
            step = (node, nxt, key)
            if nxt == start:
                cycle = path + (step,)
                found.setdefault(frozenset(k for _, _, k in cycle), cycle)
            elif order[nxt] > order[start] and nxt not in visited:
                walk(start, nxt, t, path + (step,), used | {key}, visited | {nxt})

    for start in sorted(graph.nodes):
        walk(start, start, 0, (), frozenset(), frozenset([start]))
    return [found[k] for k in sorted(found, key=lambda s: sorted(s))]


def _link_cycles(X, v):
    if not X.coloured:
        raise ComplexSpecError("rings need a coloured complex")
    for cycle in simple_cycles(link(X, v), UNITS_PER_TURN, lambda d: d["length"]):
        keys = tuple(k for _, _, k in cycle)
        yield LinkCycle(v, keys, tuple(X.faces[f].corners[i] for f, i in keys))


def rings_at(X, v):
    """Simple link cycles at v of exactly one full turn."""
    return [c for c in _link_cycles(X, v) if c.length == UNITS_PER_TURN]


def short_cycles_at(X, v):
    """Simple link cycles at v shorter than a full turn (girth defects)."""
    return [c for c in _link_cycles(X, v) if c.length < UNITS_PER_TURN]


def ring_words(X, v, reflections=True):
    """Distinct rings at v up to coloured isometry."""
    return {canonical_ring(c.word, reflections) for c in rings_at(X, v)}


# -------------------------
# TYPE AND GIRTH
# -------------------------
class TypeCheckReport(BaseModel):
    passed: bool
    bad_faces: List[str] = []
    bad_rings: List[str] = []
    rings_per_vertex: Dict[str, int] = {}
    short_cycles: List[str] = []
    ringless: List[str] = []


def _shape_words(inst):
    return {(s.kind, canonical_ring(s.corners, inst.reflections)) for s in inst.shapes}


def check_type(X, inst):
    """Every face a shape of the instance and every full-turn link cycle one of its rings."""
    shapes = _shape_words(inst)
    bad_faces = []
    for face in X.faces:
        if face.corners is None:
            bad_faces.append(f"face {face.index} has no colours")
            continue
        if (face.kind, canonical_ring(face.corners, inst.reflections)) not in shapes:
            word = " ".join(str(a) for a in face.corners)
            bad_faces.append(f"face {face.index} ({face.kind} {word}) is not an instance shape")

    bad_rings = []
    short = []
    ringless = []
    counts = {}
    if X.coloured:
        for v in X.vertices:
            cycles = rings_at(X, v)
            counts[v] = len(cycles)
            if not cycles:
                ringless.append(v)
            for c in cycles:
                if inst.ring_name_of(c.word) is None:
                    bad_rings.append(f"{v}: {c}")
            short.extend(f"{v}: {c}" for c in short_cycles_at(X, v))

    passed = not (bad_faces or bad_rings or short or ringless)
    report = TypeCheckReport(passed=passed, bad_faces=bad_faces, bad_rings=bad_rings,
                             rings_per_vertex=counts, short_cycles=short, ringless=ringless)
    if report.passed:
        logger.info("type check passed on %r", X)
    else:
        logger.warning("type check failed: %d faces, %d rings, %d short cycles, %d ringless vertices",
                       len(bad_faces), len(bad_rings), len(short), len(ringless))
    return report


class GirthReport(BaseModel):
    girth: Dict[str, Optional[int]]
    npc: bool


def link_girth(graph):
    """Least total length of a simple cycle, or None for a forest."""
    best = None
    for u, w, key, data in graph.edges(keys=True, data=True):
        if u == w:
            length = data["length"]
        else:
            rest = nx.Graph()
            rest.add_nodes_from(graph.nodes)
            for a, b, k, d in graph.edges(keys=True, data=True):
                if k == key:
                    continue
                if rest.has_edge(a, b):
                    rest[a][b]["length"] = min(rest[a][b]["length"], d["length"])
                else:
                    rest.add_edge(a, b, length=d["length"])
            try:
                length = data["length"] + nx.shortest_path_length(rest, u, w, weight="length")
            except nx.NetworkXNoPath:
                continue
        if best is None or length < best:
            best = length
    return best


def girth_check(X):
    girth = {v: link_girth(link(X, v)) for v in X.vertices}
    npc = all(g is None or g >= UNITS_PER_TURN for g in girth.values())
    return GirthReport(girth=girth, npc=npc)


# -------------------------
# CORNER COLOURING
# -------------------------
def _face_candidates(face, inst):
    if face.corners is not None:
        return [face.corners]
    words = set()
    for shape in inst.shapes:
        if shape.kind != face.kind:
            continue
        words.update(rotations(shape.corners))
        if inst.reflections:
            words.update(rotations(tuple(reversed(shape.corners))))
    return sorted(w for w in words if len(w) == len(face.word))


def _variable_order(X):
    """Uncoloured faces, lozenges first, each group by the first vertex they touch."""
    rank = {v: k for k, v in enumerate(X.vertices)}

    def first_vertex(face):
        return min(rank[X.corner_vertex(face, i)] for i in range(len(face.word)))

    todo = [f for f in X.faces if f.corners is None]
    return sorted(todo, key=lambda f: (f.kind != "lozenge", first_vertex(f), f.index))


def solve_colouring(X, inst, cap=SOLUTION_CAP, budget=None):
    """
    Corner colourings of the uncoloured faces under which every face is an instance
    shape and every full-turn link cycle is an instance ring.
    Returns (list of face tuples, truncated flag).
    """
    budget = budget or search_budget()
    order = _variable_order(X)
    position = {f.index: k for k, f in enumerate(order)}
    candidates = {f.index: _face_candidates(f, inst) for f in order}
    for f in order:
        if not candidates[f.index]:
            raise InconsistentSpecError(f"no instance shape fits {f.kind} face {f.index}", f.line)

    # link cycles short enough to be a full turn, triggered once their last face is set
    triggers = defaultdict(list)
    fixed_checks = []
    for v in X.vertices:
        for cycle in simple_cycles(link(X, v), UNITS_PER_TURN, lambda d: 1):
            keys = tuple(k for _, _, k in cycle)
            pending = [position[f] for f, _ in keys if f in position]
            if pending:
                triggers[max(pending)].append(keys)
            else:
                fixed_checks.append(keys)

    corners = {f.index: f.corners for f in X.faces}

    def cycle_ok(keys):
        word = tuple(corners[f][i] for f, i in keys)
        total = sum(a.length for a in word)
        if total > UNITS_PER_TURN:
            return True
        # a cycle under a full turn breaks the link girth
        return total == UNITS_PER_TURN and inst.ring_name_of(word) is not None

    if not all(cycle_ok(k) for k in fixed_checks):
        return [], False

    solutions = []
    nodes = 0

    def assign(k):
        nonlocal nodes
        if len(solutions) >= cap:
            return
        if k == len(order):
            solutions.append(tuple(f.with_corners(corners[f.index]) for f in X.faces))
            return
        face = order[k]
        for word in candidates[face.index]:
            nodes += 1
            if nodes > budget:
                raise BudgetExceededError(budget, "corner colouring")
            corners[face.index] = word
            if all(cycle_ok(keys) for keys in triggers[k]):
                assign(k + 1)
        corners[face.index] = None

    assign(0)
    truncated = len(solutions) >= cap
    logger.debug("colouring search: %d nodes, %d solutions", nodes, len(solutions))
    return solutions, truncated


def isolated_flats_note():
    return ("The isolated flats property is not certified: no finite check for it is "
            "implemented, so it stays unverified.")
