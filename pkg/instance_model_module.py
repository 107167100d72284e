# file: instance_model_module.py

import re
from collections import defaultdict
from functools import cached_property, lru_cache
from typing import NamedTuple, Optional

from pydantic import BaseModel

from config import DEFAULT_INSTANCE_FILE, UNITS_PER_TURN, get_logger
from errors_module import (
    DuplicateRingError,
    InstanceSyntaxError,
    RingLengthError,
    UnknownColorError,
)

logger = get_logger(__name__)

SHAPE_KINDS = ("triangle", "lozenge")


# -------------------------
# VALUE TYPES
# -------------------------
class Arc(NamedTuple):
    color: str
    length: int

    def __str__(self):
        return f"{self.color}:{self.length}"


class PlacedArc(NamedTuple):
    """An arc sitting on the 6-unit circle, starting at sector `start`."""
    start: int
    color: str
    length: int

    def sectors(self):
        return tuple((self.start + i) % UNITS_PER_TURN for i in range(self.length))


class ColoredShape(NamedTuple):
    name: str
    kind: str
    corners: tuple

    @property
    def total_angle(self):
        return sum(c.length for c in self.corners)


class Ring(NamedTuple):
    name: str
    word: tuple

    @property
    def length(self):
        return sum(a.length for a in self.word)

    def __str__(self):
        return " ".join(a.color for a in self.word)


class RingEmbedding(NamedTuple):
    ring: str
    reflected: bool
    offset: int
    arcs: frozenset


# -------------------------
# CANONICAL WORDS
# -------------------------
def rotations(word):
    word = tuple(word)
    return [word[i:] + word[:i] for i in range(len(word))] or [word]


def canonical_ring(word, reflections=True):
    """Least rotation (and reflection unless orientation matters) of a cyclic word."""
    candidates = rotations(word)
    if reflections:
        candidates += rotations(tuple(reversed(tuple(word))))
    return min(candidates)


def place_word(word, offset):
    """Lay a cyclic arc word on the circle starting at sector `offset`."""
    placed = []
    position = offset
    for arc in word:
        placed.append(PlacedArc(position % UNITS_PER_TURN, arc.color, arc.length))
        position += arc.length
    return frozenset(placed)


# -------------------------
# INSTANCE
# -------------------------
class Instance:
    """Prescribed shapes and rings of a ring-puzzle problem. Immutable after parsing."""

    def __init__(self, palette, shapes, rings, orientation_sensitive=False,
                 declared_lengths=None, source="<memory>"):
        self.palette = tuple(palette)
        self.shapes = tuple(shapes)
        self.rings = tuple(rings)
        self.orientation_sensitive = bool(orientation_sensitive)
        self.declared_lengths = dict(declared_lengths or {})
        self.source = source

    def __repr__(self):
        return (f"Instance({len(self.shapes)} shapes, {len(self.rings)} rings, "
                f"theta0={self.theta0})")

    @property
    def reflections(self):
        return not self.orientation_sensitive

    def shape(self, name):
        for shape in self.shapes:
            if shape.name == name:
                return shape
        raise KeyError(name)

    def ring(self, name):
        for ring in self.rings:
            if ring.name == name:
                return ring
        raise KeyError(name)

    @cached_property
    def theta0(self):
        return compute_theta0(self)

    @cached_property
    def ring_placements(self):
        """Every ring laid on the circle at every offset, deduplicated."""
        seen = set()
        result = []
        for ring in self.rings:
            words = [(False, ring.word)]
            if self.reflections:
                words.append((True, tuple(reversed(ring.word))))
            for reflected, word in words:
                for offset in range(UNITS_PER_TURN):
                    arcs = place_word(word, offset)
                    key = (ring.name, arcs)
                    if key in seen:
                        continue
                    seen.add(key)
                    result.append(RingEmbedding(ring.name, reflected, offset, arcs))
        return tuple(result)

    @cached_property
    def canonical_rings(self):
        return {canonical_ring(r.word, self.reflections): r.name for r in self.rings}

    def ring_name_of(self, word):
        """Name of the instance ring equal to `word` up to coloured isometry, else None."""
        return self.canonical_rings.get(canonical_ring(word, self.reflections))

    @cached_property
    def corner_index(self):
        index = defaultdict(list)
        for shape in self.shapes:
            for i, corner in enumerate(shape.corners):
                index[corner].append((shape.name, i))
        return dict(index)

    def corner_candidates(self, color, length):
        return list(self.corner_index.get(Arc(color, length), []))

    def embeds(self, partial):
        return _cached_embeds(self, frozenset(partial))


@lru_cache(maxsize=200_000)
def _cached_embeds(inst, partial):
    return tuple(e for e in inst.ring_placements if partial <= e.arcs)


# -------------------------
# PARSING
# -------------------------
_ARC_RE = re.compile(r"^([A-Za-z_][\w-]*):(\d+)$")


def _parse_arcs(spec, palette, line_no):
    arcs = []
    for token in spec.split(","):
        token = token.strip()
        match = _ARC_RE.match(token)
        if not match:
            raise InstanceSyntaxError(f"bad arc token {token!r}", line_no)
        color, length = match.group(1), int(match.group(2))
        if color not in palette:
            raise UnknownColorError(f"unknown color {color!r}", line_no)
        arcs.append(Arc(color, length))
    return tuple(arcs)


def _parse_fields(tokens, line_no):
    fields = {}
    for token in tokens:
        if "=" not in token:
            raise InstanceSyntaxError(f"expected key=value, got {token!r}", line_no)
        key, value = token.split("=", 1)
        fields[key] = value
    return fields


def parse_instance(text, source="<text>"):
    """Parse instance-file text into an Instance."""
    palette = []
    declared = {}
    shapes = []
    rings = []
    options = {"orientation_sensitive": "false"}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, *rest = line.split()

        if keyword == "color":
            if not rest:
                raise InstanceSyntaxError("color needs a name", line_no)
            name = rest[0]
            if name in palette:
                raise InstanceSyntaxError(f"color {name!r} declared twice", line_no)
            palette.append(name)
            fields = _parse_fields(rest[1:], line_no)
            if "length" in fields:
                declared[name] = int(fields["length"])

        elif keyword == "shape":
            if len(rest) < 3:
                raise InstanceSyntaxError("shape needs a name, kind= and corners=", line_no)
            fields = _parse_fields(rest[1:], line_no)
            kind = fields.get("kind")
            if kind not in SHAPE_KINDS:
                raise InstanceSyntaxError(f"unknown shape kind {kind!r}", line_no)
            corners = _parse_arcs(fields.get("corners", ""), palette, line_no)
            expected = 3 if kind == "triangle" else 4
            if len(corners) != expected:
                raise InstanceSyntaxError(f"{kind} needs {expected} corners", line_no)
            shapes.append(ColoredShape(rest[0], kind, corners))

        elif keyword == "ring":
            if len(rest) < 2:
                raise InstanceSyntaxError("ring needs a name and word=", line_no)
            fields = _parse_fields(rest[1:], line_no)
            word = _parse_arcs(fields.get("word", ""), palette, line_no)
            total = sum(a.length for a in word)
            if total != UNITS_PER_TURN:
                raise RingLengthError(f"ring length ≠ 2π ({total} units)", line_no)
            rings.append((Ring(rest[0], word), line_no))

        elif keyword == "option":
            fields = _parse_fields(rest, line_no)
            for key, value in fields.items():
                if key != "orientation_sensitive":
                    raise InstanceSyntaxError(f"unknown option {key!r}", line_no)
                if value.lower() not in ("true", "false"):
                    raise InstanceSyntaxError(f"option {key} expects true/false", line_no)
                options[key] = value.lower()

        else:
            raise InstanceSyntaxError(f"unknown keyword {keyword!r}", line_no)

    orientation_sensitive = options["orientation_sensitive"] == "true"
    seen = {}
    for ring, line_no in rings:
        key = canonical_ring(ring.word, not orientation_sensitive)
        if key in seen:
            raise DuplicateRingError(
                f"duplicate ring {ring.name!r} (same as {seen[key]!r})", line_no)
        seen[key] = ring.name

    inst = Instance(palette, shapes, [r for r, _ in rings], orientation_sensitive,
                    declared, source)
    logger.debug("parsed %s from %s", inst, source)
    return inst


def load_instance(path=None):
    path = path or DEFAULT_INSTANCE_FILE
    with open(path, "r", encoding="utf-8") as f:
        return parse_instance(f.read(), source=str(path))


# -------------------------
# VALIDATION
# -------------------------
class CheckResult(BaseModel):
    name: str
    passed: bool
    severity: str = "error"  # error | warning
    detail: str = ""


class ValidationReport(BaseModel):
    checks: list[CheckResult]

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.severity == "error")

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def warnings(self):
        return [c for c in self.checks if c.severity == "warning" and not c.passed]


def _all_arcs(inst):
    for shape in inst.shapes:
        for corner in shape.corners:
            yield f"shape {shape.name}", corner
    for ring in inst.rings:
        for arc in ring.word:
            yield f"ring {ring.name}", arc


def validate_instance(inst):
    """Report-valued structural checks on an instance."""
    checks = []

    # arc-length rule: each colour keeps one length, 1 or 2 units, as declared
    lengths = defaultdict(set)
    problems = []
    for where, arc in _all_arcs(inst):
        lengths[arc.color].add(arc.length)
        declared = inst.declared_lengths.get(arc.color)
        if declared is not None and declared != arc.length:
            problems.append(f"{where}: {arc} but {arc.color} is declared length {declared}")
        if arc.length not in (1, 2):
            problems.append(f"{where}: arc {arc} outside 1..2 units")
    for color, seen in lengths.items():
        if len(seen) > 1:
            problems.append(f"color {color} used with lengths {sorted(seen)}")
    checks.append(CheckResult(name="arc_length_rule", passed=not problems,
                              detail="; ".join(problems)))

    # shape corner sums and angle patterns
    problems = []
    for shape in inst.shapes:
        n = len(shape.corners)
        if shape.total_angle != (n - 2) * 3:
            problems.append(f"{shape.name}: corners sum to {shape.total_angle} units")
        pattern = tuple(c.length for c in shape.corners)
        if shape.kind == "triangle" and pattern != (1, 1, 1):
            problems.append(f"{shape.name}: triangle corners must be 1 unit each")
        if shape.kind == "lozenge" and pattern not in ((1, 2, 1, 2), (2, 1, 2, 1)):
            problems.append(f"{shape.name}: lozenge corners must alternate 1,2")
    checks.append(CheckResult(name="shape_corner_sums", passed=not problems,
                              detail="; ".join(problems)))

    # every ring arc is some shape corner
    problems = []
    for ring in inst.rings:
        for arc in ring.word:
            if arc not in inst.corner_index:
                problems.append(f"ring {ring.name}: {arc} is no shape corner")
    checks.append(CheckResult(name="ring_arcs_realizable", passed=not problems,
                              detail="; ".join(problems)))

    # corner identification (warning only)
    ambiguous = []
    for arc, owners in sorted(inst.corner_index.items()):
        shapes = {name for name, _ in owners}
        if len(shapes) > 1:
            ambiguous.append(f"{arc} -> {sorted(shapes)}")
    checks.append(CheckResult(name="corner_identification", passed=not ambiguous,
                              severity="warning", detail="; ".join(ambiguous)))

    report = ValidationReport(checks=checks)
    for c in report.checks:
        if not c.passed:
            logger.info("instance check %s failed: %s", c.name, c.detail)
    return report


# -------------------------
# EXTENSION THRESHOLD
# -------------------------
def _is_palindrome(word):
    return tuple(word) == tuple(reversed(tuple(word)))


def completion_table(inst):
    """Map every simplicial arc word to the set of its ring completions."""
    table = defaultdict(set)
    for ring in inst.rings:
        readings = [ring.word]
        if inst.reflections:
            readings.append(tuple(reversed(ring.word)))
        for reading in readings:
            for rotated in rotations(reading):
                for k in range(1, len(rotated) + 1):
                    word, rest = rotated[:k], rotated[k:]
                    if inst.reflections and _is_palindrome(word):
                        rest = min(rest, tuple(reversed(rest)))
                    table[word].add(rest)
    return table


def compute_theta0(inst):
    """Largest length of an arc word with two inequivalent ring completions."""
    theta0 = 0
    for word, completions in completion_table(inst).items():
        if len(completions) > 1:
            theta0 = max(theta0, sum(a.length for a in word))
    return theta0


# -------------------------
# PARTIAL EMBEDDING
# -------------------------
def ring_embeds(inst, partial):
    """All ring placements containing the partial arc arrangement."""
    arcs = frozenset(PlacedArc(*a) for a in partial)
    covered = []
    for arc in arcs:
        covered.extend(arc.sectors())
    if len(covered) != len(set(covered)):
        raise ValueError("partial arcs overlap")
    return sorted(inst.embeds(arcs), key=lambda e: (e.ring, e.reflected, e.offset))


if __name__ == "__main__":
    instance = load_instance()
    print("--- Instance ---")
    print(f"Source: {instance.source}")
    for s in instance.shapes:
        print(f"  shape {s.name:<9} {' '.join(str(c) for c in s.corners)}")
    for r in instance.rings:
        print(f"  ring  {r.name:<9} {r}")
    print(f"theta0 = {instance.theta0} units")
    for check in validate_instance(instance).checks:
        status = "PASS" if check.passed else ("WARN" if check.severity == "warning" else "FAIL")
        print(f"  [{status}] {check.name} {check.detail}")
