# file: classification_module.py

import hashlib
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Any, NamedTuple, Optional

import pandas as pd
import yaml
from pydantic import BaseModel
from tqdm import tqdm

from config import (
    CENSUS_SNAPSHOT_FILE,
    CORE_MARGIN,
    DEFAULT_WINDOW_RADIUS,
    MAX_CENSUS_RADIUS,
    MAX_LEMMA_RADIUS,
    PERIODIC_SEARCH_BUDGET,
    PERIODIC_WINDOW_PERIOD,
    SERIES_A_DEFAULT_HEIGHTS,
    SERIES_D_GAP_BUDGET,
    SHOW_PROGRESS,
    W_BLOCK_DEPTH,
    get_logger,
)
from errors_module import (
    BudgetExceededError,
    ClassificationError,
    ContradictionError,
    LemmaMismatchError,
    PatchError,
)
from instance_model_module import load_instance
from lattice_module import Cell, cells_within, period_family
from patch_engine_module import (
    Patch,
    acute_turn,
    boundary_angles,
    build_placement,
    canonical_form,
    collar,
    component_corners,
    diamond_at,
    diamond_components,
    enumerate_completions,
    find_completion,
    find_forward_analytic_blocks,
    lozenge_block,
    period_keys,
    periodic_completions,
    placements_covering,
    set_acute_turn,
    strip_band_heights,
    try_place,
    wraps,
)

logger = get_logger(__name__)

EXCEPTIONAL = (
    "diamond_plane",
    "two_by_one",
    "star_2xinf",
    "three_strip",
    "half_three_strip",
    "opposite_acute",
    "adjacent_acute",
    "obtuse_sector",
    "v_puzzle",
)
SERIES = ("series_A", "series_B", "series_C", "series_D")
ALL_TAGS = EXCEPTIONAL + SERIES

# classes whose puzzles are doubly periodic and are generated by a periodic search
PERIODIC = ("two_by_one", "three_strip", "series_B")

# hosts of an acute sector, of a 2-high strip with a long side, and of each corner turn
ACUTE_SECTOR_HOSTS = frozenset({"series_C", "opposite_acute", "adjacent_acute", "star_2xinf",
                                "half_three_strip", "series_D", "obtuse_sector", "v_puzzle"})
TWO_HIGH_HOSTS = frozenset({"series_C", "star_2xinf", "half_three_strip", "series_D",
                            "opposite_acute", "adjacent_acute"})
LIMIT_TURN_HOSTS = frozenset({"series_C", "half_three_strip", "series_D",
                              "opposite_acute", "adjacent_acute"})
OTHER_TURN_HOSTS = frozenset({"star_2xinf", "opposite_acute", "adjacent_acute"})


# -------------------------
# TYPES
# -------------------------
class _TypeFields(NamedTuple):
    tag: str
    params: tuple = ()


class ClassificationType(_TypeFields):
    """A puzzle class; series carry a finite parameter window (empty = unspecified)."""

    __slots__ = ()

    def __new__(cls, tag, params=()):
        params = tuple(int(p) for p in params)
        if tag not in ALL_TAGS:
            raise ValueError(f"unknown class {tag!r}")
        if tag in EXCEPTIONAL and params:
            raise ValueError(f"{tag} takes no parameters")
        if any(p < 1 for p in params):
            raise ValueError("parameters must be positive")
        if tag == "series_C" and params and (len(params) != 1 or params[0] < 3):
            raise ValueError("series_C needs a single n >= 3")
        if tag == "series_D" and params and len(params) != 1:
            raise ValueError("series_D needs a single height h >= 1")
        if tag == "series_B" and params and max(params) < 3:
            raise ValueError("series_B needs some height >= 3")
        return super().__new__(cls, tag, params)

    def __str__(self):
        if not self.params:
            return self.tag
        return f"{self.tag}({','.join(str(p) for p in self.params)})"


def parse_type(tag, params=None):
    values = ()
    if params:
        values = tuple(int(p) for p in str(params).replace(" ", "").split(",") if p)
    return ClassificationType(tag, values)


def default_type(tag):
    """A representative member of each class for generators and experiments."""
    defaults = {
        "series_A": SERIES_A_DEFAULT_HEIGHTS,
        "series_B": (3,),
        "series_C": (3,),
        "series_D": (1,),
    }
    return ClassificationType(tag, defaults.get(tag, ()))


class PuzzleWindow(NamedTuple):
    patch: Any
    center: tuple
    radius: int
    provenance: Optional[ClassificationType] = None
    period: Optional[Any] = None


class ClassMatch(NamedTuple):
    type: ClassificationType
    constraint: str = ""


def contains_class(matches, t):
    for m in matches:
        if m.type.tag != t.tag:
            continue
        if not m.type.params or not t.params or m.type.params == t.params:
            return True
    return False


# -------------------------
# SEEDS
# -------------------------
class SeedSpec(NamedTuple):
    patch: Any
    center: tuple
    triangle_cells: frozenset
    lemma: str
    expected: Optional[int]  # core classes the lemma allows, None when it fixes no count
    finite: bool = False
    anchors: tuple = ()
    turns: tuple = ()  # (vertex, sector, turn) of every acute corner fixed by the seed

    @property
    def ball_centers(self):
        return self.anchors or (self.center,)


def _block_cells(placements):
    return {c for p in placements for c in p.cells}


def _with_turns(patch, turns):
    for vertex, sector, turn in turns:
        patch = set_acute_turn(patch, vertex, sector, turn)
    return patch


def _finite_block(inst, rows, cols, lemma, expected, turns=None):
    """rows x cols block closed by triangles; `turns` fixes its two acute corners."""
    placements = lozenge_block(inst, rows, cols)
    cells = _block_cells(placements)
    fixed = ()
    if turns is not None:
        fixed = (((0, 0), 0, turns[0]), ((cols, rows), 3, turns[1]))
    patch = _with_turns(Patch.from_placements(inst, placements), fixed)
    center = (cols // 2, rows // 2)
    return SeedSpec(patch, center, frozenset(collar(cells)), lemma, expected, finite=True, turns=fixed)


def _half_strip(inst, height, length, lemma, expected, turn=None):
    """height x length block open towards +x, closed by triangles on the other three sides."""
    placements = lozenge_block(inst, height, length)
    cells = _block_cells(placements)
    closed = frozenset(c for c in collar(cells) if c.a < length)
    fixed = () if turn is None else (((0, 0), 0, turn),)
    patch = _with_turns(Patch.from_placements(inst, placements), fixed)
    return SeedSpec(patch, (0, height // 2), closed, lemma, expected, turns=fixed)


def _sector(inst, size, obtuse, lemma, expected):
    """size x size corner of a lozenge sector; the corner vertex is the origin."""
    if obtuse:
        placements = lozenge_block(inst, size, size, origin=(-size, 0))
        cells = _block_cells(placements)
        closed = frozenset(c for c in collar(cells) if c.b < 0 or c.a >= 0)
    else:
        placements = lozenge_block(inst, size, size)
        cells = _block_cells(placements)
        closed = frozenset(c for c in collar(cells) if c.b < 0 or c.a < 0)
    patch = Patch.from_placements(inst, placements)
    return SeedSpec(patch, (0, 0), closed, lemma, expected)


def _facing_strips(inst, gap, shift, length, turn):
    """
    Two 2-high semi-infinite strips `gap` rows apart: the upper one closed at x = 0 and open
    towards +x, the lower one closed at x = shift and open towards -x.
    """
    oy = -(gap + 2)
    upper = lozenge_block(inst, 2, length)
    lower = lozenge_block(inst, 2, length, origin=(shift - length, oy))
    cells_up, cells_low = _block_cells(upper), _block_cells(lower)
    closed = {c for c in collar(cells_up) if c.a < length}
    closed |= {c for c in collar(cells_low) if c.a >= shift - length}
    fixed = (((0, 0), 0, turn), ((shift, oy + 2), 3, turn))
    patch = _with_turns(Patch.from_placements(inst, upper + lower), fixed)
    anchors = ((0, 0), (shift, oy + 2))
    center = (shift // 2, oy // 2 + 1)
    return SeedSpec(patch, center, frozenset(closed), "3-strip puzzle of height h", None,
                    anchors=anchors, turns=fixed)


@lru_cache(maxsize=32)
def extendable_turns(inst, rows, cols, options):
    """The turn pairs in `options` with which a closed rows x cols block still extends."""
    bare = Patch.from_placements(inst, lozenge_block(inst, rows, cols))
    region = cells_within(bare.vertices, 1 + CORE_MARGIN)
    found = []
    for turns in options:
        try:
            spec = _finite_block(inst, rows, cols, "", None, turns=turns)
        except (ContradictionError, PatchError):
            continue
        if find_completion(spec.patch, region, spec.triangle_cells) is not None:
            found.append(turns)
    logger.debug("%dx%d block extends with turns %s", rows, cols, found)
    return tuple(found)


def limit_turn(inst):
    """Turn shared by both acute corners of the component of the 2 x 3 puzzle."""
    found = extendable_turns(inst, 2, 3, ((1, 1), (-1, -1)))
    if len(found) != 1:
        raise LemmaMismatchError("2xn puzzle", "one corner turn", len(found))
    return found[0][0]


def rhombus_turns(inst, equal):
    """Corner turns of the 2 x 2 puzzle whose acute corners turn alike (or not)."""
    options = ((1, 1), (-1, -1)) if equal else ((1, -1), (-1, 1))
    found = extendable_turns(inst, 2, 2, options)
    if not found:
        raise LemmaMismatchError("extension 4-strip", "an extendable turn pair", 0)
    return found[0]


def _series_d_spec(inst, h, radius):
    """Facing 2-high strips at the h-th gap that admits a completion between them."""
    t_c = limit_turn(inst)
    length = radius + 2
    feasible = 0
    for gap in range(1, 3 * h + 6):
        for shift in (0, 1, -1, 2, -2):
            try:
                spec = _facing_strips(inst, gap, shift, length, t_c)
            except (ContradictionError, PatchError):
                continue
            column = [(x, y) for y in range(-(gap + 2), 3) for x in (0, shift)]
            try:
                found = find_completion(spec.patch, cells_within(column, 2), spec.triangle_cells,
                                        budget=SERIES_D_GAP_BUDGET)
            except BudgetExceededError:
                logger.debug("series_D gap %d shift %d: budget exhausted", gap, shift)
                continue
            if found is None:
                continue
            feasible += 1
            logger.debug("series_D gap %d shift %d admits a completion (%d)", gap, shift, feasible)
            if feasible == h:
                return spec
            break
    raise LemmaMismatchError("3-strip puzzle of height h", f"{h} feasible gaps", feasible)


def seed_spec(t, inst=None, radius=DEFAULT_WINDOW_RADIUS):
    inst = inst or load_instance()
    reach = radius + 2
    tag = t.tag
    if tag == "diamond_plane":
        placements = lozenge_block(inst, 3, 3, origin=(-1, -1))
        return SeedSpec(Patch.from_placements(inst, placements), (0, 0), frozenset(),
                        "diamond plane", None, finite=True)
    if tag == "series_A":
        window = series_a_window(inst, t.params or SERIES_A_DEFAULT_HEIGHTS, 2)
        return SeedSpec(window.patch, (0, 0), frozenset(), "series A strips", None, finite=True)
    if tag == "series_C":
        n = t.params[0] if t.params else 3
        t_c = limit_turn(inst)
        return _finite_block(inst, 2, n, "2xn puzzle", 1, turns=(t_c, t_c))
    if tag == "series_B":
        n = max(t.params) if t.params else 3
        return _finite_block(inst, 1, n, "component 1xn", None)
    if tag == "two_by_one":
        return _finite_block(inst, 1, 2, "2x1", None)
    if tag == "three_strip":
        return _half_strip(inst, 2, reach, "2 x infty puzzle", 1, turn=limit_turn(inst))
    if tag in ("opposite_acute", "adjacent_acute"):
        turns = rhombus_turns(inst, equal=tag == "opposite_acute")
        return _finite_block(inst, 2, 2, "extension 4-strip", 1, turns=turns)
    if tag in ("star_2xinf", "half_three_strip"):
        t_c = limit_turn(inst)
        turn = -t_c if tag == "star_2xinf" else t_c
        return _half_strip(inst, 2, reach, "2 x infty puzzle", 1, turn=turn)
    if tag == "series_D":
        return _series_d_spec(inst, t.params[0] if t.params else 1, radius)
    if tag == "v_puzzle":
        return _half_strip(inst, 1, reach, "component 1xinfty", None)
    if tag == "obtuse_sector":
        return _sector(inst, reach, True, "obtuse", 1)
    raise ValueError(f"no seed for {t}")


def seed(t, inst=None):
    """Characteristic patch of a class."""
    return seed_spec(t, inst).patch


# -------------------------
# CONSTRUCTIVE WINDOWS
# -------------------------
def _row_roles(heights):
    roles = []
    for h in heights:
        roles.extend(["diamond"] * h)
        roles.extend(["strip_low", "strip_high"])
    return roles


def _series_a_piece(inst, cell, role):
    triangle = next(s for s in inst.shapes if s.kind == "triangle")
    a, b, up = cell
    if role == "diamond":
        return diamond_at(inst, Cell(a, b, True), axis=1)
    if role == "strip_low":
        if up:
            return build_placement(triangle, cell, rot=0)
        return diamond_at(inst, cell, axis=1)
    if up:
        return diamond_at(inst, Cell(a, b - 1, False), axis=1)
    return build_placement(triangle, cell, rot=2)


def series_a_window(inst, heights, radius, center=None):
    """Alternating diamond strips of the given heights and 2-strips, covering a ball.

    The default center sits in the middle row of the first diamond strip.
    """
    if center is None:
        center = (0, heights[0] // 2 if heights else 0)
    roles = _row_roles(heights) if heights else ["diamond"]
    region = cells_within([center], radius)
    pieces = {}
    for cell in sorted(region):
        p = _series_a_piece(inst, cell, roles[cell.b % len(roles)])
        pieces.setdefault(p.key, p)
    patch = Patch.from_placements(inst, pieces.values())
    t = ClassificationType("series_A", heights) if heights else ClassificationType("diamond_plane")
    return PuzzleWindow(patch, center, radius, t)


def diamond_plane_window(inst, radius, center=(0, 0)):
    return series_a_window(inst, (), radius, center)


def _periodic_match(found, t):
    if found.tag != t.tag:
        return False
    return not t.params or set(t.params) <= set(found.params)


def periodic_window(t, radius, inst=None, max_period=PERIODIC_WINDOW_PERIOD):
    """A doubly periodic window of class t, searching periods by fundamental-domain area."""
    inst = inst or load_instance()
    for period in period_family(max_period):
        reach = max(radius, 2 * max(period.c, period.h) + 1)
        try:
            result = periodic_completions(inst, period, reach, cap=16, budget=PERIODIC_SEARCH_BUDGET)
        except BudgetExceededError:
            logger.debug("periodic search for %s gave up at %s", t, period)
            continue
        for patch in result.completions:
            window = PuzzleWindow(patch, (0, 0), reach, t, period)
            if any(_periodic_match(m.type, t) for m in classify_periodic(window)):
                logger.info("periodic %s window found with period %s", t, period)
                return window
    raise LemmaMismatchError(f"periodic {t}", f"a window with period <= {max_period}", 0)


# -------------------------
# GENERATION
# -------------------------
def _extendable(patch, region, triangle_cells):
    try:
        return find_completion(patch, region, triangle_cells) is not None
    except BudgetExceededError:
        logger.warning("lookahead budget exhausted; keeping completion")
        return True


def grow(spec, radius, cap=64, lookahead=1):
    """Completions of a seed over the ball of `radius`, filtered by one-layer lookahead."""
    region = cells_within(spec.ball_centers, radius)
    if spec.finite:
        region |= cells_within(spec.patch.vertices, radius)
    result = enumerate_completions(spec.patch, region=region, cap=cap,
                                   triangle_cells=spec.triangle_cells)
    if lookahead <= 0:
        return result, list(result.completions)
    outer = cells_within(spec.ball_centers, radius + lookahead)
    survivors = [p for p in result.completions if _extendable(p, outer, spec.triangle_cells)]
    return result, survivors


def core_classes(spec, radius, margin=CORE_MARGIN, cap=256):
    """
    Completion classes of the seed's 1-neighbourhood that still extend `margin` more layers.
    Infinite seeds are cut to the ball of `radius` about their anchors.
    """
    vertices = spec.patch.vertices
    core = cells_within(vertices, 1)
    outer = cells_within(vertices, 1 + margin)
    if not spec.finite:
        core &= cells_within(spec.ball_centers, radius)
        outer &= cells_within(spec.ball_centers, radius + margin)
    result = enumerate_completions(spec.patch, region=core, cap=cap, triangle_cells=spec.triangle_cells)
    survivors = [p for p in result.completions if _extendable(p, outer, spec.triangle_cells)]
    return result, survivors


def _check_turns(window, spec):
    for vertex, sector, turn in spec.turns:
        found = acute_turn(window.patch, vertex, sector)
        if found != turn:
            raise ClassificationError(f"{window.provenance}: corner at {vertex} turns {found}, not {turn}")


def generate_window(t, radius, inst=None, lookahead=1):
    """A window of class t about its characteristic center."""
    inst = inst or load_instance()
    if radius > MAX_LEMMA_RADIUS:
        raise BudgetExceededError(MAX_LEMMA_RADIUS, "window radius")
    if t.tag == "diamond_plane":
        return diamond_plane_window(inst, radius)
    if t.tag == "series_A":
        return series_a_window(inst, t.params or SERIES_A_DEFAULT_HEIGHTS, radius)
    if t.tag in PERIODIC:
        return periodic_window(t, radius, inst)

    spec = seed_spec(t, inst, radius)
    if spec.expected is not None:
        _, classes = core_classes(spec, radius)
        if len(classes) != spec.expected:
            raise LemmaMismatchError(spec.lemma, spec.expected, len(classes))
    result, survivors = grow(spec, radius, lookahead=lookahead)
    for patch in survivors:
        window = PuzzleWindow(patch, spec.center, radius, t)
        if contains_class(classify_window(window), t):
            break
    else:
        raise LemmaMismatchError(spec.lemma, f"a window of class {t}", 0)
    _check_turns(window, spec)
    logger.info("generate_window %s r=%d: %d completions, %d survive lookahead",
                t, radius, result.count, len(survivors))
    return window


# -------------------------
# CLASSIFICATION
# -------------------------
def _visible_heights(comps, patch):
    heights = []
    for comp in comps:
        if comp.shape_tag.kind == "parallelogram":
            continue
        bands = strip_band_heights(comp, patch)
        if bands:
            heights.append(min(bands.values()))
    return tuple(heights)


def _acute_corner_turns(comp, patch):
    """Turns at the two acute corners of a fully visible 2 x 2 component, None where unplaced."""
    return [acute_turn(patch, v, start) for v, start, length in boundary_angles(comp) if length == 1]


def _two_high_side(corner):
    """Index of a closed side of length 2 whose partner side reaches 3 or more, else None."""
    for i in (0, 1):
        if corner.closed[i] and corner.sides[i] == 2 and corner.sides[1 - i] >= 3:
            return i
    return None


def classify_window(window):
    """Classes consistent with a window, by sound eliminations only."""
    patch = window.patch
    comps = diamond_components(patch)
    has_triangles = any(p.kind == "triangle" for p in patch.placements)
    heights = _visible_heights(comps, patch)
    height_note = f"visible strip heights {heights}" if heights else ""

    if not has_triangles:
        return [ClassMatch(ClassificationType("diamond_plane")),
                ClassMatch(ClassificationType("series_A"), height_note or "tall strips")]

    candidates = set(ALL_TAGS) - {"diamond_plane"}
    c_param = ()
    for comp in comps:
        tag = comp.shape_tag
        if tag.kind != "parallelogram":
            continue
        m, n = tag.m, tag.n
        if m >= 3:
            logger.warning("window holds an interior %dx%d parallelogram", m, n)
            return []
        if m == 2 and n == 2:
            candidates &= {"opposite_acute", "adjacent_acute"}
            turns = _acute_corner_turns(comp, patch)
            if None not in turns and len(turns) == 2:
                candidates &= {"opposite_acute"} if turns[0] == turns[1] else {"adjacent_acute"}
        elif m == 2:
            candidates &= {"series_C"}
            c_param = (n,)
        elif n >= 3:
            candidates &= {"series_B", "series_C"}
            c_param = c_param or (n,)
        if (m, n) != (1, 1):
            candidates.discard("series_A")

    corners = [(comp, c) for comp in comps for c in component_corners(comp, patch)]
    if any(min(c.sides) >= 1 and max(c.sides) >= 2 for _, c in corners):
        candidates.discard("series_A")
    for _, c in corners:
        if min(c.sides) >= 3:
            candidates &= {"obtuse_sector"} if c.angle == 2 else ACUTE_SECTOR_HOSTS

    at_limit = set()
    for comp, c in corners:
        side = _two_high_side(c)
        if side is None:
            continue
        candidates &= TWO_HIGH_HOSTS
        if c.angle != 1:
            continue
        turn = acute_turn(patch, c.vertex, c.start, reference=side)
        if turn is None:
            continue
        if turn == limit_turn(patch.inst):
            candidates &= LIMIT_TURN_HOSTS
            at_limit.add(comp.pieces)
        else:
            candidates &= OTHER_TURN_HOSTS
    if len(at_limit) >= 2:
        candidates -= {"half_three_strip", "series_C"}

    for _, c in corners:
        if any(c.closed[i] and c.sides[i] == 1 and c.sides[1 - i] >= 3 for i in (0, 1)):
            candidates -= {"series_A", "two_by_one", "three_strip"}

    matches = []
    for tag in ALL_TAGS:
        if tag not in candidates:
            continue
        if tag == "series_C" and c_param and c_param[0] >= 3:
            matches.append(ClassMatch(ClassificationType(tag, c_param), f"n={c_param[0]}"))
        elif tag in ("series_A", "series_B", "series_D"):
            matches.append(ClassMatch(ClassificationType(tag), height_note))
        else:
            matches.append(ClassMatch(ClassificationType(tag)))
    if not matches:
        logger.warning("window at %s matches no class", window.center)
    return matches


def _finite_shapes(finite, patch, period):
    """(m, n) of every finite component, reading cut ones off a fully visible translate."""
    shapes = set()
    visible = []
    for comp in finite:
        if comp.shape_tag.kind == "parallelogram":
            shapes.add((comp.shape_tag.m, comp.shape_tag.n))
            visible.append(set(period_keys(comp, patch, period)))
    for comp in finite:
        if comp.shape_tag.kind == "parallelogram":
            continue
        keys = set(period_keys(comp, patch, period))
        if not any(keys <= seen for seen in visible):
            return None
    return shapes


def classify_periodic(window, period=None):
    """Exact class of a doubly periodic window, from which components wrap under its period."""
    period = period or window.period
    if period is None:
        return classify_window(window)
    patch = window.patch
    note = f"period {period}"
    if not any(p.kind == "triangle" for p in patch.placements):
        return [ClassMatch(ClassificationType("diamond_plane"), note)]
    comps = diamond_components(patch)
    infinite = [c for c in comps if wraps(c, patch, period)]
    shapes = _finite_shapes([c for c in comps if not wraps(c, patch, period)], patch, period)
    if shapes is None:
        logger.info("a finite component is cut by the window at period %s", period)
        return classify_window(window)

    if infinite:
        if shapes <= {(1, 1)}:
            heights = tuple(sorted(set(_visible_heights(infinite, patch))))
            return [ClassMatch(ClassificationType("series_A", heights), note)]
        if shapes <= {(1, 1), (1, 2)}:
            return [ClassMatch(ClassificationType("three_strip"), note)]
    elif shapes and all(m == 1 for m, _ in shapes):
        lengths = sorted({n for _, n in shapes})
        if lengths[-1] <= 2:
            return [ClassMatch(ClassificationType("two_by_one"), note)]
        return [ClassMatch(ClassificationType("series_B", lengths), note)]
    logger.warning("periodic window with %s fits no class", period)
    return []


# -------------------------
# LEMMA CERTIFICATES
# -------------------------
class Certificate(BaseModel):
    name: str
    lemma: str
    radius: int
    expected: Optional[int] = None
    found: int
    passed: bool
    cap_exceeded: bool = False
    detail: str = ""


def _certify_growth(name, spec, radius):
    result, survivors = core_classes(spec, radius)
    found = len(survivors)
    if spec.expected is None:
        passed = found >= 1
    else:
        passed = found == spec.expected and not result.cap_exceeded
    return Certificate(name=name, lemma=spec.lemma, radius=radius, expected=spec.expected,
                       found=found, passed=passed, cap_exceeded=result.cap_exceeded,
                       detail=f"{result.count} core classes, {result.nodes} nodes")


def _certify_angles(inst, radius):
    result = enumerate_completions(Patch.empty(inst), radius=radius, cap=10_000)
    bad = 0
    for ball in result.completions:
        try:
            diamond_components(ball)
        except ClassificationError as e:
            bad += 1
            logger.warning("angle violation: %s", e)
    return Certificate(name="components-angles", lemma="components are lozenges",
                       radius=radius, expected=0, found=bad, passed=bad == 0,
                       cap_exceeded=result.cap_exceeded,
                       detail=f"{result.count} balls checked")


def _certify_w_block(inst, depth):
    blocks = find_forward_analytic_blocks(inst, depth=depth, limit=1)
    steps = blocks[0].steps if blocks else ()
    return Certificate(name="w-block-forward", lemma="w-blocks", radius=depth, expected=1,
                       found=1 if blocks else 0, passed=bool(blocks),
                       detail=f"classes per step {steps}" if blocks else "no forward block found")


def _certificate_plan(inst):
    """(name, radius, builder) for every certificate; builder returns a Certificate."""
    return [
        ("components-angles", 2, lambda r: _certify_angles(inst, r)),
        ("3x3-impossible", 3,
         lambda r: _certify_growth("3x3-impossible", _finite_block(inst, 3, 3, "min(m,n) <= 2", 0), r)),
        ("double-w-strip", 4,
         lambda r: _certify_growth("double-w-strip", _finite_block(inst, 2, 2, "extension 4-strip", 2), r)),
        ("obtuse-sector", 5,
         lambda r: _certify_growth("obtuse-sector", _sector(inst, r + 2, True, "obtuse", 1), r)),
        ("semi-infinite-height-3", 3,
         lambda r: _certify_growth("semi-infinite-height-3",
                                   _half_strip(inst, 3, r + 2, "semi-infinite height", 0), r)),
        ("2-x-infinity", 4,
         lambda r: _certify_growth("2-x-infinity", _half_strip(inst, 2, r + 2, "2 x infty puzzle", 2), r)),
        ("w-block-forward", W_BLOCK_DEPTH, lambda r: _certify_w_block(inst, r)),
        ("2xn-puzzle", 4,
         lambda r: _certify_growth("2xn-puzzle", _finite_block(inst, 2, 3, "2xn puzzle", 1), r)),
        ("1xn-component", 3,
         lambda r: _certify_growth("1xn-component", _finite_block(inst, 1, 3, "component 1xn", None), r)),
        ("2x1", 3,
         lambda r: _certify_growth("2x1", _finite_block(inst, 1, 2, "2x1", None), r)),
        ("1-x-infinity", 3,
         lambda r: _certify_growth("1-x-infinity", _half_strip(inst, 1, r + 2, "component 1xinfty", None), r)),
        ("acute", 4,
         lambda r: _certify_growth("acute", _sector(inst, r + 2, False, "acute", None), r)),
    ]


def certificate_names():
    return [name for name, _, _ in _certificate_plan(None)]


def lemma_suite(only=None, radius_cap=None, inst=None):
    """Run the bounded certificates; failures are recorded, never raised."""
    inst = inst or load_instance()
    plan = _certificate_plan(inst)
    if only:
        plan = [item for item in plan if item[0] == only]
        if not plan:
            raise ValueError(f"unknown certificate {only!r}")
    certificates = []
    for name, radius, build in tqdm(plan, desc="lemmas", disable=not SHOW_PROGRESS):
        if radius_cap is not None:
            radius = min(radius, radius_cap)
        if name != "w-block-forward":
            radius = min(radius, MAX_LEMMA_RADIUS)
        try:
            cert = build(radius)
        except BudgetExceededError as e:
            cert = Certificate(name=name, lemma=name, radius=radius, found=0, passed=False,
                               detail=str(e))
        level = "info" if cert.passed else "warning"
        getattr(logger, level)("certificate %s r=%d expected=%s found=%d passed=%s",
                               cert.name, cert.radius, cert.expected, cert.found, cert.passed)
        certificates.append(cert)
    return certificates


def suite_frame(certificates):
    return pd.DataFrame([c.model_dump() for c in certificates],
                        columns=["name", "lemma", "radius", "expected", "found", "passed", "detail"])


# -------------------------
# CENSUS
# -------------------------
class CensusRow(BaseModel):
    hash: str
    count: int
    classes: list[str]


class CensusTable(BaseModel):
    radius: int
    rows: list[CensusRow]
    cap_exceeded: bool = False

    def empty_rows(self):
        return [r for r in self.rows if not r.classes]

    def to_frame(self):
        return pd.DataFrame([{"hash": r.hash, "count": r.count, "classes": " ".join(r.classes)}
                             for r in self.rows], columns=["hash", "count", "classes"])

    def to_text(self):
        return "".join(f"{r.hash}  {r.count}  {' '.join(r.classes)}\n" for r in self.rows)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_text())


def ball_hash(key):
    return hashlib.sha256(key).hexdigest()[:16]


def _census_shard(args):
    inst, first, region = args
    patch = try_place(Patch.empty(inst), first)
    if patch is None:
        return []
    result = enumerate_completions(patch, region=region, cap=1_000_000)
    return [(canonical_form(p), p, m) for p, m in zip(result.completions, result.multiplicity)]


def census(radius, jobs=1, inst=None):
    """Every legal ball of `radius` up to isometry, with the classes it is consistent with."""
    if radius > MAX_CENSUS_RADIUS:
        raise BudgetExceededError(MAX_CENSUS_RADIUS, "census radius")
    inst = inst or load_instance()
    region = cells_within([(0, 0)], radius)
    first_cell = min(region)
    shards = [(inst, p, region) for p in placements_covering(inst, first_cell)]

    merged = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(tqdm(pool.map(_census_shard, shards), total=len(shards),
                                desc=f"census r={radius}", disable=not SHOW_PROGRESS))
    else:
        outputs = [_census_shard(s) for s in tqdm(shards, desc=f"census r={radius}",
                                                   disable=not SHOW_PROGRESS)]
    for output in outputs:
        for key, patch, multiplicity in output:
            if key in merged:
                merged[key][1] += multiplicity
            else:
                merged[key] = [patch, multiplicity]

    rows = []
    for key in sorted(merged, key=ball_hash):
        patch, multiplicity = merged[key]
        matches = classify_window(PuzzleWindow(patch, (0, 0), radius))
        rows.append(CensusRow(hash=ball_hash(key), count=multiplicity,
                              classes=[str(m.type) for m in matches]))
    table = CensusTable(radius=radius, rows=rows)
    logger.info("census r=%d: %d balls, %d with empty class set",
                radius, len(rows), len(table.empty_rows()))
    return table


def load_snapshot(path=None):
    path = path or CENSUS_SNAPSHOT_FILE
    try:
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}
    except FileNotFoundError:
        return {}


def check_snapshot(table, path=None):
    """True/False against the recorded ball count, None when nothing is recorded."""
    recorded = load_snapshot(path).get("balls", {}).get(table.radius)
    if recorded is None:
        return None
    return int(recorded) == len(table.rows)


def record_snapshot(table, path=None):
    path = path or CENSUS_SNAPSHOT_FILE
    data = load_snapshot(path)
    data.setdefault("balls", {})[table.radius] = len(table.rows)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, sort_keys=True)
    return data


if __name__ == "__main__":
    instance = load_instance()
    print("--- Classification ---")
    window = generate_window(default_type("series_A"), 3, instance)
    print(f"series_A window: {len(window.patch)} pieces")
    for match in classify_window(window):
        print(f"  {match.type} {match.constraint}")
    print(suite_frame(lemma_suite(only="3x3-impossible", inst=instance)).to_string(index=False))
