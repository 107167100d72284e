# file: puzzle_space_module.py
"""
Marked windows as points of a puzzle space.

Two windows agree to radius r when the combinatorial r-balls about their marks are
isometric by a lattice symmetry fixing the mark, colours included. The valuation is
the largest such r and the distance is exp(-valuation).
"""

import math
from typing import Optional

from pydantic import BaseModel
from tqdm import tqdm

from classification_module import (
    ALL_TAGS,
    ClassificationType,
    default_type,
    generate_window,
)
from config import MAX_ISOLATION_RADIUS, SHOW_PROGRESS, get_logger
from errors_module import BudgetExceededError
from instance_model_module import load_instance
from lattice_module import (
    Symmetry,
    cell_sectors,
    cell_vertices,
    cells_within,
    symmetries,
    translate_cell,
)

logger = get_logger(__name__)

IDENTITY = Symmetry(0, False)


# -------------------------
# BALL ENCODINGS
# -------------------------
def _corner_colour(placement, vertex, sector):
    for corner in placement.corners:
        if corner.vertex == vertex and sector in corner.sectors:
            return corner.arc.color
    raise ValueError(f"{placement.shape} has no corner at {vertex} sector {sector}")


def ball_encoding(window, radius, g=IDENTITY, center=None):
    """
    Colour record of the r-ball about `center` (default: the window's mark), moved so
    the mark sits at the origin and then mapped by `g`.

    Returns None when the window does not cover the whole ball.
    """
    cx, cy = center if center is not None else window.center
    patch = window.patch
    records = []
    for cell in cells_within([(cx, cy)], radius):
        pid = patch.owner.get(cell)
        if pid is None:
            return None
        piece = patch.placements[pid]
        colours = []
        for v, s in zip(cell_vertices(cell), cell_sectors(cell)):
            moved = g.vertex((v[0] - cx, v[1] - cy))
            colours.append((moved, _corner_colour(piece, v, s)))
        partner = None
        if len(piece.cells) == 2:
            other = piece.cells[1] if piece.cells[0] == cell else piece.cells[0]
            partner = g.cell(translate_cell(other, -cx, -cy))
        records.append((g.cell(translate_cell(cell, -cx, -cy)), tuple(sorted(colours)), partner))
    return tuple(sorted(records, key=lambda r: r[0]))


def balls_isometric(wa, wb, radius, reflections, center_b=None):
    target = ball_encoding(wa, radius)
    if target is None:
        return False
    return any(ball_encoding(wb, radius, g, center_b) == target for g in symmetries(reflections))


# -------------------------
# VALUATION AND DISTANCE
# -------------------------
def valuation(wa, wb, reflections=None):
    """Largest r up to min(radii) at which the marked balls agree; 0 if r = 1 fails."""
    if reflections is None:
        reflections = wa.patch.inst.reflections
    best = 0
    for r in range(1, min(wa.radius, wb.radius) + 1):
        if not balls_isometric(wa, wb, r, reflections):
            break
        best = r
    return best


def distance(wa, wb, reflections=None):
    return math.exp(-valuation(wa, wb, reflections))


class ValuationReport(BaseModel):
    with_reflections: int
    rotations_only: int

    @property
    def differs(self):
        return self.with_reflections != self.rotations_only


def valuation_report(wa, wb):
    """Both readings of ball isometry: mirror images allowed and not."""
    return ValuationReport(with_reflections=valuation(wa, wb, True),
                           rotations_only=valuation(wa, wb, False))


# -------------------------
# ISOLATION
# -------------------------
def _comparison_types(t, rmax):
    """Representatives of the other classes, with series stretched past the ball."""
    span = 2 * rmax + 2
    types = []
    for tag in ALL_TAGS:
        if tag == t.tag:
            continue
        types.append(default_type(tag))
        if tag == "series_A":
            types.append(ClassificationType("series_A", (span,)))
        elif tag == "series_C":
            types.append(ClassificationType("series_C", (span + 1,)))
    return types


def _comparison_windows(t, rmax, inst):
    return [generate_window(u, rmax, inst) for u in _comparison_types(t, rmax)]


def _occurs_in(window, wt, radius, reflections):
    for v in sorted(window.patch.vertices):
        if balls_isometric(wt, window, radius, reflections, center_b=v):
            return True
    return False


def isolation_radius(t, rmax=MAX_ISOLATION_RADIUS, inst=None, reflections=None):
    """
    Least r <= rmax such that the r-ball of t at its characteristic mark occurs in no
    window of any other class, or None if every radius up to rmax still occurs.
    """
    if rmax > MAX_ISOLATION_RADIUS:
        raise BudgetExceededError(MAX_ISOLATION_RADIUS, "isolation radius")
    inst = inst or load_instance()
    if reflections is None:
        reflections = inst.reflections
    wt = generate_window(t, rmax, inst)
    others = _comparison_windows(t, rmax, inst)
    for r in range(1, rmax + 1):
        if ball_encoding(wt, r) is None:
            break
        hits = [w.provenance for w in others if _occurs_in(w, wt, r, reflections)]
        if not hits:
            logger.info("%s is isolated at radius %d", t, r)
            return r
        logger.debug("%s r=%d still occurs in %s", t, r, ", ".join(map(str, hits)))
    return None


# -------------------------
# LIMITS
# -------------------------
def limit_profile(series, limit, params, radius, inst=None):
    """
    Valuations of the series windows with each parameter against the limit window.
    A limit claim holds in range when the values are nondecreasing and keep growing.
    """
    inst = inst or load_instance()
    target = generate_window(ClassificationType(limit), radius, inst)
    profile = []
    for k in params:
        value = k if isinstance(k, tuple) else (k,)
        window = generate_window(ClassificationType(series, value), radius, inst)
        profile.append((k, valuation(window, target)))
    return profile


def is_nondecreasing(profile):
    values = [v for _, v in profile]
    return all(a <= b for a, b in zip(values, values[1:]))


def pairwise_distances(windows, reflections=None):
    """Symmetric matrix of distances, as nested lists."""
    n = len(windows)
    table = [[0.0] * n for _ in range(n)]
    for i in range(n):
        table[i][i] = distance(windows[i], windows[i], reflections)
        for j in range(i + 1, n):
            d = distance(windows[i], windows[j], reflections)
            table[i][j] = table[j][i] = d
    return table


def ultrametric_violations(table, tol=1e-12):
    """Triples (a, b, c) with d(a,c) > max(d(a,b), d(b,c))."""
    n = len(table)
    bad = []
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[a][c] > max(table[a][b], table[b][c]) + tol:
                    bad.append((a, b, c))
    return bad


def class_generator_windows(radius, inst=None, tags: Optional[tuple] = None):
    """One generated window per class; a class that cannot be generated raises."""
    inst = inst or load_instance()
    windows = []
    for tag in tqdm(tags or ALL_TAGS, desc="generators", disable=not SHOW_PROGRESS):
        windows.append(generate_window(default_type(tag), radius, inst))
        logger.debug("generated %s window of %d pieces", tag, len(windows[-1].patch))
    return windows
