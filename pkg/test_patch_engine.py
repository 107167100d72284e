"""Placements, legality, forced extension, enumeration and canonical forms."""

import random

import pytest

from errors_module import IllegalVertexError, InstanceSyntaxError, OverlapError
from instance_model_module import load_instance
from lattice_module import POINT_GROUP, Cell, Period, cells_within
from patch_engine_module import (
    FULL,
    Patch,
    acute_turn,
    canonical_form,
    diamond_at,
    diamond_components,
    enumerate_completions,
    find_completion,
    format_patch,
    forward_regions,
    grow_blocks,
    lozenge_block,
    max_run,
    parse_patch,
    periodic_completions,
    place,
    place_many,
    placements_covering,
    set_acute_turn,
    transform_patch,
    translate_placement,
    try_place,
    wraps,
)


@pytest.fixture(scope="module")
def inst():
    return load_instance()


@pytest.fixture(scope="module")
def lozenge(inst):
    return Patch.from_placements(inst, [diamond_at(inst, Cell(0, 0, True), axis=1)])


@pytest.fixture(scope="module")
def block(inst):
    return Patch.from_placements(inst, lozenge_block(inst, 2, 3))


def test_single_lozenge(lozenge):
    assert len(lozenge) == 1
    assert lozenge.cells == {Cell(0, 0, True), Cell(0, 0, False)}
    assert lozenge.vertices == {(0, 0), (1, 0), (1, 1), (0, 1)}
    star = lozenge.star((0, 0))
    assert star.status == "partial-legal"
    assert star.sectors[0] == ("G", 0)
    assert star.sectors[1] is None


def test_obtuse_corner_covers_two_sectors(lozenge):
    assert lozenge.occupied((1, 0)) == 0b000110


def test_overlap_is_rejected(inst, lozenge):
    with pytest.raises(OverlapError):
        place(lozenge, lozenge.placements[0])


def test_two_yellow_corners_side_by_side_are_illegal(inst, lozenge):
    # obtuse corner on sectors 3,4 at (1, 0), next to the first lozenge's 1,2
    other = diamond_at(inst, Cell(0, -1, False), axis=0)
    with pytest.raises(IllegalVertexError):
        place(lozenge, other)
    assert try_place(lozenge, other) is None


def test_placements_covering_are_distinct(inst):
    found = placements_covering(inst, Cell(0, 0, True))
    assert len({p.key for p in found}) == len(found)
    assert {p.kind for p in found} == {"triangle", "lozenge"}


def test_max_run():
    assert max_run(0) == 0
    assert max_run(0b000011) == 2
    assert max_run(0b100001) == 2
    assert max_run(FULL) == 6


def test_block_interior_vertices_complete(block):
    complete = block.complete_vertices()
    assert complete
    for v in complete:
        assert block.star(v).status == "complete-legal"


@pytest.mark.parametrize("g", [POINT_GROUP[1], POINT_GROUP[3], POINT_GROUP[7]])
def test_canonical_form_is_isometry_invariant(block, g):
    moved = transform_patch(block, g, dx=4, dy=-2)
    assert canonical_form(moved) == canonical_form(block)


def test_canonical_form_separates_sizes(inst, block, lozenge):
    assert canonical_form(block) != canonical_form(lozenge)
    assert canonical_form(Patch.empty(inst)) == b"()"


def test_patch_file_round_trip(inst, block):
    again = parse_patch(format_patch(block), inst)
    assert again.keys() == block.keys()


@pytest.mark.parametrize("text", [
    "piece lozenge 0,0,up\n",
    "piece blob at 0,0,up\n",
    "piece triangle at 0,0,sideways\n",
    "piece triangle at 0,0,up spin=3\n",
])
def test_bad_patch_lines(inst, text):
    with pytest.raises(InstanceSyntaxError):
        parse_patch(text, inst)


def test_diamond_components_of_block(block):
    comps = diamond_components(block)
    assert len(comps) == 1
    assert len(comps[0].pieces) == 6
    # a bare block has no triangles and no complete boundary vertex
    assert comps[0].shape_tag.kind == "plane"


def test_enumerate_completions_cover_region(lozenge):
    result = enumerate_completions(lozenge, radius=1)
    assert result.count >= 1
    assert len(set(result.keys)) == result.count
    region = cells_within(lozenge.vertices, 1)
    for completion in result.completions:
        assert completion.keys() >= lozenge.keys()
        assert region <= completion.cells


def test_find_completion(lozenge):
    region = cells_within(lozenge.vertices, 1)
    found = find_completion(lozenge, region)
    assert found is not None
    assert region <= found.cells


def test_enumerate_requires_radius_or_region(lozenge):
    with pytest.raises(ValueError):
        enumerate_completions(lozenge)


def _lone_triangle(inst):
    for p in placements_covering(inst, Cell(0, 0, True)):
        if len(p.cells) == 1:
            patch = try_place(Patch.empty(inst), p)
            if patch is not None:
                return patch
    raise AssertionError("no legal triangle at U(0,0)")


def test_forward_regions_grow_along_the_row(inst):
    triangle = _lone_triangle(inst)
    first, second = forward_regions(triangle, 2)
    assert first == {Cell(0, 0, True), Cell(0, 0, False)}
    assert second == first | {Cell(1, 0, True)}


def test_single_cell_blocks_are_one_isometry_class(inst):
    blocks = grow_blocks(inst, 1)
    assert len(blocks) == 1
    assert len(blocks[0].owner) == 1


def test_canonical_form_survives_random_isometries(lozenge):
    rng = random.Random(11)
    completions = enumerate_completions(lozenge, radius=1).completions
    for _ in range(20):
        patch = rng.choice(completions)
        g = rng.choice(POINT_GROUP)
        dx, dy = rng.randint(-6, 6), rng.randint(-6, 6)
        assert canonical_form(transform_patch(patch, g, dx=dx, dy=dy)) == canonical_form(patch)


def test_parallel_enumeration_matches_sequential(lozenge):
    sequential = enumerate_completions(lozenge, radius=1)
    parallel = enumerate_completions(lozenge, radius=1, jobs=2)
    assert sorted(parallel.keys) == sorted(sequential.keys)
    assert sorted(parallel.multiplicity) == sorted(sequential.multiplicity)


def test_place_many_checks_every_piece(inst, lozenge):
    (p,) = lozenge.placements
    moved = place_many(lozenge, [translate_placement(p, 1, 0), translate_placement(p, 2, 0)])
    assert len(moved) == 3
    with pytest.raises(OverlapError):
        place_many(lozenge, [translate_placement(p, 1, 0), translate_placement(p, 1, 0)])


@pytest.mark.parametrize("turn", [1, -1])
def test_acute_turn_reads_what_was_set(inst, turn):
    block = Patch.from_placements(inst, lozenge_block(inst, 2, 2))
    assert acute_turn(block, (0, 0), 0) is None
    turned = set_acute_turn(block, (0, 0), 0, turn)
    assert acute_turn(turned, (0, 0), 0) == turn
    assert acute_turn(turned, (0, 0), 0, reference=0) == -turn
    far = set_acute_turn(block, (2, 2), 3, turn, reference=0)
    assert acute_turn(far, (2, 2), 3, reference=0) == turn


def test_periodic_completions_are_invariant(inst):
    period = Period(2, 1, 2)
    result = periodic_completions(inst, period, 2, cap=4)
    assert result.count >= 1
    for patch in result.completions:
        for p in patch.placements:
            for dx, dy in ((2, 0), (1, 2), (-1, -2)):
                q = translate_placement(p, dx, dy)
                if all(c in patch.owner for c in q.cells):
                    assert patch.contains(q)


def test_unit_period_tiles_only_the_diamond_plane(inst):
    period = Period(1, 0, 1)
    result = periodic_completions(inst, period, 2)
    assert result.count >= 1
    for patch in result.completions:
        assert {p.kind for p in patch.placements} == {"lozenge"}
        (comp,) = diamond_components(patch)
        assert wraps(comp, patch, period)
