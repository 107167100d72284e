"""Instance files: parsing, validation, the extension threshold and ring embedding."""

import pytest

from errors_module import (
    DuplicateRingError,
    InstanceSyntaxError,
    RingLengthError,
    UnknownColorError,
)
from instance_model_module import (
    Arc,
    canonical_ring,
    compute_theta0,
    load_instance,
    parse_instance,
    ring_embeds,
    validate_instance,
)

HEADER = """
color Y length=2
color R length=1
color G length=1
color B length=1
shape lozenge kind=lozenge corners=G:1,Y:2,G:1,Y:2
shape triangle kind=triangle corners=B:1,B:1,B:1
"""


@pytest.fixture(scope="module")
def inst():
    return load_instance()


def test_shipped_instance_shape(inst):
    assert [s.name for s in inst.shapes] == ["lozenge", "triangle"]
    assert [r.name for r in inst.rings] == ["ring1", "ring2", "ring3"]
    assert inst.reflections
    assert all(r.length == 6 for r in inst.rings)


def test_shipped_instance_validates(inst):
    report = validate_instance(inst)
    assert report.passed
    for name in ("arc_length_rule", "shape_corner_sums", "ring_arcs_realizable"):
        assert report.check(name).passed


def test_theta0_is_three_units(inst):
    assert compute_theta0(inst) == 3
    assert inst.theta0 == 3


def test_ring_length_must_be_full_turn():
    text = HEADER + "ring bad word=R:1,Y:2,R:1\n"
    with pytest.raises(RingLengthError) as err:
        parse_instance(text)
    assert err.value.line is not None


def test_unknown_color_is_rejected():
    text = HEADER + "ring bad word=R:1,Q:2,R:1,Y:2\n"
    with pytest.raises(UnknownColorError):
        parse_instance(text)


def test_duplicate_ring_up_to_rotation():
    text = HEADER + "ring a word=G:1,Y:2,G:1,Y:2\nring b word=Y:2,G:1,Y:2,G:1\n"
    with pytest.raises(DuplicateRingError):
        parse_instance(text)


def test_reflected_ring_is_distinct_when_orientation_matters():
    text = HEADER + (
        "ring a word=G:1,Y:2,B:1,G:1,B:1\n"
        "ring b word=B:1,G:1,B:1,Y:2,G:1\n"
        "option orientation_sensitive=true\n"
    )
    inst = parse_instance(text)
    assert len(inst.rings) == 2
    with pytest.raises(DuplicateRingError):
        parse_instance(text.replace("true", "false"))


@pytest.mark.parametrize("line", [
    "shape blob kind=hexagon corners=R:1,R:1",
    "ring",
    "frobnicate x=1",
    "option sparkle=true",
    "ring r word=R-1",
])
def test_syntax_errors(line):
    with pytest.raises(InstanceSyntaxError):
        parse_instance(HEADER + line + "\n")


def test_bad_corner_sum_is_reported_not_raised():
    text = HEADER.replace("corners=B:1,B:1,B:1", "corners=B:1,Y:2,B:1") + "ring r word=R:1,Y:2,R:1,Y:2\n"
    report = validate_instance(parse_instance(text))
    assert not report.passed
    assert not report.check("shape_corner_sums").passed


def test_canonical_ring_identifies_rotations_and_reflections():
    word = (Arc("G", 1), Arc("Y", 2), Arc("B", 1), Arc("G", 1), Arc("B", 1))
    rotated = word[2:] + word[:2]
    reflected = tuple(reversed(word))
    assert canonical_ring(word) == canonical_ring(rotated)
    assert canonical_ring(word) == canonical_ring(reflected)
    assert canonical_ring(word, reflections=False) != canonical_ring(reflected, reflections=False)


def test_ring_embeds_lozenge_run(inst):
    partial = [(0, "G", 1), (1, "Y", 2), (3, "G", 1)]
    found = ring_embeds(inst, partial)
    assert found
    assert {e.ring for e in found} == {"ring1"}


def test_ring_embeds_empty_partial_lists_everything(inst):
    assert len(ring_embeds(inst, [])) == len(inst.ring_placements)


def test_ring_embeds_rejects_overlap(inst):
    with pytest.raises(ValueError):
        ring_embeds(inst, [(0, "Y", 2), (1, "G", 1)])


def test_ring_name_of(inst):
    word = (Arc("Y", 2), Arc("B", 1), Arc("Y", 2), Arc("B", 1))
    assert inst.ring_name_of(word) == "ring2"
    assert inst.ring_name_of((Arc("G", 1),) * 6) is None


def test_ring_roles_of_the_shipped_instance(inst):
    lozenge, triangle = inst.shapes
    assert [a.color for a in lozenge.corners] == ["G", "Y", "G", "Y"]
    assert {a.color for a in triangle.corners} == {"B"}
    assert {e.ring for e in ring_embeds(inst, [(0, "G", 1), (1, "Y", 2), (3, "G", 1)])} == {"ring1"}


def test_yellow_green_runs(inst):
    assert ring_embeds(inst, [(0, "G", 1), (1, "G", 1), (2, "Y", 2), (4, "G", 1)]) == []
    found = ring_embeds(inst, [(0, "Y", 2), (2, "G", 1), (3, "Y", 2)])
    assert found
    assert {e.ring for e in found} == {"ring1"}


def test_acute_corner_has_two_readings(inst):
    # an isolated green corner between two blue ones, read forwards and mirrored
    found = ring_embeds(inst, [(0, "G", 1), (1, "B", 1), (5, "B", 1)])
    assert {e.ring for e in found} == {"ring3"}
    assert {e.reflected for e in found} == {False, True}
