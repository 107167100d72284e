"""Developments of ring complexes: strips, cylinders and flat tori."""

import pytest

from development_module import (
    band_region,
    cylinder_search,
    develop,
    diamond_strip,
    flat_reports,
    flats_from_strips,
    strip_immersions,
    template,
    triangle_strip,
    unique_embeddability_check,
)
from instance_model_module import load_instance
from lattice_module import Cell, Period
from ring_complex_module import build_complex, load_complex, parse_complex

TORUS = "lozenge a b a' b' colors=G:1,Y:2,G:1,Y:2\n"
TWO_TORI = TORUS + "lozenge a c a' c' colors=G:1,Y:2,G:1,Y:2\n"
TRIANGLE = "triangle a b c colors=B:1,B:1,B:1\n"


@pytest.fixture(scope="module")
def inst():
    return load_instance()


def test_period_reduction():
    assert Period(3).vertex((4, 2)) == (1, 2)
    assert Period(3).vertex((-1, 0)) == (2, 0)
    assert Period(3, 1, 2).vertex((0, 2)) == (2, 0)
    assert Period(3).cell(Cell(5, 1, False)) == Cell(2, 1, False)
    assert str(Period(3, 1, 2)) == "(3,0)+(1,2)"
    assert str(Period(4)) == "(4,0)"


def test_band_region():
    assert len(band_region(2, 3)) == 12


def test_templates():
    assert len(diamond_strip(3).cells) == 6
    assert len(triangle_strip(5).cells) == 5
    assert len(triangle_strip(5).units) == 2
    with pytest.raises(ValueError):
        template("hexagon_strip", 2)
    with pytest.raises(ValueError):
        template("diamond_strip", 0)


def test_torus_develops_on_one_cell_band():
    X = parse_complex(TORUS)
    found = develop(X, band_region(1, 1), Period(1), first_only=True)
    assert len(found) == 1
    assert found[0].faces_used() == [0]


def test_torus_closes_into_a_cylinder():
    report = cylinder_search(parse_complex(TORUS), max_circumference=1, max_height=1)
    assert [(f.circumference, f.height) for f in report.findings] == [(1, 1)]
    assert not report.acylindrical_at_scale


def test_single_triangle_has_no_cylinders():
    report = cylinder_search(parse_complex(TRIANGLE), max_circumference=3, max_height=2)
    assert report.findings == []
    assert len(report.searched) == 6
    assert report.acylindrical_at_scale


def test_no_lozenges_no_diamond_strips():
    assert strip_immersions(parse_complex(TRIANGLE), "diamond_strip", 2) == []


def test_one_lozenge_strip_is_always_unique():
    cert = unique_embeddability_check(parse_complex(TORUS), "diamond_strip", 1)
    assert cert.passed
    assert cert.immersions >= 1
    assert cert.witness is None


def test_two_tori_break_unique_embeddability():
    cert = unique_embeddability_check(parse_complex(TWO_TORI), "diamond_strip", 2)
    assert not cert.passed
    assert cert.witness


def test_torus_flats_are_diamond_planes(inst):
    X = build_complex("lozenge a b a' b'\n", inst)
    flats = flats_from_strips(X, k=1, inst=inst)
    assert flats
    for report in flat_reports(flats):
        assert report.period == "(1,0)+(0,1)"
        assert report.classes == ["diamond_plane"]


@pytest.mark.slow
def test_shipped_complex_flats_are_series_a(inst):
    flats = flats_from_strips(load_complex(inst=inst), k=3, inst=inst, per_period=1)
    assert flats
    for report in flat_reports(flats):
        assert report.classes
        assert all(c.startswith("series_A") for c in report.classes)
