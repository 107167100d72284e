"""Valuation, distance, isolation and limits of marked windows."""

import math

import pytest

from classification_module import ALL_TAGS, ClassificationType, diamond_plane_window, series_a_window
from errors_module import BudgetExceededError
from instance_model_module import load_instance
from puzzle_space_module import (
    ball_encoding,
    class_generator_windows,
    distance,
    is_nondecreasing,
    isolation_radius,
    limit_profile,
    pairwise_distances,
    ultrametric_violations,
    valuation,
    valuation_report,
)


@pytest.fixture(scope="module")
def inst():
    return load_instance()


@pytest.fixture(scope="module")
def plane(inst):
    return diamond_plane_window(inst, 3)


def test_window_agrees_with_itself_to_its_radius(plane):
    assert valuation(plane, plane) == 3
    assert distance(plane, plane) == pytest.approx(math.exp(-3))
    report = valuation_report(plane, plane)
    assert report.with_reflections == report.rotations_only == 3
    assert not report.differs


def test_translated_plane_is_the_same_point(inst, plane):
    shifted = diamond_plane_window(inst, 3, center=(2, -1))
    assert valuation(plane, shifted) == 3


def test_triangles_next_to_the_mark_separate_at_once(inst, plane):
    strips = series_a_window(inst, (1, 1, 1), 3)
    assert valuation(plane, strips) == 0
    assert distance(plane, strips) == pytest.approx(1.0)


def test_ball_outside_window_is_none(inst):
    small = diamond_plane_window(inst, 2)
    assert ball_encoding(small, 1) is not None
    assert ball_encoding(small, 5) is None


def test_series_a_tends_to_diamond_plane(inst):
    profile = limit_profile("series_A", "diamond_plane", [1, 3, 5], 3, inst)
    assert profile == [(1, 0), (3, 1), (5, 2)]
    assert is_nondecreasing(profile)


def test_is_nondecreasing():
    assert is_nondecreasing([(1, 0), (2, 0), (3, 2)])
    assert not is_nondecreasing([(1, 2), (2, 1)])
    assert is_nondecreasing([])


def test_distances_are_ultrametric(inst):
    windows = [diamond_plane_window(inst, 3)] + [
        series_a_window(inst, h, 3) for h in ((1, 1, 1), (3,), (5,))
    ]
    table = pairwise_distances(windows)
    for i in range(len(windows)):
        for j in range(len(windows)):
            assert table[i][j] == table[j][i]
    assert ultrametric_violations(table) == []


def test_ultrametric_violations_flags_a_bad_triangle():
    table = [[0.0, 0.1, 0.9],
             [0.1, 0.0, 0.1],
             [0.9, 0.1, 0.0]]
    assert (0, 1, 2) in ultrametric_violations(table)


def test_isolation_radius_budget():
    with pytest.raises(BudgetExceededError):
        isolation_radius(ClassificationType("diamond_plane"), rmax=99)


@pytest.mark.slow
def test_diamond_plane_is_never_isolated(inst):
    # tall series A strips contain every ball of the plane
    assert isolation_radius(ClassificationType("diamond_plane"), rmax=2, inst=inst) is None


@pytest.mark.slow
def test_obtuse_sector_is_isolated(inst):
    r = isolation_radius(ClassificationType("obtuse_sector"), rmax=3, inst=inst)
    assert r is not None
    assert 1 <= r <= 3


@pytest.mark.slow
def test_every_class_has_a_generator_window(inst):
    windows = class_generator_windows(2, inst)
    assert [w.provenance.tag for w in windows] == list(ALL_TAGS)
