"""Command line exit codes: 0 success, 1 finding, 2 usage/input/budget error."""

import pytest

from main import EXIT_FINDING, EXIT_OK, EXIT_USAGE, run


def test_unknown_subcommand():
    assert run(["frobnicate"]) == EXIT_USAGE


def test_help_is_success():
    assert run(["--help"]) == EXIT_OK


def test_validate_shipped_instance():
    assert run(["validate"]) == EXIT_OK


def test_missing_instance_file(tmp_path):
    assert run(["--instance", str(tmp_path / "absent.ring"), "validate"]) == EXIT_USAGE


def test_census_radius_over_limit():
    assert run(["census", "--radius", "99"]) == EXIT_USAGE


def test_landau():
    assert run(["landau", "--p", "10", "--brute"]) == EXIT_OK
    assert run(["landau", "--p", "0"]) == EXIT_USAGE


def test_density_needs_a_seed():
    assert run(["density", "--c", "1000", "--delta", "0.5", "--f", "0"]) == EXIT_USAGE


def test_density_with_nothing_flagged():
    argv = ["density", "--c", "1000", "--delta", "0.5", "--f", "0", "--seed", "3", "--trials", "500"]
    assert run(argv) == EXIT_OK


def test_density_bad_params():
    argv = ["density", "--c", "10", "--delta", "0.5", "--f", "20", "--seed", "3"]
    assert run(argv) == EXIT_USAGE


def test_small_tori_margin_sign():
    assert run(["smalltori", "--p", "100000", "--clin", "1", "--delta", "0.1"]) == EXIT_OK
    assert run(["smalltori", "--p", "10", "--clin", "1", "--delta", "0.1"]) == EXIT_FINDING


def test_generate_classify_and_render(tmp_path):
    patch = tmp_path / "plane.patch"
    svg = tmp_path / "plane.svg"
    assert run(["generate", "--type", "diamond_plane", "--radius", "2",
                "--out", str(patch), "--svg", str(svg)]) == EXIT_OK
    assert patch.exists() and svg.exists()
    assert run(["classify", "--patch", str(patch), "--radius", "2"]) == EXIT_OK
    assert run(["render", "--patch", str(patch), "--out", str(tmp_path / "again.svg")]) == EXIT_OK


def test_generate_rejects_bad_params():
    assert run(["generate", "--type", "series_A", "--params", "1,x"]) == EXIT_USAGE
    assert run(["generate", "--type", "two_by_one", "--params", "3"]) == EXIT_USAGE


def test_complex_check_on_torus(tmp_path):
    spec = tmp_path / "torus.cx"
    spec.write_text("lozenge a b a' b'\n", encoding="utf-8")
    assert run(["complex", "check", "--in", str(spec)]) == EXIT_OK


def test_complex_file_errors(tmp_path):
    spec = tmp_path / "broken.cx"
    spec.write_text("lozenge a a' b c\n", encoding="utf-8")
    assert run(["complex", "check", "--in", str(spec)]) == EXIT_USAGE


@pytest.mark.slow
def test_lemma_certificate_from_cli():
    assert run(["lemmas", "--only", "3x3-impossible"]) == EXIT_OK
