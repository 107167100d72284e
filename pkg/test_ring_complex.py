"""Complex files, vertex links, the type check, girth and the colouring solver."""

import pytest

from errors_module import AmbiguousSpecError, ComplexSpecError, InconsistentSpecError
from instance_model_module import Arc, canonical_ring, load_instance
from ring_complex_module import (
    build_complex,
    check_type,
    format_complex,
    girth_check,
    isolated_flats_note,
    link,
    load_complex,
    parse_complex,
    ring_words,
    rings_at,
    solve_colouring,
)

TORUS = "lozenge a b a' b'\n"
COLOURED_TORUS = "lozenge a b a' b' colors=G:1,Y:2,G:1,Y:2\n"


def disk(n, colours=""):
    """n triangles around one center vertex: spokes s_i, rim edges r_i."""
    suffix = f" colors={colours}" if colours else ""
    return "".join(f"triangle s{i} r{i} s{(i + 1) % n}'{suffix}\n" for i in range(n))


@pytest.fixture(scope="module")
def inst():
    return load_instance()


@pytest.fixture(scope="module")
def fixture_complex():
    return load_complex(colour=False)


def test_torus_structure():
    X = parse_complex(TORUS)
    summary = X.summary()
    assert (summary.vertices, summary.edges, summary.lozenges, summary.triangles) == (1, 2, 1, 0)
    graph = link(X, "v0")
    assert graph.number_of_nodes() == 4
    assert graph.number_of_edges() == 4


def test_distinct_primes_split_edges():
    X = parse_complex(TORUS, primes="distinct")
    assert len(X.edge_ends) == 4
    assert len(X.vertices) == 4
    assert parse_complex("option primes=distinct\n" + TORUS).primes == "distinct"


def test_single_triangle_is_a_disk():
    X = parse_complex("triangle a b c\n")
    assert X.vertices == ("v0", "v1", "v2")
    for v in X.vertices:
        graph = link(X, v)
        assert graph.number_of_nodes() == 2
        assert graph.number_of_edges() == 1


def test_backtracking_word_is_inconsistent():
    with pytest.raises(InconsistentSpecError):
        parse_complex("lozenge a a' b c\n")


@pytest.mark.parametrize("text", [
    "triangle a b\n",
    "hexagon a b c d e f\n",
    "option primes=sideways\n",
    "triangle a b c colors=G:1,B:1\n",
    "triangle a b c shade=dark\n",
    "triangle a b c-d\n",
])
def test_bad_complex_files(text):
    with pytest.raises(ComplexSpecError):
        parse_complex(text)


def test_corner_lengths_must_fit_the_face():
    with pytest.raises(InconsistentSpecError):
        parse_complex("lozenge a b c d colors=G:1,G:1,Y:2,Y:2\n")


def test_unknown_vertex():
    with pytest.raises(KeyError):
        link(parse_complex(TORUS), "v9")


def test_coloured_torus_passes_type_check(inst):
    X = parse_complex(COLOURED_TORUS)
    report = check_type(X, inst)
    assert report.passed
    assert report.rings_per_vertex == {"v0": 1}
    word = (Arc("G", 1), Arc("Y", 2), Arc("G", 1), Arc("Y", 2))
    assert ring_words(X, "v0") == {canonical_ring(word)}
    (cycle,) = rings_at(X, "v0")
    assert cycle.length == 6


def test_torus_colourings_are_counted(inst):
    solutions, truncated = solve_colouring(parse_complex(TORUS), inst)
    assert len(solutions) == 2
    assert not truncated
    X = build_complex(TORUS, inst)
    assert X.coloured
    assert X.colourings == 2
    with pytest.raises(AmbiguousSpecError):
        build_complex(TORUS, inst, strict=True)
    with pytest.raises(ComplexSpecError):
        build_complex(TORUS, inst, choice=5)


def test_six_triangles_around_a_vertex_have_no_colouring(inst):
    with pytest.raises(InconsistentSpecError):
        build_complex(disk(6), inst)


def test_polygon_face_fails_type_check(inst):
    X = parse_complex("polygon a b c d e colors=G:1,G:1,G:1,G:1,G:1\n")
    report = check_type(X, inst)
    assert not report.passed
    assert len(report.bad_faces) == 1


def test_rings_need_colours():
    with pytest.raises(ComplexSpecError):
        rings_at(parse_complex(TORUS), "v0")


def test_girth_of_a_five_triangle_cone():
    X = parse_complex(disk(5, "B:1,B:1,B:1"))
    assert len(X.vertices) == 6
    report = girth_check(X)
    assert min(g for g in report.girth.values() if g is not None) == 5
    assert not report.npc


def test_girth_of_torus_and_disk():
    assert girth_check(parse_complex(COLOURED_TORUS)).girth == {"v0": 6}
    report = girth_check(parse_complex("triangle a b c colors=B:1,B:1,B:1\n"))
    assert set(report.girth.values()) == {None}
    assert report.npc


def test_format_complex_reads_back():
    X = parse_complex(COLOURED_TORUS)
    again = parse_complex(format_complex(X))
    assert [f.word for f in again.faces] == [f.word for f in X.faces]
    assert [f.corners for f in again.faces] == [f.corners for f in X.faces]


def test_shipped_complex_counts(fixture_complex):
    summary = fixture_complex.summary()
    assert summary.vertices == 3
    assert summary.edges == 24
    assert summary.triangles == 8
    assert summary.lozenges == 12


def test_shipped_complex_links(fixture_complex):
    germs = arcs = 0
    for v in fixture_complex.vertices:
        graph = link(fixture_complex, v)
        assert graph.number_of_nodes() == 16
        assert graph.number_of_edges() == 24
        germs += graph.number_of_nodes()
        arcs += graph.number_of_edges()
    assert germs == 2 * len(fixture_complex.edge_ends)
    assert arcs == sum(len(f.word) for f in fixture_complex.faces)


def test_isolated_flats_stays_unverified():
    assert "unverified" in isolated_flats_note()


@pytest.fixture(scope="module")
def coloured_complex(inst):
    return load_complex(inst=inst)


def test_shipped_complex_colouring_is_unique(coloured_complex):
    assert coloured_complex.coloured
    assert coloured_complex.colourings == 1
    letter = coloured_complex.faces[8]
    assert [a.color for a in letter.corners] == ["G", "Y", "G", "Y"]
    mixed = coloured_complex.faces[14]
    assert [a.color for a in mixed.corners] == ["Y", "G", "Y", "G"]
    for face in coloured_complex.faces[:8]:
        assert {a.color for a in face.corners} == {"B"}


def test_shipped_complex_passes_type_check(coloured_complex, inst):
    report = check_type(coloured_complex, inst)
    assert report.passed
    assert not report.short_cycles
    assert not report.ringless
    assert report.rings_per_vertex == {v: 12 for v in coloured_complex.vertices}


def test_shipped_complex_ring_roles(coloured_complex, inst):
    for v in coloured_complex.vertices:
        names = [inst.ring_name_of(c.word) for c in rings_at(coloured_complex, v)]
        assert names.count("ring3") == 8
        assert names.count("ring2") == 4
        assert "ring1" not in names


def test_shipped_complex_girth_is_a_full_turn(coloured_complex):
    report = girth_check(coloured_complex)
    assert set(report.girth.values()) == {6}
    assert report.npc


def test_short_link_cycle_fails_type_check(inst):
    X = parse_complex(COLOURED_TORUS)
    assert check_type(X, inst).passed
    cone = parse_complex(disk(5, "B:1,B:1,B:1"))
    report = check_type(cone, inst)
    assert not report.passed
    assert report.short_cycles
    assert report.ringless


def test_colouring_rejects_short_cycles(inst):
    with pytest.raises(InconsistentSpecError):
        build_complex(disk(5), inst)
