"""Tests for the book model: parsing, validation and global bounds."""

import pytest

from scripts.utils.book_model import (
    BookComplex,
    Edge,
    SurfaceType,
    circle_valence,
    euler_characteristic,
    global_bounds,
    load_book,
    parse_book,
    require_valid,
    underlying_graph,
    validate,
)
from scripts.utils.errors import InvalidBookError, MalformedInputError


def test_euler_characteristic():
    assert euler_characteristic(SurfaceType(True, 1, 1)) == -1
    assert euler_characteristic(SurfaceType(True, 0, 3)) == -1
    assert euler_characteristic(SurfaceType(False, 1, 2)) == -1
    assert euler_characteristic(SurfaceType(False, 3, 1)) == -2
    assert SurfaceType(True, 2, 1).rank == 4


def test_running_example_is_valid(running_book):
    report = validate(running_book)
    assert report.valid
    assert report.to_json() == {"valid": True, "violations": []}


def test_annulus_page_rejected():
    book = BookComplex(1, [SurfaceType(True, 0, 2)], [Edge(0, 0, 0, 1), Edge(0, 1, 0, 2)])
    report = validate(book)
    assert not report.valid
    assert any("surface 0" in v and "Euler characteristic 0" in v for v in report.violations)


def test_validation_lists_every_violation():
    book = BookComplex(
        2,
        [SurfaceType(True, 1, 2)],
        [Edge(0, 0, 0, 0), Edge(0, 0, 0, 1)],
    )
    violations = validate(book).violations
    assert any("degree must be nonzero" in v for v in violations)
    assert any("attached twice" in v for v in violations)
    assert any("boundary 1 is not attached" in v for v in violations)
    assert any("disconnected" in v for v in violations)


def test_require_valid_raises_with_violations():
    book = BookComplex(1, [SurfaceType(False, 0, 1)], [Edge(0, 0, 0, 1)])
    with pytest.raises(InvalidBookError) as excinfo:
        require_valid(book)
    assert excinfo.value.violations


def test_global_bounds():
    book = BookComplex(
        2,
        [SurfaceType(True, 0, 3), SurfaceType(False, 1, 2)],
        [
            Edge(0, 0, 0, 1), Edge(0, 1, 0, -3), Edge(0, 2, 1, 2),
            Edge(1, 0, 0, 1), Edge(1, 1, 1, 1),
        ],
    )
    assert validate(book).valid
    assert circle_valence(book, 0) == 3
    assert circle_valence(book, 1) == 2
    b = global_bounds(book)
    assert (b.val, b.d, b.m) == (3, 3, 2)


@pytest.mark.parametrize("circle_order, surface_order", [
    ((0, 1), (0, 1)), ((1, 0), (0, 1)), ((0, 1), (1, 0)), ((1, 0), (1, 0)),
])
def test_global_bounds_ignore_relabeling(circle_order, surface_order):
    surfaces = [SurfaceType(True, 0, 3), SurfaceType(False, 1, 2)]
    edges = [
        Edge(0, 0, 0, 1), Edge(0, 1, 0, -3), Edge(0, 2, 1, 2),
        Edge(1, 0, 0, 1), Edge(1, 1, 1, 1),
    ]
    relabeled = BookComplex(
        2,
        [surfaces[j] for j in surface_order],
        [Edge(surface_order.index(e.surface), e.boundary_index, circle_order.index(e.circle), e.degree)
         for e in edges],
    )
    assert validate(relabeled).valid
    b = global_bounds(relabeled)
    assert (b.val, b.d, b.m) == (3, 3, 2)
    assert sorted(circle_valence(relabeled, i) for i in range(2)) == [2, 3]


def test_circle_valence_out_of_range(running_book):
    with pytest.raises(IndexError):
        circle_valence(running_book, 1)


def test_underlying_graph_is_bipartite_multigraph(crosscap_book):
    graph = underlying_graph(crosscap_book)
    assert graph.number_of_nodes() == 2
    assert graph.number_of_edges() == 2


def test_parse_book_rejects_unknown_keys():
    with pytest.raises(MalformedInputError):
        parse_book({"circles": 1, "surfaces": [], "edges": [], "colour": "red"})
    with pytest.raises(MalformedInputError):
        parse_book({"circles": 1, "surfaces": [{"orientable": True, "genus": 1, "boundary": 1, "x": 0}],
                    "edges": []})


def test_parse_book_defaults_degree_to_one():
    book = parse_book({
        "circles": 1,
        "surfaces": [{"orientable": True, "genus": 1, "boundary": 1}],
        "edges": [{"surface": 0, "boundary_index": 0, "circle": 0}],
    })
    assert book.edges[0].degree == 1


@pytest.mark.parametrize("body", [
    {"circles": 1, "surfaces": 5, "edges": []},
    {"circles": 1, "surfaces": [], "edges": None},
    {"circles": 1, "surfaces": {"orientable": True}, "edges": []},
])
def test_parse_book_rejects_non_list_sections(body):
    with pytest.raises(MalformedInputError, match="must be a list"):
        parse_book(body)


def test_load_book_round_trip(data_dir, running_book):
    book = load_book(data_dir / "running_example.json")
    assert book == running_book
    assert parse_book(book.to_json()) == book
