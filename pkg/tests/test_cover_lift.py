"""Tests for lifting the graph of spaces to a finite cover."""

import pytest

from scripts.utils.book_model import SurfaceType
from scripts.utils.cover_lift import (
    boundary_orbits,
    check_invariants,
    graph_betti,
    lift,
    lift_orientable,
    lift_topology,
    lifted_graph,
    substitute,
    surface_generator_words,
)
from scripts.utils.errors import NotAHomomorphismError
from scripts.utils.finite_quotient import FiniteQuotient, parse_cycles
from scripts.utils.presentation import present


def test_substitute_inverts_words():
    assert substitute((1, -2), [(3, 4), (5,)]) == (3, 4, -5)
    assert substitute((-1,), [(3, 4)]) == (-4, -3)


def test_boundary_orbits():
    elements = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    step = (1, 2, 0)
    orbits = boundary_orbits(elements, step)
    assert len(orbits) == 1
    assert orbits[0] == sorted(elements)
    assert boundary_orbits(elements, (0, 1, 2)) == [[e] for e in sorted(elements)]


def test_trivial_cover_is_the_base(running_book, running_presentation, trivial_quotient):
    cov = lift(running_book, running_presentation, trivial_quotient)
    assert cov.total_degree == 1
    assert len(cov.circle_lifts) == 1
    assert len(cov.surface_lifts) == 1
    assert cov.surface_lifts[0].topology == SurfaceType(True, 1, 1)
    assert cov.surface_lifts[0].boundary_lifts[0].elevation_degree == 2


def test_double_cover_unwraps_the_binding(running_book, running_presentation, double_quotient):
    cov = lift(running_book, running_presentation, double_quotient)
    assert cov.circle_lift_count(0) == 1
    assert cov.circle_degree(0) == 2
    assert cov.surface_lift_count(0) == 2
    assert [b.elevation_degree for s in cov.surface_lifts for b in s.boundary_lifts] == [1, 1]
    assert all(s.topology == SurfaceType(True, 1, 1) for s in cov.surface_lifts)
    assert graph_betti(cov) == 0
    assert cov.edge_lift_count == 2


def test_page_unwrapping_cover(running_book, running_presentation):
    # x -> (1 2), y -> identity, t -> identity: the page lifts to one twice-punctured torus
    images = {"x0_1": (1, 0), "y0_1": (0, 1), "t0": (0, 1)}
    q = FiniteQuotient(2, images)
    cov = lift(running_book, running_presentation, q)
    assert cov.circle_lift_count(0) == 2
    assert cov.surface_lift_count(0) == 1
    assert cov.surface_lifts[0].topology == SurfaceType(True, 1, 2)
    assert sorted(b.circle_lift for b in cov.surface_lifts[0].boundary_lifts) == [0, 1]
    assert graph_betti(cov) == 0


def test_orientation_double_cover_of_a_crosscapped_page(crosscap_book):
    p = present(crosscap_book)
    images = {name: (0, 1) for name in p.generators}
    images["x0_1"] = (1, 0)
    q = FiniteQuotient(2, images)
    gens = surface_generator_words(p, 0)
    assert lift_orientable(q, crosscap_book.surfaces[0], gens)
    # chi -2, four boundary circles: a sphere with four holes
    assert lift_topology(q, crosscap_book.surfaces[0], gens) == SurfaceType(True, 0, 4)


def test_non_orientable_lift_survives(crosscap_book):
    p = present(crosscap_book)
    images = {name: (0, 1) for name in p.generators}
    images["s0_1"] = (1, 0)
    images["t0"] = (1, 0)
    q = FiniteQuotient(2, images)
    gens = surface_generator_words(p, 0)
    assert not lift_orientable(q, crosscap_book.surfaces[0], gens)
    cov = lift(crosscap_book, p, q)
    assert all(not s.topology.orientable for s in cov.surface_lifts)
    assert check_invariants(cov) == []


def test_degree_sum_law_in_a_cyclic_cover(crosscap_book):
    p = present(crosscap_book)
    images = {name: (0, 1, 2) for name in p.generators}
    images["t0"] = parse_cycles("(1 2 3)", 3)
    images["s0_1"] = images["t0"]
    images["x0_1"] = parse_cycles("(1 2 3)", 3)
    q = FiniteQuotient(3, images)
    cov = lift(crosscap_book, p, q)
    for index, edge in enumerate(crosscap_book.edges):
        for c in range(len(cov.circle_lifts)):
            total = sum(
                b.elevation_degree
                for s in cov.surface_lifts
                for b in s.boundary_lifts
                if b.edge == index and b.circle_lift == c
            )
            assert total == edge.degree


def test_lift_rejects_non_homomorphisms(running_book, running_presentation):
    q = FiniteQuotient(2, {"x0_1": (0, 1), "y0_1": (0, 1), "t0": (0, 1)})
    q_bad = FiniteQuotient(3, {
        "x0_1": parse_cycles("(1 2)", 3),
        "y0_1": parse_cycles("(1 2 3)", 3),
        "t0": parse_cycles("()", 3),
    })
    lift(running_book, running_presentation, q)
    with pytest.raises(NotAHomomorphismError):
        lift(running_book, running_presentation, q_bad)


def test_cover_json_and_graph(running_book, running_presentation, double_quotient):
    cov = lift(running_book, running_presentation, double_quotient)
    out = cov.to_json()
    assert out["total_degree"] == 2
    assert [c["label"] for c in out["circle_lifts"]] == ["()"]
    assert [s["label"] for s in out["surface_lifts"]] == ["()", "(1 2)"]
    assert len(out["attachments"]) == 2
    assert lifted_graph(cov).number_of_edges() == 2
