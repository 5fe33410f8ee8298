"""Tests for the graph-of-spaces presentation of pi1."""

import pytest

from scripts.utils.book_model import BookComplex, Edge, SurfaceType
from scripts.utils.errors import InvalidBookError, MalformedInputError
from scripts.utils.integer_homology import homology
from scripts.utils.presentation import (
    ROLE_CIRCLE,
    ROLE_CROSSCAP,
    ROLE_HANDLE,
    ROLE_STABLE,
    boundary_word,
    format_presentation,
    free_reduce,
    invert,
    parse_presentation,
    power,
    present,
    relator_matrix,
    spanning_tree_edges,
)


def test_word_helpers():
    assert invert((1, 2, -3)) == (3, -2, -1)
    assert free_reduce((1, 2, -2, -1, 3)) == (3,)
    assert power((1, 2), -2) == (-2, -1, -2, -1)
    assert power((1,), 0) == ()


def test_boundary_words_of_a_torus_with_one_hole():
    s = SurfaceType(True, 1, 1)
    # ([x, y])^-1 = y x y^-1 x^-1
    assert boundary_word(s, 0) == (2, 1, -2, -1)
    with pytest.raises(IndexError):
        boundary_word(s, 1)


def test_boundary_words_of_a_crosscapped_surface():
    s = SurfaceType(False, 1, 2)
    assert boundary_word(s, 0) == (2,)
    assert boundary_word(s, 1) == (-2, -1, -1)
    assert boundary_word(s, 1, offset=3) == (-5, -4, -4)


def test_running_example_presentation(running_presentation):
    p = running_presentation
    assert p.generators == ("x0_1", "y0_1", "t0")
    assert p.roles == (ROLE_HANDLE, ROLE_HANDLE, ROLE_CIRCLE)
    assert p.stable_letter_count == 0
    assert len(p.relators) == 1
    assert format_presentation(p) == "gen: x0_1 y0_1 t0\nrel: y0_1 x0_1 Y0_1 X0_1 T0 T0\n"


def test_words_from_export_tokens(running_presentation):
    p = running_presentation
    assert p.words_from_names("y0_1", "x0_1", "Y0_1", "X0_1", "T0", "T0") == p.relators[0]
    with pytest.raises(MalformedInputError):
        p.words_from_names("z9")


def test_running_example_abelianization(running_presentation):
    h1 = homology(relator_matrix(running_presentation), cols=3)
    assert h1.invariant_factors == (2,)
    assert h1.betti == 2


def test_stable_letters_for_non_tree_edges(crosscap_book):
    p = present(crosscap_book)
    assert spanning_tree_edges(crosscap_book) == {0}
    assert p.generators == ("x0_1", "s0_1", "t0", "u1")
    assert p.roles[0] == ROLE_CROSSCAP
    assert p.roles[3] == ROLE_STABLE
    assert p.edge_paths == (None, 3)
    assert p.relators[0] == (2, -3)
    assert p.relators[1] == (-2, -1, -1, 4, -3, -3, -3, -4)


def test_crosscap_book_abelianization(crosscap_book):
    p = present(crosscap_book)
    h1 = homology(relator_matrix(p), cols=len(p.generators))
    assert h1.invariant_factors == (2,)
    assert h1.betti == 2


def test_counts_match_graph_of_spaces():
    book = BookComplex(
        2,
        [SurfaceType(True, 0, 3), SurfaceType(False, 2, 1)],
        [Edge(0, 0, 0, 1), Edge(0, 1, 1, 2), Edge(0, 2, 1, -1), Edge(1, 0, 0, 3)],
    )
    p = present(book)
    # pages: 2 + 2 generators, circles: 2, stable letters: 4 edges - 3 tree edges
    assert len(p.generators) == 4 + 2 + 1
    assert len(p.relators) == 4
    assert p.stable_letter_count == 1


def test_present_requires_valid_book():
    book = BookComplex(1, [SurfaceType(True, 0, 2)], [Edge(0, 0, 0, 1), Edge(0, 1, 0, 1)])
    with pytest.raises(InvalidBookError):
        present(book)


def test_text_grammar_round_trip(crosscap_book):
    p = present(crosscap_book)
    parsed = parse_presentation(format_presentation(p))
    assert parsed.generators == p.generators
    assert parsed.relators == p.relators
    assert parsed.roles == p.roles


def test_parse_presentation_errors():
    with pytest.raises(MalformedInputError):
        parse_presentation("rel: a b\n")
    with pytest.raises(MalformedInputError):
        parse_presentation("gen: a b\nrel: a c\n")
    with pytest.raises(MalformedInputError):
        parse_presentation("")
