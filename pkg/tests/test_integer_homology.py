"""Tests for Smith normal form and the integer linear algebra around it."""

import random

import pytest

from scripts.utils.errors import CapExceededError
from scripts.utils.integer_homology import (
    determinant,
    gcd_of_minors_torsion,
    hadamard_determinant_bound,
    homology,
    integer_kernel,
    invariant_factors,
    matmul,
    matrix_rank,
    smith_normal_form,
    torsion_order,
)


def test_diagonal_chain():
    form = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert form.diagonal == (2, 6, 12)
    assert form.torsion_order == 144


def test_invariant_factors_drop_units():
    assert invariant_factors([[2, 0], [0, 3]]) == (6,)
    assert invariant_factors([[1, 0], [0, 4]]) == (4,)
    assert torsion_order([[0, 0]]) == 1


def test_homology_of_empty_and_zero_matrices():
    h = homology([], cols=3)
    assert h.betti == 3
    assert h.invariant_factors == ()
    h = homology([[0, 0, -2]])
    assert h.invariant_factors == (2,)
    assert h.betti == 2
    assert h.to_json()["matrix_shape"] == [1, 3]


def test_witnesses_reproduce_the_diagonal():
    m = [[4, 6, 2], [2, 8, 6], [6, 10, 0]]
    form = smith_normal_form(m, witnesses=True)
    assert matmul(matmul(form.left, m), form.right) == form.diagonal_matrix()
    assert abs(determinant(form.left)) == 1
    assert abs(determinant(form.right)) == 1


def test_integer_kernel():
    m = [[1, 2, 3], [2, 4, 6]]
    kernel = integer_kernel(m)
    assert len(kernel) == 2
    for vector in kernel:
        assert all(sum(a * x for a, x in zip(row, vector)) == 0 for row in m)


def test_rank_and_determinant():
    assert matrix_rank([[1, 2], [2, 4]]) == 1
    assert matrix_rank([[0, 0, 0]]) == 0
    assert determinant([[2, 1], [1, 1]]) == 1
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[1, 2], [2, 4]]) == 0
    assert determinant([[2, 0, 1], [1, 3, 2], [1, 1, 2]]) == 6


def test_gcd_of_minors():
    assert gcd_of_minors_torsion([[0, 1, -1, 0], [-2, -1, -3, 0]]) == 2
    assert gcd_of_minors_torsion([[0, 0]]) == 1
    with pytest.raises(CapExceededError):
        gcd_of_minors_torsion([[1] * 9], max_dimension=8)


def test_hadamard_bound_dominates_determinant():
    rng = random.Random(7)
    for _ in range(50):
        m = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)]
        assert abs(determinant(m)) <= hadamard_determinant_bound(m)


def test_big_integers_stay_exact():
    big = 10 ** 40
    form = smith_normal_form([[big, 0], [0, big * 3]])
    assert form.diagonal == (big, 3 * big)
    assert form.torsion_order == 3 * big * big


def _unimodular_move(rng: random.Random, m: list, cols: int) -> list:
    m = [row[:] for row in m]
    rows = len(m)
    kind = rng.choice(("swap_rows", "swap_cols", "negate_row", "negate_col", "add_row", "add_col"))
    if kind == "swap_rows" and rows > 1:
        i, j = rng.sample(range(rows), 2)
        m[i], m[j] = m[j], m[i]
    elif kind == "swap_cols" and cols > 1:
        i, j = rng.sample(range(cols), 2)
        for row in m:
            row[i], row[j] = row[j], row[i]
    elif kind == "negate_row":
        i = rng.randrange(rows)
        m[i] = [-x for x in m[i]]
    elif kind == "negate_col":
        i = rng.randrange(cols)
        for row in m:
            row[i] = -row[i]
    elif kind == "add_row" and rows > 1:
        i, j = rng.sample(range(rows), 2)
        k = rng.randint(-5, 5)
        m[i] = [a + k * b for a, b in zip(m[i], m[j])]
    elif kind == "add_col" and cols > 1:
        i, j = rng.sample(range(cols), 2)
        k = rng.randint(-5, 5)
        for row in m:
            row[i] += k * row[j]
    return m


def test_torsion_survives_unimodular_moves():
    rng = random.Random(77)
    for _ in range(200):
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        m = [[rng.randint(-6, 6) for _ in range(cols)] for _ in range(rows)]
        expected = invariant_factors(m, cols)
        moved = m
        for _ in range(rng.randint(1, 8)):
            moved = _unimodular_move(rng, moved, cols)
        assert invariant_factors(moved, cols) == expected
        assert torsion_order(moved, cols) == torsion_order(m, cols)
