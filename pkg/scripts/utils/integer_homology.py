#!/usr/bin/env python3
"""
Exact integer linear algebra for first homology.

Matrices are lists of integer rows (relations) over a fixed number of columns
(generators); the group described is the cokernel Z^cols / rowspace. Python
integers are unbounded, so nothing here ever reduces modulo anything or
touches floating point.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from scripts.utils.errors import CapExceededError

logger = logging.getLogger(__name__)


def shape(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> tuple:
    rows = len(matrix)
    if cols is None:
        cols = len(matrix[0]) if rows else 0
    return rows, cols


def identity_matrix(n: int) -> list:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> list:
    _, cols = shape(matrix, cols)
    return [[row[j] for row in matrix] for j in range(cols)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


@dataclass(frozen=True)
class SmithForm:
    """Diagonal of the Smith normal form plus optional witnesses U, V with U*M*V = D."""
    diagonal: tuple
    rank: int
    shape: tuple
    left: Optional[list] = None
    right: Optional[list] = None

    @property
    def invariant_factors(self) -> tuple:
        return tuple(d for d in self.diagonal if d > 1)

    @property
    def torsion_order(self) -> int:
        return math.prod(self.invariant_factors)

    def diagonal_matrix(self) -> list:
        rows, cols = self.shape
        out = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(self.diagonal):
            out[i][i] = d
        return out


@dataclass(frozen=True)
class HomologyResult:
    invariant_factors: tuple
    torsion_order: int
    betti: int
    matrix_shape: tuple

    def to_json(self) -> dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "torsion_order": self.torsion_order,
            "betti": self.betti,
            "matrix_shape": list(self.matrix_shape),
        }


def _find_pivot(a: list, t: int, rows: int, cols: int) -> Optional[tuple]:
    """Smallest nonzero |entry| in a[t:, t:], first in row-major order on ties."""
    best, where = 0, None
    for i in range(t, rows):
        row = a[i]
        for j in range(t, cols):
            value = row[j]
            if value and (where is None or abs(value) < best):
                best, where = abs(value), (i, j)
                if best == 1:
                    return where
    return where


def smith_normal_form(
    matrix: Sequence[Sequence[int]],
    cols: Optional[int] = None,
    witnesses: bool = False,
) -> SmithForm:
    """
    Smith normal form by unimodular row and column operations.

    Pivot on the smallest nonzero entry of the remaining block, clear its
    row and column by floor division, and repeat with any remainder moved
    into the pivot position. A pivot that does not divide the rest of the
    block is fixed by adding the offending row into the pivot row.
    """
    rows, cols = shape(matrix, cols)
    a = [list(row) for row in matrix]
    u = identity_matrix(rows) if witnesses else None
    v = identity_matrix(cols) if witnesses else None

    def swap_rows(i: int, k: int) -> None:
        a[i], a[k] = a[k], a[i]
        if u is not None:
            u[i], u[k] = u[k], u[i]

    def swap_cols(j: int, k: int, t: int) -> None:
        for i in range(t, rows):
            a[i][j], a[i][k] = a[i][k], a[i][j]
        if v is not None:
            for row in v:
                row[j], row[k] = row[k], row[j]

    def add_row(target: int, source: int, factor: int, t: int) -> None:
        src, dst = a[source], a[target]
        for j in range(t, cols):
            if src[j]:
                dst[j] += factor * src[j]
        if u is not None:
            su, du = u[source], u[target]
            for j in range(rows):
                if su[j]:
                    du[j] += factor * su[j]

    def add_col(target: int, source: int, factor: int, t: int) -> None:
        for i in range(t, rows):
            if a[i][source]:
                a[i][target] += factor * a[i][source]
        if v is not None:
            for row in v:
                if row[source]:
                    row[target] += factor * row[source]

    t = 0
    while t < min(rows, cols):
        where = _find_pivot(a, t, rows, cols)
        if where is None:
            break
        if where[0] != t:
            swap_rows(t, where[0])
        if where[1] != t:
            swap_cols(t, where[1], t)

        while True:
            clean = True
            pivot = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // pivot), t)
                    clean = clean and not a[i][t]
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // pivot), t)
                    clean = clean and not a[t][j]

            if not clean:
                # a remainder smaller than the pivot is left in row or column t
                best, move = abs(pivot), None
                for i in range(t + 1, rows):
                    if a[i][t] and abs(a[i][t]) < best:
                        best, move = abs(a[i][t]), ("row", i)
                for j in range(t + 1, cols):
                    if a[t][j] and abs(a[t][j]) < best:
                        best, move = abs(a[t][j]), ("col", j)
                if move[0] == "row":
                    swap_rows(t, move[1])
                else:
                    swap_cols(t, move[1], t)
                continue

            if abs(pivot) == 1:
                break
            offender = next(
                (i for i in range(t + 1, rows) if any(a[i][j] % pivot for j in range(t + 1, cols))),
                None,
            )
            if offender is None:
                break
            add_row(t, offender, 1, t)

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if u is not None:
                u[t] = [-x for x in u[t]]
        t += 1

    diagonal = tuple(a[i][i] for i in range(t))
    return SmithForm(diagonal=diagonal, rank=t, shape=(rows, cols), left=u, right=v)


def invariant_factors(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> tuple:
    return smith_normal_form(matrix, cols).invariant_factors


def torsion_order(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> int:
    """Order of the torsion subgroup of the cokernel (1 when torsion-free)."""
    return smith_normal_form(matrix, cols).torsion_order


def homology(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> HomologyResult:
    form = smith_normal_form(matrix, cols)
    rows, cols = form.shape
    logger.debug("SNF of %dx%d matrix: rank %d, factors %s", rows, cols, form.rank, form.invariant_factors)
    return HomologyResult(
        invariant_factors=form.invariant_factors,
        torsion_order=form.torsion_order,
        betti=cols - form.rank,
        matrix_shape=(rows, cols),
    )


def integer_kernel(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> list:
    """Basis of {x in Z^cols : matrix * x = 0}, read off the right SNF witness."""
    form = smith_normal_form(matrix, cols, witnesses=True)
    _, cols = form.shape
    return [[form.right[i][j] for i in range(cols)] for j in range(form.rank, cols)]


def _eliminate(a: list, rows: int, cols: int) -> tuple:
    """Fraction-free (Bareiss) row echelon form in place; returns (rank, sign)."""
    rank, sign, previous = 0, 1, 1
    for col in range(cols):
        if rank == rows:
            break
        pivot_row = next((i for i in range(rank, rows) if a[i][col]), None)
        if pivot_row is None:
            continue
        if pivot_row != rank:
            a[rank], a[pivot_row] = a[pivot_row], a[rank]
            sign = -sign
        pivot = a[rank][col]
        for i in range(rank + 1, rows):
            factor = a[i][col]
            for j in range(col + 1, cols):
                a[i][j] = (a[i][j] * pivot - factor * a[rank][j]) // previous
            a[i][col] = 0
        previous = pivot
        rank += 1
    return rank, sign


def matrix_rank(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> int:
    rows, cols = shape(matrix, cols)
    rank, _ = _eliminate([list(row) for row in matrix], rows, cols)
    return rank


def determinant(matrix: Sequence[Sequence[int]]) -> int:
    n = len(matrix)
    if n == 0:
        return 1
    a = [list(row) for row in matrix]
    rank, sign = _eliminate(a, n, n)
    if rank < n:
        return 0
    return sign * a[n - 1][n - 1]


def gcd_of_minors_torsion(
    matrix: Sequence[Sequence[int]],
    cols: Optional[int] = None,
    max_dimension: int = 8,
) -> int:
    """
    Torsion order as the gcd of all rank x rank minors.

    The telescoping product of d_k / d_(k-1) collapses to d_rank. Exponential
    in the matrix size, so both dimensions are capped.
    """
    rows, cols = shape(matrix, cols)
    if max(rows, cols) > max_dimension:
        raise CapExceededError("minors dimension", max_dimension, max(rows, cols))
    rank = matrix_rank(matrix, cols)
    if rank == 0:
        return 1
    g = 0
    for row_set in combinations(range(rows), rank):
        for col_set in combinations(range(cols), rank):
            minor = [[matrix[i][j] for j in col_set] for i in row_set]
            g = math.gcd(g, determinant(minor))
            if g == 1:
                return 1
    return g


def hadamard_determinant_bound(matrix: Sequence[Sequence[int]]) -> int:
    """Ceiling of the product of Euclidean column lengths, so |det| <= result."""
    squared = math.prod(sum(x * x for x in col) for col in transpose(matrix))
    root = math.isqrt(squared)
    return root if root * root == squared else root + 1
