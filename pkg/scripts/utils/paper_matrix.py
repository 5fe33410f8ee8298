#!/usr/bin/env python3
"""
The boundary-relation matrix of a finite cover and the bounds built on it.

Rows are surface lifts. Columns are circle lifts followed by the crosscap
columns of the non-orientable surface lifts. A row records the single relation
among the boundary curves of its surface lift after every boundary lift is
replaced by (elevation degree) x (its circle lift generator); crosscap columns
carry the entry 2. The cokernel of this matrix is the torsion-relevant part of
H1 of the cover; handles of orientable lifts and cycles of the lifted graph
only add free rank.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from scripts.utils.book_model import GlobalBounds, global_bounds
from scripts.utils.cover_lift import (
    CoveredComplex,
    SurfaceLift,
    boundary_orbits,
    graph_betti,
    lift_orientable,
    substitute,
    surface_generator_words,
)
from scripts.utils.errors import InternalConsistencyError
from scripts.utils.finite_quotient import compose, format_cycles, inverse
from scripts.utils.integer_homology import (
    HomologyResult,
    homology,
    integer_kernel,
    matrix_rank,
    smith_normal_form,
    transpose,
)
from scripts.utils.presentation import boundary_word, power
from scripts.utils.rs_oracle import SchreierTransversal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PaperMatrix:
    matrix: list
    row_labels: tuple
    column_labels: tuple
    circle_columns: int
    bounds: GlobalBounds
    max_ell: int
    compressed: bool = False

    @property
    def shape(self) -> tuple:
        return len(self.matrix), len(self.column_labels)

    def to_json(self) -> dict:
        rows, cols = self.shape
        return {
            "shape": [rows, cols],
            "row_labels": list(self.row_labels),
            "column_labels": list(self.column_labels),
            "entries": [list(row) for row in self.matrix],
            "compressed_crosscaps": self.compressed,
        }


@dataclass(frozen=True)
class IndexDecomposition:
    circle: int
    ell: int
    degree: int

    @property
    def index(self) -> int:
        return self.ell * self.degree

    def to_json(self) -> dict:
        return {"circle": self.circle, "ell": self.ell, "D": self.degree, "index": self.index}


@dataclass(frozen=True)
class ColumnNorm:
    column: int
    l1: int
    l2_squared: int
    limit: int

    @property
    def ok(self) -> bool:
        return self.l1 <= self.limit

    def to_json(self) -> dict:
        return {"column": self.column, "l1": self.l1, "l2_squared": self.l2_squared,
                "limit": self.limit, "ok": self.ok}


@dataclass(frozen=True)
class BoundChain:
    """
    Exact torsion <= middle <= hadamard comparisons, all in squared integers.

    `multiplier` is max(d, 2^k) with k the number of crosscap columns a
    nonzero full-rank minor can be forced to use (rank minus circle columns).
    `printed_ok` records the comparison with the bare factor d as well.
    """
    torsion: int
    multiplier: int
    column_factor_squared: int
    hadamard: int
    rows: int
    row_limit: int
    printed_ok: bool

    @property
    def middle_squared(self) -> int:
        return self.multiplier ** 2 * self.column_factor_squared

    @property
    def lower_ok(self) -> bool:
        return self.torsion ** 2 <= self.middle_squared

    @property
    def upper_ok(self) -> bool:
        return self.middle_squared <= self.hadamard ** 2

    @property
    def row_count_ok(self) -> bool:
        return self.rows <= self.row_limit

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok and self.row_count_ok

    def to_json(self) -> dict:
        return {
            "torsion": self.torsion,
            "multiplier": self.multiplier,
            "column_factor_squared": self.column_factor_squared,
            "hadamard_bound": self.hadamard,
            "torsion_le_middle": self.lower_ok,
            "middle_le_hadamard": self.upper_ok,
            "printed_middle_ok": self.printed_ok,
            "rows": self.rows,
            "row_limit": self.row_limit,
            "row_count_ok": self.row_count_ok,
        }


def identity_component_signs(cov: CoveredComplex, j: int) -> dict:
    """
    Signs c_k of the boundary lifts of the identity lift of page j, keyed by
    every sheet of each boundary lift.

    Boundary classes are rewritten into the Schreier basis of the surface
    coset graph (points = elements of the image H of the page group, right
    multiplication by generator images). Orientable lifts take the primitive
    kernel vector of the class matrix; non-orientable lifts keep +1 throughout
    once the sum of the classes is checked to be even.
    """
    q, p = cov.quotient, cov.presentation
    surface = cov.base.surfaces[j]
    gens = surface_generator_words(p, j)
    images = [q.evaluate(w) for w in gens]
    subgroup = q.subgroup(images)
    position = {h: i for i, h in enumerate(subgroup)}
    tables = [[position[compose(h, image)] for h in subgroup] for image in images]
    transversal = SchreierTransversal(tables, root=position[q.identity()])

    columns, owners = [], []
    for k in range(surface.boundary_count):
        local = boundary_word(surface, k)
        step = q.evaluate(substitute(local, gens))
        for orbit in boundary_orbits(subgroup, step):
            loop = power(local, len(orbit))
            columns.append(transversal.class_vector(loop, position[orbit[0]]))
            owners.append(orbit)

    if lift_orientable(q, surface, gens):
        kernel = integer_kernel(transpose(columns), cols=len(columns))
        if len(kernel) != 1:
            raise InternalConsistencyError(
                f"surface {j}: boundary classes of an orientable lift have kernel rank {len(kernel)}"
            )
        signs = kernel[0]
        if next(x for x in signs if x) < 0:
            signs = [-x for x in signs]
        if any(abs(x) != 1 for x in signs):
            raise InternalConsistencyError(f"surface {j}: boundary relation {signs} is not a +-1 vector")
    else:
        signs = [1] * len(columns)
        total = [sum(column[i] for column in columns) for i in range(len(transversal.generators))]
        if any(x % 2 for x in total):
            raise InternalConsistencyError(f"surface {j}: boundary classes do not sum into 2*H1")

    return {element: sign for orbit, sign in zip(owners, signs) for element in orbit}


def boundary_relation_signs(cov: CoveredComplex, row: int, signs: Optional[dict] = None) -> tuple:
    """+-1 per boundary lift of surface lift `row`, transported from the identity lift."""
    lifted = cov.surface_lifts[row]
    if signs is None:
        signs = identity_component_signs(cov, lifted.base_surface)
    back = inverse(lifted.label)
    return tuple(signs[compose(back, b.label)] for b in lifted.boundary_lifts)


def _crosscap_count(lifted: SurfaceLift, compress: bool) -> int:
    if lifted.topology.orientable:
        return 0
    return 1 if compress else lifted.topology.genus


def build(cov: CoveredComplex, compress_crosscaps: bool = False) -> PaperMatrix:
    circles = len(cov.circle_lifts)
    crosscaps = [_crosscap_count(s, compress_crosscaps) for s in cov.surface_lifts]
    cols = circles + sum(crosscaps)

    signs_by_surface = {}
    matrix, row_labels, crosscap_labels = [], [], []
    next_crosscap = circles
    for row, lifted in enumerate(cov.surface_lifts):
        j = lifted.base_surface
        if j not in signs_by_surface:
            signs_by_surface[j] = identity_component_signs(cov, j)
        signs = boundary_relation_signs(cov, row, signs_by_surface[j])

        entries = [0] * cols
        for sign, b in zip(signs, lifted.boundary_lifts):
            entries[b.circle_lift] += sign * b.elevation_degree
        for k in range(crosscaps[row]):
            entries[next_crosscap] = 2
            crosscap_labels.append(f"x[{row}].{k + 1}")
            next_crosscap += 1
        matrix.append(entries)
        row_labels.append(f"S{j}:{format_cycles(lifted.label)}")

    column_labels = [f"C{c.base_circle}:{format_cycles(c.label)}" for c in cov.circle_lifts]
    max_ell = max(cov.circle_lift_count(i) for i in range(cov.base.circle_count))
    pm = PaperMatrix(
        matrix=matrix,
        row_labels=tuple(row_labels),
        column_labels=tuple(column_labels + crosscap_labels),
        circle_columns=circles,
        bounds=global_bounds(cov.base),
        max_ell=max_ell,
        compressed=compress_crosscaps,
    )
    logger.debug("Boundary-relation matrix %dx%d", *pm.shape)
    return pm


def torsion(pm: PaperMatrix) -> HomologyResult:
    return homology(pm.matrix, cols=pm.shape[1])


def cover_homology(cov: CoveredComplex, pm: Optional[PaperMatrix] = None) -> HomologyResult:
    """
    Full H1 of the cover: torsion and free rank of the matrix cokernel, plus
    2*genus for each orientable surface lift, plus the cycles of the lifted graph.
    """
    pm = pm or build(cov)
    result = torsion(pm)
    handles = sum(2 * s.topology.genus for s in cov.surface_lifts if s.topology.orientable)
    return HomologyResult(
        invariant_factors=result.invariant_factors,
        torsion_order=result.torsion_order,
        betti=result.betti + handles + graph_betti(cov),
        matrix_shape=result.matrix_shape,
    )


def hadamard_bound(cov: CoveredComplex) -> int:
    """(2 val d)^(d m max l), exactly."""
    b = global_bounds(cov.base)
    max_ell = max(cov.circle_lift_count(i) for i in range(cov.base.circle_count))
    return (2 * b.val * b.d) ** (b.d * b.m * max_ell)


def column_norm_check(pm: PaperMatrix, cov: CoveredComplex) -> list:
    """Exact norms of every circle column; raises if some l1 norm exceeds val*d."""
    limit = pm.bounds.val * pm.bounds.d
    report = []
    for c in range(pm.circle_columns):
        column = [row[c] for row in pm.matrix]
        report.append(ColumnNorm(
            column=c,
            l1=sum(abs(x) for x in column),
            l2_squared=sum(x * x for x in column),
            limit=limit,
        ))
    bad = [n.column for n in report if not n.ok]
    if bad:
        raise InternalConsistencyError(f"circle columns {bad} exceed the l1 limit val*d = {limit}")
    return report


def bound_chain(pm: PaperMatrix, cov: CoveredComplex) -> BoundChain:
    rows, _ = pm.shape
    tor = smith_normal_form(pm.matrix, cols=pm.shape[1]).torsion_order
    factor = math.prod(max(n.l2_squared, 4) for n in column_norm_check(pm, cov))
    forced = max(0, matrix_rank(pm.matrix, cols=pm.shape[1]) - pm.circle_columns)
    d = pm.bounds.d
    pages = len(cov.base.surfaces)
    return BoundChain(
        torsion=tor,
        multiplier=max(d, 2 ** forced),
        column_factor_squared=factor,
        hadamard=hadamard_bound(cov),
        rows=rows,
        row_limit=pages * pm.max_ell * d,
        printed_ok=tor ** 2 <= d * d * factor,
    )


def index_decomposition(cov: CoveredComplex) -> IndexDecomposition:
    """Circle with the most lifts (lowest index on ties), its lift count and degree."""
    counts = [cov.circle_lift_count(i) for i in range(cov.base.circle_count)]
    best = counts.index(max(counts))
    return IndexDecomposition(circle=best, ell=counts[best], degree=cov.circle_degree(best))
