#!/usr/bin/env python3
"""
Reidemeister-Schreier oracle for H1 of a finite regular cover.

Presents ker(phi) <= pi1(X) directly from the presentation and the coset table
of the quotient (cosets = elements of G, acted on by right multiplication), so
it shares nothing with the graph-of-spaces pipeline apart from the input.

The SchreierTransversal helper is generic: any transitive right action of the
free group on finitely many points yields a spanning tree, Schreier generators
and a rewriting map. cover_lift reuses it on surface coset graphs.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from scripts.utils.errors import NotAHomomorphismError
from scripts.utils.finite_quotient import FiniteQuotient, compose, format_cycles
from scripts.utils.integer_homology import HomologyResult, homology
from scripts.utils.presentation import GroupPresentation, exponent_sums, free_reduce

logger = logging.getLogger(__name__)


class SchreierTransversal:
    """
    Spanning tree and rewriting for a permutation action of a free group.

    tables[a][x] is the point reached from x along generator a+1. The tree is
    the breadth-first tree from `root` over positive generator edges, scanned
    point by point in queue order and generator by generator.
    """

    def __init__(self, tables: Sequence[Sequence[int]], root: int = 0):
        self.tables = [list(t) for t in tables]
        self.points = len(self.tables[0]) if self.tables else 1
        self.root = root
        self.inverse_tables = []
        for table in self.tables:
            inverse = [0] * self.points
            for x, y in enumerate(table):
                inverse[y] = x
            self.inverse_tables.append(inverse)

        self.tree = set()
        self.parent = {root: None}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for a, table in enumerate(self.tables):
                y = table[x]
                if y not in self.parent:
                    self.parent[y] = (x, a)
                    self.tree.add((x, a))
                    queue.append(y)

        self.generators = [
            (x, a)
            for x in range(self.points)
            for a in range(len(self.tables))
            if (x, a) not in self.tree
        ]
        self.index = {pair: i for i, pair in enumerate(self.generators)}

    @property
    def reached(self) -> int:
        return len(self.parent)

    def rewrite(self, word: Sequence[int], start: int) -> tuple:
        """Rewrite a word read from `start`; returns (Schreier word, end point)."""
        out = []
        x = start
        for letter in word:
            a = abs(letter) - 1
            if letter > 0:
                pair, x = (x, a), self.tables[a][x]
                sign = 1
            else:
                x = self.inverse_tables[a][x]
                pair, sign = (x, a), -1
            position = self.index.get(pair)
            if position is not None:
                out.append(sign * (position + 1))
        return tuple(out), x

    def class_vector(self, word: Sequence[int], start: int) -> list:
        """Abelianised class of a rewritten word in the Schreier basis."""
        rewritten, _ = self.rewrite(word, start)
        return exponent_sums(rewritten, len(self.generators))


@dataclass(frozen=True)
class SubgroupPresentation:
    schreier_generators: tuple
    rewritten_relators: tuple
    presentation: Optional[GroupPresentation] = field(default=None, compare=False, repr=False)
    quotient: Optional[FiniteQuotient] = field(default=None, compare=False, repr=False)
    transversal: Optional[SchreierTransversal] = field(default=None, compare=False, repr=False)

    @property
    def generator_names(self) -> list:
        names = self.presentation.generators if self.presentation else None
        return [
            f"{names[a] if names else a + 1}@{x}" for x, a in self.schreier_generators
        ]


def coset_action_tables(q: FiniteQuotient, letters: Sequence[tuple]) -> list:
    """Right multiplication tables of G on itself, one per generator image."""
    return [[q.index(compose(g, image)) for g in q.elements] for image in letters]


def schreier_presentation(p: GroupPresentation, q: FiniteQuotient) -> SubgroupPresentation:
    letters = [q.letter(i + 1) for i in range(len(p.generators))]
    transversal = SchreierTransversal(coset_action_tables(q, letters), root=q.index(q.identity()))

    relators = []
    for coset in range(q.group_order):
        for relator in p.relators:
            rewritten, end = transversal.rewrite(relator, coset)
            if end != coset:
                raise NotAHomomorphismError(
                    f"relator does not close up at coset {coset}: quotient is not a homomorphism"
                )
            relators.append(free_reduce(rewritten))

    logger.debug(
        "Reidemeister-Schreier: index %d, %d generators, %d relators",
        q.group_order, len(transversal.generators), len(relators),
    )
    return SubgroupPresentation(
        schreier_generators=tuple(transversal.generators),
        rewritten_relators=tuple(relators),
        presentation=p,
        quotient=q,
        transversal=transversal,
    )


def abelianization_matrix(sp: SubgroupPresentation) -> list:
    """Exponent-sum matrix, relators x Schreier generators."""
    count = len(sp.schreier_generators)
    return [exponent_sums(r, count) for r in sp.rewritten_relators]


def oracle_homology(p: GroupPresentation, q: FiniteQuotient) -> HomologyResult:
    """H1 of the cover straight from the abelianised subgroup presentation."""
    sp = schreier_presentation(p, q)
    return homology(abelianization_matrix(sp), cols=len(sp.schreier_generators))


def coset_table_dump(sp: SubgroupPresentation) -> str:
    """Plain-text coset table: one line per coset with its element and targets."""
    t = sp.transversal
    names = list(sp.presentation.generators) if sp.presentation else [
        str(a + 1) for a in range(len(t.tables))
    ]
    lines = ["coset\telement\t" + "\t".join(names)]
    for x in range(t.points):
        element = format_cycles(sp.quotient.elements[x]) if sp.quotient else str(x)
        targets = "\t".join(
            f"{table[x]}{'' if (x, a) in t.tree else '*'}" for a, table in enumerate(t.tables)
        )
        lines.append(f"{x}\t{element}\t{targets}")
    lines.append("* = Schreier generator (edge outside the spanning tree)")
    return "\n".join(lines) + "\n"
