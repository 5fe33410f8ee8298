#!/usr/bin/env python3
"""
Lift the graph-of-spaces decomposition of X to the regular cover defined by a
finite quotient.

Sheets of the cover are the elements of G. A vertex space whose fundamental
group maps onto H <= G lifts to one component per coset gH, labelled by its
smallest element. A boundary lift of page component gH over base boundary k is
an orbit of right multiplication by phi(b_k) inside gH; if it contains the
sheet x it attaches to the circle lift containing x * phi(u_e), where u_e is
the stable letter of the edge (identity for tree edges).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from scripts.utils.book_model import BookComplex, SurfaceType
from scripts.utils.errors import InternalConsistencyError, NotAHomomorphismError
from scripts.utils.finite_quotient import (
    FiniteQuotient,
    check_homomorphism,
    closure,
    compose,
    format_cycles,
    image_subgroup_order,
    perm_order,
)
from scripts.utils.presentation import GroupPresentation, boundary_word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CircleLift:
    base_circle: int
    label: tuple
    degree_over_base: int

    def to_json(self, index: int) -> dict:
        return {
            "index": index,
            "circle": self.base_circle,
            "label": format_cycles(self.label),
            "degree": self.degree_over_base,
        }


@dataclass(frozen=True)
class BoundaryLift:
    """One component of the preimage of a base boundary curve."""
    base_boundary_index: int
    edge: int
    label: tuple
    sheets: int
    circle_lift: int
    elevation_degree: int


@dataclass(frozen=True)
class SurfaceLift:
    base_surface: int
    label: tuple
    degree_over_base: int
    topology: SurfaceType
    boundary_lifts: tuple = ()

    def to_json(self, index: int) -> dict:
        return {
            "index": index,
            "surface": self.base_surface,
            "label": format_cycles(self.label),
            "degree": self.degree_over_base,
            "topology": self.topology.to_json(),
        }


@dataclass(frozen=True)
class CoveredComplex:
    base: BookComplex
    quotient: FiniteQuotient = field(compare=False, repr=False)
    presentation: GroupPresentation = field(compare=False, repr=False)
    circle_lifts: tuple = ()
    surface_lifts: tuple = ()
    total_degree: int = 1

    def circle_lift_count(self, i: int) -> int:
        """l_i, the number of lifts of circle i."""
        return sum(1 for c in self.circle_lifts if c.base_circle == i)

    def surface_lift_count(self, j: int) -> int:
        """p_j, the number of lifts of page j."""
        return sum(1 for s in self.surface_lifts if s.base_surface == j)

    def circle_degree(self, i: int) -> int:
        """D_i, the common degree of the lifts of circle i."""
        return next(c.degree_over_base for c in self.circle_lifts if c.base_circle == i)

    @property
    def edge_lift_count(self) -> int:
        return sum(len(s.boundary_lifts) for s in self.surface_lifts)

    def attachments(self) -> list:
        return [
            {
                "surface_lift": row,
                "boundary_lift": position,
                "edge": b.edge,
                "circle_lift": b.circle_lift,
                "elevation_degree": b.elevation_degree,
            }
            for row, s in enumerate(self.surface_lifts)
            for position, b in enumerate(s.boundary_lifts)
        ]

    def to_json(self) -> dict:
        return {
            "total_degree": self.total_degree,
            "circle_lifts": [c.to_json(i) for i, c in enumerate(self.circle_lifts)],
            "surface_lifts": [s.to_json(i) for i, s in enumerate(self.surface_lifts)],
            "attachments": self.attachments(),
        }


def substitute(local_word: Sequence[int], generator_words: Sequence[tuple]) -> tuple:
    """Replace local letter +-i by the word generator_words[i-1] (or its inverse)."""
    out = []
    for letter in local_word:
        word = generator_words[abs(letter) - 1]
        out.extend(word if letter > 0 else tuple(-x for x in reversed(word)))
    return tuple(out)


def boundary_words_for(s: SurfaceType, surface_gens: Sequence[tuple]) -> list:
    return [substitute(boundary_word(s, k), surface_gens) for k in range(s.boundary_count)]


def boundary_orbits(elements: Iterable[tuple], step: tuple) -> list:
    """Orbits of right multiplication by `step`, each sorted, ordered by smallest element."""
    remaining = set(elements)
    orbits = []
    for start in sorted(remaining):
        if start not in remaining:
            continue
        orbit = []
        x = start
        while x in remaining:
            remaining.discard(x)
            orbit.append(x)
            x = compose(x, step)
        orbits.append(sorted(orbit))
    return orbits


def lift_orientable(q: FiniteQuotient, s: SurfaceType, surface_gens: Sequence[tuple]) -> bool:
    """
    Whether the lift of a page to the cover is orientable.

    The orientation character is 1 on crosscap generators and 0 on the free
    boundary generators. The lift is orientable iff pairing each image with
    its character value does not enlarge the image group.
    """
    if s.orientable:
        return True
    n = q.points
    flip = tuple(range(n)) + (n + 1, n)
    fixed = tuple(range(n + 2))
    paired = []
    for position, word in enumerate(surface_gens):
        image = q.evaluate(word) + (n, n + 1)
        paired.append(compose(image, flip if position < s.genus else fixed))
    plain = image_subgroup_order(q, surface_gens)
    return len(closure(paired, n + 2, 2 * q.caps.max_group_order)) == plain


def lift_topology(q: FiniteQuotient, s: SurfaceType, surface_gens: Sequence[tuple]) -> SurfaceType:
    """Topology of every lift of a page, from chi multiplicativity and boundary counts."""
    order = image_subgroup_order(q, surface_gens)
    boundary = sum(
        order // perm_order(q.evaluate(word)) for word in boundary_words_for(s, surface_gens)
    )
    chi = order * s.euler_characteristic
    orientable = lift_orientable(q, s, surface_gens)
    excess = 2 - chi - boundary
    if orientable:
        if excess % 2 or excess < 0:
            raise InternalConsistencyError(
                f"orientable lift with chi={chi}, {boundary} boundaries has no integral genus"
            )
        return SurfaceType(True, excess // 2, boundary)
    if excess < 1:
        raise InternalConsistencyError(
            f"non-orientable lift with chi={chi}, {boundary} boundaries has no crosscaps"
        )
    return SurfaceType(False, excess, boundary)


def surface_generator_words(p: GroupPresentation, j: int) -> list:
    return [(index + 1,) for index in p.surface_generators[j]]


def lift(
    book: BookComplex,
    p: GroupPresentation,
    q: FiniteQuotient,
    check: bool = True,
) -> CoveredComplex:
    if not check_homomorphism(p, q):
        raise NotAHomomorphismError("quotient does not kill every relator of the presentation")

    circle_index = {}
    circle_lifts = []
    circle_degrees = []
    for i in range(book.circle_count):
        t = q.letter(p.circle_generators[i] + 1)
        subgroup = q.subgroup([t])
        representatives, label = q.cosets(subgroup)
        circle_degrees.append(len(subgroup))
        offset = len(circle_lifts)
        circle_lifts.extend(CircleLift(i, rep, len(subgroup)) for rep in representatives)
        circle_index[i] = {element: offset + position for element, position in label.items()}

    surface_lifts = []
    for j, surface in enumerate(book.surfaces):
        gens = surface_generator_words(p, j)
        subgroup = q.subgroup(q.evaluate(w) for w in gens)
        topology = lift_topology(q, surface, gens)
        representatives, _ = q.cosets(subgroup)

        boundary_data = []
        for k in range(surface.boundary_count):
            edge_index = book.edge_index(j, k)
            edge = book.edges[edge_index]
            step = q.evaluate(p.boundary_words[j][k])
            stable = p.edge_paths[edge_index]
            path = q.letter(stable + 1) if stable is not None else q.identity()
            degree = edge.degree
            g = math.gcd(circle_degrees[edge.circle], abs(degree))
            elevation = degree // g
            boundary_data.append((k, edge_index, edge.circle, step, path, elevation))

        for rep in representatives:
            component = [compose(rep, h) for h in subgroup]
            boundary_lifts = []
            for k, edge_index, circle, step, path, elevation in boundary_data:
                for orbit in boundary_orbits(component, step):
                    target = circle_index[circle][compose(orbit[0], path)]
                    boundary_lifts.append(BoundaryLift(
                        base_boundary_index=k,
                        edge=edge_index,
                        label=orbit[0],
                        sheets=len(orbit),
                        circle_lift=target,
                        elevation_degree=elevation,
                    ))
            surface_lifts.append(SurfaceLift(j, rep, len(subgroup), topology, tuple(boundary_lifts)))

    cov = CoveredComplex(
        base=book,
        quotient=q,
        presentation=p,
        circle_lifts=tuple(circle_lifts),
        surface_lifts=tuple(surface_lifts),
        total_degree=q.group_order,
    )
    logger.info(
        "Lifted to degree-%d cover: %d circle lifts, %d surface lifts, %d edge lifts",
        cov.total_degree, len(circle_lifts), len(surface_lifts), cov.edge_lift_count,
    )
    if check:
        violations = check_invariants(cov)
        if violations:
            raise InternalConsistencyError("cover violates lifting laws: " + "; ".join(violations))
    return cov


def lifted_graph(cov: CoveredComplex) -> nx.MultiGraph:
    """Gamma_n: circle lifts vs surface lifts, one edge per boundary lift."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(("circle", i) for i in range(len(cov.circle_lifts)))
    graph.add_nodes_from(("surface", j) for j in range(len(cov.surface_lifts)))
    for j, s in enumerate(cov.surface_lifts):
        for b in s.boundary_lifts:
            graph.add_edge(("surface", j), ("circle", b.circle_lift))
    return graph


def graph_betti(cov: CoveredComplex) -> int:
    """First Betti number of Gamma_n."""
    graph = lifted_graph(cov)
    return (
        graph.number_of_edges()
        - graph.number_of_nodes()
        + nx.number_connected_components(graph)
    )


def check_invariants(cov: CoveredComplex) -> list:
    """Every violated lifting law, as messages; empty when the cover is consistent."""
    book, order = cov.base, cov.total_degree
    violations = []

    for i in range(book.circle_count):
        count, degree = cov.circle_lift_count(i), cov.circle_degree(i)
        if count * degree != order:
            violations.append(f"circle {i}: {count} lifts x degree {degree} != |G| = {order}")

    by_surface = {}
    for s in cov.surface_lifts:
        by_surface.setdefault(s.base_surface, []).append(s)
    for j, lifts in sorted(by_surface.items()):
        base = book.surfaces[j]
        q_j = lifts[0].degree_over_base
        if len(lifts) * q_j != order:
            violations.append(f"surface {j}: {len(lifts)} lifts x degree {q_j} != |G| = {order}")
        if len({s.topology for s in lifts}) != 1:
            violations.append(f"surface {j}: lifts have different topology")
        for s in lifts:
            if s.topology.euler_characteristic != q_j * base.euler_characteristic:
                violations.append(
                    f"surface {j}: lift chi {s.topology.euler_characteristic} "
                    f"!= {q_j} x {base.euler_characteristic}"
                )
            if len(s.boundary_lifts) != s.topology.boundary_count:
                violations.append(f"surface {j}: boundary lift count disagrees with topology")
            for k in range(base.boundary_count):
                mine = [b for b in s.boundary_lifts if b.base_boundary_index == k]
                if not mine or len({b.sheets for b in mine}) != 1 or len(mine) * mine[0].sheets != q_j:
                    violations.append(f"surface {j}: boundary {k} lifts do not tile the component")

    for index, edge in enumerate(book.edges):
        lifts = [b for s in cov.surface_lifts for b in s.boundary_lifts if b.edge == index]
        sheets = lifts[0].sheets if lifts else 0
        if not lifts or len(lifts) * sheets != order:
            violations.append(f"edge {index}: {len(lifts)} edge lifts do not cover |G| = {order} sheets")
        sums = {}
        for b in lifts:
            if edge.degree % b.elevation_degree:
                violations.append(
                    f"edge {index}: elevation degree {b.elevation_degree} does not divide {edge.degree}"
                )
            sums[b.circle_lift] = sums.get(b.circle_lift, 0) + b.elevation_degree
        for c, lifted in enumerate(cov.circle_lifts):
            if lifted.base_circle == edge.circle and sums.get(c, 0) != edge.degree:
                violations.append(
                    f"edge {index}: elevation degrees into circle lift {c} sum to "
                    f"{sums.get(c, 0)}, expected {edge.degree}"
                )

    if not nx.is_connected(lifted_graph(cov)):
        violations.append("lifted graph is disconnected")
    return violations
