#!/usr/bin/env python3
"""
Books of I-bundles and their graph-of-spaces decomposition.

A book is recorded by its spine: circles (bindings contracted onto their
longitudes), surfaces (pages contracted onto their base surfaces) and one edge
per boundary component of every page, carrying the signed degree with which
that boundary wraps around its binding.

Book JSON:
    {"circles": 1,
     "surfaces": [{"orientable": true, "genus": 1, "boundary": 1}],
     "edges": [{"surface": 0, "boundary_index": 0, "circle": 0, "degree": 2}]}
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import networkx as nx

from scripts.utils.errors import InvalidBookError, MalformedInputError
from scripts.utils.run_config import load_json

logger = logging.getLogger(__name__)

BOOK_KEYS = {"circles", "surfaces", "edges"}
SURFACE_KEYS = {"orientable", "genus", "boundary"}
EDGE_KEYS = {"surface", "boundary_index", "circle", "degree"}


@dataclass(frozen=True)
class SurfaceType:
    """Compact surface with boundary: genus is the crosscap count when non-orientable."""
    orientable: bool
    genus: int
    boundary_count: int

    @property
    def euler_characteristic(self) -> int:
        return euler_characteristic(self)

    @property
    def rank(self) -> int:
        """Rank of the free fundamental group (= rank of H1)."""
        return 1 - self.euler_characteristic

    @property
    def handle_generator_count(self) -> int:
        """Number of x/y (or crosscap x) generators."""
        return 2 * self.genus if self.orientable else self.genus

    def describe(self) -> str:
        kind = "orientable" if self.orientable else "non-orientable"
        letter = "g" if self.orientable else "r"
        return f"{kind} {letter}={self.genus}, s={self.boundary_count}"

    def to_json(self) -> dict:
        return {"orientable": self.orientable, "genus": self.genus, "boundary": self.boundary_count}


@dataclass(frozen=True)
class Edge:
    """Attachment of boundary `boundary_index` of page `surface` to `circle`."""
    surface: int
    boundary_index: int
    circle: int
    degree: int = 1

    def to_json(self) -> dict:
        return {
            "surface": self.surface,
            "boundary_index": self.boundary_index,
            "circle": self.circle,
            "degree": self.degree,
        }


@dataclass(frozen=True)
class BookComplex:
    circle_count: int
    surfaces: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "surfaces", tuple(self.surfaces))
        object.__setattr__(self, "edges", tuple(self.edges))

    def edge_index(self, surface: int, boundary_index: int) -> int:
        """Index of the edge carrying boundary (surface, boundary_index)."""
        for index, edge in enumerate(self.edges):
            if edge.surface == surface and edge.boundary_index == boundary_index:
                return index
        raise KeyError(f"boundary {boundary_index} of surface {surface} is not attached")

    def to_json(self) -> dict:
        return {
            "circles": self.circle_count,
            "surfaces": [s.to_json() for s in self.surfaces],
            "edges": [e.to_json() for e in self.edges],
        }


@dataclass(frozen=True)
class GlobalBounds:
    val: int
    d: int
    m: int


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations)}


def euler_characteristic(s: SurfaceType) -> int:
    if s.orientable:
        return 2 - 2 * s.genus - s.boundary_count
    return 2 - s.genus - s.boundary_count


def circle_node(i: int) -> tuple:
    return ("circle", i)


def surface_node(j: int) -> tuple:
    return ("surface", j)


def underlying_graph(book: BookComplex) -> nx.MultiGraph:
    """The bipartite graph Gamma: circles vs surfaces, one edge per attachment."""
    graph = nx.MultiGraph()
    graph.add_nodes_from(circle_node(i) for i in range(book.circle_count))
    graph.add_nodes_from(surface_node(j) for j in range(len(book.surfaces)))
    for index, edge in enumerate(book.edges):
        if 0 <= edge.surface < len(book.surfaces) and 0 <= edge.circle < book.circle_count:
            graph.add_edge(surface_node(edge.surface), circle_node(edge.circle), key=index)
    return graph


def circle_valence(book: BookComplex, i: int) -> int:
    if not 0 <= i < book.circle_count:
        raise IndexError(f"circle index {i} out of range (book has {book.circle_count})")
    return sum(1 for edge in book.edges if edge.circle == i)


def global_bounds(book: BookComplex) -> GlobalBounds:
    val = max((circle_valence(book, i) for i in range(book.circle_count)), default=0)
    d = max((abs(edge.degree) for edge in book.edges), default=1)
    return GlobalBounds(val=val, d=d, m=book.circle_count)


def validate(book: BookComplex) -> ValidationReport:
    """
    Check the standing hypotheses on a book.

    Never raises: every violated invariant is listed with the offending index.
    """
    violations = []

    if book.circle_count < 1:
        violations.append(f"circle count must be positive, got {book.circle_count}")
    if not book.surfaces:
        violations.append("book has no pages")

    for j, surface in enumerate(book.surfaces):
        if surface.genus < 0:
            violations.append(f"surface {j}: negative genus {surface.genus}")
        if surface.boundary_count < 1:
            violations.append(f"surface {j}: boundary count must be at least 1")
        if not surface.orientable and surface.genus < 1:
            violations.append(f"surface {j}: non-orientable surface needs at least one crosscap")
        chi = euler_characteristic(surface)
        if chi >= 0:
            violations.append(
                f"surface {j} ({surface.describe()}): non-negative Euler characteristic {chi}"
            )

    seen = {}
    for index, edge in enumerate(book.edges):
        if not 0 <= edge.surface < len(book.surfaces):
            violations.append(f"edge {index}: surface index {edge.surface} out of range")
            continue
        if not 0 <= edge.circle < book.circle_count:
            violations.append(f"edge {index}: circle index {edge.circle} out of range")
        if not 0 <= edge.boundary_index < book.surfaces[edge.surface].boundary_count:
            violations.append(
                f"edge {index}: boundary index {edge.boundary_index} out of range "
                f"for surface {edge.surface}"
            )
            continue
        if abs(edge.degree) < 1:
            violations.append(f"edge {index}: degree must be nonzero")
        key = (edge.surface, edge.boundary_index)
        if key in seen:
            violations.append(
                f"edge {index}: boundary {edge.boundary_index} of surface {edge.surface} "
                f"attached twice (also edge {seen[key]})"
            )
        else:
            seen[key] = index

    for j, surface in enumerate(book.surfaces):
        for k in range(max(surface.boundary_count, 0)):
            if (j, k) not in seen:
                violations.append(f"surface {j}: boundary {k} is not attached to any circle")

    graph = underlying_graph(book)
    if graph.number_of_nodes() and not nx.is_connected(graph):
        components = nx.number_connected_components(graph)
        violations.append(f"underlying graph is disconnected ({components} components)")

    if violations:
        logger.debug("Book failed validation with %d violations", len(violations))
    return ValidationReport(tuple(violations))


def require_valid(book: BookComplex) -> None:
    """Raise InvalidBookError unless the book passes validate()."""
    report = validate(book)
    if not report.valid:
        raise InvalidBookError("invalid book: " + "; ".join(report.violations), list(report.violations))


def _check_keys(obj: Any, allowed: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise MalformedInputError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise MalformedInputError(f"{where}: unknown keys {sorted(unknown)}")


def _int_field(obj: dict, key: str, where: str, default: Any = None) -> int:
    if key not in obj:
        if default is not None:
            return default
        raise MalformedInputError(f"{where}: missing key '{key}'")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedInputError(f"{where}: '{key}' must be an integer")
    return value


def _list_field(obj: dict, key: str, where: str) -> list:
    value = obj.get(key, [])
    if not isinstance(value, list):
        raise MalformedInputError(f"{where}: '{key}' must be a list")
    return value


def parse_book(data: Any) -> BookComplex:
    """Build a BookComplex from parsed JSON; rejects unknown keys."""
    _check_keys(data, BOOK_KEYS, "book")
    circles = _int_field(data, "circles", "book")

    surfaces = []
    for j, raw in enumerate(_list_field(data, "surfaces", "book")):
        where = f"surfaces[{j}]"
        _check_keys(raw, SURFACE_KEYS, where)
        orientable = raw.get("orientable", True)
        if not isinstance(orientable, bool):
            raise MalformedInputError(f"{where}: 'orientable' must be a boolean")
        surfaces.append(SurfaceType(
            orientable=orientable,
            genus=_int_field(raw, "genus", where),
            boundary_count=_int_field(raw, "boundary", where),
        ))

    edges = []
    for index, raw in enumerate(_list_field(data, "edges", "book")):
        where = f"edges[{index}]"
        _check_keys(raw, EDGE_KEYS, where)
        edges.append(Edge(
            surface=_int_field(raw, "surface", where),
            boundary_index=_int_field(raw, "boundary_index", where),
            circle=_int_field(raw, "circle", where),
            degree=_int_field(raw, "degree", where, default=1),
        ))

    return BookComplex(circle_count=circles, surfaces=surfaces, edges=edges)


def load_book(path: Path) -> BookComplex:
    return parse_book(load_json(path))
