#!/usr/bin/env python3
"""
Finite presentation of pi1(X) read off the graph-of-spaces structure.

Vertex groups are free surface groups and infinite cyclic binding groups, edge
groups are cyclic, and every edge outside a breadth-first spanning tree of the
underlying graph contributes a stable letter.

Words are tuples of signed 1-based generator indices: letter +i is generator
i-1, letter -i its inverse. Commutators are [a, b] = a b a^-1 b^-1.

Text export grammar (one statement per line):
    gen: <name> <name> ...
    rel: <token> <token> ...      token = name, or name with its first
                                  character upper-cased for the inverse
"""

import logging
from dataclasses import dataclass

import networkx as nx

from scripts.utils.book_model import (
    BookComplex,
    SurfaceType,
    circle_node,
    require_valid,
    underlying_graph,
)
from scripts.utils.errors import MalformedInputError

logger = logging.getLogger(__name__)

ROLE_CIRCLE = "circle"
ROLE_HANDLE = "handle"
ROLE_CROSSCAP = "crosscap"
ROLE_BOUNDARY = "boundary"
ROLE_STABLE = "stable"


def invert(word: tuple) -> tuple:
    return tuple(-letter for letter in reversed(word))


def free_reduce(word: tuple) -> tuple:
    stack = []
    for letter in word:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def power(word: tuple, n: int) -> tuple:
    if n < 0:
        return invert(word) * (-n)
    return tuple(word) * n


def shift(word: tuple, offset: int) -> tuple:
    """Re-index a word over local generators 0.. to global generators offset.."""
    return tuple(letter + offset if letter > 0 else letter - offset for letter in word)


def exponent_sums(word: tuple, generator_count: int) -> list:
    row = [0] * generator_count
    for letter in word:
        row[abs(letter) - 1] += 1 if letter > 0 else -1
    return row


def surface_generator_names(j: int, s: SurfaceType) -> list:
    """Local generator names of page j: handles (or crosscaps), then sigma_1..sigma_{s-1}."""
    names = []
    for i in range(1, s.genus + 1):
        names.append(f"x{j}_{i}")
        if s.orientable:
            names.append(f"y{j}_{i}")
    names.extend(f"s{j}_{k}" for k in range(1, s.boundary_count))
    return names


def boundary_word(s: SurfaceType, k: int, offset: int = 0) -> tuple:
    """
    Word for boundary component k of a surface over its local generators.

    The first s-1 boundaries are the free generators sigma_1..sigma_{s-1}; the
    last one is the defined word (W sigma_1 ... sigma_{s-1})^-1 with W the
    product of commutators [x_i, y_i] (orientable) or squares x_i^2.
    """
    if not 0 <= k < s.boundary_count:
        raise IndexError(f"boundary index {k} out of range (surface has {s.boundary_count})")
    handles = s.handle_generator_count
    if k < s.boundary_count - 1:
        return shift((handles + k + 1,), offset)

    prefix = []
    for i in range(s.genus):
        if s.orientable:
            x, y = 2 * i + 1, 2 * i + 2
            prefix.extend((x, y, -x, -y))
        else:
            x = i + 1
            prefix.extend((x, x))
    prefix.extend(handles + i + 1 for i in range(s.boundary_count - 1))
    return shift(invert(tuple(prefix)), offset)


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple
    relators: tuple
    roles: tuple
    surface_generators: tuple = ()
    circle_generators: tuple = ()
    boundary_words: tuple = ()
    edge_paths: tuple = ()
    tree_edges: tuple = ()

    @property
    def generator_roles(self) -> dict:
        return dict(zip(self.generators, self.roles))

    @property
    def stable_letter_count(self) -> int:
        return sum(1 for role in self.roles if role == ROLE_STABLE)

    def index_of(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise KeyError(f"unknown generator {name!r}")

    def words_from_names(self, *tokens: str) -> tuple:
        """Parse export-grammar tokens (capital first letter = inverse) into a word."""
        return tuple(_parse_token(token, self.generators) for token in tokens)


def _parse_token(token: str, generators: tuple) -> int:
    if token in generators:
        return generators.index(token) + 1
    lowered = token[:1].lower() + token[1:]
    if lowered != token and lowered in generators:
        return -(generators.index(lowered) + 1)
    raise MalformedInputError(f"unknown generator token {token!r}")


def _format_letter(letter: int, generators: tuple) -> str:
    name = generators[abs(letter) - 1]
    return name if letter > 0 else name[:1].upper() + name[1:]


def format_word(word: tuple, generators: tuple) -> str:
    return " ".join(_format_letter(letter, generators) for letter in word)


def format_presentation(p: GroupPresentation) -> str:
    lines = ["gen: " + " ".join(p.generators)]
    lines.extend(("rel: " + format_word(r, p.generators)).rstrip() for r in p.relators)
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> GroupPresentation:
    """Read the text export back. Graph-of-spaces metadata is not recoverable."""
    generators = None
    relators = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        head, _, rest = line.partition(":")
        if head == "gen" and generators is None:
            generators = tuple(rest.split())
        elif head == "rel" and generators is not None:
            relators.append(tuple(_parse_token(token, generators) for token in rest.split()))
        else:
            raise MalformedInputError(f"line {number}: expected 'gen:' first, then 'rel:' lines")
    if generators is None:
        raise MalformedInputError("presentation has no 'gen:' line")
    return GroupPresentation(
        generators=generators,
        relators=tuple(relators),
        roles=tuple(_infer_role(name, generators) for name in generators),
    )


def _infer_role(name: str, generators: tuple) -> str:
    if name.startswith("t"):
        return ROLE_CIRCLE
    if name.startswith("u"):
        return ROLE_STABLE
    if name.startswith("s"):
        return ROLE_BOUNDARY
    if name.startswith("y"):
        return ROLE_HANDLE
    return ROLE_HANDLE if "y" + name[1:] in generators else ROLE_CROSSCAP


def spanning_tree_edges(book: BookComplex) -> set:
    """
    Edge indices of the breadth-first spanning tree of Gamma rooted at circle 0.

    Neighbours are visited circles first, then surfaces, each by index; between
    two adjacent vertices the lowest-index edge is the tree edge.
    """
    graph = underlying_graph(book)
    tree = set()
    for parent, child in nx.bfs_edges(graph, circle_node(0), sort_neighbors=sorted):
        tree.add(min(graph[parent][child]))
    return tree


def present(book: BookComplex) -> GroupPresentation:
    require_valid(book)

    generators, roles = [], []
    surface_generators, boundary_words = [], []
    for j, surface in enumerate(book.surfaces):
        offset = len(generators)
        names = surface_generator_names(j, surface)
        handles = surface.handle_generator_count
        for position, name in enumerate(names):
            generators.append(name)
            if position >= handles:
                roles.append(ROLE_BOUNDARY)
            else:
                roles.append(ROLE_HANDLE if surface.orientable else ROLE_CROSSCAP)
        surface_generators.append(tuple(range(offset, offset + len(names))))
        boundary_words.append(tuple(
            boundary_word(surface, k, offset) for k in range(surface.boundary_count)
        ))

    circle_generators = []
    for i in range(book.circle_count):
        circle_generators.append(len(generators))
        generators.append(f"t{i}")
        roles.append(ROLE_CIRCLE)

    tree = spanning_tree_edges(book)
    edge_paths = []
    for index in range(len(book.edges)):
        if index in tree:
            edge_paths.append(None)
        else:
            edge_paths.append(len(generators))
            generators.append(f"u{index}")
            roles.append(ROLE_STABLE)

    relators = []
    for index, edge in enumerate(book.edges):
        bw = boundary_words[edge.surface][edge.boundary_index]
        t_letter = circle_generators[edge.circle] + 1
        wrap = power((t_letter,), -edge.degree)
        stable = edge_paths[index]
        if stable is None:
            relator = bw + wrap
        else:
            relator = bw + (stable + 1,) + wrap + (-(stable + 1),)
        relators.append(free_reduce(relator))

    logger.debug(
        "Presented pi1: %d generators, %d relators, %d stable letters",
        len(generators), len(relators), len(book.edges) - len(tree),
    )
    return GroupPresentation(
        generators=tuple(generators),
        relators=tuple(relators),
        roles=tuple(roles),
        surface_generators=tuple(surface_generators),
        circle_generators=tuple(circle_generators),
        boundary_words=tuple(boundary_words),
        edge_paths=tuple(edge_paths),
        tree_edges=tuple(sorted(tree)),
    )


def relator_matrix(p: GroupPresentation) -> list:
    """Exponent-sum matrix (relators x generators) of the abelianisation."""
    return [exponent_sums(r, len(p.generators)) for r in p.relators]
