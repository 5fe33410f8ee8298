#!/usr/bin/env python3
"""
Random books and random finite quotients of their fundamental groups.

The homomorphism sampler is constructive: circle and stable letters are drawn
at random from the target group, every boundary generator is then forced by
its edge relation, and the one remaining surface relation is solved by a
search for a commutator (orientable page) or a square (non-orientable page).
"""

import logging
import math
import random
from typing import Optional, Sequence

from scripts.utils.book_model import BookComplex, Edge, SurfaceType, validate
from scripts.utils.errors import InternalConsistencyError, MalformedInputError
from scripts.utils.finite_quotient import (
    FiniteQuotient,
    check_homomorphism,
    closure,
    compose,
    identity,
    inverse,
    perm_power,
)
from scripts.utils.integer_homology import smith_normal_form
from scripts.utils.presentation import GroupPresentation, present, relator_matrix
from scripts.utils.run_config import Caps

logger = logging.getLogger(__name__)

# (genus, boundary count) pairs with chi = -1 or -2
ORIENTABLE_PAGES = ((0, 3), (0, 4), (1, 1), (1, 2))
NON_ORIENTABLE_PAGES = ((1, 2), (1, 3), (2, 1), (2, 2), (3, 1))


def cyclic_group(n: int) -> list:
    return [tuple((i + 1) % n for i in range(n))]


def dihedral_group(n: int) -> list:
    """Rotation and reflection of a regular n-gon, as permutations of its vertices."""
    return [tuple((i + 1) % n for i in range(n)), tuple((-i) % n for i in range(n))]


def symmetric_group(n: int) -> list:
    if n < 2:
        return [identity(max(n, 1))]
    swap = (1, 0) + tuple(range(2, n))
    return [swap, tuple((i + 1) % n for i in range(n))]


NAMED_GROUPS = {
    "cyclic": cyclic_group,
    "dihedral": dihedral_group,
    "symmetric": symmetric_group,
}


def parse_group(text: str) -> list:
    """Generators of a named group such as "dihedral:4"."""
    name, _, size = text.partition(":")
    if name not in NAMED_GROUPS or not size.isdigit() or int(size) < 1:
        raise MalformedInputError(
            f"group must look like <{'|'.join(NAMED_GROUPS)}>:<n>, got {text!r}"
        )
    return NAMED_GROUPS[name](int(size))


def random_book(
    rng: random.Random,
    max_circles: int = 2,
    max_pages: int = 2,
    max_degree: int = 4,
) -> BookComplex:
    """A valid book with pages of Euler characteristic -1 or -2."""
    while True:
        circles = rng.randint(1, max_circles)
        surfaces, edges = [], []
        for j in range(rng.randint(1, max_pages)):
            orientable = rng.random() < 0.5
            genus, boundary = rng.choice(ORIENTABLE_PAGES if orientable else NON_ORIENTABLE_PAGES)
            surfaces.append(SurfaceType(orientable, genus, boundary))
            for k in range(boundary):
                degree = rng.randint(1, max_degree) * rng.choice((1, 1, -1))
                edges.append(Edge(j, k, rng.randrange(circles), degree))
        book = BookComplex(circles, surfaces, edges)
        if validate(book).valid:
            return book


def _commutator(x: tuple, y: tuple) -> tuple:
    return compose(compose(compose(x, y), inverse(x)), inverse(y))


def _solve_surface(
    s: SurfaceType,
    target: tuple,
    elements: Sequence[tuple],
    rng: random.Random,
) -> Optional[list]:
    """Handle (or crosscap) images whose surface word W evaluates to `target`."""
    n = len(target)
    if s.genus == 0:
        return [] if target == identity(n) else None

    if s.orientable:
        chosen = []
        prefix = identity(n)
        for _ in range(s.genus - 1):
            x, y = rng.choice(elements), rng.choice(elements)
            chosen.extend((x, y))
            prefix = compose(prefix, _commutator(x, y))
        need = compose(inverse(prefix), target)
        order = list(elements)
        rng.shuffle(order)
        for x in order:
            for y in order:
                if _commutator(x, y) == need:
                    return chosen + [x, y]
        return None

    chosen = []
    prefix = identity(n)
    for _ in range(s.genus - 1):
        x = rng.choice(elements)
        chosen.append(x)
        prefix = compose(prefix, compose(x, x))
    need = compose(inverse(prefix), target)
    order = list(elements)
    rng.shuffle(order)
    for x in order:
        if compose(x, x) == need:
            return chosen + [x]
    return None


def _sample_images(
    book: BookComplex,
    p: GroupPresentation,
    elements: Sequence[tuple],
    rng: random.Random,
) -> Optional[dict]:
    n = len(elements[0])
    images = {}
    circle = [rng.choice(elements) for _ in range(book.circle_count)]
    for i, index in enumerate(p.circle_generators):
        images[p.generators[index]] = circle[i]
    for index in p.edge_paths:
        if index is not None:
            images[p.generators[index]] = rng.choice(elements)

    for j, surface in enumerate(book.surfaces):
        forced = []
        for k in range(surface.boundary_count):
            e = book.edge_index(j, k)
            edge = book.edges[e]
            stable = p.edge_paths[e]
            u = images[p.generators[stable]] if stable is not None else identity(n)
            forced.append(compose(compose(u, perm_power(circle[edge.circle], edge.degree)), inverse(u)))

        sigmas = forced[:-1]
        product = identity(n)
        for sigma in sigmas:
            product = compose(product, sigma)
        # b_last = (W sigma_1 ... sigma_{s-1})^-1  =>  W = b_last^-1 (sigma_1 ... sigma_{s-1})^-1
        target = compose(inverse(forced[-1]), inverse(product))
        handles = _solve_surface(surface, target, elements, rng)
        if handles is None:
            return None

        names = [p.generators[index] for index in p.surface_generators[j]]
        for name, image in zip(names, handles + sigmas):
            images[name] = image
    return {name: images[name] for name in p.generators}


def sample_quotient(
    book: BookComplex,
    p: GroupPresentation,
    target_generators: Sequence[tuple],
    rng: random.Random,
    attempts: int = 50,
    caps: Optional[Caps] = None,
) -> Optional[FiniteQuotient]:
    """A random homomorphism into the group generated by `target_generators`, or None."""
    caps = caps or Caps()
    degree = len(target_generators[0])
    elements = closure(target_generators, degree, caps.max_group_order)
    for attempt in range(attempts):
        images = _sample_images(book, p, elements, rng)
        if images is None:
            continue
        q = FiniteQuotient(degree, images, caps)
        if not check_homomorphism(p, q):
            raise InternalConsistencyError("sampled images do not satisfy the relators")
        logger.debug("Sampled quotient of order %d after %d attempts", q.group_order, attempt + 1)
        return q
    return None


def cyclic_quotient(
    p: GroupPresentation,
    n: int,
    rng: random.Random,
    caps: Optional[Caps] = None,
) -> FiniteQuotient:
    """
    A random homomorphism pi1 -> H1 -> Z/n, as translations of n points.

    Homomorphisms killing the relator rows are v = V w (mod n) with
    d_i w_i = 0 (mod n), where U R V = diag(d) is the Smith form.
    """
    count = len(p.generators)
    form = smith_normal_form(relator_matrix(p), cols=count, witnesses=True)
    diagonal = list(form.diagonal) + [0] * (count - form.rank)
    w = []
    for d in diagonal:
        step = n // math.gcd(d, n) if d else 1
        w.append(step * rng.randrange(n // step))
    images = {}
    for g, name in enumerate(p.generators):
        shift = sum(form.right[g][i] * w[i] for i in range(count)) % n
        images[name] = tuple((x + shift) % n for x in range(n))
    return FiniteQuotient(n, images, caps)


def trivial_quotient(p: GroupPresentation, caps: Optional[Caps] = None) -> FiniteQuotient:
    return FiniteQuotient(1, {name: (0,) for name in p.generators}, caps)


def sweep_cases(seed: int, count: int, max_order: int = 24) -> list:
    """
    Deterministic (book, presentation, quotient, kind) cases for the oracle sweep.

    Books have at most two circles and two pages, |chi| <= 2 and |d| <= 4;
    quotients are trivial, cyclic through homology, or sampled into cyclic,
    dihedral and symmetric permutation groups of order at most `max_order`.
    """
    rng = random.Random(seed)
    kinds = [
        ("trivial", None),
        ("homology:2", None), ("homology:3", None), ("homology:4", None), ("homology:6", None),
        ("cyclic:2", cyclic_group(2)), ("cyclic:3", cyclic_group(3)), ("cyclic:4", cyclic_group(4)),
        ("cyclic:6", cyclic_group(6)),
        ("dihedral:3", dihedral_group(3)), ("dihedral:4", dihedral_group(4)),
        ("dihedral:5", dihedral_group(5)), ("dihedral:6", dihedral_group(6)),
        ("symmetric:3", symmetric_group(3)), ("symmetric:4", symmetric_group(4)),
    ]
    caps = Caps(max_group_order=max_order)
    cases = []
    while len(cases) < count:
        book = random_book(rng)
        p = present(book)
        kind, generators = kinds[len(cases) % len(kinds)]
        if kind == "trivial":
            q = trivial_quotient(p, caps)
        elif kind.startswith("homology:"):
            q = cyclic_quotient(p, int(kind.partition(":")[2]), rng, caps)
        else:
            q = sample_quotient(book, p, generators, rng, caps=caps)
            if q is None:
                continue
        cases.append((book, p, q, kind))
    return cases
