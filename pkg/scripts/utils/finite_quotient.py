#!/usr/bin/env python3
"""
Finite quotients of pi1(X) given by permutation images of the generators.

Permutations are tuples of 0-based images and compose left to right: p * q
applies p first, then q (right actions, as in GAP). Cycle notation in input
files is 1-based.

Strategy for group sizes: the order of the image group is first computed with
Schreier-Sims (sympy) and compared with the order cap; only then is the group
enumerated by breadth-first closure, sorted lexicographically, and frozen.
All later queries read this table and never mutate the quotient.

Quotient JSON:
    {"points": 2, "images": {"t0": "(1 2)"}}     omitted generators -> identity
"""

import logging
import math
import re
from collections import deque
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from sympy.combinatorics import Permutation, PermutationGroup

from scripts.utils.errors import CapExceededError, MalformedInputError
from scripts.utils.run_config import Caps, load_json

logger = logging.getLogger(__name__)

CYCLE_RE = re.compile(r"\(([^()]*)\)")


def identity(n: int) -> tuple:
    return tuple(range(n))


def compose(p: tuple, q: tuple) -> tuple:
    """p then q."""
    return tuple(q[i] for i in p)


def inverse(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, image in enumerate(p):
        out[image] = i
    return tuple(out)


def is_identity(p: tuple) -> bool:
    return all(i == image for i, image in enumerate(p))


def cycle_lengths(p: tuple) -> list:
    seen = [False] * len(p)
    lengths = []
    for start in range(len(p)):
        if seen[start]:
            continue
        length, point = 0, start
        while not seen[point]:
            seen[point] = True
            point = p[point]
            length += 1
        lengths.append(length)
    return lengths


def perm_order(p: tuple) -> int:
    return math.lcm(*cycle_lengths(p)) if p else 1


def perm_power(p: tuple, n: int) -> tuple:
    if n < 0:
        p, n = inverse(p), -n
    result = identity(len(p))
    while n:
        if n & 1:
            result = compose(result, p)
        p = compose(p, p)
        n >>= 1
    return result


def parse_cycles(text: str, points: int) -> tuple:
    """Parse 1-based cycle notation such as "(1 2)(3 4 5)"; cycles multiply left to right."""
    stripped = re.sub(r"\s+", " ", text).strip()
    if CYCLE_RE.sub("", stripped).strip():
        raise MalformedInputError(f"could not parse permutation {text!r}")
    result = identity(points)
    for body in CYCLE_RE.findall(stripped):
        tokens = [token for token in re.split(r"[ ,]+", body.strip()) if token]
        try:
            cycle = [int(token) - 1 for token in tokens]
        except ValueError:
            raise MalformedInputError(f"non-integer point in {text!r}")
        if len(set(cycle)) != len(cycle):
            raise MalformedInputError(f"repeated point inside a cycle of {text!r}")
        if any(not 0 <= point < points for point in cycle):
            raise MalformedInputError(f"point out of range 1..{points} in {text!r}")
        step = list(range(points))
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            step[a] = b
        result = compose(result, tuple(step))
    return result


def format_cycles(p: tuple) -> str:
    seen = set()
    out = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cycle, point = [], start
        while point not in seen:
            seen.add(point)
            cycle.append(str(point + 1))
            point = p[point]
        out.append("(" + " ".join(cycle) + ")")
    return "".join(out) or "()"


def schreier_sims_order(generators: Iterable[tuple], degree: int) -> int:
    perms = [Permutation(list(g)) for g in generators if not is_identity(g)]
    if not perms:
        return 1
    return int(PermutationGroup(perms).order())


def closure(generators: Iterable[tuple], degree: int, limit: int) -> list:
    """All elements of the group generated, sorted; CapExceededError past `limit`."""
    gens = sorted({g for g in generators if not is_identity(g)})
    start = identity(degree)
    seen = {start}
    queue = deque([start])
    while queue:
        element = queue.popleft()
        for g in gens:
            product = compose(element, g)
            if product not in seen:
                seen.add(product)
                if len(seen) > limit:
                    raise CapExceededError("group order", limit)
                queue.append(product)
    return sorted(seen)


class FiniteQuotient:
    """
    Homomorphism from pi1(X) onto the permutation group generated by the images.

    Usage:
        q = FiniteQuotient(2, {"x0_1": (0, 1), "y0_1": (0, 1), "t0": (1, 0)})
        q.group_order        # 2
        q.evaluate(word)     # word over q.generators
    """

    def __init__(self, points: int, images: Mapping[str, tuple], caps: Optional[Caps] = None):
        caps = caps or Caps()
        if points < 1:
            raise MalformedInputError(f"points must be positive, got {points}")
        if points > caps.max_degree:
            raise CapExceededError("permutation degree", caps.max_degree, points)
        for name, perm in images.items():
            if sorted(perm) != list(range(points)):
                raise MalformedInputError(f"image of {name} is not a permutation of {points} points")

        self.points = points
        self.caps = caps
        self.generators = tuple(images)
        self._images = MappingProxyType({name: tuple(perm) for name, perm in images.items()})
        self._letters = tuple(self._images[name] for name in self.generators)

        order = schreier_sims_order(self._letters, points)
        if order > caps.max_group_order:
            raise CapExceededError("group order", caps.max_group_order, order)
        self._elements = tuple(closure(self._letters, points, caps.max_group_order))
        self._index = MappingProxyType({g: i for i, g in enumerate(self._elements)})
        if len(self._elements) != order:
            raise CapExceededError("group order", caps.max_group_order, len(self._elements))
        logger.debug("Quotient on %d points: |G| = %d", points, order)

    @classmethod
    def from_json(cls, data, generators: Iterable[str], caps: Optional[Caps] = None) -> "FiniteQuotient":
        """Parse quotient JSON against an ordered generator list (omitted -> identity)."""
        if not isinstance(data, dict) or set(data) - {"points", "images"}:
            raise MalformedInputError("quotient: expected an object with keys 'points' and 'images'")
        points = data.get("points")
        if isinstance(points, bool) or not isinstance(points, int):
            raise MalformedInputError("quotient: 'points' must be an integer")
        caps = caps or Caps()
        if points > caps.max_degree:
            raise CapExceededError("permutation degree", caps.max_degree, points)
        raw = data.get("images", {}) or {}
        if not isinstance(raw, dict):
            raise MalformedInputError("quotient: 'images' must be an object")
        generators = tuple(generators)
        unknown = set(raw) - set(generators)
        if unknown:
            raise MalformedInputError(f"quotient: images for unknown generators {sorted(unknown)}")
        images = {}
        for name in generators:
            text = raw.get(name, "()")
            if not isinstance(text, str):
                raise MalformedInputError(f"quotient: image of {name} must be cycle notation")
            images[name] = parse_cycles(text, points)
        return cls(points, images, caps)

    @property
    def images(self) -> Mapping[str, tuple]:
        return self._images

    @property
    def group_order(self) -> int:
        return len(self._elements)

    @property
    def elements(self) -> tuple:
        return self._elements

    def index(self, element: tuple) -> int:
        return self._index[element]

    def identity(self) -> tuple:
        return identity(self.points)

    def letter(self, letter: int) -> tuple:
        perm = self._letters[abs(letter) - 1]
        return perm if letter > 0 else inverse(perm)

    def evaluate(self, word: tuple) -> tuple:
        result = identity(self.points)
        for letter in word:
            result = compose(result, self.letter(letter))
        return result

    def subgroup(self, perms: Iterable[tuple]) -> list:
        """Sorted elements of the subgroup of G generated by `perms`."""
        return closure(perms, self.points, self.caps.max_group_order)

    def cosets(self, subgroup_elements: Iterable[tuple]) -> tuple:
        """
        Partition G into cosets gH (orbits of right multiplication by H).

        Returns (representatives, label) where representatives are the
        lexicographically minimal elements, in increasing order, and label maps
        every element of G to the position of its coset.
        """
        subgroup_elements = list(subgroup_elements)
        label = {}
        representatives = []
        for g in self._elements:
            if g in label:
                continue
            position = len(representatives)
            representatives.append(g)
            for h in subgroup_elements:
                label[compose(g, h)] = position
        return representatives, label

    def to_json(self) -> dict:
        return {
            "points": self.points,
            "images": {name: format_cycles(p) for name, p in self._images.items()},
        }


def check_homomorphism(p, q: FiniteQuotient) -> bool:
    """True iff every relator of presentation p evaluates to the identity."""
    missing = [name for name in p.generators if name not in q.images]
    if missing:
        raise MalformedInputError(f"missing generator image for {missing}")
    if tuple(q.generators) != tuple(p.generators):
        extra = sorted(set(q.generators) - set(p.generators))
        raise MalformedInputError(f"quotient generators do not match presentation (extra: {extra})")
    return all(is_identity(q.evaluate(r)) for r in p.relators)


def element_order(q: FiniteQuotient, w: tuple) -> int:
    return perm_order(q.evaluate(w))


def image_subgroup_order(q: FiniteQuotient, ws: Iterable[tuple]) -> int:
    return len(q.subgroup(q.evaluate(w) for w in ws))


def coset_labels(q: FiniteQuotient, subgroup_gens: Iterable[tuple]) -> list:
    """Minimal representatives of the cosets gH, H generated by the evaluated words."""
    subgroup = q.subgroup(q.evaluate(w) for w in subgroup_gens)
    representatives, _ = q.cosets(subgroup)
    return representatives


def load_quotient(path: Path, generators: Iterable[str], caps: Optional[Caps] = None) -> FiniteQuotient:
    return FiniteQuotient.from_json(load_json(path), generators, caps)
