#!/usr/bin/env python3
"""
Towers of finite regular covers and the torsion growth experiment.

A tower is a list of quotients of pi1(X), each level after the first carrying
a point map onto the previous level's points. When the point map is onto and
intertwines every generator action, the kernel of each level contains the
kernel of the next, so the covers are nested.

Tower JSON:
    {"declared_cofinal": false,
     "levels": [{"points": 1, "images": {}},
                {"points": 2, "images": {"t0": "(1 2)"}, "projection": [1, 1]}]}

Projections are 1-based: entry i is the level-n point under level-(n+1) point i.
"""

import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

from scripts.utils.book_model import BookComplex, global_bounds
from scripts.utils.cover_lift import lift
from scripts.utils.errors import (
    CapExceededError,
    MalformedInputError,
    OracleDisagreementError,
    SingularMonodromyError,
    TowerMismatchError,
)
from scripts.utils.finite_quotient import FiniteQuotient
from scripts.utils.integer_homology import determinant, identity_matrix, matmul, smith_normal_form
from scripts.utils.paper_matrix import build, cover_homology, hadamard_bound, index_decomposition
from scripts.utils.presentation import GroupPresentation, relator_matrix
from scripts.utils.rs_oracle import oracle_homology
from scripts.utils.run_config import Caps, load_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TowerLevel:
    quotient: FiniteQuotient
    projection: Optional[tuple] = None


@dataclass(frozen=True)
class TowerSpec:
    levels: tuple
    declared_cofinal: bool = False


@dataclass(frozen=True)
class GrowthRow:
    level: int
    index: int
    torsion_order: int
    invariant_factors: tuple
    betti: int
    ell: int
    degree: int
    hadamard: int
    ratio_ok: bool
    bound_ok: bool
    dm: int = 1
    base: int = 2
    oracle: Optional[str] = None

    @property
    def ratio(self) -> float:
        """log(torsion) / index, for display only."""
        return math.log(self.torsion_order) / self.index

    @property
    def hadamard_ratio(self) -> float:
        """log(2 val d) * d * m / D, for display only."""
        return math.log(self.base) * self.dm / self.degree

    def to_json(self) -> dict:
        out = {
            "level": self.level,
            "index": self.index,
            "torsion_order": self.torsion_order,
            "invariant_factors": list(self.invariant_factors),
            "betti": self.betti,
            "ratio": self.ratio,
            "hadamard_ratio": self.hadamard_ratio,
            "ell": self.ell,
            "D": self.degree,
            "hadamard_bound": self.hadamard,
            "torsion_le_bound": self.bound_ok,
            "ratio_le_bound": self.ratio_ok,
        }
        if self.oracle is not None:
            out["oracle"] = self.oracle
        return out


def _parse_projection(raw, points: int, previous: int, where: str) -> tuple:
    if not isinstance(raw, list) or len(raw) != points:
        raise MalformedInputError(f"{where}: projection must list {points} points")
    out = []
    for value in raw:
        if isinstance(value, bool) or not isinstance(value, int) or not 1 <= value <= previous:
            raise MalformedInputError(f"{where}: projection value {value!r} outside 1..{previous}")
        out.append(value - 1)
    return tuple(out)


def parse_tower(data, p: GroupPresentation, caps: Optional[Caps] = None) -> TowerSpec:
    if not isinstance(data, dict) or set(data) - {"levels", "declared_cofinal"}:
        raise MalformedInputError("tower: expected an object with 'levels' and 'declared_cofinal'")
    raw_levels = data.get("levels")
    if not isinstance(raw_levels, list) or not raw_levels:
        raise MalformedInputError("tower: 'levels' must be a non-empty list")
    cofinal = data.get("declared_cofinal", False)
    if not isinstance(cofinal, bool):
        raise MalformedInputError("tower: 'declared_cofinal' must be a boolean")

    levels = []
    for n, raw in enumerate(raw_levels):
        where = f"levels[{n}]"
        if not isinstance(raw, dict):
            raise MalformedInputError(f"{where}: expected an object")
        body = {key: value for key, value in raw.items() if key != "projection"}
        quotient = FiniteQuotient.from_json(body, p.generators, caps)
        projection = None
        if n > 0:
            if "projection" not in raw:
                raise MalformedInputError(f"{where}: missing 'projection'")
            projection = _parse_projection(
                raw["projection"], quotient.points, levels[-1].quotient.points, where
            )
        levels.append(TowerLevel(quotient, projection))
    return TowerSpec(tuple(levels), cofinal)


def load_tower(path: Path, p: GroupPresentation, caps: Optional[Caps] = None) -> TowerSpec:
    return parse_tower(load_json(path), p, caps)


def tower_to_json(t: TowerSpec) -> dict:
    levels = []
    for level in t.levels:
        entry = level.quotient.to_json()
        if level.projection is not None:
            entry["projection"] = [x + 1 for x in level.projection]
        levels.append(entry)
    return {"declared_cofinal": t.declared_cofinal, "levels": levels}


def verify_tower(p: GroupPresentation, t: TowerSpec) -> bool:
    """True iff every projection is onto and commutes with all generator actions."""
    for n, level in enumerate(t.levels):
        if tuple(level.quotient.generators) != tuple(p.generators):
            raise TowerMismatchError(f"level {n}: generators differ from the presentation")

    for n in range(1, len(t.levels)):
        lower, upper = t.levels[n - 1].quotient, t.levels[n].quotient
        projection = t.levels[n].projection
        if projection is None or len(projection) != upper.points:
            return False
        if set(projection) != set(range(lower.points)):
            logger.info("Level %d projection is not onto", n)
            return False
        for name in p.generators:
            above, below = upper.images[name], lower.images[name]
            if any(projection[above[i]] != below[projection[i]] for i in range(upper.points)):
                logger.info("Level %d projection does not commute with %s", n, name)
                return False
    return True


def _mixed_radix_points(moduli: Sequence[int]) -> list:
    return list(product(*(range(m) for m in moduli)))


def mod_m_tower(
    book: BookComplex,
    p: GroupPresentation,
    prime: int,
    depth: int,
    caps: Optional[Caps] = None,
) -> TowerSpec:
    """
    Tower of abelian covers pi1(X) -> H1(X; Z/q^n), n = 0..depth.

    H1(X) is diagonalised by the Smith form of the relator matrix; generator g
    has coordinates given by row g of the right witness. Level n is the group
    of coordinate vectors modulo gcd(d_i, q^n) (q^n on free coordinates) acting
    on itself by translation; projections reduce coordinates.
    """
    caps = caps or Caps()
    if prime < 2 or depth < 0:
        raise MalformedInputError(f"need a prime >= 2 and depth >= 0, got {prime}, {depth}")
    matrix = relator_matrix(p)
    form = smith_normal_form(matrix, cols=len(p.generators), witnesses=True)
    diagonal = list(form.diagonal) + [0] * (len(p.generators) - form.rank)

    def moduli(n: int) -> list:
        power = prime ** n
        return [math.gcd(d, power) if d else power for d in diagonal]

    kept = [i for i, m in enumerate(moduli(depth)) if m > 1]
    top = math.prod(moduli(depth)[i] for i in kept)
    limit = min(caps.max_group_order, caps.max_degree)
    if top > limit:
        raise CapExceededError("group order", limit, top)

    levels = []
    previous, previous_mods = None, []
    for n in range(depth + 1):
        mods = [moduli(n)[i] for i in kept]
        points = _mixed_radix_points(mods)
        where = {pt: k for k, pt in enumerate(points)}
        images = {}
        for g, name in enumerate(p.generators):
            shift = [form.right[g][i] % m for i, m in zip(kept, mods)]
            images[name] = tuple(
                where[tuple((x + s) % m for x, s, m in zip(pt, shift, mods))] for pt in points
            )
        quotient = FiniteQuotient(len(points), images, caps)
        projection = None
        if previous is not None:
            projection = tuple(
                previous[tuple(x % m for x, m in zip(pt, previous_mods))] for pt in points
            )
        levels.append(TowerLevel(quotient, projection))
        previous, previous_mods = where, mods
        logger.debug("mod %d^%d level: |G| = %d", prime, n, len(points))
    return TowerSpec(tuple(levels), declared_cofinal=False)


def level_row(
    book: BookComplex,
    p: GroupPresentation,
    q: FiniteQuotient,
    level: int = 0,
    oracle: bool = False,
    compress_crosscaps: bool = False,
) -> GrowthRow:
    started = time.monotonic()
    cov = lift(book, p, q)
    h1 = cover_homology(cov, build(cov, compress_crosscaps))
    split = index_decomposition(cov)
    b = global_bounds(book)
    base, dm = 2 * b.val * b.d, b.d * b.m
    bound = hadamard_bound(cov)

    agreement = None
    if oracle:
        expected = oracle_homology(p, q)
        if (expected.invariant_factors, expected.betti) != (h1.invariant_factors, h1.betti):
            raise OracleDisagreementError(
                f"level {level}: graph-of-spaces and Reidemeister-Schreier homology differ",
                primary=h1.to_json(),
                oracle=expected.to_json(),
            )
        agreement = "agree"

    logger.info("Level %d: index %d, torsion %d (%.2fs)",
                level, split.index, h1.torsion_order, time.monotonic() - started)
    return GrowthRow(
        level=level,
        index=split.index,
        torsion_order=h1.torsion_order,
        invariant_factors=h1.invariant_factors,
        betti=h1.betti,
        ell=split.ell,
        degree=split.degree,
        hadamard=bound,
        ratio_ok=h1.torsion_order ** split.degree <= base ** (dm * split.index),
        bound_ok=h1.torsion_order <= bound,
        dm=dm,
        base=base,
        oracle=agreement,
    )


def growth_series(
    book: BookComplex,
    p: GroupPresentation,
    t: TowerSpec,
    workers: int = 1,
    oracle: bool = False,
    compress_crosscaps: bool = False,
) -> list:
    """One GrowthRow per level, in level order whatever the worker count."""
    if not verify_tower(p, t):
        raise TowerMismatchError("tower projections do not commute with the quotient maps")

    def _one(n: int) -> GrowthRow:
        return level_row(book, p, t.levels[n].quotient, n, oracle, compress_crosscaps)

    rows = {}
    if workers <= 1:
        for n in range(len(t.levels)):
            rows[n] = _one(n)
    else:
        from concurrent.futures import ThreadPoolExecutor, as_completed
        with ThreadPoolExecutor(max_workers=workers) as ex:
            futures = {ex.submit(_one, n): n for n in range(len(t.levels))}
            for future in as_completed(futures):
                rows[futures[future]] = future.result()
    return [rows[n] for n in range(len(t.levels))]


def growth_table(rows: Sequence[GrowthRow]) -> pd.DataFrame:
    return pd.DataFrame([
        {
            "level": r.level,
            "index": r.index,
            "torsion": str(r.torsion_order),
            "factors": " ".join(map(str, r.invariant_factors)) or "-",
            "betti": r.betti,
            "ell": r.ell,
            "D": r.degree,
            "ratio": round(r.ratio, 6),
            "hadamard_ratio": round(r.hadamard_ratio, 6),
            "ratio_ok": r.ratio_ok,
        }
        for r in rows
    ])


# Monodromy of Z^2 x|_A Z

def _check_monodromy(a: Sequence[Sequence[int]]) -> int:
    if len(a) != 2 or any(len(row) != 2 for row in a):
        raise MalformedInputError("monodromy must be a 2x2 integer matrix")
    det = determinant(a)
    if abs(det) != 1:
        raise SingularMonodromyError(f"monodromy has determinant {det}, not in GL(2,Z)")
    return det


def matrix_power(a: Sequence[Sequence[int]], n: int) -> list:
    result, square = identity_matrix(len(a)), [list(row) for row in a]
    while n:
        if n & 1:
            result = matmul(result, square)
        square = matmul(square, square)
        n >>= 1
    return result


def metabelian_torsion(a: Sequence[Sequence[int]], n: int) -> int:
    """|det(A^n - I)|, the torsion of the abelianised n-fold cyclic cover."""
    _check_monodromy(a)
    if n < 1:
        raise MalformedInputError(f"n must be positive, got {n}")
    power = matrix_power(a, n)
    shifted = [[power[i][j] - (i == j) for j in range(2)] for i in range(2)]
    value = abs(determinant(shifted))
    if value == 0:
        raise SingularMonodromyError(f"A^{n} - I is singular: torsion not full-rank")
    return value


def metabelian_series(a: Sequence[Sequence[int]], max_n: int) -> list:
    """Rows (n, torsion, invariant factors, log-ratio) with a closed-form cross-check."""
    det = _check_monodromy(a)
    rows = []
    for n in range(1, max_n + 1):
        value = metabelian_torsion(a, n)
        power = matrix_power(a, n)
        closed = abs(det ** n - (power[0][0] + power[1][1]) + 1)
        if closed != value:
            raise SingularMonodromyError(f"n={n}: determinant {value} != closed form {closed}")
        shifted = [[power[i][j] - (i == j) for j in range(2)] for i in range(2)]
        rows.append({
            "n": n,
            "torsion": value,
            "invariant_factors": list(smith_normal_form(shifted).invariant_factors),
            "log_ratio": math.log(value) / n,
        })
    return rows


def metabelian_growth_check(
    a: Sequence[Sequence[int]],
    n: int = 30,
    digits: int = 12,
    tolerance: Fraction = Fraction(1, 50),
) -> dict:
    """
    Exact test that log|det(A^n - I)| / n is within `tolerance` of log(lambda).

    lambda = (|tr| + sqrt(tr^2 - 4 det)) / 2 is bracketed by rationals through
    an integer square root; with tolerance a/b the check is
    T^b >= lambda_hi^((b - a) n) and T^b <= lambda_lo^((b + a) n).
    """
    det = _check_monodromy(a)
    trace = a[0][0] + a[1][1]
    disc = trace * trace - 4 * det
    if disc <= 0:
        raise SingularMonodromyError("monodromy has no real eigenvalue above 1")
    scale = 10 ** digits
    root = math.isqrt(disc * scale * scale)
    lam_lo = Fraction(abs(trace) * scale + root, 2 * scale)
    lam_hi = Fraction(abs(trace) * scale + root + 1, 2 * scale)
    if lam_lo <= 1:
        raise SingularMonodromyError("monodromy has no real eigenvalue above 1")

    value = metabelian_torsion(a, n)
    tol = Fraction(tolerance)
    top, bottom = tol.numerator, tol.denominator
    lower_exp, upper_exp = (bottom - top) * n, (bottom + top) * n
    lower_ok = value ** bottom * lam_hi.denominator ** lower_exp >= lam_hi.numerator ** lower_exp
    upper_ok = value ** bottom * lam_lo.denominator ** upper_exp <= lam_lo.numerator ** upper_exp
    return {
        "n": n,
        "torsion": value,
        "lambda_bracket": [str(lam_lo), str(lam_hi)],
        "tolerance": str(tol),
        "log_ratio": math.log(value) / n,
        "log_lambda": math.log(float(lam_lo)),
        "lower_ok": lower_ok,
        "upper_ok": upper_ok,
        "ok": lower_ok and upper_ok,
    }
