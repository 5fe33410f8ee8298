"""Tests for permutation helpers and finite quotients."""

import random

import pytest

from scripts.utils.errors import CapExceededError, MalformedInputError
from scripts.utils.finite_quotient import (
    FiniteQuotient,
    check_homomorphism,
    closure,
    compose,
    coset_labels,
    element_order,
    format_cycles,
    image_subgroup_order,
    inverse,
    load_quotient,
    parse_cycles,
    perm_order,
    perm_power,
    schreier_sims_order,
)
from scripts.utils.run_config import Caps


def test_compose_is_left_to_right():
    p = parse_cycles("(1 2)", 3)
    q = parse_cycles("(2 3)", 3)
    # 1 -> 2 under p, then 2 -> 3 under q
    assert compose(p, q)[0] == 2
    assert format_cycles(compose(p, q)) == "(1 3 2)"


def test_parse_and_format_cycles():
    p = parse_cycles("(1 2)(3 4 5)", 5)
    assert p == (1, 0, 3, 4, 2)
    assert format_cycles(p) == "(1 2)(3 4 5)"
    assert format_cycles(parse_cycles("()", 4)) == "()"
    assert parse_cycles("(1,3)", 3) == (2, 1, 0)


@pytest.mark.parametrize("text", ["(1 2", "(1 4)", "(1 1)", "(a b)", "1 2"])
def test_parse_cycles_rejects_garbage(text):
    with pytest.raises(MalformedInputError):
        parse_cycles(text, 3)


def test_orders_and_powers():
    p = parse_cycles("(1 2)(3 4 5)", 5)
    assert perm_order(p) == 6
    assert perm_power(p, 6) == tuple(range(5))
    assert perm_power(p, -1) == inverse(p)
    assert compose(p, inverse(p)) == tuple(range(5))


def test_schreier_sims_matches_closure():
    gens = [parse_cycles("(1 2)", 4), parse_cycles("(1 2 3 4)", 4)]
    assert schreier_sims_order(gens, 4) == 24
    assert len(closure(gens, 4, 100)) == 24
    with pytest.raises(CapExceededError):
        closure(gens, 4, 10)


def test_quotient_enumerates_sorted_group(running_presentation):
    q = FiniteQuotient.from_json(
        {"points": 3, "images": {"x0_1": "(1 2 3)", "t0": "(1 3 2)"}},
        running_presentation.generators,
    )
    assert q.group_order == 3
    assert list(q.elements) == sorted(q.elements)
    assert q.images["y0_1"] == (0, 1, 2)
    assert q.evaluate((1, 3)) == q.identity()
    assert q.letter(-1) == inverse(q.images["x0_1"])


def test_order_cap_checked_before_enumeration(running_presentation):
    with pytest.raises(CapExceededError) as excinfo:
        FiniteQuotient.from_json(
            {"points": 5, "images": {"x0_1": "(1 2)", "y0_1": "(1 2 3 4 5)"}},
            running_presentation.generators,
            Caps(max_group_order=100),
        )
    assert excinfo.value.actual == 120


def test_degree_cap(running_presentation):
    with pytest.raises(CapExceededError):
        FiniteQuotient.from_json({"points": 10, "images": {}}, running_presentation.generators,
                                 Caps(max_degree=8))


def test_unknown_generator_rejected(running_presentation):
    with pytest.raises(MalformedInputError):
        FiniteQuotient.from_json({"points": 2, "images": {"z9": "(1 2)"}},
                                 running_presentation.generators)


def test_homomorphism_check(running_presentation, double_quotient):
    assert check_homomorphism(running_presentation, double_quotient)
    # [x, y] t^-2 with x, y a transposition and a 3-cycle of S3 is not killed
    images = {
        "x0_1": parse_cycles("(1 2)", 3),
        "y0_1": parse_cycles("(1 2 3)", 3),
        "t0": parse_cycles("()", 3),
    }
    assert not check_homomorphism(running_presentation, FiniteQuotient(3, images))


def test_homomorphism_check_needs_every_image(running_presentation):
    q = FiniteQuotient(2, {"x0_1": (0, 1), "t0": (1, 0)})
    with pytest.raises(MalformedInputError):
        check_homomorphism(running_presentation, q)


def test_subgroup_queries(double_quotient):
    assert element_order(double_quotient, (3,)) == 2
    assert element_order(double_quotient, (1,)) == 1
    assert image_subgroup_order(double_quotient, [(1,), (2,)]) == 1
    assert coset_labels(double_quotient, [(1,)]) == [(0, 1), (1, 0)]
    assert coset_labels(double_quotient, [(3,)]) == [(0, 1)]


def test_cosets_label_every_element():
    q = FiniteQuotient(3, {"a": parse_cycles("(1 2)", 3), "b": parse_cycles("(1 2 3)", 3)})
    subgroup = q.subgroup([q.images["a"]])
    reps, label = q.cosets(subgroup)
    assert len(reps) == 3
    assert set(label) == set(q.elements)
    assert reps == sorted(reps)
    assert all(label[r] == i for i, r in enumerate(reps))


def test_lagrange_and_element_orders_on_random_quotients():
    rng = random.Random(2024)
    for _ in range(60):
        points = rng.randint(2, 5)
        images = {}
        for name in ("a", "b"):
            perm = list(range(points))
            rng.shuffle(perm)
            images[name] = tuple(perm)
        q = FiniteQuotient(points, images)
        for _ in range(5):
            w = tuple(rng.choice((1, -1, 2, -2)) for _ in range(rng.randint(0, 6)))
            assert q.group_order % element_order(q, w) == 0
        ws = [tuple(rng.choice((1, -1, 2, -2)) for _ in range(rng.randint(1, 4)))
              for _ in range(rng.randint(0, 2))]
        cosets = coset_labels(q, ws)
        assert len(cosets) * image_subgroup_order(q, ws) == q.group_order
        _, label = q.cosets(q.subgroup(q.evaluate(w) for w in ws))
        assert len(label) == q.group_order


def test_load_quotient_and_to_json(data_dir, running_presentation):
    q = load_quotient(data_dir / "mod2_quotient.json", running_presentation.generators)
    assert q.group_order == 2
    assert q.to_json() == {"points": 2, "images": {"x0_1": "()", "y0_1": "()", "t0": "(1 2)"}}
