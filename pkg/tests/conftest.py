"""Shared fixtures: the running example book and its small quotients."""

import sys
from pathlib import Path

import pytest

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from scripts.utils.book_model import BookComplex, Edge, SurfaceType
from scripts.utils.finite_quotient import FiniteQuotient
from scripts.utils.presentation import present
from scripts.utils.run_config import get_data_path

DATA = get_data_path()


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def running_book() -> BookComplex:
    """One binding, one punctured-torus page wrapping twice."""
    return BookComplex(1, [SurfaceType(True, 1, 1)], [Edge(0, 0, 0, 2)])


@pytest.fixture
def running_presentation(running_book):
    return present(running_book)


@pytest.fixture
def trivial_quotient(running_presentation):
    return FiniteQuotient(1, {name: (0,) for name in running_presentation.generators})


@pytest.fixture
def double_quotient(running_presentation):
    images = {name: (0, 1) for name in running_presentation.generators}
    images["t0"] = (1, 0)
    return FiniteQuotient(2, images)


@pytest.fixture
def crosscap_book() -> BookComplex:
    """One binding, a once-crosscapped page with two boundaries of degree 1 and 3."""
    return BookComplex(1, [SurfaceType(False, 1, 2)], [Edge(0, 0, 0, 1), Edge(0, 1, 0, 3)])
