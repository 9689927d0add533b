"""Shared fixtures: exhaustive and randomized graph corpora."""

from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import util  # noqa: E402
from beslab import build, diamond_star, f63  # noqa: E402


@pytest.fixture(scope="session")
def corpus_k5():
    """Every admissible graph for k = 5 on 7 vertices, one per iso class."""
    return util.iso_free_corpus(3, 5, 7)


@pytest.fixture(scope="session")
def corpus_k6():
    """Every admissible graph for k = 6 on 7 vertices, one per iso class."""
    return util.iso_free_corpus(3, 6, 7)


@pytest.fixture(scope="session")
def corpus_k7():
    """Every admissible graph for k = 7 on 7 vertices, one per iso class."""
    return util.iso_free_corpus(3, 7, 7)


@pytest.fixture(scope="session")
def fuzz_corpus():
    """Mixed bag of small graphs (admissible or not) for invariant fuzzing."""
    rng = random.Random(20260819)
    out = []
    for _ in range(40):
        r = rng.choice([3, 3, 4])
        n = rng.randint(r, 9)
        out.append(util.random_hypergraph(rng, r, n, 10))
    out.append(diamond_star(1))
    out.append(diamond_star(2))
    out.append(diamond_star(4))
    out.append(build(3, 4, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]))
    out.append(build(3, 7, [(1, 5, 6), (2, 5, 6), (1, 5, 0)]))
    out.append(build(4, 8, [(0, 1, 2, 3), (0, 1, 4, 5), (2, 3, 6, 7)]))
    return out


@pytest.fixture(scope="session")
def big_star():
    return f63()
