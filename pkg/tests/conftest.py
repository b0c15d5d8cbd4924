"""Shared fixtures and the independent reference oracles.

The reference implementations here are deliberately naive: a double loop
over assignments and vertices with scalar evaluation, and a full
enumeration of strategy tables.  They exist so the optimized paths have
something independent to agree with.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import pytest
from hypothesis import settings

from hats.core import Assignment, Game, assignment_at
from hats.strategy import Strategy

settings.register_profile("ci", max_examples=50, deadline=None)
settings.load_profile("ci")


@dataclass
class NaiveSweep:
    counterexample_index: Optional[int]
    counterexample: Optional[Assignment]
    min_correct: int
    histogram: dict[int, int]


def naive_verify(game: Game, strategy: Strategy, limit: int = 10 ** 6) -> NaiveSweep:
    """Double loop with scalar evaluation and per-assignment early exit
    for the counterexample, plus a full-count pass for the histogram."""
    total = game.color_space
    assert total <= limit, "reference verifier is for small games only"
    first_index = None
    first_assignment = None
    histogram: Counter[int] = Counter()
    min_correct = len(game.graph.vertices) + 1
    for index in range(total):
        assignment = assignment_at(game, index)
        guesses = strategy.guesses(assignment)
        correct = sum(guesses[v] == assignment[v] for v in game.graph.vertices)
        histogram[correct] += 1
        min_correct = min(min_correct, correct)
        if correct == 0 and first_index is None:
            first_index = index
            first_assignment = assignment
    return NaiveSweep(first_index, first_assignment, min_correct, dict(histogram))


def brute_force_decide(game: Game, cap: int = 500_000) -> Optional[bool]:
    """Enumerate every strategy table; True iff some table covers all
    assignments.  None when the table space exceeds the cap."""
    verts = game.graph.vertices
    cells = []  # (vertex index, pattern count)
    for v in verts:
        cells.append(math.prod(game.h(u) for u in game.graph.adjacency[v]))
    table_space = math.prod(
        game.h(v) ** patterns for v, patterns in zip(verts, cells)
    )
    if table_space > cap:
        return None

    index = game.graph.index
    total = game.color_space
    refs = []  # per assignment: list of (flat cell id, own color)
    bases = []
    ncells = 0
    for patterns in cells:
        bases.append(ncells)
        ncells += patterns
    cell_hat = []
    for i, v in enumerate(verts):
        cell_hat += [game.h(v)] * cells[i]
    for a in range(total):
        assignment = assignment_at(game, a)
        options = []
        for i, v in enumerate(verts):
            pat = 0
            place = 1
            for u in game.graph.adjacency[v]:
                pat += assignment[u] * place
                place *= game.h(u)
            options.append((bases[i] + pat, assignment[v]))
        refs.append(options)

    for table in itertools.product(*(range(h) for h in cell_hat)):
        if all(any(table[cell] == own for cell, own in options) for options in refs):
            return True
    return False


@pytest.fixture(scope="session")
def k5minus_composed():
    from hats.constructors import k5minus

    return k5minus()


@pytest.fixture(scope="session")
def game26666_composed():
    from hats.constructors import game_26666

    return game_26666()


@pytest.fixture(scope="session")
def trefoil_composed():
    from hats.constructors import trefoil

    return trefoil()


@pytest.fixture(scope="session")
def planar14_composed():
    from hats.constructors import planar14

    return planar14()
