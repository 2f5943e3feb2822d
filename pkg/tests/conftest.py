import itertools

import numpy as np
import pytest

from smkedl import CutObjective, Instance, modular


def enumerate_optimum(instance):
    """Independent exact optimum: itertools over id tuples, direct evaluation."""
    best, best_set = 0.0, ()
    for r in range(instance.n + 1):
        for combo in itertools.combinations(range(instance.n), r):
            if sum(instance.costs[list(combo)]) <= instance.budget:
                v = instance.objective.value_of(combo)
                if v > best:
                    best, best_set = v, combo
    return best, best_set


@pytest.fixture
def triangle():
    return CutObjective(3, [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 1.0]])


@pytest.fixture
def modular321():
    return modular([3.0, 2.0, 1.0])


def unit_instance(objective, budget, label=""):
    return Instance(objective, np.ones(objective.n), budget, label)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
