"""Shared fixtures and the acceptance summary printed after the run."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from pemb import (build_compact, claim_parent_edges, dfs_parent_edges,
                  generate_grid_triangulation, parse_embedding, Navigator,
                  sequential_build, tree_structures_from_edges)

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

K3_TEXT = """\
pg 3 3
1 2 4
1 3 5
2 3 6
2 1 1
3 1 2
3 2 3
"""

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def record():
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile every jitted kernel once so timed sections measure the
    algorithms rather than one-off compilation (results are disk-cached)."""
    emb = generate_grid_triangulation(3, 0)
    tree = tree_structures_from_edges(emb, dfs_parent_edges(emb), 1)
    sequential_build(emb, tree)
    compact = build_compact(emb, tree, threads=2)
    tree2 = tree_structures_from_edges(emb, claim_parent_edges(emb, 2), 2)
    build_compact(emb, tree2, threads=2)
    nav = Navigator(compact)
    nav.counting(1)
    nav.face(1)


@pytest.fixture(scope="session")
def k3():
    return parse_embedding(K3_TEXT)


@pytest.fixture(scope="session")
def sample8_path():
    return os.path.join(DATA_DIR, "sample8.pg")


def grid_with_tree(side, seed):
    emb = generate_grid_triangulation(side, seed)
    tree = tree_structures_from_edges(emb, dfs_parent_edges(emb), 1)
    return emb, tree


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
