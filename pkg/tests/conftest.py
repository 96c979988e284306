"""Shared fixtures: random classical metrics, brute-force oracles, M_2 matrices."""

import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from qmetric.algebra import AlgebraShape
from qmetric.construct import from_finite_metric
from qmetric.models import FiniteMetricSpace


def random_metric(rng: np.random.Generator, n: int) -> np.ndarray:
    """Euclidean distances of n random points in the plane, at least 0.1 apart."""
    while True:
        points = rng.uniform(0.0, 3.0, size=(n, 2))
        d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
        if n == 1 or d[~np.eye(n, dtype=bool)].min() > 0.1:
            return d


def plant_violation(rng: np.random.Generator, d: np.ndarray) -> np.ndarray:
    """Break positivity or the triangle inequality of a metric on >= 3 points."""
    d = d.copy()
    n = d.shape[0]
    x, y, z = rng.choice(n, size=3, replace=False)
    if rng.uniform() < 0.5:
        d[x, y] = d[y, x] = -d[x, y]
    else:
        d[x, y] = d[y, x] = d[x, z] + d[z, y] + 1.0
    return d


def brute_force_is_metric(d: np.ndarray, tol: float = 1e-9) -> bool:
    """The classical axioms, checked pair by pair and triple by triple."""
    n = d.shape[0]
    for x, y in itertools.product(range(n), repeat=2):
        if abs(d[x, y] - d[y, x]) > tol:
            return False
        if x == y and abs(d[x, y]) > tol:
            return False
        if x != y and d[x, y] <= tol:
            return False
    for x, y, z in itertools.product(range(n), repeat=3):
        if d[x, y] > d[x, z] + d[z, y] + tol:
            return False
    return True


def brute_force_lipschitz(f: np.ndarray, d: np.ndarray) -> float:
    n = len(f)
    return max(
        (abs(f[x] - f[y]) / d[x, y] for x in range(n) for y in range(n) if x != y),
        default=0.0,
    )


def kantorovich_dual(p: np.ndarray, q: np.ndarray, d: np.ndarray) -> float:
    """max sum f (p - q) over f with f(x) - f(y) <= d(x, y), as its own LP."""
    n = len(p)
    rows, bounds = [], []
    for x, y in itertools.permutations(range(n), 2):
        row = np.zeros(n)
        row[x], row[y] = 1.0, -1.0
        rows.append(row)
        bounds.append(d[x, y])
    result = linprog(
        -(p - q),
        A_ub=np.array(rows),
        b_ub=np.array(bounds),
        bounds=[(None, None)] * n,
        method="highs",
    )
    assert result.success
    return float(-result.fun)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def triangle_space() -> FiniteMetricSpace:
    return FiniteMetricSpace(n=3, d=[[0.0, 1.0, 2.0], [1.0, 0.0, 1.5], [2.0, 1.5, 0.0]])


@pytest.fixture
def triangle_metric(triangle_space):
    return from_finite_metric(triangle_space)


@pytest.fixture
def m2_shape() -> AlgebraShape:
    return AlgebraShape(blocks=(2,))


@pytest.fixture
def m2_pdelta() -> np.ndarray:
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.5, 0.5, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


@pytest.fixture
def m2_defect() -> np.ndarray:
    """The triangle defect of lam (1 - S) on M_2 at lam = 1."""
    return np.array(
        [
            [0, 0, 0, 0, 0, 0, 0, 0],
            [0, 0, -1, 0, 1, 0, 0, 0],
            [0, -1, 2, 0, -1, 0, 0, 0],
            [0, 0, 0, 0, 0, -1, 1, 0],
            [0, 1, -1, 0, 0, 0, 0, 0],
            [0, 0, 0, -1, 0, 2, -1, 0],
            [0, 0, 0, 1, 0, -1, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 0],
        ],
        dtype=float,
    )
