"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Constructions of quantum metrics: classical embeddings, conic combinations,
direct sums and tensor products.

Every constructor verifies its output in the requested mode and attaches the
report to the returned candidate; the formulas are the same in both modes.
"""

from typing import List, Optional

import numpy as np

from .algebra import AlgebraShape, BiElement, require_same_shape
from .axioms import verify
from .exceptions import MetricAxiomError, PreconditionError
from .models import FiniteMetricSpace, MetricCandidate, ToleranceConfig
from .modes import get_mode

BOUND_RTOL = 1e-12


def _certify(
    rho: BiElement, mode: str, cfg: Optional[ToleranceConfig]
) -> MetricCandidate:
    return MetricCandidate.from_rho(rho, report=verify(rho, cfg=cfg, mode=mode))


def embed_classical(d: np.ndarray) -> BiElement:
    """
    The diagonal element with entry d(x, y) at position (x, y) on shape (1, ..., 1).

    No metric axiom is checked; use from_finite_metric for validated input.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"Expected a square distance matrix, got shape {d.shape}.")
    shape = AlgebraShape.classical(d.shape[0])
    return BiElement(shape=shape, data=np.diag(d.ravel()))


def classical_distances(candidate: MetricCandidate) -> np.ndarray:
    """Read the distance matrix back from a candidate on a classical shape."""
    if not candidate.shape.is_classical:
        raise PreconditionError(f"Shape {candidate.shape} is not commutative.")
    n = candidate.shape.dim
    return np.diag(candidate.rho.data).real.reshape(n, n).copy()


def from_finite_metric(
    space: FiniteMetricSpace,
    mode: str = "representation",
    cfg: Optional[ToleranceConfig] = None,
) -> MetricCandidate:
    """The quantum metric of an ordinary finite metric space on C(X)."""
    return _certify(embed_classical(space.d), mode, cfg)


def metric_space_from_matrix(d: np.ndarray) -> FiniteMetricSpace:
    """
    Validate a distance matrix.

    Raises:
        MetricAxiomError: If d is not a metric.
    """
    d = np.asarray(d, dtype=float)
    try:
        return FiniteMetricSpace(n=d.shape[0], d=d)
    except ValueError as e:
        raise MetricAxiomError(str(e)) from e


def conic_combine(
    m1: MetricCandidate,
    m2: MetricCandidate,
    r: float,
    mode: str = "representation",
    cfg: Optional[ToleranceConfig] = None,
) -> MetricCandidate:
    """
    rho1 + r rho2, again a quantum metric for every r > 0.

    Raises:
        ShapeMismatchError: If the candidates live on different shapes.
        PreconditionError: If r <= 0.
    """
    require_same_shape(m1.rho, m2.rho)
    if not r > 0.0:
        raise PreconditionError(f"r must be positive, got {r}.")
    return _certify(m1.rho + r * m2.rho, mode, cfg)


def _pair_indices(dim: int, start: int, stop: int) -> List[int]:
    return [a * dim + b for a in range(start, stop) for b in range(start, stop)]


def direct_sum(
    m1: MetricCandidate,
    m2: MetricCandidate,
    r: float,
    mode: str = "representation",
    cfg: Optional[ToleranceConfig] = None,
) -> MetricCandidate:
    """
    The metric rho1 + rho2 + r 1_{A1 (x) A2} + r 1_{A2 (x) A1} on A1 + A2.

    The blocks of A1 come first. r must not be less than
    max(||rho1||, ||rho2||)/2; equality is allowed.

    Raises:
        PreconditionError: If r is below the bound.
    """
    bound = max(m1.diameter, m2.diameter) / 2
    if r < bound * (1.0 - BOUND_RTOL):
        raise PreconditionError(
            f"r = {r} is below max(||rho1||, ||rho2||)/2 = {bound}."
        )
    shape = AlgebraShape(blocks=m1.shape.blocks + m2.shape.blocks)
    d1, dim = m1.shape.dim, shape.dim
    data = np.zeros((dim * dim, dim * dim), dtype=complex)
    first = _pair_indices(dim, 0, d1)
    second = _pair_indices(dim, d1, dim)
    data[np.ix_(first, first)] = m1.rho.data
    data[np.ix_(second, second)] = m2.rho.data
    left = np.arange(dim) < d1
    cross = (left[:, None] != left[None, :]).ravel()
    data[cross, cross] = r
    return _certify(BiElement(shape=shape, data=data), mode, cfg)


def product_shape(s1: AlgebraShape, s2: AlgebraShape) -> AlgebraShape:
    """Blocks n_i m_j in lexicographic (i, j) order."""
    return AlgebraShape(blocks=tuple(n * m for n in s1.blocks for m in s2.blocks))


def _product_basis_order(s1: AlgebraShape, s2: AlgebraShape) -> np.ndarray:
    """Kronecker indices a D2 + b of C^D1 (x) C^D2, grouped into product blocks."""
    d2 = s2.dim
    order = [
        a * d2 + b
        for i in range(len(s1.blocks))
        for j in range(len(s2.blocks))
        for a in range(*s1.block_slice(i).indices(s1.dim))
        for b in range(*s2.block_slice(j).indices(d2))
    ]
    return np.array(order)


def tensor_product(
    m1: MetricCandidate,
    m2: MetricCandidate,
    mode: str = "representation",
    cfg: Optional[ToleranceConfig] = None,
) -> MetricCandidate:
    """
    rho1 (x) 1 + 1 (x) rho2, reshuffled from (A1 A1)(A2 A2) to (A1 A2)(A1 A2).

    On classical shapes this is the l1 sum metric d1(x, x') + d2(y, y').

    Raises:
        PreconditionError: In algebraic mode, if A1 is not commutative.
    """
    if get_mode(mode).commutative_factor_required and not m1.shape.is_classical:
        raise PreconditionError(
            f"The algebraic tensor construction needs a commutative first factor, "
            f"got shape {m1.shape}."
        )
    d1, d2 = m1.shape.dim, m2.shape.dim
    summed = np.kron(m1.rho.data, np.eye(d2 * d2)) + np.kron(
        np.eye(d1 * d1), m2.rho.data
    )
    legs = summed.reshape((d1, d1, d2, d2) * 2).transpose(0, 2, 1, 3, 4, 6, 5, 7)
    size = d1 * d2
    reshuffled = legs.reshape(size * size, size * size)
    order = _product_basis_order(m1.shape, m2.shape)
    pairs = (order[:, None] * size + order[None, :]).ravel()
    data = reshuffled[np.ix_(pairs, pairs)]
    shape = product_shape(m1.shape, m2.shape)
    return _certify(BiElement(shape=shape, data=data), mode, cfg)
