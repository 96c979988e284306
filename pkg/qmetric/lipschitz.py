"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Lipschitz seminorm and Monge-Kantorovich distance induced by a quantum metric.

    ||a||_Lip = ||(a (x) 1 - 1 (x) a) rho^-1||
    d(phi, psi) = sup { |<phi - psi, a>| : a = a*, ||a||_Lip <= 1 }

rho^-1 is the inverse of rho on the complement of P_delta, realized as the
Moore-Penrose pseudo-inverse.
"""

import math
import sys
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from .algebra import (
    AlgebraElement,
    BiElement,
    diag_projector_matrix,
    hermitian_part,
    op_norm,
    partial_trace_first,
    partial_trace_second,
    support_mask,
)
from .axioms import check_diag_vanish, check_nondegenerate, check_positive
from .constants import (
    ASCENT_IMPROVEMENT_TOL,
    ASCENT_MAX_ITER,
    ASCENT_PATIENCE,
    BRACKET_TOL,
    LP_TOL,
)
from .exceptions import PreconditionError, ShapeMismatchError
from .models import (
    DistanceBracket,
    LeibnizCheck,
    MetricCandidate,
    PureState,
    State,
    ToleranceConfig,
)
from .sampling import ASCENT_STREAM, make_rng

ZERO_LIP_TOL = 1e-12


def metric_pseudo_inverse(
    candidate: MetricCandidate, cfg: Optional[ToleranceConfig] = None
) -> BiElement:
    """
    The inverse of rho on the complement of P_delta, extended by 0 on P_delta.

    Since rho commutes with P_delta and is invertible on its complement,
    (rho + P_delta)^-1 - P_delta is exactly the pseudo-inverse.

    Raises:
        PreconditionError: If rho fails (i)', (ii)' or (iii)'.
    """
    rho = candidate.rho
    positive = check_positive(rho, cfg)
    diag_vanish = check_diag_vanish(rho, cfg)
    nondegenerate = check_nondegenerate(rho, cfg, positive, diag_vanish)
    failed = [r.axiom for r in (positive, diag_vanish, nondegenerate) if not r.passed]
    if failed:
        raise PreconditionError(
            f"rho^-1 is only defined for metrics satisfying (i)', (ii)', (iii)'; "
            f"failed: {failed}."
        )
    pdelta = diag_projector_matrix(rho.shape)
    inverse = np.linalg.inv(hermitian_part(rho.data) + pdelta) - pdelta
    return rho.like(hermitian_part(inverse))


def _difference_operator(a: np.ndarray) -> np.ndarray:
    eye = np.eye(a.shape[0])
    return np.kron(a, eye) - np.kron(eye, a)


def _lip(a: np.ndarray, inverse: np.ndarray) -> float:
    return op_norm(_difference_operator(a) @ inverse)


def lip_seminorm(a: AlgebraElement, candidate: MetricCandidate) -> float:
    """||(a (x) 1 - 1 (x) a) rho^-1||."""
    if a.shape != candidate.shape:
        raise ShapeMismatchError(f"a lives on {a.shape}, rho on {candidate.shape}.")
    return _lip(a.data, metric_pseudo_inverse(candidate).data)


def check_leibniz(
    a: AlgebraElement,
    b: AlgebraElement,
    candidate: MetricCandidate,
    tol: float = 1e-9,
) -> LeibnizCheck:
    """
    ||ab||_Lip <= ||a|| ||b||_Lip + ||a||_Lip ||b|| for commuting a, b.

    Raises:
        PreconditionError: If ab != ba.
    """
    if op_norm(a.data @ b.data - b.data @ a.data) > tol:
        raise PreconditionError("The Leibniz estimate needs commuting a and b.")
    inverse = metric_pseudo_inverse(candidate).data
    bound = op_norm(a) * _lip(b.data, inverse) + _lip(a.data, inverse) * op_norm(b)
    slack = bound - _lip(a.data @ b.data, inverse)
    return LeibnizCheck(holds=slack >= -tol, slack=slack)


def pure_state_bound(v: PureState, w: PureState, candidate: MetricCandidate) -> float:
    """
    ||rho(v (x) w)||, an upper bound of d(phi_v, psi_w) for states in distinct
    blocks.

    Raises:
        PreconditionError: If v and w lie in the same block.
    """
    if v.block == w.block:
        raise PreconditionError(
            "The pure-state bound needs states in distinct blocks, "
            f"both are in block {v.block}."
        )
    shape = candidate.shape
    product = np.kron(v.embed(shape), w.embed(shape))
    return float(np.linalg.norm(candidate.rho.data @ product))


def pure_decomposition(
    state: State, tol: float = 1e-12
) -> List[Tuple[float, PureState]]:
    """Write a state as a convex combination of pure states, block by block."""
    parts = []
    for k, density in enumerate(state.densities):
        weights, vectors = np.linalg.eigh(hermitian_part(density))
        for weight, vector in zip(weights, vectors.T):
            if weight > tol:
                parts.append((float(weight), PureState(block=k, vector=vector)))
    return parts


def _decomposition_bound(
    phi: State, psi: State, candidate: MetricCandidate
) -> float:
    """
    sum p_i q_j ||rho(v_i (x) w_j)|| when phi and psi live on disjoint blocks,
    +inf otherwise.
    """
    if set(phi.support_blocks()) & set(psi.support_blocks()):
        return math.inf
    left, right = pure_decomposition(phi), pure_decomposition(psi)
    return sum(
        p * q * pure_state_bound(v, w, candidate) for p, v in left for q, w in right
    )


def _transport_distance(
    p: np.ndarray, q: np.ndarray, d: np.ndarray
) -> float:
    """Kantorovich transport cost between probability vectors p and q."""
    n = d.shape[0]
    rows = np.kron(np.eye(n), np.ones((1, n)))
    cols = np.kron(np.ones((1, n)), np.eye(n))
    result = linprog(
        d.ravel(),
        A_eq=np.vstack([rows, cols]),
        b_eq=np.concatenate([p, q]),
        bounds=(0, None),
        method="highs",
    )
    if not result.success:
        raise PreconditionError(f"Transport LP failed: {result.message}")
    return float(result.fun)


def _gauge_fix(a: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Self-adjoint, on the block support, trace zero."""
    a = np.where(mask, hermitian_part(a), 0.0)
    return a - np.trace(a).real / a.shape[0] * np.eye(a.shape[0])


def _lip_gradient(a: np.ndarray, inverse: np.ndarray) -> Tuple[float, np.ndarray]:
    """||a||_Lip and a supergradient in a (real Hilbert-Schmidt pairing)."""
    dim = a.shape[0]
    operator = _difference_operator(a) @ inverse
    u, singular, vh = np.linalg.svd(operator)
    top = np.outer(u[:, 0], vh[0])
    g = top @ inverse.conj().T
    grad = partial_trace_second(g, dim) - partial_trace_first(g, dim)
    return float(singular[0]), grad


def _ascent(
    delta: np.ndarray,
    inverse: np.ndarray,
    mask: np.ndarray,
    seed: int,
    max_iter: int,
    verbose: bool,
) -> Tuple[float, Optional[np.ndarray], bool, int, bool]:
    """
    Maximize <phi - psi, a>/||a||_Lip by normalized gradient ascent.

    Returns (best value, its witness a, converged, iterations, unbounded).
    """
    rng = make_rng(seed, ASCENT_STREAM)
    noise = rng.standard_normal(delta.shape)
    a = _gauge_fix(delta + 1e-3 * op_norm(delta) * noise, mask)
    if op_norm(a) == 0.0:
        return 0.0, None, True, 0, False
    step0 = 1.0 / max(2.0 * op_norm(inverse), 1e-300)
    best, since_improved, iteration = -math.inf, 0, 0
    witness: Optional[np.ndarray] = None
    for iteration in range(1, max_iter + 1):
        lip, lip_grad = _lip_gradient(a, inverse)
        gain = float(np.trace(delta @ a).real)
        if lip <= ZERO_LIP_TOL * op_norm(a):
            if abs(gain) > ZERO_LIP_TOL:
                return math.inf, a, True, iteration, True
            noise = rng.standard_normal(delta.shape)
            a = _gauge_fix(a + 1e-3 * op_norm(delta) * noise, mask)
            continue
        if gain < 0.0:
            a, gain = -a, -gain
            lip_grad = -lip_grad
        value = gain / lip
        improved = value > best + ASCENT_IMPROVEMENT_TOL
        if value > best:
            best, witness = value, a
        if improved:
            since_improved = 0
        else:
            since_improved += 1
            if since_improved >= ASCENT_PATIENCE:
                return best, witness, True, iteration, False
        a = a / lip
        grad = delta - value * lip_grad
        a = _gauge_fix(a + step0 / math.sqrt(iteration) * grad, mask)
        if verbose and iteration % 100 == 0:
            print(f"🔧 Ascent iteration {iteration}: lower bound {best:.8g}.")
    return max(best, 0.0), witness, False, iteration, False


def mk_distance(
    phi: State,
    psi: State,
    candidate: MetricCandidate,
    cfg: Optional[ToleranceConfig] = None,
    max_iter: int = ASCENT_MAX_ITER,
    verbose: bool = False,
) -> DistanceBracket:
    """
    Bracket the Monge-Kantorovich distance between two states.

    On classical shapes the value is the optimal transport cost, computed
    exactly by a linear program. Otherwise a normalized gradient ascent gives
    the lower end and the pure-state decomposition bound, when phi and psi live
    on disjoint blocks, the upper end.

    Raises:
        ShapeMismatchError: If the states and rho live on different shapes.
        PreconditionError: If rho fails (i)', (ii)' or (iii)'.
    """
    cfg = cfg or ToleranceConfig()
    shape = candidate.shape
    if phi.shape != shape or psi.shape != shape:
        raise ShapeMismatchError(
            f"States live on {phi.shape} and {psi.shape}, rho on {shape}."
        )
    inverse = metric_pseudo_inverse(candidate, cfg).data

    if shape.is_classical:
        n = shape.dim
        d = np.diag(candidate.rho.data).real.reshape(n, n)
        p = np.array([block[0, 0].real for block in phi.densities])
        q = np.array([block[0, 0].real for block in psi.densities])
        value = _transport_distance(p, q, d)
        if verbose:
            print(f"🔧 Transport LP value {value:.10g}.")
        return DistanceBracket(
            lower=max(value - LP_TOL, 0.0),
            upper=value + LP_TOL,
            converged=True,
            iterations=0,
            method="lp",
        )

    delta = phi.matrix() - psi.matrix()
    if op_norm(delta) == 0.0:
        return DistanceBracket(
            lower=0.0, upper=0.0, converged=True, iterations=0, method="ascent"
        )
    lower, witness, converged, iterations, unbounded = _ascent(
        delta, inverse, support_mask(shape), cfg.seed, max_iter, verbose
    )
    if witness is not None and not unbounded:
        a = AlgebraElement(shape=shape, data=witness)
        gain = abs((phi.pairing(a) - psi.pairing(a)).real)
        lower = gain / _lip(a.data, inverse)
    upper = math.inf if unbounded else _decomposition_bound(phi, psi, candidate)
    crossed = lower > upper + BRACKET_TOL * max(1.0, upper)
    if crossed:
        print(
            f"Warning: ascent value {lower:.10g} exceeds the certified bound "
            f"{upper:.10g}.",
            file=sys.stderr,
        )
    return DistanceBracket(
        lower=lower,
        upper=upper,
        converged=converged,
        iterations=iterations,
        unbounded=unbounded,
        crossed=crossed,
        method="ascent",
    )
