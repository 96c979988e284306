"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Numerical feasibility search for quantum metrics on a given shape.

The search works in the lifted variable (rho, S), S in A (x) A (x) A, and runs
Dykstra projections onto

    the structural subspace of rho with tr(rho) pinned,
    the graph S = rho (x) 1 + 1 (x) rho - mid_embed(rho),
    the shifted cone rho >= eps Q, Q = 1 - P_delta (plain PSD cone in
    algebraic mode),
    the PSD cone for S.

Only candidates certified by verify are reported as found.
"""

from functools import lru_cache
from typing import List, Optional, Tuple, cast

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from .algebra import (
    AlgebraShape,
    BiElement,
    diag_projector_matrix,
    flip_matrix,
    hermitian_part,
    mult_matrix,
    op_norm,
    support_mask,
    zero_element,
)
from .axioms import defect_matrix, verify
from .exceptions import PreconditionError, ShapeMismatchError
from .models import (
    AxiomReport,
    MetricCandidate,
    SearchConfig,
    SearchOutcome,
    ToleranceConfig,
)
from .modes import get_mode, uses_multiplication_map
from .sampling import SEARCH_STREAM, make_rng, random_psd

CG_RTOL = 1e-12
CG_MAX_ITER = 500
PROGRESS_EVERY = 500


def project_psd(x: np.ndarray) -> np.ndarray:
    """
    Nearest positive matrix in Frobenius distance: clip negative eigenvalues.

    Args:
        x: A self-adjoint matrix.

    Returns:
        The positive part of x.
    """
    values, vectors = np.linalg.eigh(hermitian_part(np.asarray(x)))
    clipped = np.clip(values, 0.0, None)
    return (vectors * clipped) @ vectors.conj().T


# --- Structural subspace ---


def _m_adjoint(y: np.ndarray, shape: AlgebraShape) -> np.ndarray:
    """m*(e_il) = sum_j e_ij (x) e_jl, j running over the block of i and l."""
    dim = shape.dim
    legs = np.einsum("il,jk->ijkl", y, np.eye(dim)).reshape(dim * dim, dim * dim)
    return np.where(support_mask(shape, 2), legs, 0.0)


def _m_gram_inverse(z: np.ndarray, shape: AlgebraShape) -> np.ndarray:
    """Inverse of Y -> m(F(m*(Y))) = (n_k Y_k + tr(Y_k) 1_k)/2 on each block."""
    out = np.zeros_like(z)
    for k, n in enumerate(shape.blocks):
        cell = shape.block_slice(k)
        block = z[cell, cell]
        out[cell, cell] = (2.0 * block - np.trace(block) / n * np.eye(n)) / n
    return out


def _structure(data: np.ndarray, shape: AlgebraShape, mode: str) -> np.ndarray:
    dim = shape.dim
    x = np.where(support_mask(shape, 2), hermitian_part(data), 0.0)
    x = (x + flip_matrix(x, dim)) / 2
    if uses_multiplication_map(mode):
        correction = _m_adjoint(_m_gram_inverse(mult_matrix(x, dim), shape), shape)
        return x - (correction + flip_matrix(correction, dim)) / 2
    q = np.eye(dim * dim) - diag_projector_matrix(shape)
    return q @ x @ q


def project_structure(rho: BiElement, mode: str = "representation") -> BiElement:
    """
    Orthogonal projection onto the structural subspace of a mode.

    Representation mode: self-adjoint, flip-symmetric and
    rho P_delta = P_delta rho = 0.
    Algebraic mode: self-adjoint, flip-symmetric, m(rho) = 0. The maps commute,
    so the composite is the projection onto the intersection.
    """
    return rho.like(_structure(rho.data, rho.shape, mode))


@lru_cache(maxsize=32)
def _trace_direction(blocks: Tuple[int, ...], mode: str) -> np.ndarray:
    shape = AlgebraShape(blocks=blocks)
    direction = _structure(np.eye(shape.dim**2), shape, mode)
    direction.flags.writeable = False
    return direction


def _structure_is_traceless(shape: AlgebraShape, mode: str) -> bool:
    u = _trace_direction(shape.blocks, mode)
    return float(np.vdot(u, u).real) < 1e-12


def project_structure_trace(
    data: np.ndarray, shape: AlgebraShape, target: float, mode: str
) -> Optional[np.ndarray]:
    """
    Projection onto the structural subspace intersected with tr(rho) = target.

    Returns None when the structural subspace is traceless (shape (1)).
    """
    x = _structure(data, shape, mode)
    if _structure_is_traceless(shape, mode):
        return None
    u = _trace_direction(shape.blocks, mode)
    weight = float(np.vdot(u, u).real)
    return x + (target - np.trace(x).real) / weight * u


# --- Triangle coupling ---


def triangle_map(data: np.ndarray, dim: int) -> np.ndarray:
    """T(rho) = rho (x) 1 + 1 (x) rho - mid_embed(rho)."""
    return defect_matrix(data, dim)


def triangle_adjoint(y: np.ndarray, dim: int) -> np.ndarray:
    """T* with respect to the Hilbert-Schmidt inner product."""
    legs = y.reshape((dim,) * 6)
    out = (
        np.einsum("abcxyc->abxy", legs)
        + np.einsum("abcayz->bcyz", legs)
        - np.einsum("abcxbz->acxz", legs)
    )
    return out.reshape(dim * dim, dim * dim)


def _project_graph(
    rho: np.ndarray, s: np.ndarray, dim: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest (rho', T(rho')) to (rho, s): solve (1 + T*T) rho' = rho + T*s."""
    size = dim * dim

    def normal(v: np.ndarray) -> np.ndarray:
        x = v.reshape(size, size)
        return (x + triangle_adjoint(triangle_map(x, dim), dim)).ravel()

    operator = LinearOperator((size * size, size * size), matvec=normal, dtype=complex)
    rhs = (rho + triangle_adjoint(s, dim)).ravel()
    solution, _ = cg(
        operator, rhs, x0=rho.ravel(), rtol=CG_RTOL, atol=0.0, maxiter=CG_MAX_ITER
    )
    new_rho = hermitian_part(solution.reshape(size, size))
    return new_rho, triangle_map(new_rho, dim)


def _cone_distance(x: np.ndarray) -> float:
    """Operator-norm distance to the PSD cone, max(0, -lambda_min)."""
    return max(0.0, -float(np.linalg.eigvalsh(hermitian_part(x))[0]))


# --- Certification ---


def search_tolerances(
    cfg: SearchConfig, floor: Optional[float] = None
) -> ToleranceConfig:
    """Search-grade tolerances: 10 residual_tol, floor eps/2."""
    return ToleranceConfig(
        eq_tol=10.0 * cfg.residual_tol,
        psd_tol=10.0 * cfg.residual_tol,
        strict_floor=cfg.eps / 2 if floor is None else floor,
        seed=cfg.seed,
    )


def certify(
    rho: BiElement,
    shape: AlgebraShape,
    cfg: SearchConfig,
    mode: str = "representation",
    floor: Optional[float] = None,
) -> AxiomReport:
    """
    Verify a search output with search-grade tolerances.

    Raises:
        ShapeMismatchError: If rho does not live on `shape`.
    """
    if rho.shape != shape:
        raise ShapeMismatchError(f"rho lives on {rho.shape}, expected {shape}.")
    skip = ("v",) if cfg.drop_triangle else ()
    tolerances = search_tolerances(cfg, floor)
    return verify(rho, shape=shape, cfg=tolerances, mode=mode, skip=skip)


# --- Search ---


class _Run:
    """One Dykstra run from a seeded starting point."""

    def __init__(self, cfg: SearchConfig, mode: str, restart: int):
        self.cfg = cfg
        self.mode = mode
        self.restart = restart
        self.shape = cfg.shape
        self.dim = cfg.shape.dim
        self.algebraic = uses_multiplication_map(mode)
        self.q = np.eye(self.dim**2) - diag_projector_matrix(self.shape)
        self.history: List[Tuple[float, float]] = []
        self.best_residual = np.inf
        self.iterations = 0
        self.candidate: Optional[MetricCandidate] = None

    def _start(self) -> np.ndarray:
        rng = make_rng(self.cfg.seed, (SEARCH_STREAM << 32) + self.restart)
        start = self.q @ random_psd(self.shape, 2, rng) @ self.q
        start = _structure(start, self.shape, self.mode)
        trace = np.trace(start).real
        if trace > 0.0:
            start = start * (self.cfg.target / trace)
        return self._pin(start)

    def _pin(self, rho: np.ndarray) -> np.ndarray:
        pinned = project_structure_trace(rho, self.shape, self.cfg.target, self.mode)
        if pinned is None:
            raise PreconditionError(
                f"Shape {self.shape} admits no trace normalization."
            )
        return pinned

    def _project_cone(self, rho: np.ndarray) -> np.ndarray:
        if self.algebraic:
            return project_psd(rho)
        shift = self.cfg.eps * self.q
        return shift + project_psd(rho - shift)

    def _residuals(self, rho: np.ndarray) -> Tuple[float, float]:
        scale = op_norm(rho) or 1.0
        shifted = rho if self.algebraic else rho - self.cfg.eps * self.q
        to_cone = _cone_distance(shifted) / scale
        if self.cfg.drop_triangle:
            return to_cone, 0.0
        return to_cone, _cone_distance(triangle_map(rho, self.dim)) / scale

    def _finish(self, rho: np.ndarray) -> Optional[MetricCandidate]:
        element = BiElement(shape=self.shape, data=rho)
        floor = None
        if self.cfg.gauge == "norm":
            norm = op_norm(element)
            element = (1.0 / norm) * element
            floor = self.cfg.eps / (2 * norm)
        report = certify(element, self.shape, self.cfg, self.mode, floor=floor)
        if not report.passed:
            return None
        return MetricCandidate.from_rho(element, report=report)

    def run(self, verbose: bool) -> "_Run":
        rho = self._start()
        s = triangle_map(rho, self.dim)
        inc_rho = np.zeros_like(rho)
        inc_s = np.zeros_like(s)
        for iteration in range(1, self.cfg.max_iter + 1):
            self.iterations = iteration
            y = rho + inc_rho
            rho = self._project_cone(y)
            inc_rho = y - rho
            if not self.cfg.drop_triangle:
                y = s + inc_s
                s = project_psd(y)
                inc_s = y - s
                # affine sets need no correction term
                rho, s = _project_graph(rho, s, self.dim)
            rho = self._pin(rho)

            distances = self._residuals(rho)
            self.history.append(distances)
            residual = max(distances)
            self.best_residual = min(self.best_residual, residual)
            if verbose and iteration % PROGRESS_EVERY == 0:
                print(
                    f"🔧 Restart {self.restart}, iteration {iteration}: "
                    f"residual {residual:.3e}."
                )
            if residual < self.cfg.residual_tol:
                self.candidate = self._finish(rho)
                if self.candidate is not None:
                    break
        return self


def _outcome_from(run: _Run, cfg: SearchConfig, mode: str) -> SearchOutcome:
    return SearchOutcome(
        status="candidate_found" if run.candidate is not None else "no_convergence",
        mode=mode,
        config=cfg,
        candidate=run.candidate,
        residual_history=run.history,
        best_residual=float(run.best_residual),
        seed_used=cfg.seed,
        restart_index=run.restart,
        iterations=run.iterations,
    )


def _trivial_outcome(cfg: SearchConfig, mode: str) -> SearchOutcome:
    """Shape (1): the structural subspace is {0}, which is the one-point metric."""
    rho = cast(BiElement, zero_element(cfg.shape, 2))
    report = certify(rho, cfg.shape, cfg, mode)
    candidate = MetricCandidate.from_rho(rho, report=report)
    return SearchOutcome(
        status="candidate_found" if report.passed else "no_convergence",
        mode=mode,
        config=cfg,
        candidate=candidate,
        residual_history=[],
        best_residual=0.0,
        seed_used=cfg.seed,
        restart_index=0,
        iterations=0,
    )


def feasibility_search(
    cfg: SearchConfig, mode: str = "representation", verbose: bool = False
) -> SearchOutcome:
    """
    Search for a quantum metric on cfg.shape.

    Restarts run in index order. Certified runs rank first; within each group
    the run with the lowest best residual wins, then the lowest restart index.
    no_convergence is a status: infeasibility is never claimed.

    Args:
        cfg: The search configuration.
        mode: 'representation' or 'algebraic'.
        verbose: Whether to print progress.

    Returns:
        The SearchOutcome of the winning restart.
    """
    get_mode(mode)
    if verbose:
        print(
            f"🔧 Searching shape {cfg.shape} in {mode} mode: "
            f"{cfg.restarts} restarts x {cfg.max_iter} iterations, seed {cfg.seed}."
        )
    if _structure_is_traceless(cfg.shape, mode):
        return _trivial_outcome(cfg, mode)

    runs = [_Run(cfg, mode, restart).run(verbose) for restart in range(cfg.restarts)]
    best = min(
        runs,
        key=lambda run: (run.candidate is None, run.best_residual, run.restart),
    )
    outcome = _outcome_from(best, cfg, mode)
    if verbose:
        if outcome.status == "candidate_found":
            print(f"🎉 Certified candidate from restart {best.restart}.")
        else:
            print(
                f"💡 No certified candidate; best residual {best.best_residual:.3e}."
            )
    return outcome
