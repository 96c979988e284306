"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Checks of the quantum metric axioms.

Representation mode (axioms i, ii, iii, iv, v):
    (i)   rho >= 0
    (ii)  rho P_delta = P_delta rho = 0
    (iii) rho restricted to the complement of P_delta has no kernel
    (iv)  flip(rho) = rho
    (v)   mid_embed(rho) <= rho (x) 1 + 1 (x) rho
Algebraic mode replaces (ii) by m(rho) = 0 and (iii) by invertibility of
rho + nu for every positive flip-symmetric nu with m(nu) = 1.

Pass/fail decisions use rho normalized to unit norm; margins are reported in
the scale of rho.
"""

from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .algebra import (
    AlgebraShape,
    BiElement,
    TriElement,
    diag_projector_matrix,
    flip_matrix,
    hermitian_part,
    mid_embed_matrix,
    mult_matrix,
    op_norm,
)
from .constants import DEFAULT_RELATIVE_FLOOR
from .exceptions import PreconditionError, SamplerError, ShapeMismatchError
from .models import AxiomRecord, AxiomReport, ToleranceConfig
from .modes import axiom_statement, split_axioms
from .sampling import sample_test_elements


def _scale(rho: BiElement) -> float:
    """||rho||, or 1 for rho = 0."""
    norm = op_norm(rho)
    return norm if norm > 0.0 else 1.0


def strict_floor(rho: BiElement, cfg: ToleranceConfig) -> float:
    """The (iii)' floor epsilon in the scale of rho."""
    if cfg.strict_floor is not None:
        return cfg.strict_floor
    return DEFAULT_RELATIVE_FLOOR * _scale(rho)


def _lowest(data: np.ndarray) -> Tuple[float, np.ndarray]:
    values, vectors = np.linalg.eigh(hermitian_part(data))
    return float(values[0]), vectors[:, 0]


def defect_matrix(data: np.ndarray, dim: int) -> np.ndarray:
    """rho (x) 1 + 1 (x) rho - mid_embed(rho) on raw matrices."""
    eye = np.eye(dim)
    return np.kron(data, eye) + np.kron(eye, data) - mid_embed_matrix(data, dim)


def triangle_defect(rho: BiElement) -> TriElement:
    """The triangle defect rho (x) 1 + 1 (x) rho - mid_embed(rho)."""
    return TriElement(shape=rho.shape, data=defect_matrix(rho.data, rho.shape.dim))


def check_positive(
    rho: BiElement, cfg: Optional[ToleranceConfig] = None
) -> AxiomRecord:
    """(i)': rho is a positive element of A (x) A."""
    cfg = cfg or ToleranceConfig()
    scale = _scale(rho)
    asymmetry = op_norm(rho.data - rho.data.conj().T)
    value, vector = _lowest(rho.data)
    passed = asymmetry / scale <= cfg.eq_tol and value / scale >= -cfg.psd_tol
    return AxiomRecord(
        axiom="i",
        passed=passed,
        margin=value,
        witness=None if passed else vector,
        note="" if asymmetry / scale <= cfg.eq_tol else "not self-adjoint",
    )


def check_flip_symmetric(
    rho: BiElement, cfg: Optional[ToleranceConfig] = None
) -> AxiomRecord:
    """(iv)': flip(rho) = rho."""
    cfg = cfg or ToleranceConfig()
    gap = op_norm(flip_matrix(rho.data, rho.shape.dim) - rho.data)
    return AxiomRecord(axiom="iv", passed=gap / _scale(rho) <= cfg.eq_tol, margin=-gap)


def check_diag_vanish(
    rho: BiElement, cfg: Optional[ToleranceConfig] = None
) -> AxiomRecord:
    """(ii)': rho P_delta = P_delta rho = 0."""
    cfg = cfg or ToleranceConfig()
    pdelta = diag_projector_matrix(rho.shape)
    gap = max(op_norm(rho.data @ pdelta), op_norm(pdelta @ rho.data))
    return AxiomRecord(axiom="ii", passed=gap / _scale(rho) <= cfg.eq_tol, margin=-gap)


def check_nondegenerate(
    rho: BiElement,
    cfg: Optional[ToleranceConfig] = None,
    positive: Optional[AxiomRecord] = None,
    diag_vanish: Optional[AxiomRecord] = None,
) -> AxiomRecord:
    """
    (iii)': 0 is not an eigenvalue of rho on the complement of P_delta.

    When rho >= 0 and rho P_delta = 0, rho preserves that complement and the
    condition reads lambda_min(rho/||rho|| + P_delta) >= eps/||rho||. Without
    those two axioms the restriction is meaningless and the record is marked
    indeterminate (the margin is still computed).
    """
    cfg = cfg or ToleranceConfig()
    positive = positive or check_positive(rho, cfg)
    diag_vanish = diag_vanish or check_diag_vanish(rho, cfg)
    indeterminate = not (positive.passed and diag_vanish.passed)

    scale = _scale(rho)
    floor = strict_floor(rho, cfg)
    value, vector = _lowest(rho.data / scale + diag_projector_matrix(rho.shape))
    satisfied = value >= floor / scale
    passed = satisfied and not indeterminate
    return AxiomRecord(
        axiom="iii",
        passed=passed,
        margin=scale * value - floor,
        witness=None if passed else vector,
        indeterminate=indeterminate,
        note="requires (i)' and (ii)'" if indeterminate else "",
    )


def check_triangle(
    rho: BiElement, cfg: Optional[ToleranceConfig] = None
) -> AxiomRecord:
    """(v)': mid_embed(rho) <= rho (x) 1 + 1 (x) rho; fails with a witness vector."""
    cfg = cfg or ToleranceConfig()
    value, vector = _lowest(defect_matrix(rho.data, rho.shape.dim))
    passed = value / _scale(rho) >= -cfg.psd_tol
    return AxiomRecord(
        axiom="v", passed=passed, margin=value, witness=None if passed else vector
    )


def check_alg_diag(
    rho: BiElement, cfg: Optional[ToleranceConfig] = None
) -> AxiomRecord:
    """(ii)'': m(rho) = 0."""
    cfg = cfg or ToleranceConfig()
    gap = op_norm(mult_matrix(rho.data, rho.shape.dim))
    return AxiomRecord(
        axiom="ii_alg", passed=gap / _scale(rho) <= cfg.eq_tol, margin=-gap
    )


def check_alg_nondegenerate_sampled(
    rho: BiElement, cfg: Optional[ToleranceConfig] = None
) -> AxiomRecord:
    """
    (iii)'' by sampling: rho + nu is invertible for sampled admissible nu.

    A pass means "not falsified" by cfg.sample_count test elements (the
    canonical nu_0 always among them), not a proof.

    Raises:
        SamplerError: If the sampler cannot produce the test elements.
    """
    cfg = cfg or ToleranceConfig()
    samples = sample_test_elements(rho.shape, cfg.sample_count, cfg.seed)
    worst = np.inf
    witness = None
    for nu in samples:
        _, singular, vh = np.linalg.svd(rho.data + nu)
        if singular[-1] < worst:
            worst = float(singular[-1])
            witness = vh[-1].conj()
    passed = worst > cfg.eq_tol
    verdict = "not falsified" if passed else "falsified"
    return AxiomRecord(
        axiom="iii_alg",
        passed=passed,
        margin=worst - cfg.eq_tol,
        witness=None if passed else witness,
        note=f"{verdict} by {len(samples)} test elements",
    )


def _sampled_or_indeterminate(
    rho: BiElement, cfg: ToleranceConfig
) -> AxiomRecord:
    try:
        return check_alg_nondegenerate_sampled(rho, cfg)
    except SamplerError as e:
        return AxiomRecord(
            axiom="iii_alg",
            passed=False,
            margin=-cfg.eq_tol,
            indeterminate=True,
            note=str(e),
        )


def verify(
    rho: BiElement,
    shape: Optional[AlgebraShape] = None,
    cfg: Optional[ToleranceConfig] = None,
    mode: str = "representation",
    verbose: bool = False,
    skip: Sequence[str] = (),
) -> AxiomReport:
    """
    Run every axiom check of a definition mode.

    All checks run even after a failure so that the report is a complete
    diagnostic profile.

    Args:
        rho: The candidate metric.
        shape: Expected shape; defaults to rho's shape.
        cfg: Tolerances; defaults to ToleranceConfig().
        mode: 'representation' or 'algebraic'.
        verbose: Whether to print progress.
        skip: Axioms of the mode to leave out; they are listed as skipped.

    Returns:
        The AxiomReport, passed iff every evaluated axiom passed.

    Raises:
        ShapeMismatchError: If rho does not live on `shape`.
        ValueError: If the mode is unknown or skips an axiom it does not have.
    """
    checked, skipped = split_axioms(mode, skip)
    if shape is not None and shape != rho.shape:
        raise ShapeMismatchError(f"rho lives on {rho.shape}, expected {shape}.")
    cfg = cfg or ToleranceConfig()

    if verbose:
        print(f"🔧 Verifying rho on shape {rho.shape} in {mode} mode.")

    records: Dict[str, AxiomRecord] = {}
    positive = check_positive(rho, cfg)
    checks: Dict[str, Callable[[], AxiomRecord]] = {
        "i": lambda: positive,
        "ii": lambda: check_diag_vanish(rho, cfg),
        "iii": lambda: check_nondegenerate(
            rho, cfg, positive=positive, diag_vanish=records.get("ii")
        ),
        "iv": lambda: check_flip_symmetric(rho, cfg),
        "v": lambda: check_triangle(rho, cfg),
        "ii_alg": lambda: check_alg_diag(rho, cfg),
        "iii_alg": lambda: _sampled_or_indeterminate(rho, cfg),
    }
    for axiom in checked:
        records[axiom] = checks[axiom]()
        if verbose:
            record = records[axiom]
            verdict = "pass" if record.passed else "FAIL"
            statement = axiom_statement(axiom)
            print(f"🔧 ({axiom}) {statement}: {verdict}, margin {record.margin:.6g}.")

    return AxiomReport(
        mode=mode,
        shape=rho.shape,
        records=list(records.values()),
        tolerances=cfg,
        skipped=skipped,
    )


def m2_admissible(lam: float) -> BiElement:
    """
    The general solution of (i)'-(iv)' on M_2: lam (1 - S), i.e. the 4x4 matrix
    with middle block (lam, -lam; -lam, lam).

    Raises:
        PreconditionError: If lam <= 0.
    """
    if not lam > 0.0:
        raise PreconditionError(f"lambda must be positive, got {lam}.")
    data = np.zeros((4, 4))
    data[1:3, 1:3] = lam * np.array([[1.0, -1.0], [-1.0, 1.0]])
    return BiElement(shape=AlgebraShape(blocks=(2,)), data=data)


def diameter(rho: BiElement) -> float:
    """The diameter ||rho||."""
    return op_norm(rho)
