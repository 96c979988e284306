"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Reproduction of the no-go computation on M_2.

On M_2 every rho satisfying (i)'-(iv)' is lam (1 - S) for some lam > 0. Its
triangle defect is lam (1 - S_12 - S_23 + S_13), whose quadratic form is

    <MX, X>/lam = (x3 - x2 - x5)^2 + (x3^2 - x2^2 - x5^2)
                + (x6 - x4 - x7)^2 + (x6^2 - x4^2 - x7^2)

and is negative at X = (0, 2, 1, 0, 0, 0, 0, 0), so (v)' fails for every lam.
"""

import itertools
from typing import Iterable, Optional

import numpy as np

from .algebra import AlgebraShape, diag_projector_matrix
from .axioms import defect_matrix, m2_admissible, verify
from .models import NoGoEntry, NoGoReport, ToleranceConfig
from .sampling import NOGO_STREAM, make_rng

M2_SHAPE = AlgebraShape(blocks=(2,))

REFERENCE_PDELTA = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)

# lam = 1
REFERENCE_DEFECT = np.array(
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

WITNESS = np.array([0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0])

DEFAULT_LAMBDAS = (0.1, 1.0, 10.0)
RANDOM_VECTORS = 10_000
DEFECT_TOL = 1e-12
IDENTITY_TOL = 1e-10


def quadratic_identity(x: np.ndarray) -> np.ndarray:
    """The closed form of <MX, X>/lam for the rows of x (1-based x1..x8)."""
    x = np.atleast_2d(x)
    x2, x3, x4, x5, x6, x7 = (x[:, i] for i in (1, 2, 3, 4, 5, 6))
    return (
        (x3 - x2 - x5) ** 2
        + (x3**2 - x2**2 - x5**2)
        + (x6 - x4 - x7) ** 2
        + (x6**2 - x4**2 - x7**2)
    )


def _test_vectors(seed: int) -> np.ndarray:
    grid = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=8)))
    rng = make_rng(seed, NOGO_STREAM)
    return np.vstack([grid, rng.standard_normal((RANDOM_VECTORS, 8))])


def nogo_entry(
    lam: float, cfg: Optional[ToleranceConfig] = None, seed: int = 0
) -> NoGoEntry:
    """
    Recompute P_delta, the defect M and the failing axioms for one lam.

    Raises:
        PreconditionError: If lam <= 0.
    """
    rho = m2_admissible(lam)
    pdelta = diag_projector_matrix(M2_SHAPE)
    defect = defect_matrix(rho.data, M2_SHAPE.dim).real
    defect_error = float(np.abs(defect - lam * REFERENCE_DEFECT).max())

    vectors = _test_vectors(seed)
    forms = np.einsum("ni,ij,nj->n", vectors, defect, vectors)
    errors = np.abs(forms - lam * quadratic_identity(vectors))
    scale = lam * np.maximum(np.sum(vectors**2, axis=1), 1.0)
    identity_error = float((errors / scale).max())

    report = verify(rho, cfg=cfg)
    return NoGoEntry(
        lam=lam,
        pdelta_matches=bool(np.array_equal(pdelta, REFERENCE_PDELTA)),
        defect_max_error=defect_error,
        defect_matches=defect_error <= DEFECT_TOL * max(1.0, lam),
        identity_max_error=identity_error,
        identity_holds=identity_error <= IDENTITY_TOL,
        witness_value=float(WITNESS @ defect @ WITNESS),
        min_eigenvalue=float(np.linalg.eigvalsh(defect)[0]),
        failing_axioms=report.failed_axioms(),
    )


def run_nogo_m2(
    lambdas: Iterable[float] = DEFAULT_LAMBDAS,
    cfg: Optional[ToleranceConfig] = None,
    verbose: bool = False,
) -> NoGoReport:
    """
    Reproduce the M_2 no-go computation for each lam.

    Args:
        lambdas: Positive scales of the admissible family.
        cfg: Tolerances for verify; the seed also drives the random vectors.
        verbose: Whether to print one line per lam.

    Returns:
        A NoGoReport; reproduced iff every entry matches the reference matrices,
        the identity holds, the witness gives -2 lam and only (v)' fails.
    """
    cfg = cfg or ToleranceConfig()
    entries = []
    for lam in lambdas:
        entry = nogo_entry(lam, cfg, cfg.seed)
        entries.append(entry)
        if verbose:
            print(
                f"🔧 lambda = {lam:g}: defect error {entry.defect_max_error:.1e}, "
                f"witness {entry.witness_value:g}, failing {entry.failing_axioms}."
            )
    return NoGoReport(entries=entries)
