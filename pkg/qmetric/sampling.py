"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Seeded random elements and the sampler of test elements nu for (iii)''.

All randomness comes from counter-based Philox streams keyed by (seed, stream),
so every consumer draws reproducible, independent numbers.
"""

from typing import List, Optional

import numpy as np
import scipy.linalg

from .algebra import (
    AlgebraShape,
    diag_projector_matrix,
    flip_matrix,
    mult_matrix,
    support_mask,
)
from .constants import SAMPLER_MAX_RETRIES
from .exceptions import SamplerError

SAMPLER_STREAM = 1
SEARCH_STREAM = 2
ASCENT_STREAM = 3
NOGO_STREAM = 4


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """A Philox generator keyed by (seed, stream)."""
    key = np.array([seed % 2**64, stream % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def random_hermitian(
    shape: AlgebraShape, order: int, rng: np.random.Generator
) -> np.ndarray:
    """A Gaussian self-adjoint matrix on the block support of A^(x order)."""
    size = shape.dim**order
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    g = np.where(support_mask(shape, order), g, 0.0)
    return (g + g.conj().T) / 2


def random_psd(
    shape: AlgebraShape, order: int, rng: np.random.Generator
) -> np.ndarray:
    """A random positive element of A^(x order) with unit trace."""
    size = shape.dim**order
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    psd = g @ g.conj().T
    # pinching by the block cells keeps positivity
    psd = np.where(support_mask(shape, order), psd, 0.0)
    return psd / np.trace(psd).real


def canonical_test_element(shape: AlgebraShape) -> np.ndarray:
    """
    nu_0 = sum_k 2/(1 + n_k) P_delta,k.

    Positive, flip-symmetric and m(nu_0) = 1, since m maps the symmetric
    projector of block k to (1 + n_k)/2 times its unit.
    """
    labels = shape.labels()
    weights = np.zeros(shape.dim * shape.dim)
    for k, n in enumerate(shape.blocks):
        inside = (labels == k).astype(float)
        weights += 2.0 / (1.0 + n) * np.kron(inside, inside)
    return weights[:, None] * diag_projector_matrix(shape)


def _slice_direction(shape: AlgebraShape, rng: np.random.Generator) -> np.ndarray:
    """A unit direction inside {flip-symmetric, self-adjoint, m = 0}."""
    dim = shape.dim
    g = random_hermitian(shape, 2, rng)
    g = (g + flip_matrix(g, dim)) / 2
    e = mult_matrix(g, dim)
    eye = np.eye(dim)
    # m((e (x) 1 + 1 (x) e)/2) = e and the correction is flip-symmetric
    direction = g - (np.kron(e, eye) + np.kron(eye, e)) / 2
    return direction / np.linalg.norm(direction)


def _boundary_step(center: np.ndarray, direction: np.ndarray) -> Optional[float]:
    """Largest s with center + s direction >= 0, or None if unbounded."""
    mu = scipy.linalg.eigh(-direction, center, eigvals_only=True)
    if mu[-1] <= 1e-12:
        return None
    return 1.0 / float(mu[-1])


def sample_test_elements(
    shape: AlgebraShape, count: int, seed: int
) -> List[np.ndarray]:
    """
    Draw `count` positive, flip-symmetric nu with m(nu) = 1.

    The first sample is nu_0. The others sit on the boundary of the admissible
    set, reached from the interior point (nu_0 + 1 (x) 1)/2 along random
    directions of the affine slice, where rho + nu is most likely singular.

    Raises:
        SamplerError: If too many directions are rejected.
    """
    nu0 = canonical_test_element(shape)
    samples = [nu0]
    if shape.dim == 1:
        # A (x) A = C and the slice m(nu) = 1 is the single point nu_0.
        return samples
    center = (nu0 + np.eye(shape.dim**2)) / 2
    rng = make_rng(seed, SAMPLER_STREAM)
    attempts = 0
    while len(samples) < count:
        attempts += 1
        if attempts > SAMPLER_MAX_RETRIES * count:
            raise SamplerError(
                f"Sampler produced {len(samples)} of {count} test elements "
                f"after {attempts - 1} attempts."
            )
        direction = _slice_direction(shape, rng)
        step = _boundary_step(center, direction)
        if step is None:
            continue
        nu = center + step * (1.0 - 1e-12) * direction
        nu = (nu + nu.conj().T) / 2
        if np.linalg.eigvalsh(nu)[0] < -1e-10:
            continue
        samples.append(nu)
    return samples
