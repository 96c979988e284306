"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Data structures for QMetric.
"""

import json
import math
from typing import List, Literal, Optional, Tuple, cast

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .algebra import AlgebraElement, AlgebraShape, BiElement, op_norm
from .constants import (
    DEFAULT_EQ_TOL,
    DEFAULT_PSD_TOL,
    DEFAULT_SAMPLE_COUNT,
    DEFAULT_SEED,
    SEARCH_EPS,
    SEARCH_MAX_DIM,
    SEARCH_MAX_ITER,
    SEARCH_RESIDUAL_TOL,
    SEARCH_RESTARTS,
)
from .exceptions import ExchangeFormatError

AxiomTag = Literal["i", "ii", "iii", "iv", "v", "ii_alg", "iii_alg"]
STATE_TOL = 1e-9
DIAMETER_RTOL = 1e-9


class DefinitionMode(BaseModel):
    """
    A QMetric definition mode: its axioms in report order and how the diagonal
    condition is imposed.
    """

    model_config = ConfigDict(frozen=True)

    mode: str
    description: str
    usage: str
    axioms: List[AxiomTag]
    diagonal: Literal["projector", "multiplication"]
    commutative_factor_required: bool


class ToleranceConfig(BaseModel):
    """
    Tolerances of the axiom checks.

    eq_tol and psd_tol apply to rho normalized to unit norm. strict_floor is the
    (iii)' floor in the scale of rho; None means 1e-8 ||rho||.
    """

    model_config = ConfigDict(frozen=True)

    eq_tol: float = Field(DEFAULT_EQ_TOL, ge=0.0)
    psd_tol: float = Field(DEFAULT_PSD_TOL, ge=0.0)
    strict_floor: Optional[float] = Field(None, gt=0.0)
    sample_count: int = Field(DEFAULT_SAMPLE_COUNT, ge=1)
    seed: int = DEFAULT_SEED


class AxiomRecord(BaseModel):
    """Verdict of one axiom; a positive margin means satisfied with slack."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    axiom: AxiomTag
    passed: bool
    margin: float
    witness: Optional[np.ndarray] = None
    indeterminate: bool = False
    note: str = ""


class AxiomReport(BaseModel):
    """All axiom records of one verification run."""

    model_config = ConfigDict(frozen=True)

    mode: str
    shape: AlgebraShape
    records: List[AxiomRecord]
    tolerances: ToleranceConfig
    skipped: List[AxiomTag] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(record.passed for record in self.records)

    def failed_axioms(self) -> List[str]:
        return [record.axiom for record in self.records if not record.passed]

    def record(self, axiom: str) -> AxiomRecord:
        found = next((r for r in self.records if r.axiom == axiom), None)
        if found is None:
            raise KeyError(f"Axiom '{axiom}' is not part of a {self.mode} report.")
        return found


class MetricCandidate(BaseModel):
    """
    A candidate metric rho with its shape, diameter ||rho|| and, once verified,
    its report.
    """

    model_config = ConfigDict(frozen=True)

    rho: BiElement
    shape: AlgebraShape
    diameter: float = Field(ge=0.0)
    report: Optional[AxiomReport] = None

    @model_validator(mode="after")
    def _check_consistency(self) -> "MetricCandidate":
        if self.shape != self.rho.shape:
            raise ValueError(f"Candidate shape {self.shape} differs from rho's.")
        norm = op_norm(self.rho)
        if abs(self.diameter - norm) > DIAMETER_RTOL * max(1.0, norm):
            raise ValueError(f"Diameter {self.diameter} differs from ||rho|| = {norm}.")
        return self

    @classmethod
    def from_rho(
        cls, rho: BiElement, report: Optional[AxiomReport] = None
    ) -> "MetricCandidate":
        return cls(rho=rho, shape=rho.shape, diameter=op_norm(rho), report=report)

    @property
    def verified(self) -> bool:
        return self.report is not None and self.report.passed


def metric_violations(d: np.ndarray, tol: float = 1e-12) -> List[str]:
    """Human readable list of classical metric axioms violated by `d`."""
    problems = []
    n = d.shape[0]
    scale = max(1.0, float(np.abs(d).max(initial=0.0)))
    if not np.allclose(d, d.T, rtol=0.0, atol=tol * scale):
        problems.append("d is not symmetric")
    if np.any(np.abs(np.diag(d)) > tol * scale):
        problems.append("d has a nonzero diagonal")
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] <= 0.0):
        problems.append("d vanishes or is negative between distinct points")
    # d[x, z] + d[z, y] - d[x, y] over all triples
    slack = d[:, :, None] + d[None, :, :] - d[:, None, :]
    if n and slack.min() < -tol * scale:
        problems.append("d violates the triangle inequality")
    return problems


class FiniteMetricSpace(BaseModel):
    """A finite metric space given by its distance matrix."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(ge=1)
    d: np.ndarray

    @field_validator("d", mode="before")
    @classmethod
    def _as_array(cls, d: object) -> np.ndarray:
        array = np.array(d, dtype=float)
        array.flags.writeable = False
        return array

    @model_validator(mode="after")
    def _check_axioms(self) -> "FiniteMetricSpace":
        if self.d.shape != (self.n, self.n):
            raise ValueError(
                f"Expected a {self.n}x{self.n} matrix, got {self.d.shape}."
            )
        problems = metric_violations(self.d)
        if problems:
            raise ValueError("Invalid metric: " + "; ".join(problems) + ".")
        return self

    @classmethod
    def discrete(cls, n: int) -> "FiniteMetricSpace":
        return cls(n=n, d=1.0 - np.eye(n))

    @classmethod
    def path(cls, n: int) -> "FiniteMetricSpace":
        points = np.arange(n)
        return cls(n=n, d=np.abs(points[:, None] - points[None, :]))

    @classmethod
    def from_json(cls, text: str) -> "FiniteMetricSpace":
        """Parse {"n": n, "d": [[...], ...]}."""
        try:
            doc = json.loads(text)
            return cls(n=doc["n"], d=doc["d"])
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise ExchangeFormatError(f"Invalid metric space document: {e}") from e

    @classmethod
    def from_lower_triangle(cls, text: str) -> "FiniteMetricSpace":
        """
        Parse a lower triangle, zero diagonal included: line k holds k numbers.
        """
        rows = [line.split() for line in text.splitlines() if line.strip()]
        n = len(rows)
        d = np.zeros((n, n))
        for k, row in enumerate(rows):
            if len(row) != k + 1:
                raise ExchangeFormatError(
                    f"Line {k + 1} of a lower triangle needs {k + 1} numbers, "
                    f"got {len(row)}."
                )
            try:
                d[k, : k + 1] = [float(value) for value in row]
            except ValueError as e:
                raise ExchangeFormatError(f"Line {k + 1}: {e}") from e
        return cls(n=n, d=np.tril(d) + np.tril(d, -1).T)


class PureState(BaseModel):
    """The vector state a -> <a_i v, v> for a unit vector v in block i."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    block: int = Field(ge=0)
    vector: np.ndarray

    @field_validator("vector", mode="before")
    @classmethod
    def _unit_vector(cls, vector: object) -> np.ndarray:
        array = np.array(vector, dtype=complex).ravel()
        if abs(np.linalg.norm(array) - 1.0) > STATE_TOL:
            raise ValueError("A pure state needs a unit vector.")
        array.flags.writeable = False
        return array

    def embed(self, shape: AlgebraShape) -> np.ndarray:
        """The vector v as an element of C^D."""
        if self.block >= len(shape.blocks):
            raise ValueError(f"Block {self.block} does not exist in shape {shape}.")
        if self.vector.shape[0] != shape.blocks[self.block]:
            raise ValueError(
                f"Block {self.block} of shape {shape} has dimension "
                f"{shape.blocks[self.block]}, got a vector of length "
                f"{self.vector.shape[0]}."
            )
        full = np.zeros(shape.dim, dtype=complex)
        full[shape.block_slice(self.block)] = self.vector
        return full


class State(BaseModel):
    """
    A state a -> sum_k tr(d_k a_k) given by block density matrices d_k.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    shape: AlgebraShape
    densities: List[np.ndarray]

    @field_validator("densities", mode="before")
    @classmethod
    def _as_arrays(cls, densities: object) -> List[np.ndarray]:
        blocks = cast(List[object], densities)
        arrays = [np.array(block, dtype=complex, ndmin=2) for block in blocks]
        for array in arrays:
            array.flags.writeable = False
        return arrays

    @model_validator(mode="after")
    def _check_density(self) -> "State":
        if len(self.densities) != len(self.shape.blocks):
            raise ValueError(
                f"Expected {len(self.shape.blocks)} density blocks, "
                f"got {len(self.densities)}."
            )
        total = 0.0
        for n, block in zip(self.shape.blocks, self.densities):
            if block.shape != (n, n):
                raise ValueError(f"Density block must be {n}x{n}, got {block.shape}.")
            if np.abs(block - block.conj().T).max() > STATE_TOL:
                raise ValueError("Density blocks must be self-adjoint.")
            if np.linalg.eigvalsh((block + block.conj().T) / 2)[0] < -STATE_TOL:
                raise ValueError("Density blocks must be positive.")
            total += float(np.trace(block).real)
        if abs(total - 1.0) > STATE_TOL:
            raise ValueError(f"Densities must have total trace 1, got {total}.")
        return self

    @classmethod
    def from_matrix(cls, shape: AlgebraShape, data: np.ndarray) -> "State":
        """Read the block densities off a block-diagonal D x D matrix."""
        data = np.asarray(data)
        cells = [shape.block_slice(k) for k in range(len(shape.blocks))]
        blocks = [data[cell, cell] for cell in cells]
        return cls(shape=shape, densities=blocks)

    @classmethod
    def from_point(cls, shape: AlgebraShape, block: int) -> "State":
        """The point mass on a one-dimensional block (a point of X)."""
        if shape.blocks[block] != 1:
            raise ValueError(
                f"Block {block} of shape {shape} is not a point; use from_pure."
            )
        return cls.from_pure(shape, PureState(block=block, vector=[1.0]))

    @classmethod
    def from_pure(cls, shape: AlgebraShape, pure: PureState) -> "State":
        v = pure.embed(shape)
        return cls.from_matrix(shape, np.outer(v, v.conj()))

    def matrix(self) -> np.ndarray:
        """The block-diagonal D x D density matrix."""
        out = np.zeros((self.shape.dim, self.shape.dim), dtype=complex)
        for k, block in enumerate(self.densities):
            out[self.shape.block_slice(k), self.shape.block_slice(k)] = block
        return out

    def pairing(self, a: AlgebraElement) -> complex:
        """<phi, a> = sum_k tr(d_k a_k)."""
        if a.shape != self.shape:
            raise ValueError(f"Shape mismatch: {self.shape} versus {a.shape}.")
        return complex(np.trace(self.matrix() @ a.data))

    def support_blocks(self, tol: float = STATE_TOL) -> List[int]:
        return [
            k
            for k, block in enumerate(self.densities)
            if float(np.trace(block).real) > tol
        ]


class DistanceBracket(BaseModel):
    """
    Bracket [lower, upper] around the Monge-Kantorovich distance.

    upper is +inf when no certificate is available; unbounded marks a detected
    direction of zero Lipschitz seminorm that separates the two states. crossed
    marks an ascent value above the certified upper end, a numerical fault.
    """

    lower: float
    upper: float
    converged: bool
    iterations: int = Field(ge=0)
    unbounded: bool = False
    crossed: bool = False
    method: Literal["lp", "ascent"]

    @property
    def width(self) -> float:
        return self.upper - self.lower


class LeibnizCheck(BaseModel):
    """Slack of ||ab||_Lip <= ||a|| ||b||_Lip + ||a||_Lip ||b||."""

    holds: bool
    slack: float


class SearchConfig(BaseModel):
    """Configuration of the feasibility search."""

    model_config = ConfigDict(frozen=True)

    shape: AlgebraShape
    eps: float = Field(SEARCH_EPS, gt=0.0)
    trace_target: Optional[float] = Field(None, gt=0.0)
    max_iter: int = Field(SEARCH_MAX_ITER, ge=1)
    restarts: int = Field(SEARCH_RESTARTS, ge=1)
    seed: int = 0
    residual_tol: float = Field(SEARCH_RESIDUAL_TOL, gt=0.0)
    drop_triangle: bool = False
    gauge: Literal["trace", "norm"] = "trace"

    @field_validator("shape")
    @classmethod
    def _check_dim(cls, shape: AlgebraShape) -> AlgebraShape:
        if shape.dim > SEARCH_MAX_DIM:
            raise ValueError(
                f"Search supports D <= {SEARCH_MAX_DIM}, "
                f"shape {shape} has D = {shape.dim}."
            )
        return shape

    @property
    def target(self) -> float:
        """Pinned trace of rho, D^2 unless configured."""
        if self.trace_target is None:
            return float(self.shape.dim**2)
        return self.trace_target


class SearchOutcome(BaseModel):
    """Result of a feasibility search."""

    model_config = ConfigDict(frozen=True)

    status: Literal["candidate_found", "no_convergence"]
    mode: str
    config: SearchConfig
    candidate: Optional[MetricCandidate] = None
    residual_history: List[Tuple[float, float]]
    best_residual: float
    seed_used: int
    restart_index: int
    iterations: int

    @model_validator(mode="after")
    def _found_means_certified(self) -> "SearchOutcome":
        if self.status == "candidate_found" and (
            self.candidate is None or not self.candidate.verified
        ):
            raise ValueError("A found candidate must carry a passing report.")
        return self


class NoGoEntry(BaseModel):
    """Reproduction of the M_2 computation for one value of lambda."""

    lam: float
    pdelta_matches: bool
    defect_max_error: float
    defect_matches: bool
    identity_max_error: float
    identity_holds: bool
    witness_value: float
    min_eigenvalue: float
    failing_axioms: List[str]

    @property
    def reproduced(self) -> bool:
        return (
            self.pdelta_matches
            and self.defect_matches
            and self.identity_holds
            and math.isclose(self.witness_value, -2.0 * self.lam, rel_tol=1e-12)
            and self.failing_axioms == ["v"]
        )


class NoGoReport(BaseModel):
    entries: List[NoGoEntry]

    @property
    def reproduced(self) -> bool:
        return all(entry.reproduced for entry in self.entries)
