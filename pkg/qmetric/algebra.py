"""
QMetric - quantum metrics on finite-dimensional noncommutative spaces.
Multi-matrix algebras A = M_n1 + ... + M_nK and their tensor powers.

Every element is stored as a dense complex matrix in the identity
representation of A on C^D, D = n1 + ... + nK. Tensor legs follow the
lexicographic Kronecker ordering, so for D = 2 the basis of C^2 (x) C^2 is
e1e1, e1e2, e2e1, e2e2.
"""

from functools import lru_cache
from typing import Any, ClassVar, Tuple, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .constants import SELF_ADJOINT_TOL, SUPPORT_TOL
from .exceptions import NotSelfAdjointError, ShapeMismatchError

E = TypeVar("E", bound="BlockElement")
MatrixLike = Union["BlockElement", np.ndarray]


class AlgebraShape(BaseModel):
    """
    The block dimensions (n1, ..., nK) of A = M_n1 + ... + M_nK.

    The all-ones shape is the commutative algebra C(X) of a finite set X.
    """

    model_config = ConfigDict(frozen=True)

    blocks: Tuple[int, ...]

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        if isinstance(value, (dict, AlgebraShape)):
            return value
        if isinstance(value, int):
            return {"blocks": (value,)}
        if isinstance(value, str):
            return {"blocks": _parse_blocks(value)}
        return {"blocks": tuple(value)}

    @field_validator("blocks")
    @classmethod
    def _check_blocks(cls, blocks: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(blocks) == 0:
            raise ValueError("An algebra shape needs at least one block.")
        if any(n < 1 for n in blocks):
            raise ValueError(f"Block dimensions must be positive, got {blocks}.")
        return blocks

    @classmethod
    def parse(cls, text: str) -> "AlgebraShape":
        """Parse a shape written as '3', '2,1' or '1 1 1'."""
        return cls(blocks=_parse_blocks(text))

    @classmethod
    def classical(cls, points: int) -> "AlgebraShape":
        """The shape (1, ..., 1) of the algebra of functions on `points` points."""
        return cls(blocks=(1,) * points)

    @property
    def dim(self) -> int:
        return sum(self.blocks)

    @property
    def offsets(self) -> Tuple[int, ...]:
        starts = np.concatenate(([0], np.cumsum(self.blocks)[:-1]))
        return tuple(int(s) for s in starts)

    @property
    def is_classical(self) -> bool:
        return all(n == 1 for n in self.blocks)

    def block_slice(self, k: int) -> slice:
        start = self.offsets[k]
        return slice(start, start + self.blocks[k])

    def labels(self) -> np.ndarray:
        """Block index of every basis vector of C^D."""
        return np.repeat(np.arange(len(self.blocks)), self.blocks)

    def __str__(self) -> str:
        return "(" + ", ".join(str(n) for n in self.blocks) + ")"


def _parse_blocks(text: str) -> Tuple[int, ...]:
    parts = text.replace(",", " ").split()
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ValueError(f"Invalid shape '{text}', expected e.g. '2,1'.")


@lru_cache(maxsize=64)
def _support_mask(blocks: Tuple[int, ...], order: int) -> np.ndarray:
    labels = np.repeat(np.arange(len(blocks)), blocks)
    grid = np.stack(np.meshgrid(*([labels] * order), indexing="ij"), axis=-1)
    grid = grid.reshape(-1, order)
    mask = np.all(grid[:, None, :] == grid[None, :, :], axis=-1)
    mask.flags.writeable = False
    return mask


def support_mask(shape: AlgebraShape, order: int = 1) -> np.ndarray:
    """
    Boolean mask of the entries an element of A^(x order) may occupy.

    Entry (r, c) is allowed iff every tensor leg of r and c lies in the same
    block of A.
    """
    return _support_mask(shape.blocks, order)


class BlockElement(BaseModel):
    """An immutable element of a tensor power of A, stored densely."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    order: ClassVar[int] = 1
    # numpy scalars defer to __rmul__ instead of building object arrays
    __array_ufunc__: ClassVar[None] = None

    shape: AlgebraShape
    data: np.ndarray

    @model_validator(mode="before")
    @classmethod
    def _conform(cls, values: Any) -> Any:
        if not isinstance(values, dict):
            return values
        shape = AlgebraShape.model_validate(values.get("shape"))
        data = np.array(values.get("data"), dtype=complex)
        size = shape.dim**cls.order
        if data.shape != (size, size):
            raise ValueError(
                f"Expected a {size}x{size} matrix for shape {shape} "
                f"and {cls.order} tensor legs, got {data.shape}."
            )
        outside = ~support_mask(shape, cls.order)
        leak = float(np.abs(data[outside]).max(initial=0.0))
        scale = max(1.0, float(np.abs(data).max(initial=0.0)))
        if leak > SUPPORT_TOL * scale:
            raise ValueError(
                f"Matrix has entries of size {leak:.3g} outside the block support "
                f"of shape {shape}."
            )
        data[outside] = 0.0
        data.flags.writeable = False
        return {"shape": shape, "data": data}

    @property
    def size(self) -> int:
        return self.shape.dim**self.order

    def like(self: E, data: np.ndarray) -> E:
        """A new element of the same type and shape holding `data`."""
        return type(self)(shape=self.shape, data=data)

    def adjoint(self: E) -> E:
        return self.like(self.data.conj().T)

    def norm(self) -> float:
        return op_norm(self)

    def is_self_adjoint(self, tol: float = SELF_ADJOINT_TOL) -> bool:
        return _is_self_adjoint(self.data, tol)

    def _check_peer(self, other: "BlockElement") -> None:
        if type(other) is not type(self):
            raise ShapeMismatchError(
                f"Cannot combine {type(self).__name__} with {type(other).__name__}."
            )
        if other.shape != self.shape:
            raise ShapeMismatchError(
                f"Shape mismatch: {self.shape} versus {other.shape}."
            )

    def __add__(self: E, other: E) -> E:
        self._check_peer(other)
        return self.like(self.data + other.data)

    def __sub__(self: E, other: E) -> E:
        self._check_peer(other)
        return self.like(self.data - other.data)

    def __neg__(self: E) -> E:
        return self.like(-self.data)

    def __mul__(self: E, scalar: complex) -> E:
        return self.like(scalar * self.data)

    __rmul__ = __mul__

    def __matmul__(self: E, other: E) -> E:
        self._check_peer(other)
        return self.like(self.data @ other.data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockElement) or type(other) is not type(self):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.shape, self.data.tobytes()))


class AlgebraElement(BlockElement):
    """An element a of A."""

    order: ClassVar[int] = 1


class BiElement(BlockElement):
    """An element of A (x) A: candidate metrics, P_delta, test elements nu."""

    order: ClassVar[int] = 2


class TriElement(BlockElement):
    """An element of A (x) A (x) A, home of the triangle defect."""

    order: ClassVar[int] = 3


ELEMENT_TYPES = {1: AlgebraElement, 2: BiElement, 3: TriElement}


def element_type(order: int) -> Type[BlockElement]:
    """The element class for `order` tensor legs."""
    if order not in ELEMENT_TYPES:
        raise ValueError(f"Tensor order must be 1, 2 or 3, got {order}.")
    return ELEMENT_TYPES[order]


def require_same_shape(*elements: BlockElement) -> AlgebraShape:
    shape = elements[0].shape
    for element in elements[1:]:
        if element.shape != shape:
            raise ShapeMismatchError(
                f"Shape mismatch: {shape} versus {element.shape}."
            )
    return shape


# --- Array kernels (dim is D, the dimension of one tensor leg) ---


def swap_matrix(dim: int) -> np.ndarray:
    """The permutation matrix S with S(x (x) y) = y (x) x on C^D (x) C^D."""
    perm = np.arange(dim * dim).reshape(dim, dim).T.ravel()
    return np.eye(dim * dim)[perm]


def flip_matrix(data: np.ndarray, dim: int) -> np.ndarray:
    legs = data.reshape(dim, dim, dim, dim)
    return legs.transpose(1, 0, 3, 2).reshape(dim * dim, dim * dim)


def mid_embed_matrix(data: np.ndarray, dim: int) -> np.ndarray:
    legs = data.reshape(dim, dim, dim, dim)
    out = np.einsum("ikjl,bd->ibkjdl", legs, np.eye(dim))
    return out.reshape(dim**3, dim**3)


def mult_matrix(data: np.ndarray, dim: int) -> np.ndarray:
    return np.einsum("ijjl->il", data.reshape(dim, dim, dim, dim))


def partial_trace_first(data: np.ndarray, dim: int) -> np.ndarray:
    """Trace out the first leg of a D^2 x D^2 matrix."""
    return np.einsum("kikj->ij", data.reshape(dim, dim, dim, dim))


def partial_trace_second(data: np.ndarray, dim: int) -> np.ndarray:
    """Trace out the second leg of a D^2 x D^2 matrix."""
    return np.einsum("ikjk->ij", data.reshape(dim, dim, dim, dim))


def hermitian_part(data: np.ndarray) -> np.ndarray:
    return (data + data.conj().T) / 2


def _is_self_adjoint(data: np.ndarray, tol: float = SELF_ADJOINT_TOL) -> bool:
    """||x - x*|| <= tol max(1, ||x||)."""
    return op_norm(data - data.conj().T) <= tol * max(1.0, op_norm(data))


# --- Operations on elements ---


def identity(shape: AlgebraShape) -> AlgebraElement:
    """The unit 1_A."""
    return AlgebraElement(shape=shape, data=np.eye(shape.dim))


def zero_element(shape: AlgebraShape, order: int) -> BlockElement:
    size = shape.dim**order
    return element_type(order)(shape=shape, data=np.zeros((size, size)))


def matrix_unit(shape: AlgebraShape, row: int, col: int) -> AlgebraElement:
    """The matrix unit 1_{row,col} (0-based), which must lie inside one block."""
    data = np.zeros((shape.dim, shape.dim))
    data[row, col] = 1.0
    return AlgebraElement(shape=shape, data=data)


def tensor2(x: AlgebraElement, y: AlgebraElement) -> BiElement:
    """x (x) y as a D^2 x D^2 Kronecker product."""
    shape = require_same_shape(x, y)
    return BiElement(shape=shape, data=np.kron(x.data, y.data))


def flip(r: BiElement) -> BiElement:
    """The flip a (x) b -> b (x) a, i.e. conjugation by the leg swap."""
    return r.like(flip_matrix(r.data, r.shape.dim))


def mid_embed(r: BiElement) -> TriElement:
    """The *-homomorphism a (x) b -> a (x) 1 (x) b."""
    return TriElement(shape=r.shape, data=mid_embed_matrix(r.data, r.shape.dim))


def mult_map(r: BiElement) -> AlgebraElement:
    """The multiplication a (x) b -> ab, extended linearly."""
    return AlgebraElement(shape=r.shape, data=mult_matrix(r.data, r.shape.dim))


@lru_cache(maxsize=64)
def _diag_projector(blocks: Tuple[int, ...]) -> np.ndarray:
    dim = sum(blocks)
    sym = (np.eye(dim * dim) + swap_matrix(dim)) / 2
    labels = np.repeat(np.arange(len(blocks)), blocks)
    proj = np.zeros((dim * dim, dim * dim))
    for k in range(len(blocks)):
        inside = (labels == k).astype(float)
        pair = np.kron(inside, inside)
        proj += pair[:, None] * sym * pair[None, :]
    proj.flags.writeable = False
    return proj


def diag_projector(shape: AlgebraShape) -> BiElement:
    """
    P_delta, the supremum of p (x) p over minimal projections p of A.

    Minimal projections are rank one inside a single block and the span of
    v (x) v is the symmetric subspace, so P_delta is the symmetric projector
    (1 + S)/2 on every diagonal cell (k, k) and zero on cross cells.
    """
    return BiElement(shape=shape, data=_diag_projector(shape.blocks))


def diag_projector_matrix(shape: AlgebraShape) -> np.ndarray:
    return _diag_projector(shape.blocks)


def op_norm(x: MatrixLike) -> float:
    """Largest singular value."""
    data = x.data if isinstance(x, BlockElement) else np.asarray(x)
    if data.size == 0:
        return 0.0
    return float(np.linalg.norm(data, 2))


def min_eig(x: MatrixLike) -> Tuple[float, np.ndarray]:
    """
    Smallest eigenvalue of a self-adjoint element and a unit eigenvector.

    Raises:
        NotSelfAdjointError: if ||x - x*|| exceeds 1e-10 max(1, ||x||).
    """
    if isinstance(x, BlockElement):
        data, self_adjoint = x.data, x.is_self_adjoint()
    else:
        data = np.asarray(x, dtype=complex)
        self_adjoint = _is_self_adjoint(data)
    if not self_adjoint:
        gap = op_norm(data - data.conj().T)
        raise NotSelfAdjointError(
            f"Element is not self-adjoint (||x - x*|| = {gap:.3g})."
        )
    values, vectors = np.linalg.eigh(hermitian_part(data))
    return float(values[0]), vectors[:, 0]
