"""
ncerg Algebra
Finite-dimensional model of a semifinite von Neumann algebra (M, tau).

M is a direct sum of full matrix factors M_{n_1} + ... + M_{n_K} and the trace
is tau(x) = sum_k w_k Tr(x_k) with strictly positive weights w_k. In finite
dimension every tau-measurable operator is bounded, so L^0 = M and all the
operator classes of the noncommutative theory are modelled by `Operator`.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la

from ncerg.config import TOLERANCES
from ncerg.exceptions import (
    InvalidParameterError,
    InvalidWindowError,
    NotProjectionError,
    NotSelfAdjointError,
    ShapeMismatchError,
)

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex]


@dataclass(frozen=True)
class AlgebraShape:
    """Ordered blocks (dim, weight); tau(1) = sum of weight * dim."""

    blocks: Tuple[Tuple[int, float], ...]

    def __post_init__(self) -> None:
        normalized = []
        for entry in self.blocks:
            try:
                dim, weight = entry
            except (TypeError, ValueError):
                raise InvalidParameterError(f"Block must be a (dim, weight) pair, got {entry!r}")
            if int(dim) != dim or int(dim) < 1:
                raise InvalidParameterError(f"Block dimension must be a positive integer, got {dim!r}")
            weight = float(weight)
            if not (np.isfinite(weight) and weight > 0):
                raise InvalidParameterError(f"Block weight must be positive and finite, got {weight!r}")
            normalized.append((int(dim), weight))
        if not normalized:
            raise InvalidParameterError("An algebra needs at least one block.")
        object.__setattr__(self, "blocks", tuple(normalized))

    @classmethod
    def diagonal(cls, n: int, weights: Union[float, Sequence[float]] = 1.0) -> "AlgebraShape":
        """Commutative algebra of n atoms (1x1 blocks)."""
        if np.isscalar(weights):
            weights = [float(weights)] * int(n)
        if len(weights) != n:
            raise InvalidParameterError(f"Expected {n} atom weights, got {len(weights)}")
        return cls(tuple((1, w) for w in weights))

    @classmethod
    def matrix(cls, n: int, weight: float = 1.0) -> "AlgebraShape":
        """Single full matrix factor M_n."""
        return cls(((n, weight),))

    @classmethod
    def from_spec(cls, spec: Any) -> "AlgebraShape":
        """Accept [[dim, weight], ...] or {"blocks": [[dim, weight], ...]}."""
        if isinstance(spec, dict):
            if "blocks" not in spec:
                raise InvalidParameterError("Algebra spec needs a 'blocks' list.")
            spec = spec["blocks"]
        if not isinstance(spec, (list, tuple)):
            raise InvalidParameterError(f"Algebra spec must be a list of blocks, got {spec!r}")
        return cls(tuple(tuple(block) for block in spec))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(d for d, _ in self.blocks)

    @property
    def weights(self) -> Tuple[float, ...]:
        return tuple(w for _, w in self.blocks)

    @property
    def total_trace(self) -> float:
        return float(sum(d * w for d, w in self.blocks))

    @property
    def min_weight(self) -> float:
        return min(self.weights)

    @property
    def hs_dimension(self) -> int:
        return sum(d * d for d in self.dims)

    @property
    def hs_offsets(self) -> Tuple[int, ...]:
        offsets, acc = [], 0
        for d in self.dims:
            offsets.append(acc)
            acc += d * d
        return tuple(offsets)

    @property
    def is_diagonal(self) -> bool:
        return all(d == 1 for d in self.dims)

    def to_list(self) -> List[List[float]]:
        return [[d, w] for d, w in self.blocks]

    def __repr__(self) -> str:
        return f"AlgebraShape({self.to_list()})"


def _real_if_close(value: complex) -> Union[float, complex]:
    if abs(value.imag) <= 1e-12 * max(1.0, abs(value.real)):
        return float(value.real)
    return value


class Operator:
    """Block-diagonal operator on an AlgebraShape; immutable after construction."""

    def __init__(self, shape: AlgebraShape, blocks: Sequence[Any]):
        if len(blocks) != len(shape.blocks):
            raise ShapeMismatchError(
                f"Expected {len(shape.blocks)} blocks for {shape}, got {len(blocks)}"
            )
        arrays = []
        for k, (dim, block) in enumerate(zip(shape.dims, blocks)):
            arr = np.array(block, dtype=complex)
            if arr.ndim == 0:
                arr = arr.reshape(1, 1)
            if arr.shape != (dim, dim):
                raise ShapeMismatchError(f"Block {k} must be {dim}x{dim}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise InvalidParameterError(f"Block {k} has non-finite entries")
            arr.setflags(write=False)
            arrays.append(arr)
        self.shape = shape
        self.blocks: Tuple[np.ndarray, ...] = tuple(arrays)

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "Operator":
        return cls(shape, [np.eye(d) for d in shape.dims])

    @classmethod
    def zeros(cls, shape: AlgebraShape) -> "Operator":
        return cls(shape, [np.zeros((d, d)) for d in shape.dims])

    @classmethod
    def diagonal(cls, shape: AlgebraShape, values: Sequence[Scalar]) -> "Operator":
        """Operator whose block diagonals, read block after block, are `values`."""
        values = np.asarray(values, dtype=complex).ravel()
        if values.size != sum(shape.dims):
            raise ShapeMismatchError(
                f"Expected {sum(shape.dims)} diagonal entries, got {values.size}"
            )
        blocks, start = [], 0
        for d in shape.dims:
            blocks.append(np.diag(values[start:start + d]))
            start += d
        return cls(shape, blocks)

    @classmethod
    def from_hs_vector(cls, shape: AlgebraShape, vector: np.ndarray) -> "Operator":
        """Inverse of `to_hs_vector`."""
        vector = np.asarray(vector, dtype=complex).ravel()
        if vector.size != shape.hs_dimension:
            raise ShapeMismatchError(
                f"Expected HS vector of length {shape.hs_dimension}, got {vector.size}"
            )
        blocks = []
        for (d, w), off in zip(shape.blocks, shape.hs_offsets):
            blocks.append(vector[off:off + d * d].reshape(d, d) / np.sqrt(w))
        return cls(shape, blocks)

    def to_hs_vector(self) -> np.ndarray:
        """
        Coordinates in the orthonormal basis of <a, b> = tau(a* b).

        Basis order is block-major, then matrix units row-major; the unit E_ij of
        block k is scaled by w_k^(-1/2), so coordinates are sqrt(w_k) * x_k[i, j].
        """
        return np.concatenate(
            [np.sqrt(w) * b.reshape(-1) for (_, w), b in zip(self.shape.blocks, self.blocks)]
        )

    # ------------------------------------------------------------------
    # flags

    @cached_property
    def norm_inf(self) -> float:
        return float(max(la.norm(b, 2) for b in self.blocks))

    @cached_property
    def selfadjoint_residual(self) -> float:
        return float(max(la.norm(b - b.conj().T, 2) for b in self.blocks))

    @cached_property
    def is_selfadjoint(self) -> bool:
        return self.selfadjoint_residual <= TOLERANCES.selfadjoint * max(1.0, self.norm_inf)

    @cached_property
    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian part."""
        return float(min(la.eigvalsh((b + b.conj().T) / 2)[0] for b in self.blocks))

    @cached_property
    def is_positive(self) -> bool:
        scale = max(1.0, self.norm_inf)
        return self.is_selfadjoint and self.min_eigenvalue >= -TOLERANCES.selfadjoint * scale

    @cached_property
    def is_projection(self) -> bool:
        tol = TOLERANCES.projection
        if self.selfadjoint_residual > tol:
            return False
        return max(la.norm(b @ b - b, 2) for b in self.blocks) <= tol

    def require_selfadjoint(self, tol: Optional[float] = None) -> None:
        limit = TOLERANCES.selfadjoint * max(1.0, self.norm_inf) if tol is None else tol
        if self.selfadjoint_residual > limit:
            raise NotSelfAdjointError(
                f"||x - x*||_inf = {self.selfadjoint_residual:.3e} exceeds {limit:.3e}"
            )

    # ------------------------------------------------------------------
    # arithmetic

    def _require_same_shape(self, other: "Operator") -> None:
        if other.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        self._require_same_shape(other)
        return Operator(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        self._require_same_shape(other)
        return Operator(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "Operator":
        return Operator(self.shape, [-a for a in self.blocks])

    def __mul__(self, scalar: Scalar) -> "Operator":
        if not np.isscalar(scalar):
            return NotImplemented
        return Operator(self.shape, [scalar * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "Operator":
        if not np.isscalar(scalar):
            return NotImplemented
        return Operator(self.shape, [a / scalar for a in self.blocks])

    def __matmul__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        self._require_same_shape(other)
        return Operator(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self) -> "Operator":
        return Operator(self.shape, [a.conj().T for a in self.blocks])

    def hermitian_part(self) -> "Operator":
        return Operator(self.shape, [(a + a.conj().T) / 2 for a in self.blocks])

    def apply(self, fn: Callable[[np.ndarray], np.ndarray], tol: Optional[float] = None) -> "Operator":
        """Functional calculus f(x) for self-adjoint x."""
        self.require_selfadjoint(tol)
        blocks = []
        for b in self.blocks:
            vals, vecs = la.eigh((b + b.conj().T) / 2)
            blocks.append((vecs * np.asarray(fn(vals))) @ vecs.conj().T)
        return Operator(self.shape, blocks)

    def singular_values(self) -> List[np.ndarray]:
        return [la.svdvals(b) for b in self.blocks]

    def weighted_singular_values(self) -> Tuple[np.ndarray, np.ndarray]:
        """Flat singular values of |x| with the trace weight of each."""
        values, weights = [], []
        for (_, w), s in zip(self.shape.blocks, self.singular_values()):
            values.append(s)
            weights.append(np.full(s.size, w))
        return np.concatenate(values), np.concatenate(weights)

    def diagonal_values(self) -> np.ndarray:
        """Concatenated block diagonals."""
        return np.concatenate([np.diag(b) for b in self.blocks])

    def allclose(self, other: "Operator", atol: float = 1e-10) -> bool:
        self._require_same_shape(other)
        return all(np.allclose(a, b, rtol=0.0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def distance(self, other: "Operator") -> float:
        """||self - other||_inf."""
        return (self - other).norm_inf

    def __repr__(self) -> str:
        return f"Operator(shape={self.shape.to_list()}, norm_inf={self.norm_inf:.6g})"


@dataclass(frozen=True)
class SpectralDecomposition:
    """x = sum_i eigenvalues[i] * projections[i]; eigenvalues strictly increasing."""

    eigenvalues: Tuple[float, ...]
    projections: Tuple[Operator, ...]
    traces: Tuple[float, ...]
    threshold: float

    def reconstruct(self) -> Operator:
        shape = self.projections[0].shape
        result = Operator.zeros(shape)
        for lam, proj in zip(self.eigenvalues, self.projections):
            result = result + lam * proj
        return result

    def selected(self, lo: float, hi: float) -> List[int]:
        """Indices i with lo < eigenvalue_i <= hi, boundaries widened by the merge threshold."""
        return [
            i for i, lam in enumerate(self.eigenvalues)
            if lam > lo + self.threshold and lam <= hi + self.threshold
        ]


def merge_threshold(scale: float) -> float:
    """Degeneracy threshold 1e-9 * (1 + scale)."""
    return TOLERANCES.merge * (1.0 + scale)


def cluster_sorted(values: np.ndarray, threshold: float) -> List[np.ndarray]:
    """Split an ascending array into index chains whose neighbours differ by <= threshold."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return []
    breaks = np.nonzero(np.diff(values) > threshold)[0] + 1
    return np.split(np.arange(values.size), breaks)


def trace(x: Operator) -> Union[float, complex]:
    """
    Weighted trace tau(x) = sum_k w_k Tr(x_k).

    Returns a float when the imaginary part vanishes (always for self-adjoint x).
    """
    value = sum(w * complex(np.trace(b)) for (_, w), b in zip(x.shape.blocks, x.blocks))
    return _real_if_close(complex(value))


def abs_op(x: Operator) -> Operator:
    """|x| = (x* x)^(1/2), computed from the SVD of every block."""
    blocks = []
    for b in x.blocks:
        _, s, vh = la.svd(b)
        blocks.append((vh.conj().T * s) @ vh)
    return Operator(x.shape, blocks)


def spectral_decompose(x: Operator, tol: Optional[float] = None) -> SpectralDecomposition:
    """
    Spectral decomposition of a self-adjoint operator with degeneracy merging.

    Args:
        x: Self-adjoint operator
        tol: Absolute bound on ||x - x*||_inf (default: 1e-9 * max(1, ||x||_inf))

    Returns:
        SpectralDecomposition with strictly increasing eigenvalues

    Raises:
        NotSelfAdjointError: if x is not self-adjoint to tol
    """
    x.require_selfadjoint(tol)
    vals, owners, vectors = [], [], []
    for k, b in enumerate(x.blocks):
        block_vals, block_vecs = la.eigh((b + b.conj().T) / 2)
        for i, lam in enumerate(block_vals):
            vals.append(lam)
            owners.append(k)
            vectors.append(block_vecs[:, i])
    vals = np.asarray(vals)
    order = np.argsort(vals, kind="stable")
    threshold = merge_threshold(x.norm_inf)
    weights = x.shape.weights

    eigenvalues, projections, traces = [], [], []
    for group in cluster_sorted(vals[order], threshold):
        members = order[group]
        blocks = [np.zeros((d, d), dtype=complex) for d in x.shape.dims]
        member_weights = np.array([weights[owners[m]] for m in members])
        for m in members:
            v = vectors[m]
            blocks[owners[m]] += np.outer(v, v.conj())
        eigenvalues.append(float(np.dot(vals[members], member_weights) / member_weights.sum()))
        projections.append(Operator(x.shape, blocks))
        traces.append(float(member_weights.sum()))
    logger.debug("spectral_decompose: %d distinct eigenvalues (threshold %.2e)", len(eigenvalues), threshold)
    return SpectralDecomposition(tuple(eigenvalues), tuple(projections), tuple(traces), threshold)


def _check_window(lo: float, hi: float) -> None:
    if not lo < hi:
        raise InvalidWindowError(f"Spectral window needs lo < hi, got ({lo}, {hi}]")


def spectral_window(x: Operator, lo: float, hi: float) -> Operator:
    """
    Spectral truncation: the integral of lambda de_lambda over (lo, hi].

    Eigenvalues equal to hi (within the merge threshold) are included, those equal
    to lo are excluded, so adjacent windows partition the spectrum.
    """
    _check_window(lo, hi)
    dec = spectral_decompose(x)
    result = Operator.zeros(x.shape)
    for i in dec.selected(lo, hi):
        result = result + dec.eigenvalues[i] * dec.projections[i]
    return result


def spectral_projection(x: Operator, lo: float, hi: float) -> Operator:
    """Spectral projection chi_(lo, hi](x), same boundary convention as spectral_window."""
    _check_window(lo, hi)
    dec = spectral_decompose(x)
    result = Operator.zeros(x.shape)
    for i in dec.selected(lo, hi):
        result = result + dec.projections[i]
    return result


def proj_complement(e: Operator) -> Operator:
    """e^perp = 1 - e."""
    if not e.is_projection:
        raise NotProjectionError("Complement requires a projection.")
    return Operator.identity(e.shape) - e


def proj_meet(e: Operator, f: Operator) -> Operator:
    """
    Lattice meet e ^ f: the projection onto range(e) intersected with range(f).

    Computed as the kernel of e^perp + f^perp per block; singular values below
    1e-9 count as zero.
    """
    for name, p in (("e", e), ("f", f)):
        if not p.is_projection:
            raise NotProjectionError(f"proj_meet: {name} is not a projection")
    e._require_same_shape(f)
    blocks = []
    for a, b in zip(e.blocks, f.blocks):
        eye = np.eye(a.shape[0])
        _, s, vh = la.svd((eye - a) + (eye - b))
        kernel = vh[s <= TOLERANCES.null_space].conj().T
        blocks.append(kernel @ kernel.conj().T)
    return Operator(e.shape, blocks)


# ----------------------------------------------------------------------
# random elements for experiments and tests


def random_shape(
    rng: np.random.Generator,
    max_blocks: int = 3,
    max_dim: int = 6,
    weight_range: Tuple[float, float] = (0.25, 2.0),
) -> AlgebraShape:
    n_blocks = int(rng.integers(1, max_blocks + 1))
    return AlgebraShape(tuple(
        (int(rng.integers(1, max_dim + 1)), float(rng.uniform(*weight_range)))
        for _ in range(n_blocks)
    ))


def random_operator(shape: AlgebraShape, rng: np.random.Generator, real: bool = False) -> Operator:
    blocks = []
    for d in shape.dims:
        g = rng.standard_normal((d, d))
        if not real:
            g = g + 1j * rng.standard_normal((d, d))
        blocks.append(g)
    return Operator(shape, blocks)


def random_hermitian(shape: AlgebraShape, rng: np.random.Generator) -> Operator:
    return random_operator(shape, rng).hermitian_part()


def random_positive(shape: AlgebraShape, rng: np.random.Generator) -> Operator:
    g = random_operator(shape, rng)
    return Operator(shape, [b @ b.conj().T / b.shape[0] for b in g.blocks])


def random_contraction(shape: AlgebraShape, rng: np.random.Generator) -> Operator:
    """Random operator with ||z||_inf = 1."""
    g = random_operator(shape, rng)
    return g / g.norm_inf


def random_unitary(shape: AlgebraShape, rng: np.random.Generator) -> Operator:
    blocks = []
    for b in random_operator(shape, rng).blocks:
        q, r = la.qr(b)
        phases = np.diag(r) / np.abs(np.diag(r))
        blocks.append(q * phases)
    return Operator(shape, blocks)


def random_projection(shape: AlgebraShape, rng: np.random.Generator) -> Operator:
    """Projection onto a random subspace of each block (rank drawn uniformly)."""
    blocks = []
    for b in random_unitary(shape, rng).blocks:
        rank = int(rng.integers(0, b.shape[0] + 1))
        v = b[:, :rank]
        blocks.append(v @ v.conj().T)
    return Operator(shape, blocks)
