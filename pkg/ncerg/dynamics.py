"""
ncerg Dynamics
Positive Dunford-Schwartz maps and d-parameter semigroups T_u = exp(sum u_i L_i).

Maps are stored as matrices in the orthonormal Hilbert-Schmidt basis of
<a, b> = tau(a* b) (see `Operator.to_hs_vector`), so the trace-adjoint of a map
is the conjugate transpose of its matrix.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg as la

from ncerg.algebra import AlgebraShape, Operator, random_operator
from ncerg.config import TOLERANCES, Tolerances
from ncerg.exceptions import (
    FamilySpecError,
    InvalidParameterError,
    NonCommutingError,
    ShapeMismatchError,
    SpotcheckFailedError,
)
from ncerg.spaces import norm_p

logger = logging.getLogger(__name__)

CONFIRMATION_TRIALS = 20


class Superoperator:
    """Linear map on an algebra, as a D x D matrix in the weighted HS basis."""

    def __init__(self, shape: AlgebraShape, matrix: Any):
        matrix = np.array(matrix, dtype=complex)
        dim = shape.hs_dimension
        if matrix.shape != (dim, dim):
            raise ShapeMismatchError(f"Superoperator on {shape} must be {dim}x{dim}, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise InvalidParameterError("Superoperator matrix has non-finite entries")
        matrix.setflags(write=False)
        self.shape = shape
        self.matrix = matrix

    @classmethod
    def identity(cls, shape: AlgebraShape) -> "Superoperator":
        return cls(shape, np.eye(shape.hs_dimension))

    @classmethod
    def zero(cls, shape: AlgebraShape) -> "Superoperator":
        return cls(shape, np.zeros((shape.hs_dimension,) * 2))

    @classmethod
    def from_map(cls, shape: AlgebraShape, fn: Callable[[Operator], Operator]) -> "Superoperator":
        """Tabulate a linear map by applying it to every HS basis element."""
        dim = shape.hs_dimension
        columns = []
        for j in range(dim):
            unit = np.zeros(dim)
            unit[j] = 1.0
            image = fn(Operator.from_hs_vector(shape, unit))
            if image.shape != shape:
                raise ShapeMismatchError(f"Map sends {shape} to {image.shape}")
            columns.append(image.to_hs_vector())
        return cls(shape, np.column_stack(columns))

    def apply(self, x: Operator) -> Operator:
        if x.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape} vs {x.shape}")
        return Operator.from_hs_vector(self.shape, self.matrix @ x.to_hs_vector())

    __call__ = apply

    def adjoint(self) -> "Superoperator":
        """Trace-adjoint T^dagger: tau(T(a)* b) = tau(a* T^dagger(b))."""
        return Superoperator(self.shape, self.matrix.conj().T)

    def compose(self, other: "Superoperator") -> "Superoperator":
        """self o other."""
        self._require_same_shape(other)
        return Superoperator(self.shape, self.matrix @ other.matrix)

    def _require_same_shape(self, other: "Superoperator") -> None:
        if other.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")

    def __add__(self, other: "Superoperator") -> "Superoperator":
        self._require_same_shape(other)
        return Superoperator(self.shape, self.matrix + other.matrix)

    def __sub__(self, other: "Superoperator") -> "Superoperator":
        self._require_same_shape(other)
        return Superoperator(self.shape, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Superoperator":
        if not np.isscalar(scalar):
            return NotImplemented
        return Superoperator(self.shape, scalar * self.matrix)

    __rmul__ = __mul__

    @property
    def norm(self) -> float:
        """Operator norm on L^2(M, tau)."""
        return float(la.norm(self.matrix, 2))

    def __repr__(self) -> str:
        return f"Superoperator(shape={self.shape.to_list()}, norm={self.norm:.6g})"


# ----------------------------------------------------------------------
# DS+ certification


@dataclass(frozen=True)
class DSCertificate:
    """Evidence that a map is (or is not) a positive Dunford-Schwartz operator."""

    positivity: str  # "cp_choi_passed" | "diagonal_stochastic_passed" | "failed"
    positivity_witness: Optional[str]
    subunital: bool
    subunital_slack: float
    subtracial: bool
    subtracial_slack: float
    confirmed: Optional[bool] = None
    confirmation_trials: int = 0

    @property
    def positivity_passed(self) -> bool:
        return self.positivity != "failed"

    @property
    def verdict(self) -> bool:
        return self.positivity_passed and self.subunital and self.subtracial

    def to_dict(self) -> Dict[str, Any]:
        return {
            "positivity": self.positivity,
            "positivity_witness": self.positivity_witness,
            "subunital": self.subunital,
            "subunital_slack": self.subunital_slack,
            "subtracial": self.subtracial,
            "subtracial_slack": self.subtracial_slack,
            "confirmed": self.confirmed,
            "confirmation_trials": self.confirmation_trials,
            "verdict": self.verdict,
        }

    def __str__(self) -> str:
        if self.verdict:
            return f"DS+ ({self.positivity})"
        reasons = []
        if not self.positivity_passed:
            reasons.append(self.positivity_witness or "positivity failed")
        if not self.subunital:
            reasons.append(f"||(T(1)-1)_+|| = {self.subunital_slack:.3e}")
        if not self.subtracial:
            reasons.append(f"||(T^dagger(1)-1)_+|| = {self.subtracial_slack:.3e}")
        return "not DS+: " + "; ".join(reasons)


def _block_unit(shape: AlgebraShape, k: int, i: int, j: int) -> Operator:
    blocks = [np.zeros((d, d), dtype=complex) for d in shape.dims]
    blocks[k][i, j] = 1.0
    return Operator(shape, blocks)


def _choi_check(T: Superoperator, tol: float) -> Tuple[bool, Optional[str]]:
    """
    Complete positivity through the Choi matrix of every block pair.

    For source block k and target block l, C_kl[(i, a), (j, b)] = T(E^k_ij)_l[a, b].
    T is CP iff every C_kl is positive semidefinite. Eigenvalues are compared
    against -tol times the trace of the full Choi matrix.
    """
    shape = T.shape
    images = {}
    for k, d in enumerate(shape.dims):
        for i in range(d):
            for j in range(d):
                images[k, i, j] = T.apply(_block_unit(shape, k, i, j))
    chois = {}
    for k, dk in enumerate(shape.dims):
        for l, dl in enumerate(shape.dims):
            choi = np.zeros((dk * dl, dk * dl), dtype=complex)
            for i in range(dk):
                for j in range(dk):
                    choi[i * dl:(i + 1) * dl, j * dl:(j + 1) * dl] = images[k, i, j].blocks[l]
            chois[k, l] = choi
    total = sum(abs(float(np.trace(c).real)) for c in chois.values())
    scale = max(total, np.finfo(float).tiny)
    for (k, l), choi in chois.items():
        if la.norm(choi - choi.conj().T, 2) > tol * max(1.0, scale):
            return False, f"CP check failed: Choi block ({k},{l}) is not Hermitian"
        min_eig = float(la.eigvalsh((choi + choi.conj().T) / 2)[0])
        if min_eig < -tol * scale:
            return False, f"CP check failed: Choi block ({k},{l}) min eigenvalue {min_eig:.3e}"
    return True, None


def _stochastic_check(T: Superoperator, tol: float) -> Tuple[bool, Optional[str]]:
    """Entrywise nonnegativity: the exact positivity criterion on a diagonal algebra."""
    m = T.matrix
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    if np.abs(m.imag).max(initial=0.0) > tol * scale:
        return False, "map has non-real entries on a diagonal algebra"
    worst = float(m.real.min(initial=0.0))
    if worst < -tol * scale:
        i, j = np.unravel_index(int(np.argmin(m.real)), m.shape)
        return False, f"negative matrix entry {worst:.3e} at ({i},{j})"
    return True, None


def _positive_part_norm(x: Operator) -> float:
    """||(h - 1)_+||_inf for the Hermitian part h of x."""
    top = max(float(la.eigvalsh((b + b.conj().T) / 2)[-1]) for b in x.blocks)
    return max(top - 1.0, 0.0)


def verify_ds_plus(
    T: Superoperator,
    tol: Optional[float] = None,
    seed: int = 0,
    tolerances: Optional[Tolerances] = None,
) -> DSCertificate:
    """
    Certify T as a positive Dunford-Schwartz operator.

    Positivity is certified exactly on diagonal algebras (entrywise) and by
    complete positivity elsewhere. For positive T, ||T||_{M->M} = ||T(1)||_inf
    and ||T||_{L1->L1} = ||T^dagger(1)||_inf, so sub-unitality and
    sub-traciality decide the two contraction properties. A positive verdict is
    confirmed on random operators in both norms.

    Args:
        T: Map to certify
        tol: Tolerance for Choi eigenvalues and slacks; overrides `tolerances`
        seed: Seed of the confirmation sample
        tolerances: Source of the `choi` and `ds` tolerances (default: TOLERANCES)

    Returns:
        DSCertificate (failures are data, never exceptions)
    """
    tolerances = tolerances or TOLERANCES
    choi_tol = tolerances.choi if tol is None else tol
    tol = tolerances.ds if tol is None else tol
    shape = T.shape
    if shape.is_diagonal:
        ok, witness = _stochastic_check(T, choi_tol)
        positivity = "diagonal_stochastic_passed" if ok else "failed"
    else:
        ok, witness = _choi_check(T, choi_tol)
        positivity = "cp_choi_passed" if ok else "failed"

    one = Operator.identity(shape)
    unital_slack = _positive_part_norm(T.apply(one))
    tracial_slack = _positive_part_norm(T.adjoint().apply(one))
    certificate = DSCertificate(
        positivity=positivity,
        positivity_witness=witness,
        subunital=unital_slack <= tol,
        subunital_slack=unital_slack,
        subtracial=tracial_slack <= tol,
        subtracial_slack=tracial_slack,
    )
    if certificate.verdict:
        certificate = replace(
            certificate,
            confirmed=_confirm_contraction(T, seed, tol),
            confirmation_trials=CONFIRMATION_TRIALS,
        )
    logger.debug("verify_ds_plus: %s", certificate)
    return certificate


def _confirm_contraction(T: Superoperator, seed: int, tol: float) -> bool:
    rng = np.random.default_rng(seed)
    for _ in range(CONFIRMATION_TRIALS):
        x = random_operator(T.shape, rng)
        y = T.apply(x)
        for p in (1.0, np.inf):
            before, after = norm_p(x, p), norm_p(y, p)
            if after > before * (1.0 + 1e3 * tol) + tol:
                logger.warning("DS+ certificate not confirmed: ||T(x)||_%s = %.6g > %.6g", p, after, before)
                return False
    return True


# ----------------------------------------------------------------------
# semigroups


@dataclass(frozen=True, eq=False)
class Semigroup:
    """
    T_u = exp(sum_i u_i L_i) for u in R_+^d with pairwise-commuting generators.

    Built through `make_semigroup`, which validates commutation and spot-checks
    DS+ membership; immutable afterwards.
    """

    generators: Tuple[Superoperator, ...]
    commutation_residual: float
    ds_spotchecks: Tuple[Tuple[Tuple[float, ...], DSCertificate], ...] = ()
    name: str = "custom"
    spec: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def d(self) -> int:
        return len(self.generators)

    @property
    def shape(self) -> AlgebraShape:
        return self.generators[0].shape

    @property
    def generator_norms(self) -> Tuple[float, ...]:
        return tuple(L.norm for L in self.generators)

    def _check_u(self, u: Any) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if u.size == 1 and self.d > 1:
            u = np.full(self.d, float(u[0]))
        if u.shape != (self.d,):
            raise InvalidParameterError(f"Expected a {self.d}-vector u, got shape {u.shape}")
        if np.any(u < 0) or not np.all(np.isfinite(u)):
            raise InvalidParameterError(f"Semigroup parameter must be finite and >= 0, got {u.tolist()}")
        return u

    def generator_sum(self, u: Any) -> np.ndarray:
        u = self._check_u(u)
        total = np.zeros_like(self.generators[0].matrix)
        for ui, L in zip(u, self.generators):
            total = total + ui * L.matrix
        return total

    def propagator(self, u: Any) -> Superoperator:
        """T_u via scaling-and-squaring Pade exponential of sum u_i L_i."""
        u = self._check_u(u)
        if not np.any(u):
            return Superoperator.identity(self.shape)
        return Superoperator(self.shape, la.expm(self.generator_sum(u)))

    def axis_propagator(self, axis: int, s: float) -> Superoperator:
        """exp(s L_axis)."""
        u = np.zeros(self.d)
        u[axis] = s
        return self.propagator(u)

    def evolve(self, u: Any, x: Operator) -> Operator:
        u = self._check_u(u)
        if not np.any(u):
            return x
        return self.propagator(u).apply(x)

    def lipschitz_constant(self, p: float) -> float:
        """
        C with ||T_u(x) - T_v(x)||_p <= C * max_i |u_i - v_i| * ||x||_p.

        Sum of the L^2 operator norms of the generators, times the
        equivalence factor (tau(1) / w_min)^|1/2 - 1/p| between ||.||_p and
        ||.||_2 on this algebra.
        """
        if not p >= 1:
            raise InvalidParameterError(f"Lipschitz constant needs p >= 1, got {p}")
        exponent = abs(0.5 - (0.0 if np.isinf(p) else 1.0 / p))
        factor = (self.shape.total_trace / self.shape.min_weight) ** exponent
        return float(sum(self.generator_norms)) * factor

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "d": self.d,
            "algebra": self.shape.to_list(),
            "commutation_residual": self.commutation_residual,
            "spec": self.spec,
            "spotchecks": [
                {"u": list(u), "verdict": cert.verdict, "positivity": cert.positivity}
                for u, cert in self.ds_spotchecks
            ],
        }

    def __repr__(self) -> str:
        return f"Semigroup({self.name}, d={self.d}, algebra={self.shape.to_list()})"


def spotcheck_points(d: int) -> List[Tuple[float, ...]]:
    """Unit vectors, (1, ..., 1) and 0.1 * (1, ..., 1)."""
    points = [tuple(float(i == j) for j in range(d)) for i in range(d)]
    points.append((1.0,) * d)
    points.append((0.1,) * d)
    return list(dict.fromkeys(points))


def make_semigroup(
    generators: Sequence[Superoperator],
    d: Optional[int] = None,
    name: str = "custom",
    spec: Optional[Dict[str, Any]] = None,
    spotcheck: bool = True,
) -> Semigroup:
    """
    Validate generators and build a certified semigroup.

    Raises:
        FamilySpecError: if no generators are given or d does not match
        ShapeMismatchError: if generators live on different shapes
        NonCommutingError: if some ||[L_i, L_j]|| exceeds 1e-9 * max(1, max ||L||^2)
        SpotcheckFailedError: if T_u is not DS+ at a spot-check point
    """
    generators = tuple(generators)
    if not generators:
        raise FamilySpecError("A semigroup needs at least one generator")
    if d is not None and d != len(generators):
        raise FamilySpecError(f"Expected {d} generators, got {len(generators)}")
    shape = generators[0].shape
    for L in generators[1:]:
        if L.shape != shape:
            raise ShapeMismatchError(f"Generators on {shape} and {L.shape}")

    scale = max(1.0, max(L.norm for L in generators) ** 2)
    residual = 0.0
    for i in range(len(generators)):
        for j in range(i + 1, len(generators)):
            a, b = generators[i].matrix, generators[j].matrix
            r = float(la.norm(a @ b - b @ a, 2))
            if r > TOLERANCES.commutation * scale:
                raise NonCommutingError(i, j, r)
            residual = max(residual, r)

    sg = Semigroup(generators, residual, (), name, dict(spec or {}))
    if not spotcheck:
        return sg
    checks = []
    for u in spotcheck_points(sg.d):
        certificate = verify_ds_plus(sg.propagator(u))
        if not certificate.verdict:
            raise SpotcheckFailedError(u, certificate)
        checks.append((u, certificate))
    logger.debug("make_semigroup(%s): d=%d, residual %.2e, %d spot checks", name, sg.d, residual, len(checks))
    return Semigroup(generators, residual, tuple(checks), name, dict(spec or {}))


def evolve(sg: Semigroup, u: Any, x: Operator) -> Operator:
    """T_u(x); u = 0 returns x unchanged."""
    return sg.evolve(u, x)


# ----------------------------------------------------------------------
# built-in families


def _cycle_laplacian(n: int) -> np.ndarray:
    edges = {tuple(sorted((i, (i + 1) % n))) for i in range(n)}
    adjacency = np.zeros((n, n))
    for i, j in edges:
        adjacency[i, j] = adjacency[j, i] = 1.0
    return adjacency - np.diag(adjacency.sum(axis=1))


def heat_cycle(n: int) -> Semigroup:
    """Heat semigroup of the n-cycle graph Laplacian on n weight-1 atoms."""
    if int(n) != n or n < 2:
        raise FamilySpecError(f"heat_cycle needs an integer n >= 2, got {n!r}")
    n = int(n)
    shape = AlgebraShape.diagonal(n)
    generator = Superoperator(shape, _cycle_laplacian(n))
    return make_semigroup([generator], 1, f"heat_cycle({n})", {"family": "heat_cycle", "n": n})


def is_conditionally_negative_definite(q: np.ndarray, tol: float = 1e-9) -> bool:
    """-q restricted to the orthocomplement of the all-ones vector is PSD."""
    n = q.shape[0]
    proj = np.eye(n) - np.ones((n, n)) / n
    restricted = proj @ (-q) @ proj
    scale = max(1.0, float(np.abs(q).max(initial=0.0)))
    return float(la.eigvalsh(restricted)[0]) >= -tol * scale


def schur_generator(q: Any, weight: float = 1.0) -> Superoperator:
    """Generator x -> -q (Schur product) x on M_n."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise FamilySpecError(f"schur needs a square matrix q, got shape {q.shape}")
    if not np.allclose(q, q.T, atol=1e-12):
        raise FamilySpecError("schur needs a symmetric q")
    if np.any(np.abs(np.diag(q)) > 1e-12):
        raise FamilySpecError("schur needs q with zero diagonal")
    if not is_conditionally_negative_definite(q):
        raise FamilySpecError("schur needs q conditionally negative definite")
    shape = AlgebraShape.matrix(q.shape[0], weight)
    # E_ij is an eigenvector with eigenvalue -q_ij in the row-major basis
    return Superoperator(shape, np.diag(-q.ravel()))


def schur(q: Any, weight: float = 1.0) -> Semigroup:
    """Schur-multiplier semigroup T_u(x) = exp(-u q) (entrywise) x."""
    generator = schur_generator(q, weight)
    q = np.asarray(q, dtype=float)
    return make_semigroup([generator], 1, f"schur(n={q.shape[0]})",
                          {"family": "schur", "q": q.tolist(), "weight": weight})


def _check_substochastic(m: Any) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise FamilySpecError(f"substochastic needs a square matrix, got shape {m.shape}")
    tol = TOLERANCES.ds
    if np.any(m < 0):
        raise FamilySpecError("substochastic needs a nonnegative matrix")
    if np.any(m.sum(axis=1) > 1 + tol) or np.any(m.sum(axis=0) > 1 + tol):
        raise FamilySpecError("substochastic needs row and column sums <= 1")
    return m


def substochastic(m: Any) -> Semigroup:
    """Semigroup exp(u (M - I)) acting on column vectors of a diagonal algebra."""
    m = _check_substochastic(m)
    n = m.shape[0]
    generator = Superoperator(AlgebraShape.diagonal(n), m - np.eye(n))
    return make_semigroup([generator], 1, f"substochastic(n={n})",
                          {"family": "substochastic", "matrix": m.tolist()})


def trivial(shape: AlgebraShape, d: int = 1) -> Semigroup:
    """Identity semigroup: every generator is 0."""
    if d < 1:
        raise FamilySpecError(f"trivial needs d >= 1, got {d}")
    return make_semigroup([Superoperator.zero(shape)] * d, d, "trivial",
                          {"family": "trivial", "algebra": shape.to_list(), "d": d})


def _direct_sum(matrices: Sequence[np.ndarray]) -> np.ndarray:
    return la.block_diag(*matrices)


def tensor_d(families: Sequence[Semigroup], mode: str = "sum") -> Semigroup:
    """
    Combine one-or-more-parameter families acting on disjoint structure.

    mode="sum": the algebra is the direct sum of the factors' algebras and each
    generator acts on its own summand (zero elsewhere).
    mode="product": factors must be commutative; the algebra is the tensor
    product and the generators are L (x) I and I (x) L'.
    """
    families = list(families)
    if not families:
        raise FamilySpecError("tensor_d needs at least one factor")
    spec = {"family": "tensor_d", "mode": mode, "factors": [f.spec for f in families]}
    generators: List[Superoperator] = []

    if mode == "sum":
        shape = AlgebraShape(tuple(b for f in families for b in f.shape.blocks))
        zeros = [np.zeros((f.shape.hs_dimension,) * 2) for f in families]
        for idx, f in enumerate(families):
            for L in f.generators:
                parts = list(zeros)
                parts[idx] = L.matrix
                generators.append(Superoperator(shape, _direct_sum(parts)))
    elif mode == "product":
        for f in families:
            if not is_commutative(f):
                raise FamilySpecError("tensor_d(mode='product') needs commutative factors")
        weights = np.array([1.0])
        for f in families:
            weights = np.kron(weights, np.array(f.shape.weights))
        shape = AlgebraShape.diagonal(weights.size, weights.tolist())
        sizes = [f.shape.hs_dimension for f in families]
        for idx, f in enumerate(families):
            left = int(np.prod(sizes[:idx]))
            right = int(np.prod(sizes[idx + 1:]))
            for L in f.generators:
                matrix = np.kron(np.kron(np.eye(left), L.matrix), np.eye(right))
                generators.append(Superoperator(shape, matrix))
    else:
        raise FamilySpecError(f"Unknown tensor_d mode '{mode}' (expected 'sum' or 'product')")

    name = ("+" if mode == "sum" else "x").join(f.name for f in families)
    return make_semigroup(generators, len(generators), name, spec)


def _require(spec: Mapping[str, Any], key: str) -> Any:
    if key not in spec:
        raise FamilySpecError(f"Family '{spec.get('family')}' needs '{key}'")
    return spec[key]


def _complex_matrix(data: Any) -> np.ndarray:
    """Nested real lists, or nested [re, im] pairs."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != 2:
        raise FamilySpecError(f"Generator matrix must be 2-D, got shape {arr.shape}")
    return arr


def _custom(spec: Mapping[str, Any]) -> Semigroup:
    shape = AlgebraShape.from_spec(_require(spec, "algebra"))
    generators = [Superoperator(shape, _complex_matrix(g)) for g in _require(spec, "generators")]
    return make_semigroup(generators, len(generators), "custom", dict(spec))


FAMILIES: Dict[str, Callable[[Mapping[str, Any]], Semigroup]] = {
    "heat_cycle": lambda spec: heat_cycle(_require(spec, "n")),
    "schur": lambda spec: schur(_require(spec, "q"), float(spec.get("weight", 1.0))),
    "substochastic": lambda spec: substochastic(_require(spec, "matrix")),
    "trivial": lambda spec: trivial(AlgebraShape.from_spec(_require(spec, "algebra")), int(spec.get("d", 1))),
    "tensor_d": lambda spec: tensor_d(
        [make_family(f) for f in _require(spec, "factors")], spec.get("mode", "sum")),
    "custom": _custom,
}


def make_family(spec: Mapping[str, Any]) -> Semigroup:
    """
    Build a certified built-in semigroup from its scenario spec.

    Examples:
        {"family": "heat_cycle", "n": 4}
        {"family": "schur", "q": [[0, 1], [1, 0]]}
        {"family": "tensor_d", "mode": "product", "factors": [...]}
        {"family": "custom", "algebra": [[1, 1], [1, 1]], "generators": [[[-1, 1], [1, -1]]]}
    """
    if not isinstance(spec, Mapping) or "family" not in spec:
        raise FamilySpecError(f"Family spec needs a 'family' key, got {spec!r}")
    builder = FAMILIES.get(spec["family"])
    if builder is None:
        raise FamilySpecError(f"Unknown family '{spec['family']}'. Known: {sorted(FAMILIES)}")
    try:
        return builder(spec)
    except (TypeError, ValueError) as e:
        if isinstance(e, InvalidParameterError):
            raise
        raise FamilySpecError(f"Invalid {spec['family']} spec: {e}")


# ----------------------------------------------------------------------
# built-in maps


def cyclic_shift(n: int) -> Superoperator:
    """Permutation channel x_j -> x_{j-1 mod n} on n weight-1 atoms."""
    if int(n) != n or n < 1:
        raise FamilySpecError(f"cyclic_shift needs n >= 1, got {n!r}")
    n = int(n)
    return Superoperator(AlgebraShape.diagonal(n), np.roll(np.eye(n), 1, axis=0))


def substochastic_map(m: Any) -> Superoperator:
    """Column-vector action of a nonnegative matrix on a diagonal algebra (not validated)."""
    m = np.asarray(m, dtype=float)
    return Superoperator(AlgebraShape.diagonal(m.shape[0]), m)


def scaling_map(shape: AlgebraShape, c: complex) -> Superoperator:
    """x -> c x."""
    return c * Superoperator.identity(shape)


def map_from_spec(spec: Mapping[str, Any]) -> Superoperator:
    """
    Examples:
        {"map": "cyclic_shift", "n": 4}
        {"map": "substochastic", "matrix": [[0.5, 0.5], [0.5, 0.5]]}
        {"map": "scaling", "c": 2, "algebra": [[1, 1], [1, 1]]}
        {"map": "propagator", "semigroup": {"family": "heat_cycle", "n": 3}, "u": [0.5]}
        {"map": "matrix", "algebra": [[2, 1]], "matrix": [[...]]}
    """
    if not isinstance(spec, Mapping) or "map" not in spec:
        raise FamilySpecError(f"Map spec needs a 'map' key, got {spec!r}")
    kind = spec["map"]
    try:
        if kind == "cyclic_shift":
            return cyclic_shift(spec["n"])
        if kind == "substochastic":
            return substochastic_map(spec["matrix"])
        if kind == "scaling":
            return scaling_map(AlgebraShape.from_spec(spec["algebra"]), complex(spec["c"]))
        if kind == "propagator":
            return make_family(spec["semigroup"]).propagator(spec["u"])
        if kind == "matrix":
            return Superoperator(AlgebraShape.from_spec(spec["algebra"]), _complex_matrix(spec["matrix"]))
    except KeyError as e:
        raise FamilySpecError(f"Map '{kind}' needs {e}")
    raise FamilySpecError(f"Unknown map '{kind}'")


def builtin_suite() -> Dict[str, Semigroup]:
    """Named built-in semigroups exercised by the acceptance suite."""
    q_abs = [[abs(j - k) for k in range(3)] for j in range(3)]
    m_sub = [[0.5, 0.25, 0.0], [0.25, 0.25, 0.25], [0.0, 0.25, 0.5]]
    mixed = AlgebraShape(((1, 1.0), (2, 0.5)))
    return {
        "heat_cycle_2": heat_cycle(2),
        "heat_cycle_5": heat_cycle(5),
        "schur_abs_3": schur(q_abs),
        "substochastic_3": substochastic(m_sub),
        "trivial_mixed": trivial(mixed),
        "tensor_sum_pair": tensor_d([heat_cycle(3), schur([[0.0, 1.0], [1.0, 0.0]])], "sum"),
        "tensor_product_pair": tensor_d([heat_cycle(2), heat_cycle(3)], "product"),
        "tensor_product_triple": tensor_d([heat_cycle(2), heat_cycle(2), substochastic(m_sub)], "product"),
    }


def is_commutative(sg: Semigroup) -> bool:
    """True when the underlying algebra is commutative, i.e. every block is 1x1."""
    return sg.shape.is_diagonal
