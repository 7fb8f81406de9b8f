"""
ncerg Rearrangement
Generalized singular-value function mu_t(x), distribution functions, partial
integrals and Hardy-Littlewood submajorization.

`StepFunction` is the commutative backend: a non-increasing, right-continuous
step function on (0, inf) with finite support. It holds mu(x) for operators and
serves as an element of L^0(0, inf) for function-space examples.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ncerg.algebra import Operator, cluster_sorted, merge_threshold
from ncerg.config import TOLERANCES
from ncerg.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepFunction:
    """
    Canonical step function: value knots[i][1] on [knots[i-1][0], knots[i][0]).

    The first interval starts at 0 and the function vanishes after the last
    endpoint. Construction canonicalizes: zero-length intervals are dropped,
    equal neighbouring values merged and trailing zero values removed.
    """

    knots: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        canonical: List[Tuple[float, float]] = []
        previous_end, previous_value = 0.0, np.inf
        for pair in self.knots:
            try:
                end, value = float(pair[0]), float(pair[1])
            except (TypeError, ValueError, IndexError):
                raise InvalidParameterError(f"Knot must be (right_endpoint, value), got {pair!r}")
            if not (np.isfinite(end) and np.isfinite(value)):
                raise InvalidParameterError(f"Knot {pair!r} is not finite")
            if value < 0:
                raise InvalidParameterError(f"Step function values must be >= 0, got {value}")
            if end < previous_end:
                raise InvalidParameterError(f"Endpoints must increase, got {end} after {previous_end}")
            if end == previous_end:
                continue
            if value > previous_value:
                raise InvalidParameterError(
                    f"Step function must be non-increasing, got {value} after {previous_value}"
                )
            if canonical and canonical[-1][1] == value:
                canonical[-1] = (end, value)
            else:
                canonical.append((end, value))
            previous_end, previous_value = end, value
        while canonical and canonical[-1][1] == 0.0:
            canonical.pop()
        object.__setattr__(self, "knots", tuple(canonical))

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls(())

    @classmethod
    def indicator(cls, length: float, height: float = 1.0) -> "StepFunction":
        """height * chi_[0, length)."""
        return cls(((length, height),))

    @classmethod
    def from_list(cls, pairs: Iterable[Sequence[float]]) -> "StepFunction":
        return cls(tuple(tuple(p) for p in pairs))

    def to_list(self) -> List[List[float]]:
        return [[end, value] for end, value in self.knots]

    @property
    def endpoints(self) -> np.ndarray:
        return np.array([end for end, _ in self.knots], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([value for _, value in self.knots], dtype=float)

    @property
    def lengths(self) -> np.ndarray:
        ends = self.endpoints
        return np.diff(np.concatenate(([0.0], ends)))

    @property
    def support(self) -> float:
        return self.knots[-1][0] if self.knots else 0.0

    @property
    def sup(self) -> float:
        """Value at 0+, i.e. the L^inf norm."""
        return self.knots[0][1] if self.knots else 0.0

    @property
    def is_zero(self) -> bool:
        return not self.knots

    def integral(self) -> float:
        return float(np.dot(self.lengths, self.values)) if self.knots else 0.0

    def scaled(self, c: float) -> "StepFunction":
        if c < 0:
            raise InvalidParameterError(f"Scale factor must be >= 0, got {c}")
        return StepFunction(tuple((end, c * value) for end, value in self.knots))

    def __call__(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        ts = np.asarray(t, dtype=float)
        if np.any(ts < 0):
            raise InvalidParameterError("Step functions are defined on [0, inf)")
        if not self.knots:
            out = np.zeros_like(ts)
        else:
            idx = np.searchsorted(self.endpoints, ts, side="right")
            padded = np.concatenate((self.values, [0.0]))
            out = padded[idx]
        return float(out) if np.ndim(t) == 0 else out


def distribution(x: Operator, lam: float) -> float:
    """
    Distribution function tau{|x| > lam}.

    Strict inequality: a singular value within 1e-12 of lam does not exceed it.
    """
    if lam < 0:
        raise InvalidParameterError(f"distribution needs lam >= 0, got {lam}")
    values, weights = x.weighted_singular_values()
    exceeds = values > lam + TOLERANCES.distribution_boundary
    return float(np.sum(weights[exceeds]))


def mu(x: Operator) -> StepFunction:
    """
    Non-increasing rearrangement mu_t(x) = inf{lam > 0 : tau{|x| > lam} <= t}.

    Singular values of all blocks are merged within the degeneracy threshold
    (weighted mean, so the integral is preserved), sorted descending and laid
    out on consecutive intervals of length equal to their trace weight.
    """
    values, weights = x.weighted_singular_values()
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    threshold = merge_threshold(x.norm_inf)
    merged: List[Tuple[float, float]] = []
    for group in cluster_sorted(values, threshold):
        w = weights[group].sum()
        v = float(np.dot(values[group], weights[group]) / w)
        if values[group][0] <= threshold:
            # a cluster touching zero is the kernel
            v = 0.0
        merged.append((v, float(w)))
    knots, acc = [], 0.0
    for v, w in reversed(merged):
        acc += w
        knots.append((acc, v))
    return StepFunction(tuple(knots))


def _as_step(f: Union[StepFunction, Operator]) -> StepFunction:
    return mu(f) if isinstance(f, Operator) else f


def cumulative(f: StepFunction, s: Union[float, np.ndarray]) -> np.ndarray:
    """Vectorized partial integral over [0, s] for an array of s."""
    ss = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(ss < 0):
        raise InvalidParameterError("partial integrals need s >= 0")
    if f.is_zero:
        return np.zeros_like(ss)
    starts = np.concatenate(([0.0], f.endpoints[:-1]))
    overlap = np.clip(ss[:, None] - starts[None, :], 0.0, f.lengths[None, :])
    return overlap @ f.values


def partial_integral(f: Union[StepFunction, Operator], s: float) -> float:
    """Exact integral of f over [0, s]; concave and non-decreasing in s."""
    if s < 0:
        raise InvalidParameterError(f"partial_integral needs s >= 0, got {s}")
    return float(cumulative(_as_step(f), s)[0])


def hl_leq(
    a: Union[StepFunction, Operator],
    b: Union[StepFunction, Operator],
    tol: Optional[float] = None,
) -> bool:
    """
    Hardy-Littlewood order: integral_0^s a <= integral_0^s b for every s >= 0.

    Both cumulatives are piecewise linear with kinks only at knots, so checking
    s = 0 and every knot of either operand decides the inequality everywhere.
    `x` is submajorized by `y` exactly when hl_leq(mu(x), mu(y)). `tol` is
    relative to the larger integral (default TOLERANCES.submajorization).
    """
    a, b = _as_step(a), _as_step(b)
    points = np.union1d(np.concatenate(([0.0], a.endpoints)), b.endpoints)
    tol = (TOLERANCES.submajorization if tol is None else tol) * (1.0 + max(a.integral(), b.integral()))
    gap = cumulative(a, points) - cumulative(b, points)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("hl_leq: max gap %.3e over %d points", float(gap.max()), points.size)
    return bool(np.all(gap <= tol))
