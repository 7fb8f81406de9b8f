"""
ncerg Averaging
Local ergodic averages A_t(x) = t^-d * integral over [0, t]^d of T_u(x) du,
computed by two independent methods:

    quadrature  tensor Gauss-Legendre rule on [0, t] per axis
    phi1        closed form A_t = prod_i phi1(t L_i), phi1(z) = (e^z - 1) / z

plus the discrete Cesaro averages (1/n) sum_{k<n} T^k(x) and the product
rewriting of A_{n/m} as discrete averages of the steps exp(L_i / m).
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
import scipy.linalg as la
from numpy.polynomial.legendre import leggauss

from ncerg.algebra import Operator
from ncerg.dynamics import Semigroup, Superoperator
from ncerg.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 12
ERROR_ESTIMATE_STEP = 4


@dataclass(frozen=True)
class AveragingMethod:
    """kind is "quadrature" (with an even order >= 2) or "phi1"."""

    kind: str = "phi1"
    order: int = DEFAULT_ORDER
    factorized: bool = True

    def __post_init__(self) -> None:
        if self.kind not in ("quadrature", "phi1"):
            raise InvalidParameterError(f"Unknown averaging method '{self.kind}'")
        if self.kind == "quadrature":
            _check_order(self.order)

    @classmethod
    def quadrature(cls, order: int = DEFAULT_ORDER, factorized: bool = True) -> "AveragingMethod":
        return cls("quadrature", order, factorized)

    @classmethod
    def phi1(cls) -> "AveragingMethod":
        return cls("phi1")

    @classmethod
    def from_spec(cls, spec: Mapping[str, Any]) -> "AveragingMethod":
        """{"method": "quad" | "phi1", "order": int}"""
        method = spec.get("method", "phi1")
        if method in ("quad", "quadrature"):
            return cls.quadrature(int(spec.get("order", DEFAULT_ORDER)), bool(spec.get("factorized", True)))
        if method == "phi1":
            return cls.phi1()
        raise InvalidParameterError(f"Unknown averaging method '{method}' (expected 'quad' or 'phi1')")

    def to_dict(self) -> dict:
        if self.kind == "phi1":
            return {"method": "phi1"}
        return {"method": "quad", "order": self.order, "factorized": self.factorized}


def _check_order(order: Any) -> None:
    if isinstance(order, bool) or int(order) != order or order < 2 or order % 2:
        raise InvalidParameterError(f"Quadrature order must be an even integer >= 2, got {order!r}")


def _check_t(t: float) -> None:
    if not (t > 0 and np.isfinite(t)):
        raise InvalidParameterError(f"Averaging needs finite t > 0, got {t}")


def phi1(m: np.ndarray) -> np.ndarray:
    """phi1(M) read off exp([[M, I], [0, 0]]) (top-right block); phi1(0) = I exactly."""
    n = m.shape[0]
    if not np.any(m):
        return np.eye(n, dtype=complex)
    augmented = np.zeros((2 * n, 2 * n), dtype=complex)
    augmented[:n, :n] = m
    augmented[:n, n:] = np.eye(n)
    return la.expm(augmented)[:n, n:]


def gauss_legendre(order: int, t: float):
    """Nodes on [0, t] and weights summing to 1 (the averaging measure)."""
    x, w = leggauss(order)
    return t * (x + 1.0) / 2.0, w / 2.0


def average_map_phi1(sg: Semigroup, t: float) -> Superoperator:
    """A_t as a map: product over axes of phi1(t L_i)."""
    _check_t(t)
    result = np.eye(sg.shape.hs_dimension, dtype=complex)
    for L in sg.generators:
        result = result @ phi1(t * L.matrix)
    return Superoperator(sg.shape, result)


def average_map_quadrature(
    sg: Semigroup,
    t: float,
    order: int = DEFAULT_ORDER,
    factorized: bool = True,
) -> Superoperator:
    """
    A_t as a map by tensor Gauss-Legendre quadrature over [0, t]^d.

    factorized=True uses exp(sum u_i L_i) = prod exp(u_i L_i) and averages each
    axis separately; factorized=False sums over the full d-dimensional node grid
    (axis-major, node index ascending) as an independent check path.
    """
    _check_t(t)
    _check_order(order)
    nodes, weights = gauss_legendre(int(order), t)
    dim = sg.shape.hs_dimension
    if factorized:
        result = np.eye(dim, dtype=complex)
        for L in sg.generators:
            axis = np.zeros((dim, dim), dtype=complex)
            for s, w in zip(nodes, weights):
                axis = axis + w * la.expm(s * L.matrix)
            result = result @ axis
        return Superoperator(sg.shape, result)

    result = np.zeros((dim, dim), dtype=complex)
    for index in itertools.product(range(len(nodes)), repeat=sg.d):
        u = nodes[list(index)]
        w = float(np.prod(weights[list(index)]))
        result = result + w * la.expm(sg.generator_sum(u))
    return Superoperator(sg.shape, result)


def average_quadrature(
    sg: Semigroup,
    x: Operator,
    t: float,
    order: int = DEFAULT_ORDER,
    factorized: bool = True,
) -> Operator:
    return average_map_quadrature(sg, t, order, factorized).apply(x)


def average_phi1(sg: Semigroup, x: Operator, t: float) -> Operator:
    return average_map_phi1(sg, t).apply(x)


def average_map(sg: Semigroup, t: float, method: AveragingMethod = AveragingMethod()) -> Superoperator:
    if method.kind == "phi1":
        return average_map_phi1(sg, t)
    return average_map_quadrature(sg, t, method.order, method.factorized)


def average(sg: Semigroup, x: Operator, t: float, method: AveragingMethod = AveragingMethod()) -> Operator:
    """A_t(x) with the chosen method."""
    return average_map(sg, t, method).apply(x)


def quadrature_error_estimate(sg: Semigroup, x: Operator, t: float, order: int = DEFAULT_ORDER) -> float:
    """||A^(order)_t(x) - A^(order+4)_t(x)||_inf."""
    coarse = average_quadrature(sg, x, t, order)
    fine = average_quadrature(sg, x, t, order + ERROR_ESTIMATE_STEP)
    estimate = coarse.distance(fine)
    logger.debug("quadrature_error_estimate(t=%g, order=%d): %.3e", t, order, estimate)
    return estimate


def _check_count(name: str, n: Any) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidParameterError(f"{name} must be an integer >= 1, got {n!r}")
    return int(n)


def discrete_average_map(T: Superoperator, n: int) -> Superoperator:
    """(1/n) sum_{k=0}^{n-1} T^k as a map."""
    n = _check_count("n", n)
    power = np.eye(T.shape.hs_dimension, dtype=complex)
    total = np.zeros_like(power)
    for _ in range(n):
        total = total + power
        power = T.matrix @ power
    return Superoperator(T.shape, total / n)


def discrete_average(T: Superoperator, x: Operator, n: int) -> Operator:
    """(1/n) sum_{k=0}^{n-1} T^k(x); n = 1 returns x."""
    n = _check_count("n", n)
    if n == 1:
        return x
    total, term = x, x
    for _ in range(n - 1):
        term = T.apply(term)
        total = total + term
    return total / n


def product_average_e5(
    sg: Semigroup,
    x: Operator,
    n: int,
    m: int,
    order: int = DEFAULT_ORDER,
) -> Operator:
    """
    A_{n/m}(x) rebuilt from unit-cube pieces.

    y_m = integral over [0, 1]^d of T_{v/m}(x) dv (= A_{1/m}(x), by quadrature),
    then the d-fold discrete average n^-d sum_{i in [0, n)^d} S_1^i_1 ... S_d^i_d (y_m)
    with the axis steps S_i = exp(L_i / m).
    """
    n = _check_count("n", n)
    m = _check_count("m", m)
    y = average_quadrature(sg, x, 1.0 / m, order)
    for axis in range(sg.d):
        y = discrete_average(sg.axis_propagator(axis, 1.0 / m), y, n)
    return y
