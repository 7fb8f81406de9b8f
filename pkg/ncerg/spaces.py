"""
ncerg Symmetric Spaces
Fully symmetric norms on operators and step functions (L^p, L1+M, L1 cap M,
Orlicz/Luxemburg, Lorentz, Marcinkiewicz) and the space-trait predicates
(order continuity, membership of the unit, inclusion in R_tau).

Every norm is evaluated through the rearrangement mu(x), except `norm_p` on
operators, which sums weighted singular values directly.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ncerg.algebra import Operator
from ncerg.config import TOLERANCES
from ncerg.exceptions import (
    InvalidDescriptorError,
    InvalidOrliczError,
    InvalidParameterError,
    InvalidPhiError,
)
from ncerg.rearrangement import StepFunction, cumulative, mu, partial_integral

logger = logging.getLogger(__name__)

Element = Union[Operator, StepFunction]

# convexity / concavity sample grid
_LOG_GRID = np.logspace(-6, 6, 256)


def _as_step(x: Element) -> StepFunction:
    return mu(x) if isinstance(x, Operator) else x


def _is_zero(x: Element) -> bool:
    if isinstance(x, Operator):
        return x.norm_inf == 0.0
    return x.is_zero


class _InfiniteTraceUnit:
    """Symbolic unit 1 of an algebra with tau(1) = inf; mu_t(1) = 1 for all t."""

    def __repr__(self) -> str:
        return "INFINITE_TRACE_UNIT"


INFINITE_TRACE_UNIT = _InfiniteTraceUnit()


@dataclass(frozen=True)
class SpaceTraits:
    order_continuous: bool
    contains_unit_when_trace_infinite: bool

    @property
    def subset_of_R_tau(self) -> bool:
        # E is contained in R_tau iff 1 is not in E
        return not self.contains_unit_when_trace_infinite

    def to_dict(self) -> Dict[str, bool]:
        return {
            "order_continuous": self.order_continuous,
            "contains_unit_when_trace_infinite": self.contains_unit_when_trace_infinite,
            "subset_of_R_tau": self.subset_of_R_tau,
        }


# ----------------------------------------------------------------------
# Orlicz functions


class OrliczFunction:
    """
    Convex Phi on [0, inf) with Phi(0) = 0 and Phi(u) > 0 for u > 0.

    Usage:
        phi = OrliczFunction.power(3)
        phi = OrliczFunction.exp_minus_one()
        phi = OrliczFunction.piecewise_linear([(1, 1), (2, 4)], delta2_at_zero=True,
                                              delta2_at_infinity=True)
    """

    def __init__(
        self,
        name: str,
        evaluator: Callable[[np.ndarray], np.ndarray],
        delta2_at_zero: bool,
        delta2_at_infinity: bool,
        params: Optional[Dict[str, Any]] = None,
    ):
        self.name = name
        self._evaluator = evaluator
        self.delta2_at_zero = bool(delta2_at_zero)
        self.delta2_at_infinity = bool(delta2_at_infinity)
        self.params = dict(params or {})
        self.validated = False
        self._failure: Optional[str] = None

    def __call__(self, u: Union[float, np.ndarray]) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self._evaluator(np.asarray(u, dtype=float))

    @classmethod
    def power(cls, p: float) -> "OrliczFunction":
        """Phi(u) = u^p, p >= 1; Delta_2 at 0 and at infinity."""
        if not p >= 1:
            raise InvalidOrliczError(f"Power Orlicz function needs p >= 1, got {p}")
        return cls("power", lambda u: u ** p, True, True, {"p": float(p)}).validate()

    @classmethod
    def exp_minus_one(cls) -> "OrliczFunction":
        """Phi(u) = e^u - 1; Delta_2 at 0 but not at infinity."""
        return cls("exp_minus_one", np.expm1, True, False).validate()

    @classmethod
    def piecewise_linear(
        cls,
        points: Sequence[Sequence[float]],
        delta2_at_zero: bool,
        delta2_at_infinity: bool,
    ) -> "OrliczFunction":
        """
        Linear interpolation through (0, 0) and `points`, extended with the last slope.

        Delta_2 flags are not inferred from finitely many points and must be given.
        """
        us = np.array([0.0] + [float(p[0]) for p in points])
        vs = np.array([0.0] + [float(p[1]) for p in points])
        if us.size < 2 or np.any(np.diff(us) <= 0):
            raise InvalidOrliczError("Orlicz breakpoints must be positive and increasing")
        tail = (vs[-1] - vs[-2]) / (us[-1] - us[-2])

        def evaluate(u: np.ndarray) -> np.ndarray:
            inside = np.interp(u, us, vs)
            return np.where(u > us[-1], vs[-1] + tail * (u - us[-1]), inside)

        params = {"points": [[float(a), float(b)] for a, b in zip(us[1:], vs[1:])]}
        return cls("piecewise_linear", evaluate, delta2_at_zero, delta2_at_infinity, params).validate()

    def validate(self) -> "OrliczFunction":
        """Check Phi(0) = 0, positivity and convexity on a log grid over [1e-6, 1e6]."""
        failure = None
        if float(self(0.0)) != 0.0:
            failure = "Phi(0) must be 0"
        else:
            values = self(_LOG_GRID)
            finite = np.isfinite(values)
            if np.any(values <= 0):
                failure = "Phi(u) must be > 0 for u > 0"
            elif finite.sum() < 3:
                failure = "Phi overflows on most of the sample grid"
            else:
                u, v = _LOG_GRID[finite], values[finite]
                slopes = np.diff(v) / np.diff(u)
                drops = slopes[:-1] - slopes[1:]
                if np.any(drops > 1e-9 * np.maximum(1.0, np.abs(slopes[:-1]))):
                    failure = "Phi is not convex on the sample grid"
        self._failure = failure
        self.validated = failure is None
        if failure:
            raise InvalidOrliczError(f"{self.name}: {failure}")
        return self

    def require_valid(self) -> None:
        if not self.validated:
            raise InvalidOrliczError(
                f"{self.name}: {self._failure or 'Orlicz function was never validated'}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, **self.params,
                "delta2_at_zero": self.delta2_at_zero,
                "delta2_at_infinity": self.delta2_at_infinity}

    def __repr__(self) -> str:
        return f"OrliczFunction({self.name}, {self.params})"


# ----------------------------------------------------------------------
# concave functions


class ConcavePhi:
    """
    Concave phi on [0, inf) with phi(0) = 0 and phi(t) > 0 for t > 0.

    Attributes:
        phi_at_zero_plus: lim phi(t) as t -> 0+ (a jump at 0 is allowed)
        phi_at_infinity: lim phi(t) as t -> inf (math.inf when unbounded)
        slope_at_infinity: lim phi(t)/t as t -> inf
        slope_at_zero: lim phi(t)/t as t -> 0+ (math.inf when phi(0+) > 0 or phi'(0) = inf)
        breakpoints: kinks of a piecewise-linear phi
        piecewise_linear: True when phi is linear between breakpoints
    """

    def __init__(
        self,
        name: str,
        evaluator: Callable[[np.ndarray], np.ndarray],
        phi_at_zero_plus: float,
        phi_at_infinity: float,
        slope_at_infinity: float,
        slope_at_zero: float,
        breakpoints: Sequence[float] = (),
        piecewise_linear: bool = False,
        params: Optional[Dict[str, Any]] = None,
    ):
        self.name = name
        self._evaluator = evaluator
        self.phi_at_zero_plus = float(phi_at_zero_plus)
        self.phi_at_infinity = float(phi_at_infinity)
        self.slope_at_infinity = float(slope_at_infinity)
        self.slope_at_zero = float(slope_at_zero)
        self.breakpoints = tuple(float(b) for b in breakpoints)
        self.piecewise_linear = piecewise_linear
        self.params = dict(params or {})
        self.validated = False
        self._failure: Optional[str] = None

    def __call__(self, t: Union[float, np.ndarray]) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.where(t > 0, self._evaluator(np.maximum(t, 0.0)), 0.0)

    @classmethod
    def power(cls, alpha: float) -> "ConcavePhi":
        """phi(t) = t^alpha, 0 < alpha <= 1."""
        if not 0 < alpha <= 1:
            raise InvalidPhiError(f"Power concave function needs 0 < alpha <= 1, got {alpha}")
        linear = alpha == 1
        return cls(
            "power", lambda t: t ** alpha,
            phi_at_zero_plus=0.0, phi_at_infinity=math.inf,
            slope_at_infinity=1.0 if linear else 0.0,
            slope_at_zero=1.0 if linear else math.inf,
            piecewise_linear=linear, params={"alpha": float(alpha)},
        ).validate()

    @classmethod
    def min_linear(cls, c: float = 1.0) -> "ConcavePhi":
        """phi(t) = min(t, c)."""
        if not c > 0:
            raise InvalidPhiError(f"min(t, c) needs c > 0, got {c}")
        return cls(
            "min_linear", lambda t: np.minimum(t, c),
            phi_at_zero_plus=0.0, phi_at_infinity=float(c),
            slope_at_infinity=0.0, slope_at_zero=1.0,
            breakpoints=(c,), piecewise_linear=True, params={"c": float(c)},
        ).validate()

    @classmethod
    def log1p(cls) -> "ConcavePhi":
        """phi(t) = log(1 + t)."""
        return cls(
            "log1p", np.log1p,
            phi_at_zero_plus=0.0, phi_at_infinity=math.inf,
            slope_at_infinity=0.0, slope_at_zero=1.0,
        ).validate()

    @classmethod
    def piecewise_linear(
        cls,
        points: Sequence[Sequence[float]],
        zero_plus: float = 0.0,
        tail_slope: float = 0.0,
    ) -> "ConcavePhi":
        """
        Linear interpolation through (0+, zero_plus) and `points`, then slope `tail_slope`.

        A positive zero_plus is a jump at 0: phi(0) = 0 < phi(0+).
        """
        ts = np.array([0.0] + [float(p[0]) for p in points])
        vs = np.array([float(zero_plus)] + [float(p[1]) for p in points])
        if ts.size < 2 or np.any(np.diff(ts) <= 0):
            raise InvalidPhiError("Concave breakpoints must be positive and increasing")
        slopes = np.diff(vs) / np.diff(ts)
        if tail_slope < 0 or np.any(slopes < 0):
            raise InvalidPhiError("A positive concave function on [0, inf) is non-decreasing")
        if np.any(np.diff(np.append(slopes, tail_slope)) > 1e-12 * max(1.0, float(np.max(slopes)))):
            raise InvalidPhiError("Slopes of a concave function must be non-increasing")

        def evaluate(t: np.ndarray) -> np.ndarray:
            inside = np.interp(t, ts, vs)
            return np.where(t > ts[-1], vs[-1] + tail_slope * (t - ts[-1]), inside)

        return cls(
            "piecewise_linear", evaluate,
            phi_at_zero_plus=zero_plus,
            phi_at_infinity=math.inf if tail_slope > 0 else float(vs[-1]),
            slope_at_infinity=tail_slope,
            slope_at_zero=math.inf if zero_plus > 0 else float(slopes[0]),
            breakpoints=tuple(ts[1:]), piecewise_linear=True,
            params={"points": [[float(a), float(b)] for a, b in zip(ts[1:], vs[1:])],
                    "zero_plus": float(zero_plus), "tail_slope": float(tail_slope)},
        ).validate()

    def validate(self) -> "ConcavePhi":
        """Check phi(0) = 0, positivity, and concavity on a log grid over [1e-6, 1e6]."""
        failure = None
        values = self(_LOG_GRID)
        if float(self(0.0)) != 0.0:
            failure = "phi(0) must be 0"
        elif np.any(~np.isfinite(values)) or np.any(values <= 0):
            failure = "phi(t) must be finite and > 0 for t > 0"
        elif self.slope_at_infinity < 0:
            failure = "slope_at_infinity must be >= 0"
        else:
            slopes = np.diff(values) / np.diff(_LOG_GRID)
            rises = slopes[1:] - slopes[:-1]
            if np.any(rises > 1e-9 * np.maximum(1.0, np.abs(slopes[:-1]))):
                failure = "phi is not concave on the sample grid"
        self._failure = failure
        self.validated = failure is None
        if failure:
            raise InvalidPhiError(f"{self.name}: {failure}")
        return self

    def require_valid(self) -> None:
        if not self.validated:
            raise InvalidPhiError(f"{self.name}: {self._failure or 'phi was never validated'}")

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, **self.params}

    def __repr__(self) -> str:
        return f"ConcavePhi({self.name}, {self.params})"


# ----------------------------------------------------------------------
# norms


def norm_p(x: Element, p: float) -> float:
    """
    Schatten-type L^p norm tau(|x|^p)^(1/p); p = inf gives ||x||_inf.

    Raises:
        InvalidParameterError: if p < 1
    """
    if not p >= 1:
        raise InvalidParameterError(f"norm_p needs p >= 1, got {p}")
    if isinstance(x, Operator):
        values, weights = x.weighted_singular_values()
    else:
        values, weights = x.values, x.lengths
    if values.size == 0 or not np.any(values > 0):
        return 0.0
    if math.isinf(p):
        return float(values.max())
    # factor out the maximum to keep large p finite
    top = values.max()
    return float(top * np.dot(weights, (values / top) ** p) ** (1.0 / p))


def norm_l1_plus_linf(x: Element) -> float:
    """||x||_{L1+M} = integral_0^1 mu_t(x) dt."""
    return partial_integral(_as_step(x), 1.0)


def norm_l1_cap_linf(x: Element) -> float:
    """||x||_{L1 cap M} = max(||x||_1, ||x||_inf)."""
    return max(norm_p(x, 1.0), norm_p(x, math.inf))


def luxemburg_norm(x: Element, phi: OrliczFunction) -> float:
    """
    Luxemburg norm inf{a > 0 : tau(Phi(|x|/a)) <= 1}.

    The modular a -> tau(Phi(|x|/a)) is continuous and non-increasing, so for
    x != 0 the infimum is the root of modular(a) = 1, located with brentq after
    geometric bracketing from a = ||x||_inf.
    """
    phi.require_valid()
    if _is_zero(x):
        return 0.0
    f = _as_step(x)
    lengths, values = f.lengths, f.values

    def modular(a: float) -> float:
        return float(np.dot(lengths, phi(values / a)))

    a = f.sup
    lo = hi = a
    if modular(a) > 1.0:
        while modular(hi) > 1.0:
            lo, hi = hi, hi * 2.0
    else:
        while modular(lo) <= 1.0:
            hi, lo = lo, lo / 2.0
    # overflowed lower end: pull it in until the modular is finite
    while not np.isfinite(modular(lo)):
        mid = math.sqrt(lo * hi)
        if modular(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    if modular(hi) == 1.0:
        return hi
    root = brentq(lambda s: modular(s) - 1.0, lo, hi,
                  xtol=TOLERANCES.luxemburg_xtol * hi, rtol=1e-14, maxiter=500)
    logger.debug("luxemburg_norm(%s): a* = %.15g, modular = %.3e", phi.name, root, modular(root))
    return float(root)


def lorentz_norm(x: Element, phi: ConcavePhi) -> float:
    """||x||_Lambda_phi = integral mu_t(x) dphi(t), summed exactly over the knots of mu."""
    phi.require_valid()
    if _is_zero(x):
        return 0.0
    f = _as_step(x)
    ends = np.concatenate(([0.0], f.endpoints))
    increments = np.diff(phi(ends))
    return float(np.dot(f.values, increments))


def marcinkiewicz_norm(x: Element, phi: ConcavePhi) -> float:
    """
    ||x||_M_phi = sup_{s > 0} K(s) / phi(s) with K(s) = integral_0^s mu_t(x) dt.

    K is linear between knots of mu. Candidates are the s -> 0+ limit, every knot
    of mu and every kink of phi. On a piecewise-linear phi the ratio is monotone
    per segment. For smooth phi a segment is searched with a bounded scalar
    optimizer (xatol 1e-10) whenever the ratio rises at its left end and falls
    at its right end. Beyond the support K is constant, so the supremum is
    attained on [0, support].
    """
    phi.require_valid()
    if _is_zero(x):
        return 0.0
    f = _as_step(x)
    support = f.support
    kinks = [b for b in phi.breakpoints if 0 < b < support]
    points = np.union1d(f.endpoints, np.array(kinks, dtype=float))

    best = 0.0
    if phi.phi_at_zero_plus == 0.0 and np.isfinite(phi.slope_at_zero):
        best = f.sup / phi.slope_at_zero
    ratios = cumulative(f, points) / phi(points)
    best = max(best, float(np.max(ratios)))

    if not phi.piecewise_linear:
        tol = TOLERANCES.marcinkiewicz_xtol

        def ratio(s: float) -> float:
            return float(cumulative(f, s)[0] / phi(s))

        for a, b in zip(points[:-1], points[1:]):
            # an interior maximum needs the ratio rising at a and falling at b
            step = 1e-6 * (b - a)
            if ratio(a + step) <= ratio(a) or ratio(b - step) <= ratio(b):
                continue
            result = minimize_scalar(lambda s: -ratio(s), bounds=(a, b),
                                     method="bounded", options={"xatol": tol})
            best = max(best, -float(result.fun))
    return best


# ----------------------------------------------------------------------
# descriptors


class NormDescriptor(ABC):
    """A fully symmetric norm together with its space traits."""

    kind: str = ""

    @abstractmethod
    def norm(self, x: Element) -> float:
        ...

    @abstractmethod
    def traits(self) -> SpaceTraits:
        ...

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        ...

    @property
    def label(self) -> str:
        spec = self.to_dict()
        params = ",".join(f"{k}={v}" for k, v in spec.items() if k != "kind")
        return f"{self.kind}({params})" if params else self.kind

    def __call__(self, x: Element) -> float:
        return self.norm(x)

    def __repr__(self) -> str:
        return f"NormDescriptor<{self.label}>"


class LpNorm(NormDescriptor):
    kind = "lp"

    def __init__(self, p: float):
        if not p >= 1:
            raise InvalidParameterError(f"L^p needs p >= 1, got {p}")
        self.p = float(p)

    def norm(self, x: Element) -> float:
        return norm_p(x, self.p)

    def traits(self) -> SpaceTraits:
        finite = not math.isinf(self.p)
        return SpaceTraits(order_continuous=finite, contains_unit_when_trace_infinite=not finite)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "p": "inf" if math.isinf(self.p) else self.p}


class L1PlusLinfNorm(NormDescriptor):
    kind = "l1+linf"

    def norm(self, x: Element) -> float:
        return norm_l1_plus_linf(x)

    def traits(self) -> SpaceTraits:
        return SpaceTraits(order_continuous=False, contains_unit_when_trace_infinite=True)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class L1CapLinfNorm(NormDescriptor):
    kind = "l1&linf"

    def norm(self, x: Element) -> float:
        return norm_l1_cap_linf(x)

    def traits(self) -> SpaceTraits:
        return SpaceTraits(order_continuous=False, contains_unit_when_trace_infinite=False)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class OrliczNorm(NormDescriptor):
    kind = "orlicz"

    def __init__(self, phi: OrliczFunction):
        self.phi = phi

    def norm(self, x: Element) -> float:
        return luxemburg_norm(x, self.phi)

    def traits(self) -> SpaceTraits:
        self.phi.require_valid()
        # with tau(1) = inf the modular of 1 diverges for every a
        return SpaceTraits(
            order_continuous=self.phi.delta2_at_zero and self.phi.delta2_at_infinity,
            contains_unit_when_trace_infinite=False,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "phi": self.phi.to_dict()}


class LorentzNorm(NormDescriptor):
    kind = "lorentz"

    def __init__(self, phi: ConcavePhi):
        self.phi = phi

    def norm(self, x: Element) -> float:
        return lorentz_norm(x, self.phi)

    def traits(self) -> SpaceTraits:
        self.phi.require_valid()
        bounded = np.isfinite(self.phi.phi_at_infinity)
        return SpaceTraits(
            order_continuous=self.phi.phi_at_zero_plus == 0.0 and not bounded,
            contains_unit_when_trace_infinite=bool(bounded),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "phi": self.phi.to_dict()}


class MarcinkiewiczNorm(NormDescriptor):
    kind = "marcinkiewicz"

    def __init__(self, phi: ConcavePhi):
        self.phi = phi

    def norm(self, x: Element) -> float:
        return marcinkiewicz_norm(x, self.phi)

    def traits(self) -> SpaceTraits:
        self.phi.require_valid()
        # phi(0+) > 0 and phi(inf) < inf make M_phi equal to L1 with an equivalent norm
        equals_l1 = self.phi.phi_at_zero_plus > 0 and np.isfinite(self.phi.phi_at_infinity)
        return SpaceTraits(
            order_continuous=bool(equals_l1),
            contains_unit_when_trace_infinite=self.phi.slope_at_infinity > 0,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "phi": self.phi.to_dict()}


def space_traits(descriptor: NormDescriptor) -> SpaceTraits:
    """
    Traits of the symmetric space a descriptor names.

    Raises:
        InvalidDescriptorError: if the descriptor's Phi / phi was never validated
    """
    if not isinstance(descriptor, NormDescriptor):
        raise InvalidDescriptorError(f"Not a norm descriptor: {descriptor!r}")
    return descriptor.traits()


def in_R_tau(f: Union[StepFunction, Operator, _InfiniteTraceUnit]) -> bool:
    """
    Whether mu_t(f) -> 0 as t -> inf.

    Always true for step functions and operators (finite support); false for
    the symbolic unit of an infinite-trace algebra.
    """
    if f is INFINITE_TRACE_UNIT:
        return False
    f = _as_step(f)
    return bool(np.isfinite(f.support))


# ----------------------------------------------------------------------
# scenario syntax


_ORLICZ_BUILTINS = {
    "power": lambda spec: OrliczFunction.power(float(spec["p"])),
    "exp_minus_one": lambda spec: OrliczFunction.exp_minus_one(),
    "piecewise_linear": lambda spec: OrliczFunction.piecewise_linear(
        spec["points"], bool(spec["delta2_at_zero"]), bool(spec["delta2_at_infinity"])),
}

_PHI_BUILTINS = {
    "power": lambda spec: ConcavePhi.power(float(spec["alpha"])),
    "sqrt": lambda spec: ConcavePhi.power(0.5),
    "identity": lambda spec: ConcavePhi.power(1.0),
    "min_linear": lambda spec: ConcavePhi.min_linear(float(spec.get("c", 1.0))),
    "log1p": lambda spec: ConcavePhi.log1p(),
    "piecewise_linear": lambda spec: ConcavePhi.piecewise_linear(
        spec["points"], float(spec.get("zero_plus", 0.0)), float(spec.get("tail_slope", 0.0))),
}


def _build(table: Mapping[str, Callable], spec: Any, what: str, error: type) -> Any:
    if isinstance(spec, str):
        spec = {"name": spec}
    if not isinstance(spec, Mapping) or "name" not in spec:
        raise error(f"{what} spec needs a 'name', got {spec!r}")
    builder = table.get(spec["name"])
    if builder is None:
        raise error(f"Unknown {what} '{spec['name']}'. Known: {sorted(table)}")
    try:
        return builder(spec)
    except KeyError as e:
        raise error(f"{what} '{spec['name']}' is missing parameter {e}")


def orlicz_from_spec(spec: Any) -> OrliczFunction:
    return _build(_ORLICZ_BUILTINS, spec, "Orlicz function", InvalidOrliczError)


def phi_from_spec(spec: Any) -> ConcavePhi:
    return _build(_PHI_BUILTINS, spec, "concave function", InvalidPhiError)


def descriptor_from_spec(spec: Mapping[str, Any]) -> NormDescriptor:
    """
    Parse {kind: "lp"|"l1+linf"|"l1&linf"|"orlicz"|"lorentz"|"marcinkiewicz", params...}.

    Examples:
        {"kind": "lp", "p": 2}
        {"kind": "orlicz", "phi": {"name": "power", "p": 3}}
        {"kind": "lorentz", "phi": "sqrt"}
    """
    if not isinstance(spec, Mapping) or "kind" not in spec:
        raise InvalidDescriptorError(f"Norm descriptor needs a 'kind', got {spec!r}")
    kind = spec["kind"]
    if kind == "lp":
        p = spec.get("p")
        if p is None:
            raise InvalidDescriptorError("lp descriptor needs 'p'")
        return LpNorm(math.inf if p in ("inf", "infinity") else float(p))
    if kind == "l1+linf":
        return L1PlusLinfNorm()
    if kind == "l1&linf":
        return L1CapLinfNorm()
    if kind in ("orlicz", "lorentz", "marcinkiewicz"):
        if "phi" not in spec:
            raise InvalidDescriptorError(f"{kind} descriptor needs 'phi'")
        if kind == "orlicz":
            return OrliczNorm(orlicz_from_spec(spec["phi"]))
        phi = phi_from_spec(spec["phi"])
        return LorentzNorm(phi) if kind == "lorentz" else MarcinkiewiczNorm(phi)
    raise InvalidDescriptorError(f"Unknown norm kind '{kind}'")


def standard_descriptors() -> Dict[str, NormDescriptor]:
    """One descriptor per implemented norm family, as used by the lab suites."""
    return {
        "L1": LpNorm(1.0),
        "L2": LpNorm(2.0),
        "Linf": LpNorm(math.inf),
        "L1+M": L1PlusLinfNorm(),
        "L1capM": L1CapLinfNorm(),
        "Orlicz(u^3)": OrliczNorm(OrliczFunction.power(3.0)),
        "Orlicz(e^u-1)": OrliczNorm(OrliczFunction.exp_minus_one()),
        "Lorentz(sqrt)": LorentzNorm(ConcavePhi.power(0.5)),
        "Lorentz(log1p)": LorentzNorm(ConcavePhi.log1p()),
        "Marcinkiewicz(sqrt)": MarcinkiewiczNorm(ConcavePhi.power(0.5)),
        "Marcinkiewicz(min)": MarcinkiewiczNorm(ConcavePhi.min_linear(1.0)),
    }
