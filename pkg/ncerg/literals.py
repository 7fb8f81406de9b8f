"""
ncerg Literals
Convert between in-memory objects and the literal forms used by scenario files
and the command line.

    operator      {"algebra": [[dim, weight], ...], "blocks": [matrix, ...]}
                  entries are reals or [re, im] pairs; {"diag": [...], "weights": [...]}
                  and bare value lists are diagonal shorthands
    step function "step:END:VALUE,END:VALUE,..."
    descriptor    JSON or "lp:2", "l1+linf", "orlicz:power:3", "lorentz:sqrt", ...
    family        JSON, "heat_cycle:N" or "builtin:NAME"
"""

import json
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from ncerg.algebra import AlgebraShape, Operator
from ncerg.dynamics import Semigroup, builtin_suite, heat_cycle, make_family
from ncerg.exceptions import LiteralParseError, ShapeMismatchError
from ncerg.rearrangement import StepFunction
from ncerg.spaces import NormDescriptor, descriptor_from_spec

STEP_PREFIX = "step:"
DIAG_PREFIX = "diag:"


def _complex_block(block: Any, index: int) -> np.ndarray:
    try:
        arr = np.asarray(block, dtype=float)
    except (TypeError, ValueError):
        raise LiteralParseError(f"Block {index} is not a numeric matrix: {block!r}")
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    raise LiteralParseError(
        f"Block {index} must be a row-major matrix of reals or [re, im] pairs, got shape {arr.shape}"
    )


def _complex_values(values: Any) -> np.ndarray:
    if isinstance(values, (list, tuple)) and any(isinstance(v, complex) for v in values):
        return np.asarray(values, dtype=complex)
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError):
        raise LiteralParseError(f"Diagonal values must be numbers or [re, im] pairs: {values!r}")
    if arr.ndim == 1:
        return arr
    if arr.ndim == 2 and arr.shape[1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    raise LiteralParseError(f"Diagonal values must be a flat list, got shape {arr.shape}")


def _resolve_shape(literal_shape: Optional[AlgebraShape], shape: Optional[AlgebraShape]) -> AlgebraShape:
    if literal_shape is None and shape is None:
        raise LiteralParseError("Operator literal needs an algebra (in the literal or given separately)")
    if literal_shape is not None and shape is not None and literal_shape != shape:
        raise ShapeMismatchError(f"Literal algebra {literal_shape} does not match {shape}")
    return literal_shape or shape


def operator_from_literal(data: Any, shape: Optional[AlgebraShape] = None) -> Operator:
    """
    Build an Operator from its literal.

    Args:
        data: Mapping with "blocks" (and optionally "algebra"), mapping with
            "diag" (and optionally "weights"), or a flat list of diagonal values
        shape: Algebra to use when the literal does not carry one

    Returns:
        Operator instance

    Raises:
        LiteralParseError: malformed literal
        ShapeMismatchError: literal does not fit the algebra
    """
    if isinstance(data, (list, tuple)):
        # a list of matrices is blocks; a list of numbers or [re, im] pairs is a diagonal
        if data and isinstance(data[0], (list, tuple)) and data[0] and isinstance(data[0][0], (list, tuple)):
            data = {"blocks": data}
        else:
            data = {"diag": data}
    if not isinstance(data, Mapping):
        raise LiteralParseError(f"Operator literal must be an object or a list, got {data!r}")

    if "blocks" in data:
        literal_shape = AlgebraShape.from_spec(data["algebra"]) if "algebra" in data else None
        target = _resolve_shape(literal_shape, shape)
        blocks = data["blocks"]
        if not isinstance(blocks, (list, tuple)):
            raise LiteralParseError("'blocks' must be a list of matrices")
        return Operator(target, [_complex_block(b, k) for k, b in enumerate(blocks)])

    if "diag" in data:
        values = _complex_values(data["diag"])
        literal_shape = None
        if "weights" in data:
            literal_shape = AlgebraShape.diagonal(len(values), list(map(float, data["weights"])))
        elif "algebra" in data:
            literal_shape = AlgebraShape.from_spec(data["algebra"])
        elif shape is None:
            literal_shape = AlgebraShape.diagonal(len(values))
        return Operator.diagonal(_resolve_shape(literal_shape, shape), values)

    raise LiteralParseError("Operator literal needs 'blocks' or 'diag'")


def _entry(value: complex) -> List[float]:
    return [float(value.real), float(value.imag)]


def operator_to_literal(x: Operator) -> Dict[str, Any]:
    """Literal form; blocks with zero imaginary part are written as plain reals."""
    blocks = []
    for b in x.blocks:
        if np.all(b.imag == 0):
            blocks.append(b.real.tolist())
        else:
            blocks.append([[_entry(v) for v in row] for row in b])
    return {"algebra": x.shape.to_list(), "blocks": blocks}


def parse_number_list(text: str) -> List[complex]:
    """"1, -2, 0.5+1j" -> [1, -2, 0.5+1j]; reals stay real."""
    out = []
    for token in text.split(","):
        token = token.strip().replace(" ", "")
        if not token:
            continue
        try:
            value = complex(token)
        except ValueError:
            raise LiteralParseError(f"Not a number: {token!r}")
        out.append(value.real if value.imag == 0 else value)
    if not out:
        raise LiteralParseError("Expected a comma-separated list of numbers")
    return out


def step_from_text(text: str) -> StepFunction:
    """"step:1:2,3:0.5" is 2 on [0, 1) and 0.5 on [1, 3)."""
    body = text.strip()
    if body.startswith(STEP_PREFIX):
        body = body[len(STEP_PREFIX):]
    knots = []
    for part in filter(None, (p.strip() for p in body.split(","))):
        pieces = part.split(":")
        if len(pieces) != 2:
            raise LiteralParseError(f"Step knot must be END:VALUE, got {part!r}")
        try:
            knots.append((float(pieces[0]), float(pieces[1])))
        except ValueError:
            raise LiteralParseError(f"Step knot must be numeric, got {part!r}")
    return StepFunction(tuple(knots))


def step_to_text(f: StepFunction) -> str:
    return STEP_PREFIX + ",".join(f"{end:.17g}:{value:.17g}" for end, value in f.knots)


def detect_format(text: str) -> str:
    """
    Auto-detect literal format.

    Returns:
        'json', 'diag' or 'step'
    """
    stripped = text.strip()
    if stripped.startswith("{") or stripped.startswith("["):
        return "json"
    elif stripped.startswith(DIAG_PREFIX):
        return "diag"
    elif stripped.startswith(STEP_PREFIX):
        return "step"
    else:
        raise LiteralParseError(
            "Unable to detect literal format. Must start with '{' or '[' (JSON), 'diag:' or 'step:'"
        )


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise LiteralParseError(f"Invalid JSON literal: {e.msg} (line {e.lineno}, column {e.colno})")


def parse_literal(text: str, shape: Optional[AlgebraShape] = None) -> Union[Operator, StepFunction]:
    """Parse any supported literal into an Operator or a StepFunction."""
    fmt = detect_format(text)
    if fmt == "step":
        return step_from_text(text)
    if fmt == "diag":
        return operator_from_literal({"diag": parse_number_list(text.strip()[len(DIAG_PREFIX):])}, shape)
    return operator_from_literal(_load_json(text), shape)


_PHI_PARAM = {"power": "alpha", "min_linear": "c"}


def descriptor_from_text(text: str) -> NormDescriptor:
    """
    Norm descriptor from JSON or the KIND[:NAME[:PARAM]] shorthand.

    Examples:
        lp:2, lp:inf, l1+linf, l1&linf, orlicz:power:3, orlicz:exp_minus_one,
        lorentz:sqrt, lorentz:power:0.25, marcinkiewicz:min_linear:2
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        return descriptor_from_spec(_load_json(stripped))
    parts = stripped.split(":")
    kind = parts[0].lower()
    if kind == "lp":
        if len(parts) != 2:
            raise LiteralParseError(f"lp shorthand is lp:P, got {text!r}")
        p = parts[1]
        return descriptor_from_spec({"kind": "lp", "p": p if p in ("inf", "infinity") else _float(p)})
    if kind in ("l1+linf", "l1&linf"):
        return descriptor_from_spec({"kind": kind})
    if kind in ("orlicz", "lorentz", "marcinkiewicz"):
        if len(parts) not in (2, 3):
            raise LiteralParseError(f"{kind} shorthand is {kind}:NAME[:PARAM], got {text!r}")
        phi: Dict[str, Any] = {"name": parts[1]}
        if len(parts) == 3:
            key = "p" if kind == "orlicz" else _PHI_PARAM.get(parts[1], "alpha")
            phi[key] = _float(parts[2])
        return descriptor_from_spec({"kind": kind, "phi": phi})
    raise LiteralParseError(f"Unknown norm shorthand {text!r}")


def _float(token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise LiteralParseError(f"Not a number: {token!r}")


def family_from_text(text: str) -> Semigroup:
    """Semigroup from JSON, "heat_cycle:N" or "builtin:NAME"."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return make_family(_load_json(stripped))
    name, _, arg = stripped.partition(":")
    if name == "heat_cycle" and arg:
        try:
            return heat_cycle(int(arg))
        except ValueError:
            raise LiteralParseError(f"heat_cycle shorthand is heat_cycle:N, got {text!r}")
    if name == "builtin":
        suite = builtin_suite()
        if arg not in suite:
            raise LiteralParseError(f"Unknown built-in family {arg!r}. Known: {sorted(suite)}")
        return suite[arg]
    raise LiteralParseError(f"Unknown family shorthand {text!r}")


def weights_from_text(text: Optional[str], n: int) -> Sequence[float]:
    if text is None:
        return [1.0] * n
    weights = parse_number_list(text)
    if any(isinstance(w, complex) for w in weights):
        raise LiteralParseError("Weights must be real")
    if len(weights) != n:
        raise LiteralParseError(f"Expected {n} weights, got {len(weights)}")
    return weights
