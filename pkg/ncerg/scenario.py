"""
ncerg Scenario Files
A scenario is a JSON document naming one experiment together with the algebra,
element, semigroup or map it runs on. Validation happens before dispatch;
unknown keys are rejected with the line they appear on.

    {
      "schema": 1,
      "experiment": "converge",
      "seed": 7,
      "semigroup": {"family": "heat_cycle", "n": 8},
      "element": {"generator": "random_positive", "seed": 3},
      "params": {"norm": {"kind": "lp", "p": 2}, "t_grid": [0.5, 0.25]},
      "output": {"dir": "out", "name": "converge", "csv": true}
    }
"""

import hashlib
import json
import re
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Union

import numpy as np

from ncerg.algebra import (
    AlgebraShape,
    Operator,
    random_contraction,
    random_hermitian,
    random_operator,
    random_positive,
)
from ncerg.exceptions import ScenarioError
from ncerg.experiments import (
    EXPERIMENTS,
    NEEDS_MAP,
    NEEDS_SEMIGROUP,
    allowed_params,
    is_valid_experiment,
)
from ncerg.literals import operator_from_literal

SCHEMA_VERSION = 1
SCENARIO_KEYS = frozenset({"schema", "seed", "algebra", "element", "semigroup", "map", "experiment", "params", "output"})
OUTPUT_KEYS = frozenset({"dir", "name", "csv"})

GENERATORS: Dict[str, Callable[[AlgebraShape, np.random.Generator], Operator]] = {
    "random_positive": random_positive,
    "random_hermitian": random_hermitian,
    "random_operator": random_operator,
    "random_contraction": random_contraction,
    "identity": lambda shape, rng: Operator.identity(shape),
}


def _fail(message: str, key: Optional[str] = None) -> ScenarioError:
    error = ScenarioError(message)
    error.key = key
    return error


def _line_of(text: str, key: str, after: Optional[str] = None) -> Optional[int]:
    start = 0
    if after is not None:
        anchor = re.search(rf'"{re.escape(after)}"\s*:', text)
        if anchor:
            start = anchor.end()
    match = re.compile(rf'"{re.escape(key)}"\s*:').search(text, start)
    if match is None:
        return None
    return text.count("\n", 0, match.start()) + 1


class Scenario:
    """Validated scenario; build with Scenario.parse(), Scenario.load() or Scenario.from_dict()."""

    def __init__(
        self,
        experiment: str,
        seed: Optional[int] = None,
        algebra: Any = None,
        element: Any = None,
        semigroup: Any = None,
        map: Any = None,
        params: Optional[Dict[str, Any]] = None,
        output: Optional[Dict[str, Any]] = None,
        schema: int = SCHEMA_VERSION,
    ):
        self.schema = schema
        self.experiment = experiment.lower()
        self.seed = seed
        self.algebra = algebra
        self.element = element
        self.semigroup = semigroup
        self.map = map
        self.params = dict(params or {})
        self.output = dict(output or {})

    # ------------------------------------------------------------------
    # construction

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> "Scenario":
        """
        Construct and validate a Scenario from a decoded JSON object.

        Raises:
            ScenarioError: unknown keys, wrong schema, unknown experiment or
                missing inputs for the experiment
        """
        if not isinstance(data, Mapping):
            raise _fail("Scenario must be a JSON object")
        for key in data:
            if key not in SCENARIO_KEYS:
                raise _fail(f"Unknown key '{key}'. Allowed: {sorted(SCENARIO_KEYS)}", key)
        if data.get("schema") != SCHEMA_VERSION:
            raise _fail(f"Unsupported schema {data.get('schema')!r}; expected {SCHEMA_VERSION}", "schema")

        experiment = data.get("experiment")
        if not isinstance(experiment, str) or not is_valid_experiment(experiment):
            raise _fail(f"Unknown experiment {experiment!r}. Known: {sorted(EXPERIMENTS)}", "experiment")
        experiment = experiment.lower()

        seed = data.get("seed")
        if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
            raise _fail(f"seed must be a non-negative integer, got {seed!r}", "seed")

        params = data.get("params", {})
        if not isinstance(params, Mapping):
            raise _fail("params must be an object", "params")
        allowed = allowed_params(experiment)
        for key in params:
            if key not in allowed:
                error = _fail(f"Unknown param '{key}' for {experiment}. Allowed: {sorted(allowed)}", key)
                error.after = "params"
                raise error

        output = data.get("output", {})
        if not isinstance(output, Mapping):
            raise _fail("output must be an object", "output")
        for key in output:
            if key not in OUTPUT_KEYS:
                error = _fail(f"Unknown output key '{key}'. Allowed: {sorted(OUTPUT_KEYS)}", key)
                error.after = "output"
                raise error

        discrete = experiment == "maximal" and bool(params.get("discrete", False))
        if experiment != "ds-verify" and "element" not in data:
            raise _fail(f"{experiment} needs an 'element'", "experiment")
        if (experiment in NEEDS_SEMIGROUP or (experiment == "maximal" and not discrete)) and "semigroup" not in data:
            raise _fail(f"{experiment} needs a 'semigroup'", "experiment")
        if (experiment in NEEDS_MAP or discrete) and "map" not in data:
            raise _fail(f"{experiment} needs a 'map'", "experiment")

        return Scenario(
            experiment=experiment,
            seed=seed,
            algebra=data.get("algebra"),
            element=data.get("element"),
            semigroup=data.get("semigroup"),
            map=data.get("map"),
            params=dict(params),
            output=dict(output),
        )

    @staticmethod
    def parse(text: str) -> "Scenario":
        """
        Parse scenario JSON text; errors carry the line of the offending key.

        Raises:
            ScenarioError: invalid JSON or invalid scenario
        """
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"Invalid JSON: {e.msg}", line=e.lineno)
        try:
            return Scenario.from_dict(data)
        except ScenarioError as e:
            key = getattr(e, "key", None)
            if key is None:
                raise
            raise ScenarioError(str(e), line=_line_of(text, key, getattr(e, "after", None))) from None

    @staticmethod
    def load(path: Union[str, Path]) -> "Scenario":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ScenarioError(f"Cannot read scenario {path}: {e.strerror or e}")
        return Scenario.parse(text)

    # ------------------------------------------------------------------
    # serialization

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {"schema": self.schema, "experiment": self.experiment}
        for key in ("seed", "algebra", "element", "semigroup", "map"):
            value = getattr(self, key)
            if value is not None:
                result[key] = value
        if self.params:
            result["params"] = self.params
        if self.output:
            result["output"] = self.output
        return result

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @property
    def hash(self) -> str:
        """sha256 of the canonical JSON form."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def resolve_seed(self, override: Optional[int], default: int) -> int:
        """CLI --seed beats the scenario seed, which beats the settings default."""
        if override is not None:
            return int(override)
        return int(self.seed) if self.seed is not None else int(default)

    def __repr__(self) -> str:
        return f"Scenario(experiment={self.experiment}, hash={self.hash[:12]})"


def build_element(spec: Any, shape: Optional[AlgebraShape], seed: int) -> Operator:
    """
    Element from a literal or a generator spec.

    Generator specs look like {"generator": "random_positive", "seed": 3}; without
    their own seed they draw from the run seed.
    """
    if isinstance(spec, Mapping) and "generator" in spec:
        name = spec["generator"]
        if name not in GENERATORS:
            raise ScenarioError(f"Unknown element generator {name!r}. Known: {sorted(GENERATORS)}")
        if "algebra" in spec:
            shape = AlgebraShape.from_spec(spec["algebra"])
        if shape is None:
            raise ScenarioError("Element generator needs an algebra (from 'algebra', the semigroup or the map)")
        rng = np.random.default_rng(int(spec.get("seed", seed)))
        return GENERATORS[name](shape, rng)
    return operator_from_literal(spec, shape)
