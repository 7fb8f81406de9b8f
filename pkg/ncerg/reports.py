"""
ncerg Reports
JSON report envelope and CSV tables.

Every report records what produced it: schema, library version, seed, the
scenario hash and the tolerances in force. JSON is written with sorted keys
and CSV with 17 significant digits, so identical runs give identical bytes.
"""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from ncerg import __version__
from ncerg.config import TOLERANCES, Tolerances
from ncerg.exceptions import ScenarioError

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1


def jsonable(obj: Any) -> Any:
    """Plain-JSON view: numpy scalars unwrapped, complex as [re, im], non-finite floats as strings."""
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


class Report:
    """Envelope around one experiment result."""

    def __init__(
        self,
        experiment: str,
        result: Dict[str, Any],
        seed: int,
        scenario_hash: Optional[str] = None,
        tolerances: Optional[Tolerances] = None,
        version: str = __version__,
        schema: int = REPORT_SCHEMA,
    ):
        self.experiment = experiment
        self.result = result
        self.seed = seed
        self.scenario_hash = scenario_hash
        self.tolerances = (tolerances or TOLERANCES).to_dict() if not isinstance(tolerances, dict) else tolerances
        self.version = version
        self.schema = schema

    def to_dict(self) -> Dict[str, Any]:
        return jsonable({
            "schema": self.schema,
            "version": self.version,
            "seed": self.seed,
            "scenario_hash": self.scenario_hash,
            "tolerances": self.tolerances,
            "experiment": self.experiment,
            "result": self.result,
        })

    def to_json(self, pretty: bool = True) -> str:
        """Deterministic JSON text (sorted keys, trailing newline)."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=2 if pretty else None) + "\n"

    @staticmethod
    def from_json(text: str) -> "Report":
        """Parse a report written by to_json()."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioError(f"Invalid report JSON: {e.msg}", line=e.lineno)
        missing = {"schema", "version", "seed", "experiment", "result"} - set(data)
        if missing:
            raise ScenarioError(f"Report is missing {sorted(missing)}")
        return Report(
            experiment=data["experiment"],
            result=data["result"],
            seed=data["seed"],
            scenario_hash=data.get("scenario_hash"),
            tolerances=data.get("tolerances", {}),
            version=data["version"],
            schema=data["schema"],
        )

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        logger.info("wrote report %s", path)
        return path

    def __repr__(self) -> str:
        return f"Report(experiment={self.experiment}, seed={self.seed}, version={self.version})"


def format_cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV table with 17 significant digits per float."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows), encoding="utf-8")
    logger.info("wrote table %s", path)
    return path


def acceptance_table(rows: Sequence[Any]) -> Dict[str, Any]:
    """Result body for a selftest run."""
    return {
        "passed": all(r.passed for r in rows),
        "rows": [r.to_dict() for r in rows],
    }
