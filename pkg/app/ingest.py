# app/ingest.py

"""
Reading counts and simulation grids from files.

Counts are always given in the order x1..x8: the diseased row then the
non-diseased row, and within a row (A+,B+), (A+,B-), (A-,B+), (A-,B-).
For the Weiner data that is ``473,81,29,25,22,44,46,151``.

- CSV: header ``x1,...,x8`` and one data row.
- JSON: ``{"x": [x1, ..., x8]}``.
- Grid JSON: a list of simulation specs (or ``{"grid": [...]}``).
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, List, Optional, Sequence, Union

from pydantic import ValidationError

from app.exceptions import InvalidMethodError, ParseError
from app.operations.method_factory import MethodFactory
from app.schemas.counts import CELL_NAMES, PairedCounts
from app.schemas.simulation import SimulationSpec

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _count(value: Any, source: str, field: str, line: Optional[int] = None) -> int:
    """A nonnegative integer count; bools and fractional values are rejected."""
    if isinstance(value, bool):
        raise ParseError(source, f"expected a nonnegative integer, got {value!r}", line, field)
    if isinstance(value, str):
        text = value.strip()
        if not text.isdigit():
            raise ParseError(source, f"expected a nonnegative integer, got {value!r}", line, field)
        return int(text)
    if isinstance(value, int) and value >= 0:
        return value
    if isinstance(value, float) and value.is_integer() and value >= 0:
        return int(value)
    raise ParseError(source, f"expected a nonnegative integer, got {value!r}", line, field)


def counts_from_values(values: Sequence[Any], source: str = "--counts") -> PairedCounts:
    if len(values) != 8:
        raise ParseError(source, f"expected 8 counts x1..x8, got {len(values)}")
    return PairedCounts.from_sequence([_count(v, source, name) for v, name in zip(values, CELL_NAMES)])


def parse_counts_csv(path: PathLike) -> PairedCounts:
    source = str(path)
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if any(cell.strip() for cell in row)]
    if not rows:
        raise ParseError(source, "file is empty", line=1)
    header = [cell.strip() for cell in rows[0]]
    if header != list(CELL_NAMES):
        raise ParseError(source, f"header must be {','.join(CELL_NAMES)}, got {','.join(header)}", line=1)
    if len(rows) != 2:
        raise ParseError(source, f"expected exactly one data row, got {len(rows) - 1}", line=len(rows))
    data = rows[1]
    if len(data) != 8:
        raise ParseError(source, f"expected 8 fields, got {len(data)}", line=2)
    values = [_count(value, source, name, line=2) for value, name in zip(data, CELL_NAMES)]
    return PairedCounts.from_sequence(values)


def parse_counts_json(path: PathLike) -> PairedCounts:
    source = str(path)
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(source, e.msg, line=e.lineno) from e
    if not isinstance(payload, dict) or "x" not in payload:
        raise ParseError(source, 'expected an object {"x": [x1, ..., x8]}', field="x")
    values = payload["x"]
    if not isinstance(values, list):
        raise ParseError(source, "expected a list of 8 counts", field="x")
    return counts_from_values(values, source)


def load_counts(path: PathLike) -> PairedCounts:
    """Dispatch on the file suffix (.json, otherwise CSV)."""
    counts = parse_counts_json(path) if Path(path).suffix.lower() == ".json" else parse_counts_csv(path)
    logger.debug(f"Loaded counts {counts.values} from {path}")
    return counts


def _spec(entry: Any, index: int, source: str) -> SimulationSpec:
    if not isinstance(entry, dict):
        raise ParseError(source, "each grid entry must be an object", field=f"[{index}]")
    entry = dict(entry)
    try:
        entry["methods"] = [MethodFactory.resolve(m).value for m in entry.get("methods", [])]
    except InvalidMethodError as e:
        raise ParseError(source, str(e), field=f"[{index}].methods") from e
    try:
        return SimulationSpec.model_validate(entry)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ParseError(source, first["msg"], field=f"[{index}].{location}" if location else f"[{index}]") from e


def parse_grid(payload: Any, source: str = "grid") -> List[SimulationSpec]:
    if isinstance(payload, dict):
        payload = payload.get("grid")
    if not isinstance(payload, list):
        raise ParseError(source, 'expected a list of specs or {"grid": [...]}')
    return [_spec(entry, i, source) for i, entry in enumerate(payload)]


def load_grid(path: PathLike) -> List[SimulationSpec]:
    source = str(path)
    try:
        payload = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(source, e.msg, line=e.lineno) from e
    grid = parse_grid(payload, source)
    logger.info(f"Loaded {len(grid)} simulation spec(s) from {path}")
    return grid
