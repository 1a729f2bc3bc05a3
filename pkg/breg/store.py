"""File storage for breg: measure files, settings, grid CSV and suite reports."""

import csv
import json
import logging
from pathlib import Path
from typing import Iterable, Optional

from pydantic import ValidationError

from .discrete import DiscreteMeasure, ProbabilityMeasure
from .errors import DomainError, InputError
from .models import GridRow, MeasureFile, Settings, SuiteReport, generate_report_id

logger = logging.getLogger(__name__)

GRID_HEADER = ("alpha", "beta", "value")


def _save_json(path: Path, data: dict) -> None:
    """Save data as JSON to file."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, default=str, ensure_ascii=False)


def _load_json(path: Path) -> dict:
    """Load JSON from file, raising InputError on unreadable or malformed files."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file")
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed JSON ({e.msg} at line {e.lineno})")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}")


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    where = ".".join(str(part) for part in err["loc"]) or "file"
    return f"{where}: {err['msg']}"


# ============ Measures ============

def load_measure(path: Path, probability: bool = True) -> DiscreteMeasure:
    """Load a measure file as a ProbabilityMeasure, or a DiscreteMeasure for scales."""
    path = Path(path)
    try:
        data = MeasureFile.model_validate(_load_json(path))
    except ValidationError as e:
        raise InputError(f"{path}: {_first_error(e)}")
    cls = ProbabilityMeasure if probability else DiscreteMeasure
    try:
        return cls(data.mass, data.labels())
    except DomainError as e:
        raise InputError(f"{path}: {e.message}")


def save_measure(path: Path, measure: DiscreteMeasure) -> Path:
    """Save a measure in the measure file format."""
    path = Path(path)
    data = MeasureFile(
        support=list(measure.labels) if measure.labels is not None else None,
        mass=measure.masses.tolist(),
    )
    _save_json(path, data.model_dump(exclude_none=True))
    return path


# ============ Settings ============

def load_settings(path: Optional[Path] = None) -> Settings:
    """Defaults, overridden by a settings file when given."""
    if path is None:
        return Settings()
    try:
        return Settings.model_validate(_load_json(Path(path)))
    except ValidationError as e:
        raise InputError(f"{path}: {_first_error(e)}")


# ============ Grid CSV ============

def write_grid_csv(path: Path, rows: Iterable[GridRow]) -> Path:
    """Write `alpha,beta,value` rows with shortest round-trip floats."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(GRID_HEADER)
        for row in rows:
            writer.writerow([repr(row.alpha), repr(row.beta), repr(row.value)])
    return path


def read_grid_csv(path: Path) -> list[GridRow]:
    """Read a grid CSV back into rows."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if tuple(header or ()) != GRID_HEADER:
                raise InputError(f"{path}: expected header {','.join(GRID_HEADER)}")
            return [GridRow(alpha=float(a), beta=float(b), value=float(v)) for a, b, v in reader]
    except FileNotFoundError:
        raise InputError(f"{path}: no such file")
    except ValueError as e:
        raise InputError(f"{path}: {e}")


# ============ Suite Reports ============

def save_report(report: SuiteReport, directory: Path) -> Path:
    """Save a suite report as <slug(suite)>-<shortuuid>.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{generate_report_id(report.suite.value)}.json"
    _save_json(path, report.model_dump(mode="json"))
    logger.info("saved %s report to %s", report.suite.value, path)
    return path


def load_report(path: Path) -> SuiteReport:
    """Load a saved suite report."""
    try:
        return SuiteReport.model_validate(_load_json(Path(path)))
    except ValidationError as e:
        raise InputError(f"{path}: {_first_error(e)}")
