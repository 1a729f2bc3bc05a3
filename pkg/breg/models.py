"""Pydantic models for breg input files, grid sweeps and suite reports."""

import math
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Annotated, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from slugify import slugify

from .config import (
    DEFAULT_GRID_STEPS,
    DEFAULT_SEED,
    ORACLE_TOL,
    Suite,
)

Mass = Annotated[float, Field(ge=0.0, allow_inf_nan=False)]


def generate_id(prefix: str = "") -> str:
    """Generate a short UUID."""
    return f"{prefix}{uuid.uuid4().hex[:12]}"


def generate_report_id(suite: str) -> str:
    """Generate report ID from the suite name + short UUID."""
    slug = slugify(suite, max_length=30)
    short_uuid = uuid.uuid4().hex[:8]
    return f"{slug}-{short_uuid}" if slug else short_uuid


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class MeasureFile(BaseModel):
    """A discrete measure as stored on disk."""
    model_config = ConfigDict(extra="forbid")

    support: Optional[list[Union[str, int, float]]] = None  # optional labels
    mass: list[Mass] = Field(min_length=1)

    @model_validator(mode="after")
    def _support_matches_mass(self) -> "MeasureFile":
        if self.support is not None and len(self.support) != len(self.mass):
            raise ValueError(f"support has {len(self.support)} labels for {len(self.mass)} masses")
        return self

    def labels(self) -> Optional[tuple[str, ...]]:
        if self.support is None:
            return None
        return tuple(str(label) for label in self.support)


class GridSpec(BaseModel):
    """Alpha and beta ranges of a 3D-discrimination sweep."""
    alpha_min: float
    alpha_max: float
    alpha_steps: int = Field(default=DEFAULT_GRID_STEPS, ge=2)
    beta_min: float = Field(default=0.0, ge=0.0, le=1.0)
    beta_max: float = Field(default=1.0, ge=0.0, le=1.0)
    beta_steps: int = Field(default=DEFAULT_GRID_STEPS, ge=2)

    @model_validator(mode="after")
    def _ordered(self) -> "GridSpec":
        for name in ("alpha", "beta"):
            low, high = getattr(self, f"{name}_min"), getattr(self, f"{name}_max")
            if not (math.isfinite(low) and math.isfinite(high) and low < high):
                raise ValueError(f"{name} range needs finite min < max, got {low!r}:{high!r}")
        return self

    def alphas(self) -> np.ndarray:
        return np.linspace(self.alpha_min, self.alpha_max, self.alpha_steps)

    def betas(self) -> np.ndarray:
        return np.linspace(self.beta_min, self.beta_max, self.beta_steps)

    @property
    def size(self) -> int:
        return self.alpha_steps * self.beta_steps


class GridRow(BaseModel):
    """One evaluated grid point."""
    alpha: float
    beta: float
    value: float


class Settings(BaseModel):
    """Run settings; a JSON file given with --config overrides the defaults."""
    model_config = ConfigDict(extra="forbid")

    oracle_tol: float = Field(default=ORACLE_TOL, gt=0.0)
    seed: int = DEFAULT_SEED
    grid_steps: int = Field(default=DEFAULT_GRID_STEPS, ge=2)
    workers: int = Field(default=1, ge=1)
    report_dir: Optional[Path] = None


class PropertyResult(BaseModel):
    """Outcome of one property in a suite."""
    name: str
    passed: bool
    max_deviation: float = 0.0
    tolerance: float = 0.0
    cases: int = 0
    detail: str = ""
    timestamp: datetime = Field(default_factory=_utcnow)


class SuiteReport(BaseModel):
    """Report of a suite run."""
    run_id: str = Field(default_factory=lambda: generate_id("run_"))
    suite: Suite
    seed: int = DEFAULT_SEED
    started_at: datetime = Field(default_factory=_utcnow)
    ended_at: Optional[datetime] = None
    results: list[PropertyResult] = Field(default_factory=list)
    flags: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> list[PropertyResult]:
        return [result for result in self.results if not result.passed]
