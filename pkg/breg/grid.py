"""3D-discrimination sweeps of B_alpha(P, Q | beta P + (1 - beta) Q)."""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import ValidationError

from .config import DEFAULT_GRID_STEPS
from .discrete import ProbabilityMeasure, b_phi, mixture
from .errors import DomainError, InputError
from .expfam import ExpFamily
from .generators import make_power_or_limit
from .models import GridRow, GridSpec

logger = logging.getLogger(__name__)


def parse_range(text: str, name: str, default_steps: int = DEFAULT_GRID_STEPS) -> tuple[float, float, int]:
    """Parse `<min>:<max>[:<steps>]`."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise InputError(f"--{name} expects <min>:<max>:<steps>, got {text!r}")
    try:
        steps = int(parts[2]) if len(parts) == 3 else default_steps
        return float(parts[0]), float(parts[1]), steps
    except ValueError:
        raise InputError(f"--{name}: invalid number in {text!r}")


def grid_spec(alpha: str, beta: str, default_steps: int = DEFAULT_GRID_STEPS) -> GridSpec:
    """GridSpec from the two range arguments."""
    a_min, a_max, a_steps = parse_range(alpha, "alpha", default_steps)
    b_min, b_max, b_steps = parse_range(beta, "beta", default_steps)
    try:
        return GridSpec(
            alpha_min=a_min, alpha_max=a_max, alpha_steps=a_steps,
            beta_min=b_min, beta_max=b_max, beta_steps=b_steps,
        )
    except ValidationError as e:
        err = e.errors()[0]
        raise InputError(f"grid: {'.'.join(str(p) for p in err['loc']) or 'range'}: {err['msg']}")


def family_pair(F: ExpFamily, ptilde: float, qtilde: float) -> tuple[ProbabilityMeasure, ProbabilityMeasure]:
    """Mass vectors of the members with mean parameters ptilde and qtilde on a shared support."""
    if F.mass_function is None or F.to_natural is None:
        raise DomainError(f"{F.label} has no mass function; grid sweeps need a counting family")
    th_p, th_q = F.to_natural(ptilde), F.to_natural(qtilde)
    upper = max(int(F.mass_function(th)[0][-1]) for th in (th_p, th_q))
    points = np.arange(upper + 1, dtype=float)
    P = ProbabilityMeasure(F.mass_function(th_p, points)[1])
    Q = ProbabilityMeasure(F.mass_function(th_q, points)[1])
    return P, Q


def _row(alpha: float, betas: np.ndarray, P: ProbabilityMeasure, Q: ProbabilityMeasure) -> list[GridRow]:
    g = make_power_or_limit(alpha)
    return [
        GridRow(alpha=float(alpha), beta=float(beta), value=b_phi(g, P, Q, mixture(P, Q, float(beta))))
        for beta in betas
    ]


def sweep(P: ProbabilityMeasure, Q: ProbabilityMeasure, spec: GridSpec, workers: int = 1) -> list[GridRow]:
    """Evaluate the grid row-major in alpha then beta.

    Alpha points at 0 or 1 use the logarithmic limit generators. Rows are
    computed independently, so the result does not depend on `workers`.
    """
    alphas, betas = spec.alphas(), spec.betas()
    logger.info("sweeping %d x %d grid with %d worker(s)", alphas.size, betas.size, workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda a: _row(a, betas, P, Q), alphas))
    else:
        blocks = [_row(a, betas, P, Q) for a in alphas]
    rows = [row for block in blocks for row in block]
    logger.info("grid done: %d points, values in [%r, %r]", len(rows), *value_range(rows))
    return rows


def value_range(rows: list[GridRow]) -> tuple[float, float]:
    values = [row.value for row in rows]
    return min(values), max(values)
