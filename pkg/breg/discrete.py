"""Exact phi-divergences and scaled Bregman distances of finite discrete measures."""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import PROBABILITY_TOL, SUFFICIENCY_RTOL
from .errors import (
    DomainError,
    SupportMismatchError,
    ZeroScaleMassError,
)
from .generators import (
    Generator,
    make_kl,
    make_pearson,
    make_power_or_limit,
)
from .numerics import ExtReal, ext_scale, ext_sum

logger = logging.getLogger(__name__)


# ============ Measures ============

@dataclass(frozen=True, eq=False, repr=False)
class DiscreteMeasure:
    """Nonnegative finite mass vector over a support of size d."""
    masses: np.ndarray
    labels: Optional[tuple[str, ...]] = None
    total: float = field(init=False)

    def __post_init__(self):
        masses = np.array(self.masses, dtype=float).ravel()
        if masses.size == 0:
            raise DomainError("measure has empty support")
        if not np.all(np.isfinite(masses)):
            raise DomainError("masses must be finite")
        if np.any(masses < 0):
            raise DomainError("masses must be nonnegative")
        masses.setflags(write=False)
        total = math.fsum(masses.tolist())
        if total <= 0:
            raise DomainError("measure has zero total mass")
        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != masses.size:
                raise DomainError(f"{len(labels)} labels for {masses.size} masses")
            object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "total", total)

    @property
    def size(self) -> int:
        return int(self.masses.size)

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.masses * factor, self.labels)

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.masses.tolist()!r})"


@dataclass(frozen=True, eq=False, repr=False)
class ProbabilityMeasure(DiscreteMeasure):
    """A DiscreteMeasure whose total is 1 within PROBABILITY_TOL. Never renormalised."""

    def __post_init__(self):
        super().__post_init__()
        if abs(self.total - 1.0) > PROBABILITY_TOL:
            raise DomainError(f"probability masses sum to {self.total!r}, expected 1")


def is_probability(measure: DiscreteMeasure) -> bool:
    return isinstance(measure, ProbabilityMeasure) or abs(measure.total - 1.0) <= PROBABILITY_TOL


def _check_support(*measures: DiscreteMeasure) -> None:
    sizes = {m.size for m in measures}
    if len(sizes) != 1:
        raise SupportMismatchError(f"support sizes differ: {sorted(sizes)}")
    labelled = [m.labels for m in measures if m.labels is not None]
    if any(labels != labelled[0] for labels in labelled[1:]):
        raise SupportMismatchError("support labels differ")


@dataclass(frozen=True)
class MergeMap:
    """Surjective index map {0..d-1} -> {0..k-1} merging support points."""
    assignment: tuple[int, ...]

    def __post_init__(self):
        assignment = tuple(int(j) for j in self.assignment)
        if not assignment:
            raise DomainError("merge map is empty")
        if min(assignment) < 0:
            raise DomainError("merge targets must be nonnegative")
        missing = set(range(max(assignment) + 1)) - set(assignment)
        if missing:
            raise DomainError(f"merge map is not surjective, no preimage for {sorted(missing)}")
        object.__setattr__(self, "assignment", assignment)

    @property
    def source_size(self) -> int:
        return len(self.assignment)

    @property
    def target_size(self) -> int:
        return max(self.assignment) + 1

    def classes(self) -> list[np.ndarray]:
        index = np.asarray(self.assignment)
        return [np.flatnonzero(index == j) for j in range(self.target_size)]

    @classmethod
    def identity(cls, d: int) -> "MergeMap":
        return cls(tuple(range(d)))

    @classmethod
    def collapse(cls, d: int) -> "MergeMap":
        return cls((0,) * d)


# ============ Distances ============

def d_phi(g: Generator, P: DiscreteMeasure, M: DiscreteMeasure) -> ExtReal:
    """D_phi(P, M) = sum_i m_i phi(p_i / m_i).

    Zero masses use the extended values: p_i = 0 gives m_i phi(0), m_i = 0
    gives p_i phi*(0) and p_i = m_i = 0 contributes nothing.
    """
    _check_support(P, M)
    p, m = P.masses, M.masses
    both = (p > 0) & (m > 0)
    terms = [m[both] * np.asarray(g.eval(p[both] / m[both]))]
    terms += [ext_scale(mi, g.at_zero) for mi in m[(p == 0) & (m > 0)]]
    terms += [ext_scale(pi, g.adjoint_at_zero) for pi in p[(p > 0) & (m == 0)]]
    return ext_sum(np.concatenate([np.atleast_1d(np.asarray(t, dtype=float)) for t in terms]))


def b_phi(
    g: Generator,
    P: DiscreteMeasure,
    Q: DiscreteMeasure,
    M: DiscreteMeasure,
    *,
    require_probability: bool = True,
) -> ExtReal:
    """Scaled Bregman distance B_phi(P, Q | M).

    Sums m_i [phi(x_i) - phi(y_i) - phi'+(y_i)(x_i - y_i)] with x = p/m and
    y = q/m. The scale must be strictly positive. Terms with q_i = 0 < p_i
    are finite when phi(0) and phi'+(0) are and +inf otherwise.
    """
    _check_support(P, Q, M)
    if require_probability and not (is_probability(P) and is_probability(Q)):
        raise DomainError("b_phi expects probability measures P and Q")
    m = M.masses
    if np.any(m <= 0):
        raise ZeroScaleMassError(f"scale has zero mass at indices {np.flatnonzero(m <= 0).tolist()}")
    x = P.masses / m
    y = Q.masses / m

    regular = (x > 0) & (y > 0)
    xr, yr = x[regular], y[regular]
    gap = np.asarray(g.eval(xr)) - np.asarray(g.eval(yr)) - np.asarray(g.rderiv(yr)) * (xr - yr)
    terms: list[float] = (m[regular] * gap).tolist()

    p_zero = (x == 0) & (y > 0)
    if np.any(p_zero):
        if math.isinf(g.at_zero):
            terms.append(math.inf)
        else:
            yz = y[p_zero]
            tangent = np.asarray(g.eval(yz)) - np.asarray(g.rderiv(yz)) * yz
            terms.extend((m[p_zero] * (g.at_zero - tangent)).tolist())

    q_zero = (x > 0) & (y == 0)
    if np.any(q_zero):
        if math.isinf(g.at_zero) or math.isinf(g.rderiv_at_zero):
            terms.append(math.inf)
        else:
            xz = x[q_zero]
            gap = np.asarray(g.eval(xz)) - g.at_zero - g.rderiv_at_zero * xz
            terms.extend((m[q_zero] * gap).tolist())

    return ext_sum(terms)


def lemma1_lower_bound(g: Generator, M: DiscreteMeasure) -> ExtReal:
    """M(X) phi(1 / M(X)), the smallest D_phi(P, M) over probability P."""
    return M.total * g.eval(1.0 / M.total)


def lemma1_equality_point(M: DiscreteMeasure) -> ProbabilityMeasure:
    """The probability m / M(X) attaining lemma1_lower_bound."""
    return ProbabilityMeasure(M.masses / M.total, M.labels)


# ============ Transforms ============

def mixture(P: DiscreteMeasure, Q: DiscreteMeasure, beta: float) -> ProbabilityMeasure:
    """beta P + (1 - beta) Q."""
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"mixture weight {beta!r} outside [0, 1]")
    _check_support(P, Q)
    return ProbabilityMeasure(beta * P.masses + (1.0 - beta) * Q.masses, P.labels)


def merge(T: MergeMap, P: DiscreteMeasure) -> DiscreteMeasure:
    """Push P forward along T, summing the masses of each merge class."""
    if T.source_size != P.size:
        raise SupportMismatchError(f"merge map has {T.source_size} sources, measure has {P.size} points")
    merged = np.array([math.fsum(P.masses[idx].tolist()) for idx in T.classes()])
    if isinstance(P, ProbabilityMeasure):
        return ProbabilityMeasure(merged)
    return DiscreteMeasure(merged)


def is_sufficient(T: MergeMap, P: DiscreteMeasure, Q: DiscreteMeasure, M: DiscreteMeasure) -> bool:
    """True iff p/m and q/m are constant on every merge class of T."""
    _check_support(P, Q, M)
    if T.source_size != M.size:
        raise SupportMismatchError(f"merge map has {T.source_size} sources, measures have {M.size} points")
    if np.any(M.masses <= 0):
        raise ZeroScaleMassError("sufficiency check needs a strictly positive scale")
    for idx in T.classes():
        for ratio in (P.masses[idx] / M.masses[idx], Q.masses[idx] / M.masses[idx]):
            if not np.all(np.isclose(ratio, ratio[0], rtol=SUFFICIENCY_RTOL, atol=0.0)):
                return False
    return True


def uniform_scale(d: int) -> DiscreteMeasure:
    """Counting measure on d points; b_phi against it is the separable Bregman distance."""
    return DiscreteMeasure(np.ones(d))


# ============ Named divergences ============

def total_variation(P: DiscreteMeasure, Q: DiscreteMeasure) -> float:
    _check_support(P, Q)
    return math.fsum(np.abs(P.masses - Q.masses).tolist())


def chi_square(P: DiscreteMeasure, Q: DiscreteMeasure) -> ExtReal:
    """Pearson chi-square sum (p_i - q_i)^2 / q_i."""
    return d_phi(make_pearson(), P, Q)


def kl_divergence(P: DiscreteMeasure, Q: DiscreteMeasure) -> ExtReal:
    return d_phi(make_kl(), P, Q)


def power_divergence(P: DiscreteMeasure, Q: DiscreteMeasure, alpha: float) -> ExtReal:
    """D_alpha(P, Q); alpha near 0 or 1 uses the logarithmic limits."""
    return d_phi(make_power_or_limit(alpha), P, Q)
