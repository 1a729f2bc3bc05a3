"""Closed-form power divergences and scaled Bregman distances of exponential families.

A family is described by its cumulant b on the natural parameter domain
Theta = {b < inf}. All distances are computed from b, its gradient and the
two combinations

    rho_alpha(t1, t2)       = b(a t1 + (1-a) t2) - a b(t1) - (1-a) b(t2)
    sigma_alpha(t0, t1, t2) = b(t1 + (1-a)(t0 - t2)) - b(t1) - (1-a)(b(t0) - b(t2))

so two families with equal cumulants give equal distances.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .config import ALPHA_ROUTING_EPS, FD_MIN_STEP, FD_REL_STEP, DomainStatus
from .errors import FormulaValidityError, InputError, OutsideDomainError
from .numerics import ExtReal, expm1_or_inf, ext_scale, ext_sum

logger = logging.getLogger(__name__)

ParamLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class ExpFamily:
    """Exponential family given by its cumulant b on Theta in R^dim.

    `mass_function(theta)` returns (points, masses) for counting families,
    `density(theta, x)` the natural-form density on `support` for continuous
    ones. Both are optional and only used by the quadrature and summation
    oracles.
    """
    dim: int
    cumulant: Callable[[np.ndarray], float]
    in_domain: Callable[[np.ndarray], DomainStatus]
    label: str
    grad_cumulant: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    mass_function: Optional[Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]] = field(default=None, compare=False)
    density: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = field(default=None, compare=False)
    support: Optional[tuple[float, float]] = None
    to_natural: Optional[Callable[..., np.ndarray]] = field(default=None, compare=False)

    def b(self, theta: np.ndarray) -> ExtReal:
        """b(theta), +inf outside Theta."""
        if self.in_domain(theta) is DomainStatus.OUTSIDE:
            return math.inf
        return float(self.cumulant(theta))

    def in_interior(self, theta: np.ndarray) -> bool:
        return self.in_domain(theta) is DomainStatus.INTERIOR

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        if self.grad_cumulant is not None:
            return np.atleast_1d(np.asarray(self.grad_cumulant(theta), dtype=float))
        return finite_difference_gradient(self.cumulant, theta)


def finite_difference_gradient(fn: Callable[[np.ndarray], float], theta: np.ndarray) -> np.ndarray:
    """Central differences with step max(FD_MIN_STEP, FD_REL_STEP |theta_i|)."""
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        h = max(FD_MIN_STEP, FD_REL_STEP * abs(theta[i]))
        step = np.zeros_like(theta)
        step[i] = h
        grad[i] = (fn(theta + step) - fn(theta - step)) / (2.0 * h)
    return grad


def natural_param(F: ExpFamily, values: ParamLike) -> np.ndarray:
    """Validate a natural parameter against the family dimension."""
    theta = np.atleast_1d(np.asarray(values, dtype=float)).ravel()
    if theta.size != F.dim:
        raise InputError(f"{F.label}: expected a parameter of length {F.dim}, got {theta.size}")
    if not np.all(np.isfinite(theta)):
        raise InputError(f"{F.label}: parameter must be finite, got {theta.tolist()}")
    return theta


def _require(F: ExpFamily, theta: ParamLike, *, interior: bool = False) -> np.ndarray:
    theta = natural_param(F, theta)
    status = F.in_domain(theta)
    if status is DomainStatus.OUTSIDE or (interior and status is not DomainStatus.INTERIOR):
        where = "interior of the natural parameter domain" if interior else "natural parameter domain"
        raise OutsideDomainError(f"{F.label}: {theta.tolist()} is not in the {where}")
    return theta


def _route(alpha: float) -> Optional[int]:
    if abs(alpha) < ALPHA_ROUTING_EPS:
        return 0
    if abs(alpha - 1.0) < ALPHA_ROUTING_EPS:
        return 1
    return None


# ============ Cumulant combinations ============

def rho_alpha(F: ExpFamily, alpha: float, th1: ParamLike, th2: ParamLike) -> ExtReal:
    """b(a t1 + (1-a) t2) - a b(t1) - (1-a) b(t2); +inf when the combination leaves Theta."""
    t1, t2 = _require(F, th1), _require(F, th2)
    combined = F.b(alpha * t1 + (1.0 - alpha) * t2)
    if math.isinf(combined):
        return math.inf
    return combined - alpha * F.b(t1) - (1.0 - alpha) * F.b(t2)


def sigma_alpha(F: ExpFamily, alpha: float, th0: ParamLike, th1: ParamLike, th2: ParamLike) -> ExtReal:
    """sigma^I - sigma^II with sigma^I = b(a t1 + (1-a)(t1 - t2 + t0))."""
    t0, t1, t2 = _require(F, th0), _require(F, th1), _require(F, th2)
    upper = F.b(alpha * t1 + (1.0 - alpha) * (t1 - t2 + t0))
    if math.isinf(upper):
        return math.inf
    b1 = F.b(t1)
    lower = alpha * b1 + (1.0 - alpha) * (b1 - F.b(t2) + F.b(t0))
    return upper - lower


def sigma_alpha_via_rho(F: ExpFamily, alpha: float, th0: ParamLike, th1: ParamLike, th2: ParamLike) -> ExtReal:
    """The same sigma written through rho at the shifted point t0 + t1 - t2.

    Needs t0 + t1 - t2 in Theta.
    """
    t0, t1, t2 = _require(F, th0), _require(F, th1), _require(F, th2)
    shifted = _require(F, t0 + t1 - t2)
    rho = rho_alpha(F, alpha, t1, shifted)
    if math.isinf(rho):
        return math.inf
    return rho + (1.0 - alpha) * (F.b(shifted) - F.b(t0) - F.b(t1) + F.b(t2))


def renyi_alpha(F: ExpFamily, alpha: float, th1: ParamLike, th2: ParamLike) -> ExtReal:
    """rho_alpha / (alpha (alpha - 1))."""
    if _route(alpha) is not None:
        raise FormulaValidityError(f"renyi_alpha needs alpha outside {{0, 1}}, got {alpha!r}")
    return ext_scale(1.0 / (alpha * (alpha - 1.0)), rho_alpha(F, alpha, th1, th2))


def skew_deviation(F: ExpFamily, th0: ParamLike, th1: ParamLike, th2: ParamLike) -> ExtReal:
    """exp(sigma_0(t0, t1, t2)) - 1."""
    return expm1_or_inf(sigma_alpha(F, 0.0, th0, th1, th2))


def classical_bregman(F: ExpFamily, th_x: ParamLike, th_y: ParamLike) -> float:
    """b(x) - b(y) - grad b(y) . (x - y), the Bregman distance of the cumulant."""
    x, y = _require(F, th_x), _require(F, th_y, interior=True)
    return F.b(x) - F.b(y) - float(np.dot(F.gradient(y), x - y))


# ============ Power divergences ============

def d_alpha(F: ExpFamily, alpha: float, th1: ParamLike, th2: ParamLike) -> ExtReal:
    """Power divergence D_alpha(P_t1, P_t2) = expm1(rho_alpha) / (alpha (alpha - 1))."""
    limit = _route(alpha)
    if limit is not None:
        logger.debug("d_alpha: alpha=%r routed to d_%d", alpha, limit)
        return d_zero(F, th1, th2) if limit == 0 else d_one(F, th1, th2)
    rho = rho_alpha(F, alpha, th1, th2)
    return ext_scale(1.0 / (alpha * (alpha - 1.0)), expm1_or_inf(rho))


def d_zero(F: ExpFamily, th1: ParamLike, th2: ParamLike) -> ExtReal:
    """D_0(P_t1, P_t2) = b(t1) - b(t2) - grad b(t2) . (t1 - t2)."""
    t1, t2 = _require(F, th1), _require(F, th2, interior=True)
    return F.b(t1) - F.b(t2) - float(np.dot(F.gradient(t2), t1 - t2))


def d_one(F: ExpFamily, th1: ParamLike, th2: ParamLike) -> ExtReal:
    """D_1(P_t1, P_t2) = D_0(P_t2, P_t1)."""
    return d_zero(F, th2, th1)


# ============ Scaled Bregman distances ============

def b_alpha(F: ExpFamily, alpha: float, th1: ParamLike, th2: ParamLike, th0: ParamLike) -> ExtReal:
    """B_alpha(P_t1, P_t2 | P_t0).

    Evaluates exp rho(t1,t0)/(a(a-1)) + exp rho(t2,t0)/a + exp sigma/(1-a)
    through expm1 terms, whose coefficients cancel exactly. A -inf term,
    which arises when sigma^I is infinite and alpha > 1, raises
    FormulaValidityError.
    """
    limit = _route(alpha)
    if limit is not None:
        logger.debug("b_alpha: alpha=%r routed to b_%d", alpha, limit)
        return b_zero(F, th1, th2, th0) if limit == 0 else b_one(F, th1, th2, th0)
    c = alpha * (alpha - 1.0)
    terms = [
        ext_scale(1.0 / c, expm1_or_inf(rho_alpha(F, alpha, th1, th0))),
        ext_scale((alpha - 1.0) / c, expm1_or_inf(rho_alpha(F, alpha, th2, th0))),
        ext_scale(-alpha / c, expm1_or_inf(sigma_alpha(F, alpha, th0, th1, th2))),
    ]
    if -math.inf in terms:
        raise FormulaValidityError(
            f"{F.label}: B_alpha at alpha={alpha!r} has an infinite term of negative sign"
        )
    return ext_sum(terms)


def b_zero(F: ExpFamily, th1: ParamLike, th2: ParamLike, th0: ParamLike) -> ExtReal:
    """B_0 = b(t1) - b(t2) - grad b(t0) . (t1 - t2) + exp sigma_0(t0, t1, t2) - 1."""
    t1, t2, t0 = _require(F, th1), _require(F, th2), _require(F, th0, interior=True)
    deviation = skew_deviation(F, t0, t1, t2)
    if math.isinf(deviation):
        return math.inf
    return F.b(t1) - F.b(t2) - float(np.dot(F.gradient(t0), t1 - t2)) + deviation


def b_one(F: ExpFamily, th1: ParamLike, th2: ParamLike, th0: ParamLike) -> ExtReal:
    """B_1 = b(t2) - b(t1) - grad b(t1) . (t2 - t1); does not depend on t0."""
    _require(F, th0)
    return d_one(F, th1, th2)


# ============ Invariance ============

def shift_family(F: ExpFamily, c: float, v: ParamLike) -> ExpFamily:
    """Family with cumulant b(theta) + c + v . theta and the same domain.

    Density accessors are dropped: the shifted cumulant belongs to another
    dominating measure.
    """
    shift = np.atleast_1d(np.asarray(v, dtype=float)).ravel()
    if shift.size != F.dim:
        raise InputError(f"{F.label}: shift vector of length {shift.size} for dimension {F.dim}")
    c = float(c)

    def cumulant(theta):
        return F.cumulant(theta) + c + float(np.dot(shift, theta))

    def gradient(theta):
        return F.gradient(theta) + shift

    return replace(
        F,
        cumulant=cumulant,
        grad_cumulant=gradient,
        label=f"shift({F.label}, {c!r}, {shift.tolist()!r})",
        mass_function=None,
        density=None,
        support=None,
    )
