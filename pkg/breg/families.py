"""Concrete exponential families.

Each constructor returns an ExpFamily carrying an analytic gradient and a
domain predicate. Additive constants of the cumulants are dropped where
convenient; every distance is invariant under b -> b + c + v . theta.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats
from scipy.special import expit, logit

from .config import POISSON_TAIL, DomainStatus
from .errors import DomainError, InputError
from .expfam import ExpFamily

logger = logging.getLogger(__name__)


def _everywhere(theta: np.ndarray) -> DomainStatus:
    return DomainStatus.INTERIOR


def _positive(theta: np.ndarray) -> DomainStatus:
    return DomainStatus.INTERIOR if theta[-1] > 0 else DomainStatus.OUTSIDE


# ============ Binomial ============

def binomial(n: int) -> ExpFamily:
    """Bin(n, p) in theta = ln(p / (1 - p)) with b(theta) = n ln(1 + e^theta)."""
    if int(n) != n or n < 1:
        raise DomainError(f"binomial needs an integer n >= 1, got {n!r}")
    n = int(n)
    points = np.arange(n + 1)

    def cumulant(theta):
        return n * float(np.logaddexp(0.0, theta[0]))

    def gradient(theta):
        return np.array([n * expit(theta[0])])

    def masses(theta, support=None):
        return points, stats.binom.pmf(points, n, expit(theta[0]))

    def to_natural(ptilde):
        if not 0.0 < ptilde < 1.0:
            raise DomainError(f"success probability {ptilde!r} outside (0, 1)")
        return np.array([logit(ptilde)])

    return ExpFamily(
        dim=1,
        cumulant=cumulant,
        grad_cumulant=gradient,
        in_domain=_everywhere,
        label=f"binomial:{n}",
        mass_function=masses,
        to_natural=to_natural,
    )


# ============ Rayleigh ============

def rayleigh() -> ExpFamily:
    """Rayleigh laws after x -> -sqrt(2x): density theta e^{theta x} on x < 0, b = -ln theta."""

    def cumulant(theta):
        return -math.log(theta[0])

    def gradient(theta):
        return np.array([-1.0 / theta[0]])

    def density(theta, x):
        return theta[0] * np.exp(theta[0] * np.asarray(x, dtype=float))

    return ExpFamily(
        dim=1,
        cumulant=cumulant,
        grad_cumulant=gradient,
        in_domain=_positive,
        label="rayleigh",
        density=density,
        support=(-math.inf, 0.0),
        to_natural=lambda theta: np.array([float(theta)]),
    )


# ============ Poisson process ============

def poisson_tail_points(mean: float) -> np.ndarray:
    """0..k with P{N > k} below POISSON_TAIL for N ~ Poi(mean)."""
    upper = int(stats.poisson.isf(POISSON_TAIL, mean))
    return np.arange(upper + 1)


def poisson_process(t: float) -> ExpFamily:
    """Marginal N_t of a Poisson process with intensity e^theta.

    b(theta) = t e^theta, i.e. t (e^theta - 1) without the constant -t.
    Written in vartheta = theta + ln t the cumulant is e^vartheta.
    """
    if not t > 0:
        raise DomainError(f"poisson-process horizon must be positive, got {t!r}")
    t = float(t)

    def cumulant(theta):
        return t * math.exp(theta[0])

    def gradient(theta):
        return np.array([t * math.exp(theta[0])])

    def masses(theta, support=None):
        mean = t * math.exp(theta[0])
        points = poisson_tail_points(mean) if support is None else np.asarray(support)
        return points, stats.poisson.pmf(points, mean)

    return ExpFamily(
        dim=1,
        cumulant=cumulant,
        grad_cumulant=gradient,
        in_domain=_everywhere,
        label=f"poisson-process:{t!r}",
        mass_function=masses,
        to_natural=lambda intensity: np.array([math.log(intensity)]),
    )


# ============ Wiener ============

def wiener_natural(t: float, scale: float) -> np.ndarray:
    """vartheta = 1 / (2 v^2) for the marginal variance v^2 = t scale^2."""
    if not (t > 0 and scale > 0):
        raise DomainError(f"wiener needs t > 0 and scale > 0, got t={t!r}, scale={scale!r}")
    return np.array([1.0 / (2.0 * t * scale * scale)])


def wiener(t: float) -> ExpFamily:
    """Scaled Wiener marginals N(0, t theta^2) in vartheta = 1 / (2 t theta^2).

    b(vartheta) = -ln(vartheta) / 2; the constant ln(2t) / 2 is dropped.
    The oracle density is the centred normal with variance 1 / (2 vartheta).
    """
    if not t > 0:
        raise DomainError(f"wiener horizon must be positive, got {t!r}")
    t = float(t)

    def cumulant(theta):
        return -0.5 * math.log(theta[0])

    def gradient(theta):
        return np.array([-0.5 / theta[0]])

    def density(theta, x):
        return stats.norm.pdf(x, loc=0.0, scale=math.sqrt(0.5 / theta[0]))

    return ExpFamily(
        dim=1,
        cumulant=cumulant,
        grad_cumulant=gradient,
        in_domain=_positive,
        label=f"wiener:{t!r}",
        density=density,
        support=(-math.inf, math.inf),
        to_natural=lambda scale: wiener_natural(t, scale),
    )


# ============ Geometric Brownian motion ============

def gbm_natural(t: float, sigma: float, drift: float) -> np.ndarray:
    """(vartheta, tau) = (drift / sigma^2, 1 / (2 sigma^2 t))."""
    if not (t > 0 and sigma > 0):
        raise DomainError(f"gbm needs t > 0 and sigma > 0, got t={t!r}, sigma={sigma!r}")
    s2 = sigma * sigma
    return np.array([drift / s2, 1.0 / (2.0 * s2 * t)])


def gbm(t: float, sigma: float) -> ExpFamily:
    """Log-marginals N(drift t, sigma^2 t) of a geometric Brownian motion.

    Natural parameters (vartheta, tau) with tau > 0 and the normal
    log-partition b = -ln(tau) / 2 + vartheta^2 / (4 tau).
    """
    if not (t > 0 and sigma > 0):
        raise DomainError(f"gbm needs t > 0 and sigma > 0, got t={t!r}, sigma={sigma!r}")
    t, sigma = float(t), float(sigma)

    def cumulant(theta):
        vartheta, tau = theta
        return -0.5 * math.log(tau) + vartheta * vartheta / (4.0 * tau)

    def gradient(theta):
        vartheta, tau = theta
        return np.array([vartheta / (2.0 * tau), -0.5 / tau - vartheta * vartheta / (4.0 * tau * tau)])

    def density(theta, x):
        vartheta, tau = theta
        return stats.norm.pdf(x, loc=vartheta / (2.0 * tau), scale=math.sqrt(0.5 / tau))

    return ExpFamily(
        dim=2,
        cumulant=cumulant,
        grad_cumulant=gradient,
        in_domain=_positive,
        label=f"gbm:{t!r},{sigma!r}",
        density=density,
        support=(-math.inf, math.inf),
        to_natural=lambda drift: gbm_natural(t, sigma, drift),
    )


# ============ Levy ============

@dataclass(frozen=True)
class JumpCumulant:
    """gamma(theta) of the jump part with gamma(0) = 0."""
    value: Callable[[float], float]
    derivative: Callable[[float], float]
    label: str
    domain: Callable[[float], DomainStatus] = lambda theta: DomainStatus.INTERIOR


def no_jumps() -> JumpCumulant:
    return JumpCumulant(value=lambda theta: 0.0, derivative=lambda theta: 0.0, label="none")


def poisson_jumps(rate: float = 1.0) -> JumpCumulant:
    """Unit jumps at the given rate: gamma(theta) = rate (e^theta - 1)."""
    if not rate > 0:
        raise DomainError(f"jump rate must be positive, got {rate!r}")
    return JumpCumulant(
        value=lambda theta: rate * math.expm1(theta),
        derivative=lambda theta: rate * math.exp(theta),
        label=f"poisson({rate!r})",
    )


def levy(t: float, delta: float, sigma: float, jump_cumulant: Optional[JumpCumulant] = None) -> ExpFamily:
    """Exponentially tilted Levy marginals, b_t(theta) = t (delta theta + sigma^2 theta^2 / 2 + gamma(theta))."""
    if not t > 0:
        raise DomainError(f"levy horizon must be positive, got {t!r}")
    if not sigma >= 0:
        raise DomainError(f"levy volatility must be nonnegative, got {sigma!r}")
    jumps = jump_cumulant or no_jumps()
    if jumps.value(0.0) != 0.0:
        raise DomainError(f"jump cumulant {jumps.label} must vanish at 0")
    t, delta, s2 = float(t), float(delta), float(sigma) ** 2

    def cumulant(theta):
        x = theta[0]
        return t * (delta * x + 0.5 * s2 * x * x + jumps.value(x))

    def gradient(theta):
        x = theta[0]
        return np.array([t * (delta + s2 * x + jumps.derivative(x))])

    return ExpFamily(
        dim=1,
        cumulant=cumulant,
        grad_cumulant=gradient,
        in_domain=lambda theta: jumps.domain(theta[0]),
        label=f"levy:{t!r},{delta!r},{sigma!r},{jumps.label}",
    )


# ============ Selection grammar ============

def _numbers(name: str, arg: str, count: int) -> list[float]:
    parts = [p for p in arg.split(",") if p.strip()] if arg else []
    if len(parts) != count:
        raise InputError(f"{name} expects {count} parameter(s), got {arg!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise InputError(f"{name}: invalid number in {arg!r}")


def parse_family(text: str) -> ExpFamily:
    """Parse `binomial:<n> | rayleigh | poisson-process:<t> | wiener:<t> | gbm:<t>,<sigma>`.

    Also accepts `levy:<t>,<delta>,<sigma>` (no jumps) and
    `levy-poisson:<t>,<delta>,<sigma>` (unit-rate Poisson jumps).
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    if name == "binomial":
        (n,) = _numbers(name, arg, 1)
        if n != int(n):
            raise InputError(f"binomial trials must be an integer, got {arg!r}")
        return binomial(int(n))
    if name == "rayleigh" and not arg:
        return rayleigh()
    if name == "poisson-process":
        return poisson_process(*_numbers(name, arg, 1))
    if name == "wiener":
        return wiener(*_numbers(name, arg, 1))
    if name == "gbm":
        return gbm(*_numbers(name, arg, 2))
    if name == "levy":
        return levy(*_numbers(name, arg, 3))
    if name == "levy-poisson":
        return levy(*_numbers(name, arg, 3), jump_cumulant=poisson_jumps())
    raise InputError(f"unknown family: {text!r}")
