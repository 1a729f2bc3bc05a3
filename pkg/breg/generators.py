"""Convex generator functions phi on (0, inf) with phi(1) = 0.

A Generator bundles phi with its one-sided derivatives and the extended
values at the ends of (0, inf) that the divergence formulas need:

    at_zero                 phi(0)   = lim_{t -> 0} phi(t)
    rderiv_at_zero          phi'+(0) = lim_{t -> 0} phi'(t)
    adjoint_at_zero         phi*(0)  = lim_{t -> inf} phi(t) / t
    adjoint_rderiv_at_zero  lim_{t -> inf} (phi(t) - t phi'(t)), i.e. phi*'+(0)

`eval`, `rderiv` and `lderiv` accept floats or numpy arrays and are only
defined for t > 0; callers needing t = 0 use the extended values.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import xlogy

from .config import ALPHA_ROUTING_EPS, CONVEXITY_SLACK, GENERATOR_CHECK_GRID
from .errors import DomainError, InputError

logger = logging.getLogger(__name__)

INF = math.inf

ScalarFn = Callable[[object], object]


def _vectorized(fn: Callable[[np.ndarray], np.ndarray]) -> ScalarFn:
    """Lift an array function so that scalar input gives a float back."""
    def wrapped(t):
        result = fn(np.asarray(t, dtype=float))
        if np.ndim(result) == 0:
            return float(result)
        return result
    wrapped.__name__ = getattr(fn, "__name__", "phi")
    return wrapped


@dataclass(frozen=True)
class Generator:
    """A convex function phi on (0, inf) with phi(1) = 0."""
    eval: ScalarFn
    rderiv: ScalarFn
    at_zero: float
    rderiv_at_zero: float
    adjoint_at_zero: float
    adjoint_rderiv_at_zero: float
    label: str
    lderiv: Optional[ScalarFn] = field(default=None, compare=False)

    def __call__(self, t):
        return self.eval(t)

    def left_derivative(self, t):
        """phi'-(t); equals rderiv wherever phi is differentiable."""
        if self.lderiv is None:
            return self.rderiv(t)
        return self.lderiv(t)


@dataclass(frozen=True)
class PowerIndex:
    """Index alpha of the power generator family."""
    alpha: float

    @property
    def is_limit(self) -> bool:
        return abs(self.alpha) < ALPHA_ROUTING_EPS or abs(self.alpha - 1.0) < ALPHA_ROUTING_EPS


# ============ Built-in generators ============

def make_power(alpha: float) -> Generator:
    """phi_alpha(t) = (t^alpha - 1) / (alpha (alpha - 1))."""
    alpha = float(alpha)
    if alpha == 0.0 or alpha == 1.0:
        raise DomainError(
            f"power generator undefined at alpha={alpha:g}; "
            "use make_reverse_kl() for alpha=0 and make_kl() for alpha=1"
        )
    c = alpha * (alpha - 1.0)

    @_vectorized
    def phi(t):
        return np.expm1(alpha * np.log(t)) / c

    @_vectorized
    def dphi(t):
        return np.power(t, alpha - 1.0) / (alpha - 1.0)

    return Generator(
        eval=phi,
        rderiv=dphi,
        at_zero=-1.0 / c if alpha > 0 else INF,
        rderiv_at_zero=-INF if alpha < 1 else 0.0,
        adjoint_at_zero=0.0 if alpha < 1 else INF,
        adjoint_rderiv_at_zero=-INF if alpha > 0 else -1.0 / c,
        label=f"power:{alpha!r}",
    )


def make_kl() -> Generator:
    """phi(t) = t ln t."""

    @_vectorized
    def phi(t):
        return xlogy(t, t)

    @_vectorized
    def dphi(t):
        return np.log(t) + 1.0

    return Generator(
        eval=phi,
        rderiv=dphi,
        at_zero=0.0,
        rderiv_at_zero=-INF,
        adjoint_at_zero=INF,
        adjoint_rderiv_at_zero=-INF,
        label="kl",
    )


def make_reverse_kl() -> Generator:
    """phi(t) = -ln t."""

    @_vectorized
    def phi(t):
        return -np.log(t)

    @_vectorized
    def dphi(t):
        return -1.0 / t

    return Generator(
        eval=phi,
        rderiv=dphi,
        at_zero=INF,
        rderiv_at_zero=-INF,
        adjoint_at_zero=0.0,
        adjoint_rderiv_at_zero=-INF,
        label="rkl",
    )


def make_total_variation() -> Generator:
    """phi(t) = |t - 1|; the right derivative at the kink is +1."""

    @_vectorized
    def phi(t):
        return np.abs(t - 1.0)

    @_vectorized
    def right(t):
        return np.where(t < 1.0, -1.0, 1.0)

    @_vectorized
    def left(t):
        return np.where(t <= 1.0, -1.0, 1.0)

    return Generator(
        eval=phi,
        rderiv=right,
        lderiv=left,
        at_zero=1.0,
        rderiv_at_zero=-1.0,
        adjoint_at_zero=1.0,
        adjoint_rderiv_at_zero=-1.0,
        label="tv",
    )


def make_pearson() -> Generator:
    """phi(t) = (t - 1)^2."""

    @_vectorized
    def phi(t):
        return np.square(t - 1.0)

    @_vectorized
    def dphi(t):
        return 2.0 * (t - 1.0)

    return Generator(
        eval=phi,
        rderiv=dphi,
        at_zero=1.0,
        rderiv_at_zero=-2.0,
        adjoint_at_zero=INF,
        adjoint_rderiv_at_zero=-INF,
        label="pearson",
    )


def make_lecam() -> Generator:
    """phi(t) = (t - 1)^2 / (t + 1)."""

    @_vectorized
    def phi(t):
        return np.square(t - 1.0) / (t + 1.0)

    @_vectorized
    def dphi(t):
        return (t - 1.0) * (t + 3.0) / np.square(t + 1.0)

    return Generator(
        eval=phi,
        rderiv=dphi,
        at_zero=1.0,
        rderiv_at_zero=-3.0,
        adjoint_at_zero=1.0,
        adjoint_rderiv_at_zero=-3.0,
        label="lecam",
    )


def make_power_or_limit(alpha: float) -> Generator:
    """Power generator, or its alpha -> 0 / alpha -> 1 limit generator."""
    index = PowerIndex(float(alpha))
    if index.is_limit:
        limit = make_reverse_kl() if abs(index.alpha) < ALPHA_ROUTING_EPS else make_kl()
        logger.debug("alpha=%r routed to limit generator %s", alpha, limit.label)
        return limit
    return make_power(index.alpha)


# ============ Algebra ============

def adjoint(g: Generator) -> Generator:
    """phi*(t) = t phi(1/t), with the extended values swapped accordingly."""

    @_vectorized
    def phi(t):
        return t * np.asarray(g.eval(1.0 / t))

    # d/dt t phi(1/t) = phi(1/t) - phi'(1/t) / t; 1/t moves left as t grows,
    # so the right derivative of phi* uses the left derivative of phi.
    @_vectorized
    def right(t):
        s = 1.0 / t
        return np.asarray(g.eval(s)) - np.asarray(g.left_derivative(s)) * s

    @_vectorized
    def left(t):
        s = 1.0 / t
        return np.asarray(g.eval(s)) - np.asarray(g.rderiv(s)) * s

    return Generator(
        eval=phi,
        rderiv=right,
        lderiv=left,
        at_zero=g.adjoint_at_zero,
        rderiv_at_zero=g.adjoint_rderiv_at_zero,
        adjoint_at_zero=g.at_zero,
        adjoint_rderiv_at_zero=g.rderiv_at_zero,
        label=f"adjoint({g.label})",
    )


def standardize(g: Generator) -> Generator:
    """phi(t) - phi'+(1) (t - 1).

    Adding an affine function that vanishes at 1 leaves every B_phi and every
    D_phi between probability measures unchanged.
    """
    c = float(g.rderiv(1.0))

    @_vectorized
    def phi(t):
        return np.asarray(g.eval(t)) - c * (t - 1.0)

    @_vectorized
    def right(t):
        return np.asarray(g.rderiv(t)) - c

    @_vectorized
    def left(t):
        return np.asarray(g.left_derivative(t)) - c

    return Generator(
        eval=phi,
        rderiv=right,
        lderiv=left,
        at_zero=g.at_zero + c,
        rderiv_at_zero=g.rderiv_at_zero - c,
        adjoint_at_zero=g.adjoint_at_zero - c,
        adjoint_rderiv_at_zero=g.adjoint_rderiv_at_zero + c,
        label=f"standardized({g.label})",
    )


def make_generator(
    eval: ScalarFn,
    rderiv: ScalarFn,
    *,
    at_zero: float,
    rderiv_at_zero: float,
    adjoint_at_zero: float,
    adjoint_rderiv_at_zero: float,
    label: str,
    lderiv: Optional[ScalarFn] = None,
    validate: bool = True,
) -> Generator:
    """Build a user-defined generator, checking it on a sampled grid."""
    g = Generator(
        eval=_vectorized(lambda t: np.asarray(eval(t), dtype=float)),
        rderiv=_vectorized(lambda t: np.asarray(rderiv(t), dtype=float)),
        lderiv=None if lderiv is None else _vectorized(lambda t: np.asarray(lderiv(t), dtype=float)),
        at_zero=float(at_zero),
        rderiv_at_zero=float(rderiv_at_zero),
        adjoint_at_zero=float(adjoint_at_zero),
        adjoint_rderiv_at_zero=float(adjoint_rderiv_at_zero),
        label=label,
    )
    if validate:
        validate_generator(g)
    return g


def check_grid(n: Optional[int] = None) -> np.ndarray:
    low, high, default_n = GENERATOR_CHECK_GRID
    return np.geomspace(low, high, n or default_n)


def validate_generator(g: Generator, grid: Optional[np.ndarray] = None) -> None:
    """Raise DomainError unless g passes the sampled generator checks.

    Checks phi(1) = 0, midpoint convexity on consecutive grid triples, a
    nondecreasing right derivative, the support line at every grid point and
    the upper envelope phi(t) <= phi(0) + t phi*(0).
    """
    t = check_grid() if grid is None else np.asarray(grid, dtype=float)
    if g.eval(1.0) != 0.0:
        raise DomainError(f"{g.label}: phi(1) = {g.eval(1.0)!r}, expected 0")

    values = np.asarray(g.eval(t))
    a, b, c = t[:-2], t[1:-1], t[2:]
    fa, fb, fc = values[:-2], values[1:-1], values[2:]
    chord = ((c - b) * fa + (b - a) * fc) / (c - a)
    slack = CONVEXITY_SLACK * (1.0 + np.abs(fa) + np.abs(fc))
    if np.any(fb > chord + slack):
        worst = float(t[1:-1][np.argmax(fb - chord - slack)])
        raise DomainError(f"{g.label}: not convex near t={worst:g}")

    slopes = np.asarray(g.rderiv(t))
    if np.any(np.diff(slopes) < -CONVEXITY_SLACK * (1.0 + np.abs(slopes[:-1]))):
        raise DomainError(f"{g.label}: right derivative decreases on the grid")

    if support_line_gap(g, t) > 0.0:
        raise DomainError(f"{g.label}: support line inequality fails")

    envelope = g.at_zero + t * g.adjoint_at_zero if math.isfinite(g.at_zero + g.adjoint_at_zero) else None
    if envelope is not None and np.any(values > envelope + 1e-10 * (1.0 + np.abs(values))):
        raise DomainError(f"{g.label}: exceeds the upper envelope phi(0) + t phi*(0)")


def support_line_gap(g: Generator, t: Optional[np.ndarray] = None) -> float:
    """Largest violation of phi(s) + phi'+(s)(t - s) <= phi(t) + 1e-10 (1 + |phi(t)|).

    Returns 0.0 when the inequality holds on every grid pair.
    """
    t = check_grid() if t is None else np.asarray(t, dtype=float)
    values = np.asarray(g.eval(t))
    slopes = np.asarray(g.rderiv(t))
    # rows: tangent point s, columns: evaluation point t
    lines = values[:, None] + slopes[:, None] * (t[None, :] - t[:, None])
    excess = lines - values[None, :] - 1e-10 * (1.0 + np.abs(values[None, :]))
    return float(max(0.0, np.max(excess)))


# ============ Selection grammar ============

BUILTINS: dict[str, Callable[[], Generator]] = {
    "kl": make_kl,
    "rkl": make_reverse_kl,
    "tv": make_total_variation,
    "pearson": make_pearson,
    "lecam": make_lecam,
}


def parse_generator(text: str) -> Generator:
    """Parse `kl | rkl | tv | pearson | lecam | power:<alpha>`."""
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    if name in BUILTINS and not arg:
        return BUILTINS[name]()
    if name == "power" and arg:
        try:
            alpha = float(arg)
        except ValueError:
            raise InputError(f"invalid power index: {arg!r}")
        if not math.isfinite(alpha):
            raise InputError(f"invalid power index: {arg!r}")
        return make_power(alpha)
    raise InputError(f"unknown generator: {text!r}")


def builtin_generators(alphas: tuple[float, ...] = (-0.5, 0.3, 0.5, 2.0)) -> list[Generator]:
    """Every named generator plus a few power generators."""
    return [factory() for factory in BUILTINS.values()] + [make_power(a) for a in alphas]
