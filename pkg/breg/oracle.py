"""Reference values of D_phi and B_phi by direct summation or adaptive quadrature.

Nothing here uses a closed form: integrands are built from the densities
and the generator alone, so the results can validate `expfam`.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate as scipy_integrate

from .config import ORACLE_MAX_SUBDIVISIONS, ORACLE_TOL, TRUNCATION_RATIO, Dominating
from .discrete import DiscreteMeasure, b_phi, d_phi
from .errors import DomainError, OracleToleranceError, ZeroScaleMassError
from .expfam import ExpFamily, natural_param
from .generators import Generator
from .numerics import ExtReal

logger = logging.getLogger(__name__)

DensityFn = Callable[[np.ndarray], np.ndarray]
Interval = tuple[float, float]

# probe abscissae for locating the mass of densities on unbounded domains
_PROBE = np.geomspace(1e-6, 1e6, 721)
_PROBE = np.concatenate([-_PROBE[::-1], [0.0], _PROBE])


@dataclass(frozen=True)
class Quadrature:
    value: float
    error: float
    bounds: Interval


@dataclass(frozen=True)
class DensityTriple:
    """Densities p, q, m of P, Q, M with respect to a common dominating measure.

    For `Dominating.COUNTING` the functions are evaluated on `points`.
    """
    p: DensityFn
    q: DensityFn
    m: DensityFn
    domain: Interval = (-math.inf, math.inf)
    dominating: Dominating = Dominating.LEBESGUE
    points: Optional[np.ndarray] = None

    def totals(self, tol: float = ORACLE_TOL) -> tuple[float, float, float]:
        """Total masses of P, Q and M."""
        if self.dominating is Dominating.COUNTING:
            return tuple(math.fsum(np.asarray(f(self.points), dtype=float).tolist()) for f in (self.p, self.q, self.m))
        dens = (self.p, self.q, self.m)
        return tuple(integrate(f, self.domain, tol=tol, densities=dens).value for f in dens)


# ============ Quadrature ============

def _as_array(fn: DensityFn, x: np.ndarray) -> np.ndarray:
    return np.asarray(fn(x), dtype=float) * np.ones_like(x)


def truncation_bounds(
    integrand: DensityFn,
    domain: Interval,
    densities: Sequence[DensityFn] = (),
) -> Interval:
    """Replace infinite endpoints by the outermost probe points where the
    densities or the integrand still exceed TRUNCATION_RATIO of their peak."""
    lo, hi = domain
    if math.isfinite(lo) and math.isfinite(hi):
        return domain
    xs = _PROBE[(_PROBE > lo) & (_PROBE < hi)]
    if densities:
        dens = np.max([_as_array(f, xs) for f in densities], axis=0)
        positive = np.all([_as_array(f, xs) > 0 for f in densities], axis=0)
    else:
        dens = np.zeros_like(xs)
        positive = np.ones_like(xs, dtype=bool)
    with np.errstate(all="ignore"):
        vals = np.zeros_like(xs)
        vals[positive] = np.abs(_as_array(integrand, xs[positive]))
    vals[~np.isfinite(vals)] = 0.0

    keep = np.zeros_like(xs, dtype=bool)
    if dens.max() > 0:
        keep |= dens >= TRUNCATION_RATIO * dens.max()
    if vals.max() > 0:
        keep |= vals >= TRUNCATION_RATIO * vals.max()
    idx = np.flatnonzero(keep)
    if idx.size == 0:
        raise DomainError(f"densities vanish on the probe grid of {domain}")
    new_lo = lo if math.isfinite(lo) else float(xs[max(idx[0] - 1, 0)])
    new_hi = hi if math.isfinite(hi) else float(xs[min(idx[-1] + 1, xs.size - 1)])
    logger.debug("truncated %s to [%r, %r]", domain, new_lo, new_hi)
    return new_lo, new_hi


def integrate(
    fn: DensityFn,
    domain: Interval,
    *,
    tol: float = ORACLE_TOL,
    densities: Sequence[DensityFn] = (),
) -> Quadrature:
    """Adaptive Gauss-Kronrod quadrature of fn over domain.

    Raises OracleToleranceError, carrying the estimate, when the
    subdivision limit is hit before the tolerance is met.
    """
    bounds = truncation_bounds(fn, domain, densities)

    def scalar(x: float) -> float:
        return float(_as_array(fn, np.array([x]))[0])

    result = scipy_integrate.quad(
        scalar,
        bounds[0],
        bounds[1],
        epsabs=tol,
        epsrel=tol,
        limit=ORACLE_MAX_SUBDIVISIONS,
        full_output=1,
    )
    value, error = float(result[0]), float(result[1])
    if len(result) > 3:
        raise OracleToleranceError(
            f"quadrature on [{bounds[0]!r}, {bounds[1]!r}] stopped at error {error:.3g}: {result[3]}",
            estimate=value,
        )
    logger.debug("quadrature on [%r, %r]: value=%r error=%.3g", bounds[0], bounds[1], value, error)
    return Quadrature(value=value, error=error, bounds=bounds)


# ============ Integrands ============

def _times(weight: np.ndarray, value: float) -> np.ndarray:
    """weight * value elementwise with 0 * inf = 0."""
    if math.isinf(value):
        return np.where(weight == 0, 0.0, value)
    return weight * value


def d_phi_integrand(g: Generator, p: np.ndarray, m: np.ndarray) -> np.ndarray:
    """m phi(p / m) with the zero-mass rules of `discrete.d_phi`."""
    p, m = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(m, dtype=float))
    out = np.zeros(p.shape)
    both = (p > 0) & (m > 0)
    out[both] = m[both] * np.asarray(g.eval(p[both] / m[both]))
    p_zero = (p == 0) & (m > 0)
    out[p_zero] = _times(m[p_zero], g.at_zero)
    m_zero = (p > 0) & (m == 0)
    out[m_zero] = _times(p[m_zero], g.adjoint_at_zero)
    return out


def b_phi_integrand(g: Generator, p: np.ndarray, q: np.ndarray, m: np.ndarray) -> np.ndarray:
    """m [phi(p/m) - phi(q/m) - phi'+(q/m)(p/m - q/m)] with the zero-mass rules of `discrete.b_phi`."""
    p, q, m = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (p, q, m)))
    if np.any((m <= 0) & ((p > 0) | (q > 0))):
        raise ZeroScaleMassError("scale density vanishes where P or Q has mass")
    out = np.zeros(p.shape)
    scaled = m > 0
    x = np.where(scaled, p / np.where(scaled, m, 1.0), 0.0)
    y = np.where(scaled, q / np.where(scaled, m, 1.0), 0.0)

    regular = (x > 0) & (y > 0)
    xr, yr = x[regular], y[regular]
    out[regular] = m[regular] * (
        np.asarray(g.eval(xr)) - np.asarray(g.eval(yr)) - np.asarray(g.rderiv(yr)) * (xr - yr)
    )
    p_zero = (x == 0) & (y > 0)
    if np.any(p_zero):
        if math.isinf(g.at_zero):
            out[p_zero] = math.inf
        else:
            yz = y[p_zero]
            out[p_zero] = m[p_zero] * (g.at_zero - np.asarray(g.eval(yz)) + np.asarray(g.rderiv(yz)) * yz)
    q_zero = (x > 0) & (y == 0)
    if np.any(q_zero):
        if math.isinf(g.at_zero) or math.isinf(g.rderiv_at_zero):
            out[q_zero] = math.inf
        else:
            xz = x[q_zero]
            out[q_zero] = m[q_zero] * (np.asarray(g.eval(xz)) - g.at_zero - g.rderiv_at_zero * xz)
    return out


# ============ Oracle distances ============

def _counting_measure(fn: DensityFn, points: np.ndarray) -> DiscreteMeasure:
    return DiscreteMeasure(_as_array(fn, np.asarray(points, dtype=float)))


def oracle_d_phi(
    g: Generator,
    p: DensityFn,
    m: DensityFn,
    domain: Interval = (-math.inf, math.inf),
    *,
    dominating: Dominating = Dominating.LEBESGUE,
    points: Optional[np.ndarray] = None,
    tol: float = ORACLE_TOL,
) -> ExtReal:
    """Integral of m phi(p / m), or the weighted sum over `points` for counting measures."""
    if dominating is Dominating.COUNTING:
        return d_phi(g, _counting_measure(p, points), _counting_measure(m, points))
    return quadrature_d_phi(g, p, m, domain, tol=tol).value


def quadrature_d_phi(g: Generator, p: DensityFn, m: DensityFn, domain: Interval, *, tol: float = ORACLE_TOL) -> Quadrature:
    def integrand(x):
        return d_phi_integrand(g, _as_array(p, x), _as_array(m, x))

    return integrate(integrand, domain, tol=tol, densities=(p, m))


def oracle_b_phi(
    g: Generator,
    p: DensityFn,
    q: DensityFn,
    m: DensityFn,
    domain: Interval = (-math.inf, math.inf),
    *,
    dominating: Dominating = Dominating.LEBESGUE,
    points: Optional[np.ndarray] = None,
    tol: float = ORACLE_TOL,
) -> ExtReal:
    """Integral of the scaled Bregman integrand, or its exact sum for counting measures."""
    if dominating is Dominating.COUNTING:
        return b_phi(
            g,
            _counting_measure(p, points),
            _counting_measure(q, points),
            _counting_measure(m, points),
            require_probability=False,
        )

    result = quadrature_b_phi(g, p, q, m, domain, tol=tol)
    if result.value < -max(tol, result.error):
        logger.warning("negative quadrature value %r for B_phi (error %.3g)", result.value, result.error)
    return result.value


def quadrature_b_phi(
    g: Generator, p: DensityFn, q: DensityFn, m: DensityFn, domain: Interval, *, tol: float = ORACLE_TOL
) -> Quadrature:
    def integrand(x):
        return b_phi_integrand(g, _as_array(p, x), _as_array(q, x), _as_array(m, x))

    return integrate(integrand, domain, tol=tol, densities=(p, q, m))


def tolerance_stability(compute: Callable[[float], Quadrature], tol: float = ORACLE_TOL) -> tuple[float, float]:
    """Change of a quadrature when its tolerance is halved, and the error estimate at `tol`.

    Self-consistent results move by no more than the estimate.
    """
    coarse, fine = compute(tol), compute(tol / 2.0)
    change = abs(fine.value - coarse.value)
    logger.debug("tolerance %.3g -> %.3g moved the value by %.3g (estimate %.3g)", tol, tol / 2.0, change, coarse.error)
    return change, coarse.error


def triple_d_phi(g: Generator, triple: DensityTriple, tol: float = ORACLE_TOL) -> ExtReal:
    """D_phi(P, Q) for the P and Q of a triple."""
    return oracle_d_phi(
        g, triple.p, triple.q, triple.domain, dominating=triple.dominating, points=triple.points, tol=tol
    )


def triple_b_phi(g: Generator, triple: DensityTriple, tol: float = ORACLE_TOL) -> ExtReal:
    return oracle_b_phi(
        g, triple.p, triple.q, triple.m, triple.domain, dominating=triple.dominating, points=triple.points, tol=tol
    )


def family_triple(F: ExpFamily, th1, th2, th0) -> DensityTriple:
    """Densities (or masses) of P_th1, P_th2 and P_th0 from the family accessors."""
    thetas = [natural_param(F, th) for th in (th1, th2, th0)]
    if F.mass_function is not None:
        upper = max(int(F.mass_function(th)[0][-1]) for th in thetas)
        points = np.arange(upper + 1, dtype=float)

        def masses_of(theta):
            return lambda x: F.mass_function(theta, np.asarray(x))[1]

        p, q, m = (masses_of(th) for th in thetas)
        return DensityTriple(p=p, q=q, m=m, dominating=Dominating.COUNTING, points=points)
    if F.density is not None:

        def density_of(theta):
            return lambda x: F.density(theta, x)

        p, q, m = (density_of(th) for th in thetas)
        return DensityTriple(p=p, q=q, m=m, domain=F.support)
    raise DomainError(f"{F.label} has no density or mass accessor for the oracle")
