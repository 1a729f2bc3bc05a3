"""Property suites run by `breg check`.

Each suite is a sequence of named properties evaluated over seeded random
instances. Results are collected into a SuiteReport, one PropertyResult per
property, and optionally saved to a report directory.
"""

import logging
import math
from collections.abc import Callable, Iterator
from datetime import datetime, timezone

import numpy as np

from . import discrete, expfam, families, oracle
from .config import Suite
from .discrete import DiscreteMeasure, MergeMap, ProbabilityMeasure
from .errors import BregError
from .generators import (
    Generator,
    adjoint,
    builtin_generators,
    make_kl,
    make_pearson,
    make_power,
    make_reverse_kl,
    make_total_variation,
)
from .models import PropertyResult, Settings, SuiteReport
from .store import save_report

logger = logging.getLogger(__name__)

IDENTITY_CASES = 100
BINOMIAL_ORACLE_CASES = 200
QUADRATURE_CASES = 50
SUFFICIENCY_CASES = 50
SHIFT_CASES = 20
STABILITY_CASES = 5


def deviation(value: float, expected: float) -> float:
    """|value - expected| / (1 + |expected|), with equal infinities at distance 0."""
    if math.isinf(value) or math.isinf(expected):
        return 0.0 if value == expected else math.inf
    return abs(value - expected) / (1.0 + abs(expected))


def _result(name: str, deviations: list[float], tolerance: float, detail: str = "") -> PropertyResult:
    worst = max(deviations) if deviations else 0.0
    return PropertyResult(
        name=name,
        passed=worst <= tolerance,
        max_deviation=worst,
        tolerance=tolerance,
        cases=len(deviations),
        detail=detail,
    )


def _guarded(name: str, fn: Callable[[], PropertyResult]) -> PropertyResult:
    try:
        return fn()
    except BregError as e:
        return PropertyResult(name=name, passed=False, max_deviation=math.inf, detail=f"{e.code}: {e.message}")


def random_probability(rng: np.random.Generator, d: int) -> ProbabilityMeasure:
    """A strictly positive probability vector of length d."""
    masses = rng.dirichlet(np.ones(d)) + 1e-3
    return ProbabilityMeasure(masses / masses.sum())


def random_scale(rng: np.random.Generator, d: int) -> DiscreteMeasure:
    return DiscreteMeasure(rng.uniform(0.05, 3.0, size=d))


def _alpha_away_from_limits(rng: np.random.Generator, low: float, high: float) -> float:
    while True:
        alpha = float(rng.uniform(low, high))
        if min(abs(alpha), abs(alpha - 1.0)) > 0.05:
            return alpha


# ============ identities ============

def _identity_instances(rng: np.random.Generator) -> list[tuple[ProbabilityMeasure, ProbabilityMeasure, DiscreteMeasure]]:
    out = []
    for _ in range(IDENTITY_CASES):
        d = int(rng.integers(2, 9))
        out.append((random_probability(rng, d), random_probability(rng, d), random_scale(rng, d)))
    return out


def identities_suite(rng: np.random.Generator, settings: Settings) -> Iterator[PropertyResult]:
    instances = _identity_instances(rng)
    gens = builtin_generators()
    kl, rkl, tv = make_kl(), make_reverse_kl(), make_total_variation()

    yield _result(
        "scale identity B(P,Q|Q) = D(P,Q)",
        [deviation(discrete.b_phi(g, P, Q, Q), discrete.d_phi(g, P, Q)) for P, Q, _ in instances for g in gens],
        1e-10,
    )
    yield _result(
        "KL scale independence",
        [deviation(discrete.b_phi(kl, P, Q, M), discrete.kl_divergence(P, Q)) for P, Q, M in instances],
        1e-10,
    )
    yield _result(
        "TV reduction",
        [deviation(discrete.b_phi(tv, P, Q, Q), discrete.total_variation(P, Q)) for P, Q, _ in instances],
        1e-10,
    )
    yield _result(
        "reverse KL identity B_rkl(P,Q|P) = chi2 - KL",
        [
            deviation(discrete.b_phi(rkl, P, Q, P), discrete.chi_square(P, Q) - discrete.kl_divergence(P, Q))
            for P, Q, _ in instances
        ]
        + [
            deviation(
                discrete.b_phi(rkl, P, Q, P),
                2.0 * discrete.power_divergence(P, Q, 2.0) - discrete.power_divergence(P, Q, 1.0),
            )
            for P, Q, _ in instances
        ],
        1e-8,
    )
    yield _result(
        "adjoint skew symmetry",
        [deviation(discrete.d_phi(adjoint(g), P, Q), discrete.d_phi(g, Q, P)) for P, Q, _ in instances for g in gens],
        1e-10,
    )
    yield _result(
        "nonnegativity",
        [max(0.0, -discrete.b_phi(g, P, Q, M)) for P, Q, M in instances for g in gens],
        1e-12,
    )
    yield _result(
        "Lemma 1 lower bound",
        [
            max(0.0, discrete.lemma1_lower_bound(g, M) - discrete.d_phi(g, P, M))
            for P, _, M in instances
            for g in gens
        ]
        + [
            deviation(
                discrete.d_phi(g, discrete.lemma1_equality_point(M), M), discrete.lemma1_lower_bound(g, M)
            )
            for _, _, M in instances
            for g in gens
        ],
        1e-10,
    )

    def range_violation(g: Generator, P, Q) -> float:
        value = discrete.d_phi(g, P, Q)
        upper = g.at_zero + g.adjoint_at_zero
        return max(0.0, -value, value - upper)

    yield _result(
        "range bounds 0 <= D <= phi(0) + phi*(0)",
        [range_violation(g, P, Q) for P, Q, _ in instances for g in gens],
        1e-12,
    )
    yield _result(
        "homogeneity of order one",
        [
            deviation(
                discrete.b_phi(g, P.scaled(t), Q.scaled(t), M.scaled(t), require_probability=False),
                t * discrete.b_phi(g, P, Q, M),
            )
            for (P, Q, M), t in zip(instances, rng.uniform(0.1, 10.0, size=len(instances)))
            for g in gens
        ],
        1e-10,
    )

    def skew_cases() -> list[float]:
        out = []
        for F, draw in ((families.binomial(10), lambda: rng.uniform(-2, 2, 1)), (families.rayleigh(), lambda: rng.uniform(0.5, 3, 1))):
            for _ in range(IDENTITY_CASES // 2):
                alpha = _alpha_away_from_limits(rng, -0.5, 1.5)
                t1, t2 = draw(), draw()
                out.append(deviation(expfam.d_alpha(F, alpha, t2, t1), expfam.d_alpha(F, 1.0 - alpha, t1, t2)))
        return out

    yield _guarded("exponential family skew symmetry", lambda: _result("exponential family skew symmetry", skew_cases(), 1e-10))


# ============ oracle ============

def oracle_suite(rng: np.random.Generator, settings: Settings) -> Iterator[PropertyResult]:
    tol = settings.oracle_tol
    F = families.binomial(10)

    def binomial_cases(distance: str) -> list[float]:
        out = []
        for _ in range(BINOMIAL_ORACLE_CASES):
            alpha = _alpha_away_from_limits(rng, -1.0, 2.0)
            t0, t1, t2 = (F.to_natural(p) for p in rng.uniform(0.1, 0.9, 3))
            triple = oracle.family_triple(F, t1, t2, t0)
            g = make_power(alpha)
            if distance == "b":
                out.append(deviation(expfam.b_alpha(F, alpha, t1, t2, t0), oracle.triple_b_phi(g, triple)))
            else:
                out.append(deviation(expfam.d_alpha(F, alpha, t1, t2), oracle.triple_d_phi(g, triple)))
        return out

    yield _guarded("binomial B_alpha vs exact sum", lambda: _result("binomial B_alpha vs exact sum", binomial_cases("b"), 1e-10))
    yield _guarded("binomial D_alpha vs exact sum", lambda: _result("binomial D_alpha vs exact sum", binomial_cases("d"), 1e-10))

    def quadrature_cases(F) -> list[float]:
        out = []
        for _ in range(QUADRATURE_CASES):
            alpha = float(rng.choice([rng.uniform(0.2, 0.8), rng.uniform(1.2, 1.5)]))
            t0, t1, t2 = rng.uniform(1.0, 2.0, 3)
            triple = oracle.family_triple(F, t1, t2, t0)
            g = make_power(alpha)
            out.append(deviation(expfam.b_alpha(F, alpha, t1, t2, t0), oracle.triple_b_phi(g, triple, tol)))
            out.append(deviation(expfam.d_alpha(F, alpha, t1, t2), oracle.triple_d_phi(g, triple, tol)))
        return out

    for F in (families.rayleigh(), families.wiener(1.0)):
        name = f"{F.label} closed forms vs quadrature"
        yield _guarded(name, lambda F=F, name=name: _result(name, quadrature_cases(F), 1e-6))

    def gbm_cases() -> list[float]:
        t, sigma = 1.5, 0.8
        G = families.gbm(t, sigma)
        out = []
        for _ in range(QUADRATURE_CASES):
            alpha = float(rng.uniform(0.2, 0.8))
            drift1, drift2 = rng.uniform(-1.0, 1.0, 2)
            n1, n2 = G.to_natural(drift1), G.to_natural(drift2)
            p1, p2 = (lambda x, n=n1: G.density(n, x)), (lambda x, n=n2: G.density(n, x))
            affinity = oracle.integrate(lambda x: p1(x) ** alpha * p2(x) ** (1.0 - alpha), (-math.inf, math.inf), tol=tol, densities=(p1, p2))
            out.append(deviation(expfam.rho_alpha(G, alpha, n1, n2), math.log(affinity.value)))
            out.append(deviation(expfam.d_one(G, n1, n2), oracle.oracle_d_phi(make_kl(), p1, p2, tol=tol)))
            out.append(deviation(expfam.d_one(G, n1, n2), (drift1 - drift2) ** 2 * t / (2.0 * sigma**2)))
        return out

    yield _guarded("gbm rho_alpha vs quadrature", lambda: _result("gbm rho_alpha vs quadrature", gbm_cases(), 1e-6))

    # alpha stays in (0, 1): the tilted laws then lie between the two truncated ones
    def poisson_cases() -> list[float]:
        P = families.poisson_process(2.0)
        out = []
        for _ in range(QUADRATURE_CASES):
            t0, t1, t2 = rng.uniform(-1.0, 1.0, 3)
            alpha = float(rng.uniform(0.2, 0.8))
            triple = oracle.family_triple(P, t1, t2, t0)
            out.append(deviation(expfam.d_one(P, t1, t2), oracle.triple_d_phi(make_kl(), triple)))
            out.append(deviation(expfam.d_alpha(P, alpha, t1, t2), oracle.triple_d_phi(make_power(alpha), triple)))
        return out

    yield _guarded("poisson process vs truncated sums", lambda: _result("poisson process vs truncated sums", poisson_cases(), 1e-10))

    def stability_cases() -> list[float]:
        out = []
        for F in (families.rayleigh(), families.wiener(1.0)):
            for _ in range(STABILITY_CASES):
                alpha = float(rng.uniform(0.2, 0.8))
                t0, t1, t2 = rng.uniform(1.0, 2.0, 3)
                triple = oracle.family_triple(F, t1, t2, t0)
                g = make_power(alpha)
                change, error = oracle.tolerance_stability(
                    lambda t: oracle.quadrature_b_phi(g, triple.p, triple.q, triple.m, triple.domain, tol=t), tol
                )
                out.append(max(0.0, change - error))
        return out

    # deviation is the part of the change not covered by the error estimate
    yield _guarded("quadrature tolerance stability", lambda: _result("quadrature tolerance stability", stability_cases(), 0.0))


# ============ sufficiency ============

def sufficient_triple(rng: np.random.Generator) -> tuple[MergeMap, ProbabilityMeasure, ProbabilityMeasure, DiscreteMeasure]:
    """A random merge map with P, Q and M proportional within each class."""
    k = int(rng.integers(2, 5))
    d = k + int(rng.integers(1, 5))
    assignment = np.concatenate([np.arange(k), rng.integers(0, k, size=d - k)])
    rng.shuffle(assignment)
    T = MergeMap(tuple(int(j) for j in assignment))
    within = rng.uniform(0.2, 2.0, size=d)

    def factorized(total: float | None):
        masses = rng.uniform(0.2, 2.0, size=k)[assignment] * within
        return masses / masses.sum() if total is None else masses * total

    return T, ProbabilityMeasure(factorized(None)), ProbabilityMeasure(factorized(None)), DiscreteMeasure(factorized(1.0))


def counterexample_values() -> dict[str, float]:
    """Pearson distances before and after merging the last two of three outcomes."""
    g = make_pearson()
    P = ProbabilityMeasure([0.5, 0.25, 0.25])
    Q = ProbabilityMeasure([1.0, 0.0, 0.0])
    M = discrete.uniform_scale(3)
    T = MergeMap((0, 1, 1))
    return {
        "unmerged": discrete.b_phi(g, P, Q, M),
        "merged": discrete.b_phi(g, discrete.merge(T, P), discrete.merge(T, Q), discrete.uniform_scale(2)),
        "merged_scale": discrete.b_phi(g, discrete.merge(T, P), discrete.merge(T, Q), discrete.merge(T, M)),
    }


def _counterexample_result() -> PropertyResult:
    values = counterexample_values()
    detail = " ".join(f"{key}={value!r}" for key, value in values.items())
    devs = [
        deviation(values["unmerged"], 0.375),
        deviation(values["merged"], 0.5),
        deviation(values["merged_scale"], 0.375),
    ]
    result = _result("data processing counterexample", devs, 1e-12, detail)
    if not values["unmerged"] < values["merged"]:
        result.passed = False
    return result


def sufficiency_suite(rng: np.random.Generator, settings: Settings) -> Iterator[PropertyResult]:
    gens = builtin_generators()
    triples = [sufficient_triple(rng) for _ in range(SUFFICIENCY_CASES)]
    yield _result(
        "constructed triples are sufficient",
        [0.0 if discrete.is_sufficient(T, P, Q, M) else 1.0 for T, P, Q, M in triples],
        0.0,
    )
    yield _result(
        "merging preserves B_phi",
        [
            deviation(
                discrete.b_phi(g, discrete.merge(T, P), discrete.merge(T, Q), discrete.merge(T, M)),
                discrete.b_phi(g, P, Q, M),
            )
            for T, P, Q, M in triples
            for g in gens
        ],
        1e-10,
    )
    yield _counterexample_result()


def counterexample_suite(rng: np.random.Generator, settings: Settings) -> Iterator[PropertyResult]:
    yield _counterexample_result()


# ============ limits ============

def convergence_order(errors: tuple[float, float], steps: tuple[float, float]) -> float:
    """Empirical order from errors at two step sizes."""
    if errors[1] == 0.0:
        return math.inf
    return math.log(errors[0] / errors[1]) / math.log(steps[0] / steps[1])


def limits_suite(rng: np.random.Generator, settings: Settings) -> Iterator[PropertyResult]:
    steps = (1e-2, 1e-3)
    cases = [
        (families.binomial(10), list(rng.uniform(-1.5, 1.5, (5, 3)))),
        (families.rayleigh(), list(rng.uniform(1.0, 2.0, (5, 3)))),
    ]

    def approach(name: str, F, thetas, limit: float, target) -> PropertyResult:
        orders, worst = [], 0.0
        for t0, t1, t2 in thetas:
            exact = target(F, t1, t2, t0)
            errors = tuple(
                abs(expfam.b_alpha(F, limit + (h if limit == 0.0 else -h), t1, t2, t0) - exact) for h in steps
            )
            orders.append(convergence_order(errors, steps))
            worst = max(worst, errors[1])
        result = _result(name, [worst], math.inf, detail=f"min order {min(orders):.3f}")
        result.passed = min(orders) >= 0.9
        return result

    for F, thetas in cases:
        for limit, target in ((0.0, expfam.b_zero), (1.0, expfam.b_one)):
            name = f"{F.label} B_alpha -> B_{int(limit)}"
            yield _guarded(name, lambda: approach(name, F, thetas, limit, target))


# ============ shifts ============

def _shift_instances(rng: np.random.Generator) -> list[tuple[families.ExpFamily, Callable[[], np.ndarray]]]:
    gbm = families.gbm(1.0, 0.7)
    return [
        (families.binomial(10), lambda: rng.uniform(-2.0, 2.0, 1)),
        (families.rayleigh(), lambda: rng.uniform(0.5, 3.0, 1)),
        (families.poisson_process(2.0), lambda: rng.uniform(-1.0, 1.0, 1)),
        (families.wiener(1.0), lambda: rng.uniform(0.5, 3.0, 1)),
        (gbm, lambda: gbm.to_natural(rng.uniform(-1.0, 1.0))),
    ]


def shifts_suite(rng: np.random.Generator, settings: Settings) -> Iterator[PropertyResult]:
    for F, draw in _shift_instances(rng):
        devs = []
        for _ in range(SHIFT_CASES):
            shifted = expfam.shift_family(F, rng.uniform(-5.0, 5.0), rng.uniform(-2.0, 2.0, F.dim))
            alpha = float(rng.uniform(0.2, 0.8))
            t0, t1, t2 = draw(), draw(), draw()
            devs.append(deviation(expfam.d_alpha(shifted, alpha, t1, t2), expfam.d_alpha(F, alpha, t1, t2)))
            devs.append(deviation(expfam.b_alpha(shifted, alpha, t1, t2, t0), expfam.b_alpha(F, alpha, t1, t2, t0)))
        name = f"{F.label} shift invariance"
        yield _result(name, devs, 1e-12)


SUITES: dict[Suite, Callable[[np.random.Generator, Settings], Iterator[PropertyResult]]] = {
    Suite.IDENTITIES: identities_suite,
    Suite.ORACLE: oracle_suite,
    Suite.SUFFICIENCY: sufficiency_suite,
    Suite.COUNTEREXAMPLE: counterexample_suite,
    Suite.LIMITS: limits_suite,
    Suite.SHIFTS: shifts_suite,
}


def run_suite(suite: Suite, settings: Settings | None = None) -> SuiteReport:
    """Run every property of a suite and collect the report."""
    settings = settings or Settings()
    report = SuiteReport(suite=suite, seed=settings.seed)
    rng = np.random.default_rng(settings.seed)

    for result in SUITES[suite](rng, settings):
        report.results.append(result)
        logger.info(
            "%s %s: max deviation %.3g over %d case(s)",
            "PASS" if result.passed else "FAIL",
            result.name,
            result.max_deviation,
            result.cases,
        )
        if not result.passed:
            report.flags.append(result.name)

    report.ended_at = datetime.now(timezone.utc)
    if settings.report_dir is not None:
        save_report(report, settings.report_dir)
    return report
