"""Configuration and constants for breg."""

import math
import sys
from enum import Enum, IntEnum


class Kind(str, Enum):
    """Which discrete quantity the `divergence` command computes."""
    DPHI = "dphi"  # D_phi(P, M)
    BPHI = "bphi"  # B_phi(P, Q | M)


class Quantity(str, Enum):
    """Closed-form quantities exposed by the `expfam` command."""
    DALPHA = "dalpha"
    BALPHA = "balpha"
    RHO = "rho"
    SIGMA = "sigma"
    RENYI = "renyi"


class Suite(str, Enum):
    """Property suites run by `breg check`."""
    IDENTITIES = "identities"
    ORACLE = "oracle"
    SUFFICIENCY = "sufficiency"
    COUNTEREXAMPLE = "counterexample"
    LIMITS = "limits"
    SHIFTS = "shifts"


class DomainStatus(str, Enum):
    """Where a natural parameter sits relative to Theta = {b < inf}."""
    INTERIOR = "interior"
    BOUNDARY = "boundary"  # in Theta but not in its interior
    OUTSIDE = "outside"


class Dominating(str, Enum):
    """Dominating measure of an oracle density triple."""
    LEBESGUE = "lebesgue"
    COUNTING = "counting"


class ExitCode(IntEnum):
    """Process exit codes of the CLI."""
    OK = 0
    PROPERTY_FAILURE = 1
    INPUT_ERROR = 2
    DOMAIN_ERROR = 3


# Measures
PROBABILITY_TOL = 1e-12
SUFFICIENCY_RTOL = 1e-12

# Exponential families
ALPHA_ROUTING_EPS = 1e-9
EXP_OVERFLOW = math.log(sys.float_info.max)
FD_MIN_STEP = 1e-6
FD_REL_STEP = 1e-8

# Oracle
ORACLE_TOL = 1e-9
TRUNCATION_RATIO = 1e-16
POISSON_TAIL = 1e-15
ORACLE_MAX_SUBDIVISIONS = 500

# Generators
CONVEXITY_SLACK = 1e-12
GENERATOR_CHECK_GRID = (1e-6, 1e6, 1000)

# Grid sweeps
DEFAULT_GRID_STEPS = 50
DEFAULT_SEED = 0
