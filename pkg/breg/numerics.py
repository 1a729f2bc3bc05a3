"""Extended-real helpers shared by the distance modules.

ExtReal values are plain floats that may be +inf or -inf. NaN is never a
valid ExtReal: every operation that could produce it raises instead.
"""

import logging
import math
from collections.abc import Iterable

import numpy as np

from .config import EXP_OVERFLOW
from .errors import IndeterminateError

logger = logging.getLogger(__name__)

ExtReal = float


def ext_sum(terms: Iterable[float]) -> ExtReal:
    """Sum extended reals with compensated summation of the finite part.

    +inf absorbs finite values, as does -inf. Meeting both raises
    IndeterminateError; a NaN term raises as well.
    """
    values = np.asarray(list(terms), dtype=float).ravel()
    if np.isnan(values).any():
        raise IndeterminateError("NaN term in extended-real sum")
    has_pos = bool(np.any(values == math.inf))
    has_neg = bool(np.any(values == -math.inf))
    if has_pos and has_neg:
        raise IndeterminateError("sum contains both +inf and -inf")
    if has_pos:
        return math.inf
    if has_neg:
        return -math.inf
    return math.fsum(values.tolist())


def ext_scale(factor: float, value: ExtReal) -> ExtReal:
    """factor * value with 0 * inf = 0 (measure-theoretic convention)."""
    if factor == 0.0:
        return 0.0
    if math.isinf(value):
        return math.copysign(math.inf, factor) * math.copysign(1.0, value)
    return factor * value


def exp_or_inf(x: ExtReal) -> ExtReal:
    """exp(x), returning +inf above the representable exponent."""
    if x > EXP_OVERFLOW:
        logger.debug("exp(%r) overflows, returning inf", x)
        return math.inf
    return math.exp(x)


def expm1_or_inf(x: ExtReal) -> ExtReal:
    """expm1(x), returning +inf above the representable exponent."""
    if x > EXP_OVERFLOW:
        logger.debug("expm1(%r) overflows, returning inf", x)
        return math.inf
    return math.expm1(x)
