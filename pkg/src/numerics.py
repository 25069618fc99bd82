"""
Numerical Kernels Module
Log-space arithmetic and the bracketed one-dimensional maximiser shared by
every radial supremum in the package.

All searches run in the log-radius t = ln r, so radii far outside the float
range stay representable and the objectives are smooth in the search variable.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp as _scipy_logsumexp

from exceptions import ArgumentError, NumericDomainError

logger = logging.getLogger(__name__)

LOG_ZERO = float("-inf")
LOG_TWO = math.log(2.0)

# Stand-in for -ln 0 inside the scipy minimiser.
_FLOOR = 1e300

# Below this |x| the log1p gaps switch to their Taylor series.
_SERIES_CUTOFF = 1e-3
_SERIES_TERMS = 12

LogRadiusObjective = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SearchConfig:
    """Knobs of the bracketed radial maximiser."""
    left_log_radius: float = -20.0 * LOG_TWO   # r = 2^-20 unless a peak lies further left
    grid_points: int = 256
    xtol: float = 1e-12                         # absolute in ln r, i.e. relative in r
    max_doublings: int = 1024
    max_refined_peaks: int = 8
    max_refine_iterations: int = 500


DEFAULT_SEARCH = SearchConfig()


def logsumexp(values) -> float:
    """
    Log of a sum of exponentials, returning -inf for empty or all -inf input.

    Args:
        values: Iterable or array of log-domain numbers

    Returns:
        ln(sum(exp(values)))
    """
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        return LOG_ZERO
    finite = arr[arr > LOG_ZERO]
    if finite.size == 0:
        return LOG_ZERO
    return float(_scipy_logsumexp(finite))


def logsumexp_rows(matrix: np.ndarray) -> np.ndarray:
    """Row-wise logsumexp of a 2-D array; rows of -inf give -inf."""
    matrix = np.asarray(matrix, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.atleast_1d(_scipy_logsumexp(matrix, axis=1))
    return np.where(np.isnan(out), LOG_ZERO, out)


def gap_log1p(x):
    """
    x - ln(1 + x) for x > -1, accurate near zero.

    The series x²/2 - x³/3 + x⁴/4 - ... is used for |x| below the cutoff so
    the result keeps full relative precision when x → 0.
    """
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    xs = x[small]
    series = np.zeros_like(xs)
    for k in range(_SERIES_TERMS, 1, -1):
        series = (series + ((-1) ** k) / k) * xs
    out[small] = series * xs
    xl = x[~small]
    out[~small] = xl - np.log1p(xl)
    return out if out.ndim else float(out)


def gap_log1m(x):
    """
    -ln(1 - x) - x for x < 1, accurate near zero.

    Series x²/2 + x³/3 + x⁴/4 + ... below the cutoff.
    """
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUTOFF
    out = np.empty_like(x)
    xs = x[small]
    series = np.zeros_like(xs)
    for k in range(_SERIES_TERMS, 1, -1):
        series = (series + 1.0 / k) * xs
    out[small] = series * xs
    xl = x[~small]
    out[~small] = -np.log1p(-xl) - xl
    return out if out.ndim else float(out)


def _evaluate(objective: LogRadiusObjective, t: float) -> float:
    value = float(np.asarray(objective(np.array([t], dtype=float))).ravel()[0])
    return LOG_ZERO if math.isnan(value) else value


def bracket_right_log_radius(
    objective: LogRadiusObjective,
    config: SearchConfig = DEFAULT_SEARCH,
    min_right: Optional[float] = None
) -> float:
    """
    Double the right end of the search interval, starting at r = 1, until the
    objective has decreased twice in a row.

    Args:
        objective: Vectorised objective in t = ln r
        config: Search configuration
        min_right: Lower bound for the returned right end (in ln r)

    Returns:
        Right end of the bracket, in ln r

    Raises:
        NumericDomainError: no double decrease within the doubling budget
    """
    history = []
    for k in range(config.max_doublings):
        t = k * LOG_TWO
        history.append(_evaluate(objective, t))
        if min_right is not None and t < min_right + LOG_TWO:
            continue
        if len(history) >= 3:
            h2, h1, h0 = history[-3], history[-2], history[-1]
            if h0 < h1 < h2:
                return t
            if h0 == LOG_ZERO and max(history) > LOG_ZERO:
                return t
    raise NumericDomainError(
        f"weight not rapidly decreasing at this scale "
        f"(no decrease within {config.max_doublings} doublings)"
    )


def bracket_left_log_radius(
    objective: LogRadiusObjective,
    config: SearchConfig = DEFAULT_SEARCH
) -> float:
    """
    Halve the left end of the search interval, starting at r = 1, until the
    objective has decreased twice in a row going left.

    Meant for objectives like m ln r - phi(r) that fall off towards r = 0.

    Raises:
        NumericDomainError: no double decrease within the doubling budget
    """
    history = []
    for k in range(config.max_doublings):
        t = -k * LOG_TWO
        history.append(_evaluate(objective, t))
        if len(history) >= 3:
            h2, h1, h0 = history[-3], history[-2], history[-1]
            if h0 < h1 < h2:
                return t
            # underflow past the peak
            if h0 == LOG_ZERO and max(history) > LOG_ZERO:
                return t
    raise NumericDomainError(
        f"no peak found above r = 2^-{config.max_doublings} "
        f"(objective still increasing towards the origin)"
    )


def refine_max(
    objective: LogRadiusObjective,
    lo: float,
    hi: float,
    config: SearchConfig = DEFAULT_SEARCH
) -> Tuple[float, float]:
    """
    Maximum of a unimodal function on [lo, hi] by bounded Brent search
    (golden-section steps with parabolic acceleration).

    Returns:
        (argmax, max value)
    """
    if hi <= lo:
        return lo, _evaluate(objective, lo)

    def negated(t):
        value = _evaluate(objective, float(t))
        return -value if value > LOG_ZERO else _FLOOR

    result = minimize_scalar(
        negated, bounds=(lo, hi), method="bounded",
        options={"xatol": config.xtol, "maxiter": config.max_refine_iterations},
    )
    t = float(result.x)
    return t, _evaluate(objective, t)


def maximize_log_radius(
    objective: LogRadiusObjective,
    config: SearchConfig = DEFAULT_SEARCH,
    min_right: Optional[float] = None,
    interval: Optional[Tuple[float, float]] = None,
    max_left: Optional[float] = None
) -> Tuple[float, float]:
    """
    Maximise an objective over the log-radius.

    The interval is found by radius doubling (unless given), scanned on an
    equispaced grid in ln r, and every grid-local maximum is refined on its
    two neighbouring cells. Ties keep the smallest maximiser.

    Args:
        objective: Vectorised objective in t = ln r
        config: Search configuration
        min_right: Smallest admissible right end of the doubling bracket
        interval: Explicit (lo, hi) in ln r; skips the doubling bracket
        max_left: Largest admissible left end; the default left end is used
            when it is already smaller

    Returns:
        (argmax in ln r, max value); (lo, -inf) when the objective is -inf everywhere
    """
    if interval is None:
        lo = config.left_log_radius
        if max_left is not None:
            lo = min(lo, max_left)
        hi = bracket_right_log_radius(objective, config, min_right)
    else:
        lo, hi = interval
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ArgumentError(f"Invalid log-radius interval: ({lo}, {hi})")
        if hi == lo:
            return lo, _evaluate(objective, lo)

    grid = np.linspace(lo, hi, config.grid_points)
    values = np.asarray(objective(grid), dtype=float)
    values = np.where(np.isnan(values), LOG_ZERO, values)
    if not np.any(values > LOG_ZERO):
        return lo, LOG_ZERO

    # grid-local maxima, endpoints included
    last = len(grid) - 1
    left = np.concatenate(([LOG_ZERO], values[:-1]))
    right = np.concatenate((values[1:], [LOG_ZERO]))
    peaks = np.flatnonzero((values >= left) & (values >= right) & (values > LOG_ZERO))
    if peaks.size > config.max_refined_peaks:
        top = np.argsort(-values[peaks], kind="stable")[:config.max_refined_peaks]
        peaks = np.sort(peaks[top])

    best_t, best_value = float(grid[peaks[0]]), float(values[peaks[0]])
    for i in peaks:
        t_grid, v_grid = float(grid[i]), float(values[i])
        t_ref, v_ref = refine_max(
            objective, float(grid[max(i - 1, 0)]), float(grid[min(i + 1, last)]), config
        )
        t_cand, v_cand = (t_ref, v_ref) if v_ref > v_grid else (t_grid, v_grid)
        if v_cand > best_value:
            best_t, best_value = t_cand, v_cand

    logger.debug("maximize_log_radius: [%.4g, %.4g] -> t=%.12g value=%.12g",
                 lo, hi, best_t, best_value)
    return best_t, best_value
