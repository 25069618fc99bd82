import math
import sys
import os

import mpmath
import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from exceptions import ArgumentError, NumericDomainError
from numerics import (
    LOG_ZERO,
    SearchConfig,
    bracket_left_log_radius,
    bracket_right_log_radius,
    gap_log1m,
    gap_log1p,
    logsumexp,
    logsumexp_rows,
    maximize_log_radius,
    refine_max,
)


def _peak_objective(m):
    # m ln r - r, the log of r^m exp(-r)
    return lambda t: m * np.asarray(t) - np.exp(t)


class TestLogSumExp:

    def test_empty_and_all_zero(self):
        """Empty input and all -inf input give -inf."""
        assert logsumexp([]) == LOG_ZERO
        assert logsumexp([LOG_ZERO, LOG_ZERO]) == LOG_ZERO

    def test_values(self):
        """ln(e^0 + e^0) = ln 2, and -inf entries are ignored."""
        assert logsumexp([0.0, 0.0]) == pytest.approx(math.log(2.0))
        assert logsumexp([1.0, LOG_ZERO]) == pytest.approx(1.0)

    def test_large_arguments(self):
        """No overflow far outside the float range of exp."""
        assert logsumexp([1000.0, 1000.0]) == pytest.approx(1000.0 + math.log(2.0))

    def test_rows(self):
        """Row-wise version handles rows that are entirely -inf."""
        out = logsumexp_rows(np.array([[0.0, 0.0], [LOG_ZERO, LOG_ZERO], [5.0, LOG_ZERO]]))
        assert out[0] == pytest.approx(math.log(2.0))
        assert out[1] == LOG_ZERO
        assert out[2] == pytest.approx(5.0)


class TestGapKernels:

    def test_reference_values(self):
        """x - ln(1+x) at 1/2 and -ln(1-x) - x at 1/4."""
        assert gap_log1p(0.5) == pytest.approx(0.0945348918918356, rel=1e-12)
        assert gap_log1m(0.25) == pytest.approx(0.0376820724517809, rel=1e-12)

    def test_scalar_in_scalar_out(self):
        """Scalars return Python floats, arrays return arrays."""
        assert isinstance(gap_log1p(0.5), float)
        assert gap_log1m(np.array([0.1, 0.2])).shape == (2,)

    def test_full_relative_precision_near_zero(self):
        """Both kernels keep relative precision across the series cutoff."""
        mpmath.mp.dps = 50
        for x in [2.0 ** -40, 2.0 ** -14, 0.999e-3, 1.001e-3, 0.3]:
            xm = mpmath.mpf(x)
            expected_p = float(xm - mpmath.log1p(xm))
            expected_m = float(-mpmath.log1p(-xm) - xm)
            assert gap_log1p(x) == pytest.approx(expected_p, rel=1e-11)
            assert gap_log1m(x) == pytest.approx(expected_m, rel=1e-11)

    def test_quadratic_leading_term(self):
        """Both gaps behave like x^2/2 for tiny x."""
        assert gap_log1p(1e-8) == pytest.approx(5e-17, rel=1e-6)
        assert gap_log1m(1e-8) == pytest.approx(5e-17, rel=1e-6)


class TestMaximiser:

    def test_refine_on_parabola(self):
        """Bounded refinement finds the vertex of a concave parabola."""
        t, value = refine_max(lambda t: -(np.asarray(t) - 1.0) ** 2, 0.0, 3.0)
        assert t == pytest.approx(1.0, abs=1e-6)
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_bracket_contains_peak(self):
        """The doubling bracket ends to the right of the peak of r^5 e^-r."""
        hi = bracket_right_log_radius(_peak_objective(5.0))
        assert hi > math.log(5.0)

    def test_bracket_respects_min_right(self):
        """The bracket is never shorter than min_right + ln 2."""
        hi = bracket_right_log_radius(_peak_objective(5.0), min_right=10.0)
        assert hi >= 10.0 + math.log(2.0)

    def test_bracket_fails_for_increasing_objective(self):
        """An objective that never decreases is reported as a domain error."""
        with pytest.raises(NumericDomainError, match="not rapidly decreasing"):
            bracket_right_log_radius(lambda t: np.asarray(t), SearchConfig(max_doublings=40))

    def test_left_bracket_passes_small_peak(self):
        """The halving bracket ends left of the peak of r e^(-1e7 r) at r = 1e-7."""
        lo = bracket_left_log_radius(lambda t: np.asarray(t) - 1e7 * np.exp(t))
        assert lo < -7.0 * math.log(10.0)

    def test_left_bracket_fails_towards_origin(self):
        """An objective growing towards r = 0 has no left bracket."""
        with pytest.raises(NumericDomainError):
            bracket_left_log_radius(lambda t: -np.asarray(t), SearchConfig(max_doublings=40))

    def test_maximize_with_max_left(self):
        """max_left extends the default left end to reach a peak at r = 1e-7."""
        objective = lambda t: np.asarray(t) - 1e7 * np.exp(t)
        lo = bracket_left_log_radius(objective)
        t, value = maximize_log_radius(objective, max_left=lo)
        assert t == pytest.approx(-7.0 * math.log(10.0), abs=1e-6)
        assert value == pytest.approx(-7.0 * math.log(10.0) - 1.0, rel=1e-12)

    def test_default_left_end_misses_small_peak(self):
        """Without max_left the grid starts at r = 2^-20 and the peak is the left end."""
        t, _ = maximize_log_radius(lambda t: np.asarray(t) - 1e7 * np.exp(t))
        assert t == pytest.approx(-20.0 * math.log(2.0), abs=1e-6)

    def test_maximize_monomial_peak(self):
        """sup_r r^5 e^-r is attained at r = 5."""
        t, value = maximize_log_radius(_peak_objective(5.0))
        assert value == pytest.approx(5.0 * math.log(5.0) - 5.0, rel=1e-12)
        assert t == pytest.approx(math.log(5.0), abs=1e-6)

    def test_maximize_on_interval_boundary(self):
        """A maximum at the right end of an explicit interval is kept exactly."""
        t, value = maximize_log_radius(_peak_objective(5.0), interval=(0.0, 1.0))
        assert t == pytest.approx(1.0)
        assert value == pytest.approx(5.0 - math.e, rel=1e-12)

    def test_two_separated_peaks(self):
        """The larger of two separated local maxima wins."""
        def objective(t):
            t = np.asarray(t, dtype=float)
            return np.maximum(-(t - 1.0) ** 2, 0.5 - (t + 5.0) ** 2)

        t, value = maximize_log_radius(objective, interval=(-10.0, 5.0))
        assert t == pytest.approx(-5.0, abs=1e-6)
        assert value == pytest.approx(0.5, abs=1e-12)

    def test_all_zero_objective(self):
        """An objective that is -inf everywhere yields (lo, -inf)."""
        t, value = maximize_log_radius(lambda t: np.full(np.shape(t), LOG_ZERO), interval=(-1.0, 1.0))
        assert t == -1.0
        assert value == LOG_ZERO

    def test_invalid_interval(self):
        """Reversed or non-finite intervals are rejected."""
        with pytest.raises(ArgumentError):
            maximize_log_radius(_peak_objective(1.0), interval=(1.0, 0.0))
        with pytest.raises(ArgumentError):
            maximize_log_radius(_peak_objective(1.0), interval=(0.0, math.inf))
