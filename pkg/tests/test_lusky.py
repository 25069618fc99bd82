import math
import sys
import os
import runpy

import mpmath
import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from exceptions import ArgumentError, NumericDomainError
from lusky import (
    LuskyConfig,
    LuskySequence,
    closed_form_count,
    closed_form_exp_weight,
    construct_covering,
    construct_sequence,
    log_A,
    log_AB,
    log_B,
    log_boundary_swap,
    validate_condition_35,
)
from weights import Weight


@pytest.fixture
def exp_weight():
    """v(r) = exp(-r)."""
    return Weight.exp_power(1.0, 1.0)


class TestComparabilityRatios:

    def test_reference_pair(self, exp_weight):
        """ln A(16, 25) and ln B(16, 25) under exp(-r)."""
        mpmath.mp.dps = 50
        expected_a = float(16 * mpmath.log(mpmath.mpf(16) / 25) + 9)
        expected_b = float(25 * mpmath.log(mpmath.mpf(25) / 16) - 9)
        assert log_A(exp_weight, 16, 25) == pytest.approx(expected_a, abs=1e-12)
        assert log_B(exp_weight, 16, 25) == pytest.approx(expected_b, abs=1e-12)
        assert log_A(exp_weight, 16, 25) == pytest.approx(1.859406, abs=1e-6)
        assert log_B(exp_weight, 16, 25) == pytest.approx(2.157213, abs=1e-6)

    def test_gaussian_weight(self):
        """Under exp(-r^2), ln A(2, 8) = 3 - 2 ln 2."""
        assert log_A(Weight.exp_power(1.0, 2.0), 2, 8) == pytest.approx(3 - 2 * math.log(2), abs=1e-12)

    def test_general_path_matches_fast_path(self, exp_weight):
        """Peak-value formulas on a custom exp(-r) agree with the log1p kernels."""
        custom = Weight.custom(lambda r: r)
        for m, n in [(1.0, 2.0), (16.0, 25.0), (100.0, 121.0)]:
            fast_a, fast_b = log_AB(exp_weight, m, n)
            slow_a, slow_b = log_AB(custom, m, n)
            assert slow_a == pytest.approx(fast_a, abs=1e-6)
            assert slow_b == pytest.approx(fast_b, abs=1e-6)

    def test_nonnegative(self):
        """A and B are at least 1 for every family and pair."""
        rng = np.random.default_rng(7)
        weights = [Weight.exp_power(0.3, 0.7), Weight.exp_power(2.0, 3.0),
                   Weight.exp_exp(), Weight.log_power(2.5)]
        for _ in range(50):
            m = float(10 ** rng.uniform(-1, 3))
            n = m * (1 + float(10 ** rng.uniform(-4, 1)))
            for w in weights:
                pa, pb = log_AB(w, m, n)
                assert pa >= -1e-12
                assert pb >= -1e-12

    def test_a_below_b_for_quadratic_boundaries(self):
        """A(m_n, m_{n+1}) <= B(m_n, m_{n+1}) for m_n = alpha n^2 under exp(-r)."""
        for alpha in [0.5, 1.0, 2.0, math.e]:
            seq = LuskySequence.from_boundaries(
                Weight.exp_power(), [alpha * n * n for n in range(1, 201)]
            )
            assert np.all(np.asarray(seq.log_A) <= np.asarray(seq.log_B) + 1e-12)

    def test_invalid_pair(self, exp_weight):
        """m must be below n and positive."""
        for m, n in [(2.0, 2.0), (3.0, 2.0), (0.0, 1.0)]:
            with pytest.raises(ArgumentError):
                log_A(exp_weight, m, n)


class TestConstruction:

    def test_root_after_sixteen(self, exp_weight):
        """The boundary after 16 with b = e lies near 22.34."""
        seq = construct_sequence(exp_weight, LuskyConfig(b=math.e, m_start=16.0), count=2)
        assert 22.3 <= seq.boundaries[1] <= 22.4
        assert seq.log_A[0] == pytest.approx(1.0, abs=1e-9)
        assert seq.log_B[0] > 1.0

    def test_minimum_ratio_hits_b(self, exp_weight):
        """Every constructed block has min(A, B) = b to the requested tolerance."""
        seq = construct_sequence(exp_weight, LuskyConfig(b=math.e, m_start=1.0), count=51)
        assert seq.count == 51
        assert seq.blocks == 50
        for pa, pb in zip(seq.log_A, seq.log_B):
            assert min(pa, pb) == pytest.approx(1.0, abs=1e-9)
        assert validate_condition_35(seq, math.e, seq.certified_K).passed

    @pytest.mark.parametrize("w", [Weight.exp_power(1.0, 2.0), Weight.exp_power(3.0, 0.5),
                                   Weight.exp_exp(), Weight.log_power(2.0)])
    def test_other_families(self, w):
        """Construction and validation succeed for the other built-in families."""
        seq = construct_sequence(w, LuskyConfig(b=3.0), count=15)
        assert np.all(np.diff(seq.boundaries) > 0)
        report = validate_condition_35(seq, 3.0, seq.certified_K)
        assert report.passed
        assert report.samples == 14

    def test_covering_reaches_degree(self, exp_weight):
        """The covering sequence's last boundary is at least the degree."""
        seq = construct_covering(exp_weight, LuskyConfig(), 500)
        assert seq.boundaries[-1] >= 500
        assert seq.boundaries[-2] < 500

    def test_b_must_exceed_two(self):
        """b <= 2 is rejected."""
        with pytest.raises(ArgumentError, match="exceed 2"):
            LuskyConfig(b=2.0)

    def test_weight_without_peaks(self):
        """A weight that is not rapidly decreasing cannot be used."""
        w = Weight.custom(lambda r: 0.5 * math.log1p(r))
        with pytest.raises(NumericDomainError):
            construct_sequence(w, LuskyConfig(), count=3)

    def test_round_trip(self, exp_weight):
        """to_dict/from_dict keeps boundaries and the certified constants."""
        seq = construct_sequence(exp_weight, LuskyConfig(), count=6)
        again = LuskySequence.from_dict(seq.to_dict())
        assert again.boundaries == seq.boundaries
        assert again.certified_b == seq.certified_b
        assert again.certified_K == seq.certified_K


class TestClosedForm:

    def test_boundaries(self):
        """m_n = p (ln b) n^2."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 10)
        assert list(seq.boundaries) == pytest.approx([n * n for n in range(1, 11)])
        seq = closed_form_exp_weight(1.0, 2.0, math.e, 5)
        assert list(seq.boundaries) == pytest.approx([2 * n * n for n in range(1, 6)])

    def test_ratios_independent_of_scale(self):
        """A_n and B_n do not depend on a."""
        one = closed_form_exp_weight(1.0, 1.0, math.e, 20)
        three = closed_form_exp_weight(3.0, 1.0, math.e, 20)
        assert list(one.log_A) == pytest.approx(list(three.log_A), abs=1e-12)
        assert one.log_A[3] == pytest.approx(1.859406, abs=1e-6)

    def test_validation_passes_from_block_four(self):
        """b = e, K = e^4.5 holds on blocks 4..100; blocks 1..3 are uncertified."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 101)
        report = validate_condition_35(seq, math.e, math.e ** 4.5)
        assert report.passed
        assert report.uncertified == [1, 2, 3]
        assert report.samples == 97

    def test_validation_fails_for_larger_b(self):
        """The same boundaries do not certify b = e^2."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 101)
        report = validate_condition_35(seq, math.e ** 2, math.e ** 9)
        assert not report.passed
        assert report.witness["n"] == 4

    def test_degenerate_pair_fails(self, exp_weight):
        """Boundaries (1, 2) give A = e/2 < 3."""
        seq = LuskySequence.from_boundaries(exp_weight, [1.0, 2.0])
        report = validate_condition_35(seq, 3.0, 100.0)
        assert not report.passed
        assert report.worst_margin == pytest.approx(1 - math.log(2) - math.log(3), abs=1e-12)

    def test_count(self):
        """closed_form_count covers the requested degree."""
        assert closed_form_count(1.0, math.e, 60) == 9
        assert closed_form_count(1.0, math.e, 0) == 2


class TestBoundarySwap:

    def test_endpoints_and_bound(self):
        """The swap factor runs from -ln A_n to ln B_n and stays within ln K."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 20)
        log_k = math.log(seq.certified_K)
        for n in range(4, seq.blocks + 1):
            lo, hi = seq.boundaries[n - 1], seq.boundaries[n]
            assert log_boundary_swap(seq, n, lo) == pytest.approx(-seq.log_A[n - 1], abs=1e-9)
            assert log_boundary_swap(seq, n, hi) == pytest.approx(seq.log_B[n - 1], abs=1e-9)
            for m in np.linspace(lo, hi, 7):
                assert abs(log_boundary_swap(seq, n, m)) <= log_k + 1e-9

    def test_out_of_range(self):
        """m outside the block is rejected."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 5)
        with pytest.raises(ArgumentError):
            log_boundary_swap(seq, 2, 100.0)
        with pytest.raises(ArgumentError):
            log_boundary_swap(seq, 9, 4.0)


class TestDemo:

    def test_module_demo_runs(self, capsys):
        """Running the module as a script prints its demo."""
        runpy.run_path(os.path.join(os.path.dirname(__file__), '../src/lusky.py'), run_name="__main__")
        assert "Lusky module ready!" in capsys.readouterr().out
