import json
import math
import sys
import os
import runpy
from fractions import Fraction

import mpmath
import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from exceptions import ArgumentError, CoverageError
from lusky import closed_form_count, closed_form_exp_weight
from numerics import LOG_ZERO
from series import (
    BlockNormProfile,
    CoefficientSequence,
    coeff_l2_lower_bound_log,
    core_norm_log,
    hull_block_norms,
    hull_block_norms_exp_closed_form,
    poly_norm_v_log,
)
from weights import Weight, monomial_norm_log


@pytest.fixture
def exp_weight():
    return Weight.exp_power(1.0, 1.0)


@pytest.fixture
def inverse_factorials():
    """1/m!, m = 0..60."""
    return CoefficientSequence.from_list([1.0 / math.factorial(m) for m in range(61)])


def random_sequence(rng, max_degree=64):
    """Log-uniform magnitudes in [1e-8, 1e8] with random phases on a random support."""
    degree = int(rng.integers(1, max_degree + 1))
    support = rng.choice(degree + 1, size=int(rng.integers(1, degree + 2)), replace=False)
    values = {}
    for k in support:
        mag = 10.0 ** rng.uniform(-8, 8)
        angle = rng.uniform(0, 2 * math.pi)
        values[int(k)] = complex(mag * math.cos(angle), mag * math.sin(angle))
    return CoefficientSequence(values)


class TestCoefficientSequence:

    def test_zeros_dropped(self):
        """Zero entries are not stored and the degree ignores them."""
        c = CoefficientSequence.from_list([1.0, 0.0, 2.0, 0.0])
        assert len(c) == 2
        assert c.degree == 2
        assert c[1] == 0
        assert CoefficientSequence().degree == -1

    def test_invalid_entries(self):
        """Negative indices and non-numbers are rejected."""
        with pytest.raises(ArgumentError):
            CoefficientSequence({-1: 1.0})
        with pytest.raises(ArgumentError):
            CoefficientSequence({0: "one"})

    def test_exact_arithmetic(self):
        """Fractions stay exact through weights, scaling and addition."""
        c = CoefficientSequence({0: Fraction(1, 3), 2: Fraction(2, 5)})
        scaled = c.apply_weights({0: Fraction(3), 2: Fraction(1, 2)})
        assert scaled == CoefficientSequence({0: Fraction(1), 2: Fraction(1, 5)})
        assert c + c.scale(-1) == CoefficientSequence()

    def test_json_form(self):
        """Entries serialise as [m, re, im] rows."""
        c = CoefficientSequence({0: 1.5, 3: complex(0.0, -2.0)})
        assert c.to_dict() == {"entries": [[0, 1.5, 0.0], [3, 0.0, -2.0]]}
        assert CoefficientSequence.from_json('{"entries": [[0, 1.5], [3, 0, -2]]}') == c

    def test_malformed_json(self):
        """Broken JSON and rows are argument errors."""
        for text in ['{"entries": [[0]]}', '{"rows": []}', '{"entries": ']:
            with pytest.raises(ArgumentError):
                CoefficientSequence.from_json(text)

    def test_non_finite_entries(self):
        """NaN and infinite coefficients are argument errors, also when read from JSON."""
        for value in [math.nan, math.inf, -math.inf, complex(1.0, math.inf), mpmath.mpf("inf")]:
            with pytest.raises(ArgumentError, match="finite"):
                CoefficientSequence({0: value})
        for text in ['{"entries": [[1, Infinity]]}', '{"entries": [[1, NaN]]}',
                     '{"entries": [[1, 0, -Infinity]]}']:
            with pytest.raises(ArgumentError, match="finite"):
                CoefficientSequence.from_json(text)

    def test_log_terms_of_huge_values(self):
        """mpmath coefficients beyond float range keep their logarithm."""
        c = CoefficientSequence({5: mpmath.exp(2000)})
        idx, log_abs, phase = c.log_terms()
        assert list(idx) == [5]
        assert log_abs[0] == pytest.approx(2000.0)
        assert phase[0] == 1.0


class TestHullBlockNorms:

    def test_unit_vector(self):
        """e_10 lies in block 3 of m_n = n^2, evaluated at r = 9."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 10)
        profile = hull_block_norms(CoefficientSequence.unit(10), seq)
        assert profile.block(3)["log_H"] == pytest.approx(-9.0 + 20.0 * math.log(3.0), abs=1e-10)
        assert profile.log_sup == pytest.approx(-9.0 + 20.0 * math.log(3.0), abs=1e-10)
        others = profile.frame[profile.frame["n"] != 3]["log_H"]
        assert np.all(others == LOG_ZERO)

    def test_inverse_factorials(self, inverse_factorials):
        """Block 2 of sum z^m / m! under exp(-r)."""
        mpmath.mp.dps = 50
        expected = mpmath.exp(-4) * mpmath.sqrt(
            mpmath.fsum(mpmath.mpf(16) ** m / mpmath.factorial(m) ** 2 for m in range(5, 10))
        )
        profile = hull_block_norms_exp_closed_form(inverse_factorials, 1.0, 1.0, n_max=9)
        assert profile.block(2)["log_H"] == pytest.approx(float(mpmath.log(expected)), abs=1e-10)
        assert math.exp(profile.block(2)["log_H"]) == pytest.approx(0.19973, abs=1e-4)

    def test_zero_sequence(self):
        """The zero sequence has log-norm -inf."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 5)
        assert hull_block_norms(CoefficientSequence(), seq).log_sup == LOG_ZERO

    def test_block_zero_reported_not_aggregated(self):
        """A constant sits in block 0, which is excluded from the supremum."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 5)
        profile = hull_block_norms(CoefficientSequence({0: 1.0}), seq)
        assert profile.block(0)["log_H"] == pytest.approx(-1.0)
        assert profile.log_sup == LOG_ZERO

    def test_coverage_error(self, inverse_factorials):
        """Support beyond the last boundary asks for a longer sequence."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 7)
        with pytest.raises(CoverageError, match="extend Lusky sequence"):
            hull_block_norms(inverse_factorials, seq)

    @pytest.mark.parametrize("a,p", [(1.0, 2.0), (2.0, 1.0), (0.5, 0.5)])
    def test_closed_form_matches_general(self, a, p):
        """The closed-form path reproduces the general hull norms."""
        rng = np.random.default_rng(11)
        for _ in range(20):
            c = random_sequence(rng, 40)
            n_max = closed_form_count(p, math.e, c.degree)
            general = hull_block_norms(c, closed_form_exp_weight(a, p, math.e, n_max))
            closed = hull_block_norms_exp_closed_form(c, a, p, n_max=n_max)
            g, h = general.log_H, closed.log_H
            assert np.array_equal(np.isfinite(g), np.isfinite(h))
            finite = np.isfinite(g)
            assert g[finite] == pytest.approx(h[finite], abs=1e-9)

    def test_upper_radius_within_ratio_bounds(self, exp_weight):
        """Moving the evaluation radius to r_{m_{n+1}} changes H_n by at most max(A_n, B_n)."""
        rng = np.random.default_rng(5)
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 10)
        for _ in range(30):
            c = random_sequence(rng, 100)
            lower = hull_block_norms(c, seq).log_H
            upper = hull_block_norms(c, seq, use_upper_radius=True).log_H
            for n in range(1, seq.count):
                if not np.isfinite(lower[n]):
                    continue
                bound = max(seq.log_A[n - 1], seq.log_B[n - 1])
                assert abs(upper[n] - lower[n]) <= bound + 1e-9

    def test_solid(self):
        """Shrinking coefficient moduli never increases a block norm."""
        rng = np.random.default_rng(3)
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 10)
        for _ in range(30):
            c = random_sequence(rng, 100)
            shrunk = CoefficientSequence({k: v * rng.uniform(0, 1) for k, v in c.entries.items()})
            before = hull_block_norms(c, seq).log_H
            after = hull_block_norms(shrunk, seq).log_H
            assert np.all(after <= before + 1e-12)


    def test_profile_json_round_trip(self, inverse_factorials):
        """to_dict output parses back to the same blocks and aggregate, empty blocks included."""
        seq = closed_form_exp_weight(1.0, 1.0, math.e, 10)
        profile = hull_block_norms(inverse_factorials, seq)
        data = json.loads(json.dumps(profile.to_dict()))
        back = BlockNormProfile.from_dict(data)
        assert back.to_dict() == data
        assert back.log_sup == profile.log_sup
        assert np.array_equal(back.log_H, profile.log_H)

    def test_malformed_profile_json(self):
        """A profile without blocks is an argument error."""
        with pytest.raises(ArgumentError):
            BlockNormProfile.from_dict({"q": None, "log_sup": 0.0})

class TestRadialNorms:

    def test_monomials(self, exp_weight):
        """All three norms of z^k equal ||z^k||."""
        expected = monomial_norm_log(exp_weight, 7)
        z7 = CoefficientSequence.unit(7)
        assert core_norm_log(z7, exp_weight) == pytest.approx(expected, abs=1e-10)
        assert coeff_l2_lower_bound_log(z7, exp_weight) == pytest.approx(expected, abs=1e-10)
        assert poly_norm_v_log(z7, exp_weight) == pytest.approx(expected, abs=1e-10)

    def test_inverse_factorials_core(self, exp_weight, inverse_factorials):
        """sup_r e^-r sum_{m<=60} r^m/m! = 1, attained at r = 0."""
        assert core_norm_log(inverse_factorials, exp_weight) == pytest.approx(0.0, abs=1e-8)

    def test_one_minus_z(self, exp_weight):
        """||1 - z|| = sup e^-r (1 + r) = 1."""
        c = CoefficientSequence({0: 1.0, 1: -1.0})
        assert core_norm_log(c, exp_weight) == pytest.approx(0.0, abs=1e-12)
        assert poly_norm_v_log(c, exp_weight) == pytest.approx(0.0, abs=1e-12)

    def test_zero_polynomial(self, exp_weight):
        """All norms of 0 are -inf."""
        for norm in [core_norm_log, coeff_l2_lower_bound_log, poly_norm_v_log]:
            assert norm(CoefficientSequence(), exp_weight) == LOG_ZERO

    def test_positive_coefficients(self, exp_weight):
        """With positive coefficients M(f, r) = f(r), so the sup norm equals the core norm."""
        rng = np.random.default_rng(17)
        for _ in range(10):
            c = CoefficientSequence.from_list(10.0 ** rng.uniform(-4, 4, size=int(rng.integers(2, 30))))
            assert poly_norm_v_log(c, exp_weight) == pytest.approx(core_norm_log(c, exp_weight), abs=1e-8)

    def test_sandwich(self, exp_weight):
        """coefficient l2 <= sup norm <= core norm on random polynomials."""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            c = random_sequence(rng)
            l2 = coeff_l2_lower_bound_log(c, exp_weight)
            sup = poly_norm_v_log(c, exp_weight)
            core = core_norm_log(c, exp_weight)
            assert l2 <= sup + 1e-6
            assert sup <= core + 1e-6

    def test_core_norm_solid(self):
        """Shrinking coefficient moduli never increases the core norm."""
        rng = np.random.default_rng(5)
        w = Weight.exp_power(1.0, 1.0)
        for _ in range(50):
            c = random_sequence(rng, 40)
            shrunk = CoefficientSequence({k: v * rng.uniform(0.01, 1) for k, v in c.entries.items()})
            assert core_norm_log(shrunk, w) <= core_norm_log(c, w) + 1e-9

    @pytest.mark.parametrize("k", [1, 3])
    def test_peak_below_default_left_end(self, k):
        """Under exp(-1e7 r) the norms of z^k peak near r = 1e-7 and match ||z^k||."""
        w = Weight.exp_power(1e7, 1.0)
        expected = monomial_norm_log(w, k)
        zk = CoefficientSequence.unit(k)
        assert core_norm_log(zk, w) == pytest.approx(expected, abs=1e-9)
        assert coeff_l2_lower_bound_log(zk, w) == pytest.approx(expected, abs=1e-9)
        assert poly_norm_v_log(zk, w) == pytest.approx(expected, abs=1e-9)

    def test_steep_weight_two_terms(self):
        """z + z^2 under exp(-1e7 r) is dominated by z near r = 1e-7."""
        w = Weight.exp_power(1e7, 1.0)
        c = CoefficientSequence({1: 1.0, 2: 1.0})
        assert core_norm_log(c, w) >= monomial_norm_log(w, 1) - 1e-12
        assert core_norm_log(c, w) == pytest.approx(monomial_norm_log(w, 1), abs=1e-6)

    def test_annulus(self, exp_weight):
        """Restricting to an annulus cannot exceed the global supremum."""
        c = CoefficientSequence.unit(7)
        inner = poly_norm_v_log(c, exp_weight, log_radius_range=(0.0, 1.0))
        assert inner == pytest.approx(7.0 - math.e, abs=1e-10)
        assert inner <= poly_norm_v_log(c, exp_weight)

    def test_other_weight_families(self):
        """The sup of z^5 matches its monomial norm under exp_exp and log_power."""
        z5 = CoefficientSequence.unit(5)
        for w in [Weight.exp_exp(), Weight.log_power(2.0), Weight.exp_power(2.0, 0.5)]:
            assert poly_norm_v_log(z5, w) == pytest.approx(monomial_norm_log(w, 5), abs=1e-9)


class TestDemo:

    def test_module_demo_runs(self, capsys):
        """Running the module as a script prints its demo."""
        runpy.run_path(os.path.join(os.path.dirname(__file__), '../src/series.py'), run_name="__main__")
        assert "Series module ready!" in capsys.readouterr().out
