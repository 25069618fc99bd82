"""
de la Vallee-Poussin Operators
Coefficient-ramp operators on finitely supported sequences:

    V_{n,m} f: coefficients with index <= m kept, indices in (m, n] scaled by
               ([n] - k) / ([n] - [m]), higher indices dropped
    V_n      = V_{m_{n+1}, m_n} - V_{m_n, m_{n-1}}   (V_1 = V_{m_2, m_1})

Ramp factors are exact Fractions, so sums of V_n telescope exactly.
Also estimates the uniform operator-norm bound D and the two-sided envelope
of the annulus norms of V_n f empirically.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from exceptions import ArgumentError
from lusky import LuskySequence
from numerics import DEFAULT_SEARCH, LOG_ZERO, SearchConfig
from series import CoefficientSequence, poly_norm_v_log
from weights import Weight, monomial_norm_log

logger = logging.getLogger(__name__)


def ramp_weight(k: int, lo: float, hi: float) -> Fraction:
    """
    Factor of V_{hi,lo} at index k: 1 for k <= lo, ([hi] - k)/([hi] - [lo])
    for lo < k <= hi, 0 beyond hi.
    """
    if k <= lo:
        return Fraction(1)
    if k <= hi:
        top, bottom = math.floor(hi), math.floor(lo)
        return Fraction(top - k, top - bottom)
    return Fraction(0)


def apply_V(f: CoefficientSequence, m: float, n: float) -> CoefficientSequence:
    """
    V_{n,m} f for 0 <= m < n; m = 0 gives the V_{n,0} form ([n] - k)/[n].

    Args:
        f: Coefficients
        m: Lower boundary
        n: Upper boundary

    Returns:
        Transformed coefficients
    """
    if not (0 <= m < n and math.isfinite(n)):
        raise ArgumentError(f"need 0 <= m < n, got m={m}, n={n}")
    factors = {k: ramp_weight(k, m, n) for k in f.entries}
    return f.apply_weights({k: w for k, w in factors.items() if w})


@dataclass(frozen=True)
class VPCoefficients:
    """
    Tent factors gamma_k of V_n.

    Attributes:
        n: Block index
        block: (m_{n-1}, m_n, m_{n+1}); m_0 = 0
        gamma: Nonzero factors by index
    """
    n: int
    block: Tuple[float, float, float]
    gamma: Dict[int, Fraction]

    def __getitem__(self, k: int) -> Fraction:
        return self.gamma.get(k, Fraction(0))


def vp_coefficients(seq: LuskySequence, n: int) -> VPCoefficients:
    """
    Tent factors of V_n for block n of seq.

    For n >= 2, gamma_k = w(k; m_n, m_{n+1}) - w(k; m_{n-1}, m_n) with w the
    ramp of V_{n,m}; this is the rising ramp (k - [m_{n-1}])/([m_n] - [m_{n-1}])
    followed by the falling ramp ([m_{n+1}] - k)/([m_{n+1}] - [m_n]).
    V_1 = V_{m_2, m_1} carries weight 1 on 0..m_1.
    """
    if int(n) != n or not 1 <= n <= seq.blocks:
        raise ArgumentError(f"block index must be in 1..{seq.blocks}, got {n}")
    n = int(n)
    bounds = seq.boundaries
    lower = bounds[n - 2] if n >= 2 else 0.0
    mid, upper = bounds[n - 1], bounds[n]

    gamma: Dict[int, Fraction] = {}
    start = math.floor(lower) + 1 if n >= 2 else 0
    for k in range(start, math.floor(upper) + 1):
        g = ramp_weight(k, mid, upper)
        if n >= 2:
            g -= ramp_weight(k, lower, mid)
        if g:
            gamma[k] = g
    return VPCoefficients(n=n, block=(lower, mid, upper), gamma=gamma)


def apply_Vn(f: CoefficientSequence, seq: LuskySequence, n: int) -> CoefficientSequence:
    """V_n f: coefficients multiplied by the tent of block n."""
    return f.apply_weights(vp_coefficients(seq, n).gamma)


def random_polynomial(
    rng: np.random.Generator,
    w: Weight,
    degree: int,
    search: SearchConfig = DEFAULT_SEARCH
) -> CoefficientSequence:
    """
    Random polynomial of the given degree with |a_m| ~ exp(N(0,1)) / ||z^m||_v
    and uniform phases.
    """
    values = {}
    for m in range(degree + 1):
        log_mag = rng.normal() - monomial_norm_log(w, m, search)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        values[m] = complex(math.exp(log_mag) * math.cos(angle), math.exp(log_mag) * math.sin(angle))
    return CoefficientSequence(values)


def _reachable_blocks(seq: LuskySequence, max_degree: int) -> List[int]:
    return [n for n in range(1, seq.blocks + 1)
            if n == 1 or math.floor(seq.boundaries[n - 2]) < max_degree]


def estimate_vp_operator_norm(
    seq: LuskySequence,
    trials: int,
    max_degree: int,
    seed: int,
    search: SearchConfig = DEFAULT_SEARCH
) -> float:
    """
    Empirical lower estimate ln D_emp of sup_n ||V_n||.

    Takes the maximum of ln||V_n f||_v - ln||f||_v over plateau monomials
    f = z^[m_n] and `trials` random polynomials of degree <= max_degree.

    Args:
        seq: Lusky sequence
        trials: Number of random polynomials, >= 1
        max_degree: Largest sampled degree
        seed: RNG seed

    Returns:
        ln D_emp (>= 0)
    """
    if trials < 1:
        raise ArgumentError(f"trials must be >= 1, got {trials}")
    if max_degree < 1:
        raise ArgumentError(f"max_degree must be >= 1, got {max_degree}")
    w = seq.weight
    blocks = _reachable_blocks(seq, max_degree)
    rng = np.random.default_rng(seed)

    best = LOG_ZERO
    for n in blocks:
        monomial = CoefficientSequence.unit(math.floor(seq.boundaries[n - 1]))
        image = apply_Vn(monomial, seq, n)
        if not image.is_zero():
            best = max(best, poly_norm_v_log(image, w, search) - poly_norm_v_log(monomial, w, search))

    for _ in range(trials):
        f = random_polynomial(rng, w, int(rng.integers(1, max_degree + 1)), search)
        norm_f = poly_norm_v_log(f, w, search)
        for n in blocks:
            image = apply_Vn(f, seq, n)
            if not image.is_zero():
                best = max(best, poly_norm_v_log(image, w, search) - norm_f)

    logger.info("estimate_vp_operator_norm: ln D_emp = %.6g over %d trials", best, trials)
    return best


@dataclass
class EnvelopeEstimate:
    """Empirical (c1, c2) of c1 ||f|| <= max_n annulus norm of V_n f <= c2 ||f||."""
    log_c1: float
    log_c2: float
    trials: int
    seed: int

    @property
    def c1(self) -> float:
        return math.exp(self.log_c1)

    @property
    def c2(self) -> float:
        return math.exp(self.log_c2)


def estimate_lemma_envelope(
    seq: LuskySequence,
    trials: int,
    max_degree: int,
    seed: int,
    search: SearchConfig = DEFAULT_SEARCH
) -> EnvelopeEstimate:
    """
    Empirical envelope of max_n sup_{r_{m_{n-1}} <= r <= r_{m_{n+1}}} v(r) M(V_n f, r)
    relative to ||f||_v, over random polynomials of degree <= max_degree.
    """
    if trials < 1:
        raise ArgumentError(f"trials must be >= 1, got {trials}")
    w = seq.weight
    blocks = _reachable_blocks(seq, max_degree)
    log_r = seq.log_radii
    rng = np.random.default_rng(seed)

    ratios = []
    for _ in range(trials):
        f = random_polynomial(rng, w, int(rng.integers(1, max_degree + 1)), search)
        norm_f = poly_norm_v_log(f, w, search)
        local = LOG_ZERO
        for n in blocks:
            image = apply_Vn(f, seq, n)
            if image.is_zero():
                continue
            lo = log_r[n - 2] if n >= 2 else search.left_log_radius
            annulus = (min(lo, log_r[n]), log_r[n])
            local = max(local, poly_norm_v_log(image, w, search, log_radius_range=annulus))
        ratios.append(local - norm_f)

    return EnvelopeEstimate(log_c1=min(ratios), log_c2=max(ratios), trials=trials, seed=seed)
