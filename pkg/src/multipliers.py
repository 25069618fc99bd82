"""
Mixed-Norm Block Spaces and Multipliers
l^J(p, q) block norms (per-block l_p norms collected in l_q) and the test for
coefficient multipliers from the weighted space into l_p:

    c_m = lambda_m / (v(r_{m_n}) r_{m_n}^m)  on block n,
    lambda is a multiplier into l_p  iff  (c_m) lies in l^J(r, s),

with (r, s) = (2p/(2-p), p) for 1 <= p < 2, (inf, p) for 2 <= p < inf and
(inf, inf) for p = inf.

For v(r) = exp(-r) and m_n = n^2 the rescaling factor is e^{+n^2} n^{-2m};
this sign of the exponent is used throughout.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from exceptions import ArgumentError, CoverageError
from lusky import LuskySequence
from numerics import LOG_ZERO
from series import BlockNormProfile, CoefficientSequence, aggregate_log_norms

logger = logging.getLogger(__name__)

INF = math.inf


def _check_exponent(name: str, value: float) -> float:
    value = float(value)
    if math.isnan(value) or not 1 <= value <= INF:
        raise ArgumentError(f"{name} must lie in [1, inf], got {value}")
    return value


@dataclass(frozen=True)
class LpqSpec:
    """
    Block space l^J(p, q).

    Block 0 covers indices 0..J[0]; block i covers J[i-1]+1..J[i].

    Attributes:
        p: Inner exponent in [1, inf]
        q: Outer exponent in [1, inf]
        J: Strictly increasing nonnegative integer boundaries
    """
    p: float
    q: float
    J: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "p", _check_exponent("p", self.p))
        object.__setattr__(self, "q", _check_exponent("q", self.q))
        bounds = tuple(int(j) for j in self.J)
        if not bounds:
            raise ArgumentError("J needs at least one boundary")
        if any(int(j) != j for j in self.J) or bounds[0] < 0:
            raise ArgumentError(f"J must hold nonnegative integers, got {self.J}")
        if any(hi <= lo for lo, hi in zip(bounds, bounds[1:])):
            raise ArgumentError("J must be strictly increasing")
        object.__setattr__(self, "J", bounds)

    @classmethod
    def from_sequence(cls, seq: LuskySequence, p: float, q: float) -> "LpqSpec":
        """Integer blocks [m_n] of a Lusky sequence (duplicate floors merged)."""
        floors = sorted({math.floor(m) for m in seq.boundaries})
        return cls(p, q, tuple(floors))


@dataclass(frozen=True)
class MultiplierCase:
    """Exponents (r, s) of the block space characterising multipliers into l_p."""
    p_target: float
    r: float
    s: float


def multiplier_case(p: float) -> MultiplierCase:
    """
    (r, s) for multipliers into l_p.

    Args:
        p: Target exponent in [1, inf]

    Returns:
        MultiplierCase
    """
    p = _check_exponent("p", p)
    if p < 2:
        return MultiplierCase(p, 2.0 * p / (2.0 - p), p)
    if p < INF:
        return MultiplierCase(p, INF, p)
    return MultiplierCase(p, INF, INF)


def _block_profile(
    idx: np.ndarray,
    log_values: np.ndarray,
    floors: np.ndarray,
    inner: float,
    outer: float,
    include_block_zero: bool,
    label: str
) -> BlockNormProfile:
    if idx.size and idx[-1] > floors[-1]:
        raise CoverageError(
            f"degree {int(idx[-1])} exceeds last block boundary {int(floors[-1])}: extend Lusky sequence"
        )
    n_blocks = len(floors)
    log_block = np.full(n_blocks, LOG_ZERO)
    if idx.size:
        frame = pd.DataFrame({"block": np.searchsorted(floors, idx, side="left"), "value": log_values})
        for block, group in frame.groupby("block")["value"]:
            log_block[block] = aggregate_log_norms(group.to_numpy(), inner)

    m_lo = np.concatenate(([0], floors[:-1] + 1))
    included = np.ones(n_blocks, dtype=bool)
    if not include_block_zero:
        included[0] = False
    return BlockNormProfile.from_blocks(
        list(range(n_blocks)), m_lo, floors, log_block, included, q=outer, label=label
    )


def lpq_profile(c: CoefficientSequence, spec: LpqSpec) -> BlockNormProfile:
    """Per-block l_p norms of c with the l_q aggregate; every block is included."""
    if c.is_zero():
        idx, log_abs = np.array([], dtype=np.int64), np.array([])
    else:
        idx, log_abs, _ = c.log_terms()
    floors = np.asarray(spec.J, dtype=np.int64)
    return _block_profile(idx, log_abs, floors, spec.p, spec.q, True,
                          label=f"l^J({spec.p:g}, {spec.q:g})")


def lpq_norm_log(c: CoefficientSequence, spec: LpqSpec) -> float:
    """
    ln ||c||_{l^J(p, q)}.

    Raises:
        CoverageError: support beyond the last block
    """
    return lpq_profile(c, spec).log_sup


def rescaled_log_coefficients(
    lam: CoefficientSequence,
    seq: LuskySequence
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Indices, block numbers and ln c_m = ln|lambda_m| - ln v(r_{m_n}) - m ln r_{m_n}.

    Block 0 (indices <= m_1) is rescaled at r_{m_1}.
    """
    floors = np.floor(np.asarray(seq.boundaries)).astype(np.int64)
    if lam.is_zero():
        empty = np.array([], dtype=np.int64)
        return empty, empty, np.array([])
    idx, log_abs, _ = lam.log_terms()
    if idx[-1] > floors[-1]:
        raise CoverageError(
            f"degree {int(idx[-1])} exceeds last block boundary {int(floors[-1])}: extend Lusky sequence"
        )
    block = np.searchsorted(floors, idx, side="left")
    at = np.maximum(block - 1, 0)
    log_r = np.array([pk.log_r for pk in seq.r_at])[at]
    log_v = np.array([pk.log_peak_value - pk.m * pk.log_r for pk in seq.r_at])[at]
    return idx, block, log_abs - log_v - idx * log_r


def multiplier_profile(lam: CoefficientSequence, seq: LuskySequence, p: float) -> BlockNormProfile:
    """
    Block profile deciding whether lambda multiplies the weighted space into l_p.

    Per block the l_r norm of the rescaled c_m, aggregated in l_s over blocks
    n >= 1; block 0 is reported only. The profile describes a truncation;
    boundedness of the infinite sequence is read off the trend.

    Args:
        lam: Multiplier coefficients
        seq: Lusky sequence covering the support
        p: Target exponent in [1, inf]

    Returns:
        BlockNormProfile
    """
    case = multiplier_case(p)
    idx, _, log_c = rescaled_log_coefficients(lam, seq)
    floors = np.floor(np.asarray(seq.boundaries)).astype(np.int64)
    profile = _block_profile(idx, log_c, floors, case.r, case.s, False,
                             label=f"multiplier into l_{p:g} (r={case.r:g}, s={case.s:g})")
    logger.debug("multiplier_profile: p=%g log_sup=%.6g", p, profile.log_sup)
    return profile

