"""
Lusky Block Sequences
Block comparability ratios A(m, n), B(m, n), construction of block boundaries
m_1 < m_2 < ... with b <= min(A, B) <= max(A, B) <= K on consecutive pairs,
the closed form m_n = p (ln b) n^2 for exp(-a r^p), and the validator of that
two-sided condition.

With phi(r_k) = k ln r_k - peak_k the ratios reduce to peak values:
    ln A(m, n) = peak_m - peak_n + (n - m) ln r_n
    ln B(m, n) = peak_n - peak_m - (n - m) ln r_m
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from certificates import CertificateReport
from exceptions import ArgumentError, NumericDomainError
from numerics import DEFAULT_SEARCH, SearchConfig, gap_log1m, gap_log1p
from weights import PeakRadius, Weight, WeightKind, r_peak

logger = logging.getLogger(__name__)

MAX_GAP_STEPS = 1024


@dataclass(frozen=True)
class LuskyConfig:
    """Configuration for Lusky sequence construction."""
    b: float = math.e              # lower certificate bound, > 2
    tol_log: float = 1e-9          # tolerance on ln min(A, B) - ln b
    m_start: Optional[float] = None  # first boundary m_1; None picks a default

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b > 2):
            raise ArgumentError(f"b must exceed 2, got {self.b}")
        if not self.tol_log > 0:
            raise ArgumentError(f"tol_log must be positive, got {self.tol_log}")
        if self.m_start is not None and not (self.m_start > 0 and math.isfinite(self.m_start)):
            raise ArgumentError(f"m_start must be positive, got {self.m_start}")


def default_m_start(w: Weight, b: float) -> float:
    """First boundary: p ln b for exp_power (closed form at n = 1), else 1."""
    if w.kind is WeightKind.EXP_POWER:
        return w.p * math.log(b)
    return 1.0


def _has_fast_path(w: Weight) -> bool:
    return w.kind is WeightKind.EXP_POWER and w.domain_floor == 0


def _check_pair(m: float, n: float) -> None:
    if not (0 < m < n and math.isfinite(n)):
        raise ArgumentError(f"need 0 < m < n, got m={m}, n={n}")


def _log_ab_from_peaks(pk_m: PeakRadius, pk_n: PeakRadius) -> Tuple[float, float]:
    gap = pk_n.m - pk_m.m
    log_a = pk_m.log_peak_value - pk_n.log_peak_value + gap * pk_n.log_r
    log_b = pk_n.log_peak_value - pk_m.log_peak_value - gap * pk_m.log_r
    return log_a, log_b


def _log_ab_exp_power(p: float, m: float, n: float) -> Tuple[float, float]:
    # p ln A = m (x - ln(1+x)), x = n/m - 1;  p ln B = n (-ln(1-y) - y), y = 1 - m/n
    log_a = m * gap_log1p((n - m) / m) / p
    log_b = n * gap_log1m((n - m) / n) / p
    return float(log_a), float(log_b)


def log_AB(w: Weight, m: float, n: float, search: SearchConfig = DEFAULT_SEARCH) -> Tuple[float, float]:
    """Both ratios (ln A(m, n), ln B(m, n)) in one pass."""
    _check_pair(m, n)
    if _has_fast_path(w):
        return _log_ab_exp_power(w.p, m, n)
    return _log_ab_from_peaks(r_peak(w, m, search), r_peak(w, n, search))


def log_A(w: Weight, m: float, n: float, search: SearchConfig = DEFAULT_SEARCH) -> float:
    """
    ln A(m, n) = m (ln r_m - ln r_n) + phi(r_n) - phi(r_m), for 0 < m < n.

    Nonnegative: r_m maximises r^m v(r), so its value at r_n cannot exceed the peak.
    """
    return log_AB(w, m, n, search)[0]


def log_B(w: Weight, m: float, n: float, search: SearchConfig = DEFAULT_SEARCH) -> float:
    """ln B(m, n) = n (ln r_n - ln r_m) + phi(r_m) - phi(r_n), for 0 < m < n."""
    return log_AB(w, m, n, search)[1]


@dataclass(frozen=True)
class LuskySequence:
    """
    Finite prefix of a Lusky block sequence.

    Block n (1-based) is the pair (m_n, m_{n+1}); log_A[n-1] and log_B[n-1]
    belong to it. Blocks before certified_from are reported, never certified.
    """
    weight: Weight
    boundaries: Tuple[float, ...]
    r_at: Tuple[PeakRadius, ...]
    log_A: Tuple[float, ...]
    log_B: Tuple[float, ...]
    certified_b: float
    certified_K: float
    certified_from: int = 1

    @property
    def count(self) -> int:
        """Number of stored boundaries."""
        return len(self.boundaries)

    @property
    def blocks(self) -> int:
        return max(len(self.boundaries) - 1, 0)

    @property
    def log_radii(self) -> np.ndarray:
        return np.array([pk.log_r for pk in self.r_at])

    @classmethod
    def from_boundaries(
        cls,
        weight: Weight,
        boundaries: Sequence[float],
        certified_b: Optional[float] = None,
        certified_K: Optional[float] = None,
        certified_from: int = 1,
        search: SearchConfig = DEFAULT_SEARCH
    ) -> "LuskySequence":
        """
        Build a sequence from explicit boundaries.

        Missing (b, K) are computed a posteriori from the certified blocks:
        b = min min(A, B) and K = max max(A, B).
        """
        bounds = tuple(float(m) for m in boundaries)
        if not bounds:
            raise ArgumentError("need at least one boundary")
        if bounds[0] <= 0 or any(not math.isfinite(m) for m in bounds):
            raise ArgumentError(f"boundaries must be positive and finite, got {bounds[:3]}...")
        if any(hi <= lo for lo, hi in zip(bounds, bounds[1:])):
            raise ArgumentError("boundaries must be strictly increasing")
        if certified_from < 1:
            raise ArgumentError(f"certified_from must be >= 1, got {certified_from}")

        r_at = tuple(r_peak(weight, m, search) for m in bounds)
        if _has_fast_path(weight):
            pairs = [_log_ab_exp_power(weight.p, lo, hi) for lo, hi in zip(bounds, bounds[1:])]
        else:
            pairs = [_log_ab_from_peaks(lo, hi) for lo, hi in zip(r_at, r_at[1:])]
        log_a = tuple(pa for pa, _ in pairs)
        log_b = tuple(pb for _, pb in pairs)

        certified = pairs[certified_from - 1:]
        if certified_b is None:
            certified_b = math.exp(min(min(pa, pb) for pa, pb in certified)) if certified else math.nan
        if certified_K is None:
            top = max((max(pa, pb) for pa, pb in certified), default=-math.inf)
            log_b_floor = math.log(certified_b) if certified_b > 0 else -math.inf
            log_k = max(top, log_b_floor)
            certified_K = math.exp(log_k) if log_k < 709.0 else math.inf
        return cls(weight, bounds, r_at, log_a, log_b, float(certified_b), float(certified_K), certified_from)

    def to_dict(self) -> Dict:
        """JSON object form."""
        return {
            "weight": self.weight.to_dict(),
            "boundaries": list(self.boundaries),
            "log_A": list(self.log_A),
            "log_B": list(self.log_B),
            "b": self.certified_b,
            "K": self.certified_K,
            "certified_from": self.certified_from,
        }

    @classmethod
    def from_dict(cls, data: Dict, search: SearchConfig = DEFAULT_SEARCH) -> "LuskySequence":
        """Rebuild from to_dict output; ratios are recomputed, (b, K) kept."""
        try:
            weight = Weight.from_dict(data["weight"])
            return cls.from_boundaries(
                weight, data["boundaries"],
                certified_b=data.get("b"), certified_K=data.get("K"),
                certified_from=int(data.get("certified_from", 1)), search=search,
            )
        except (KeyError, TypeError) as exc:
            raise ArgumentError(f"Malformed Lusky sequence JSON: {exc}")


def _next_boundary(w: Weight, pk_m: PeakRadius, log_b: float, search: SearchConfig) -> float:
    """Solve min(ln A(m, M), ln B(m, M)) = ln b for M > m by bracketing and bisection."""
    m = pk_m.m

    def excess(big_m: float) -> float:
        if _has_fast_path(w):
            pa, pb = _log_ab_exp_power(w.p, m, big_m)
        else:
            pa, pb = _log_ab_from_peaks(pk_m, r_peak(w, big_m, search))
        return min(pa, pb) - log_b

    degenerate = NumericDomainError(f"weight degenerate for Lusky construction (m={m:g})")
    gap = m
    if excess(m + gap) < 0:
        lo = m + gap
        for _ in range(MAX_GAP_STEPS):
            gap *= 2
            hi = m + gap
            if not math.isfinite(hi):
                raise degenerate
            if excess(hi) >= 0:
                break
            lo = hi
        else:
            raise degenerate
    else:
        hi = m + gap
        for _ in range(MAX_GAP_STEPS):
            gap /= 2
            lo = m + gap
            if lo <= m:
                raise degenerate
            if excess(lo) < 0:
                break
            hi = lo
        else:
            raise degenerate

    root = bisect(excess, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=4000)
    return float(root)


def construct_sequence(
    w: Weight,
    cfg: LuskyConfig,
    count: int,
    search: SearchConfig = DEFAULT_SEARCH,
    verbose: bool = False
) -> LuskySequence:
    """
    Construct `count` boundaries with min(A, B) = b on every consecutive pair.

    Both A(m, M) and B(m, M) are nondecreasing in M and equal 1 at M = m, so
    ln min(A, B) - ln b changes sign exactly once on M > m.

    Args:
        w: Weight
        cfg: LuskyConfig
        count: Number of boundaries (count - 1 blocks)
        search: Search configuration for custom weights
        verbose: Print progress

    Returns:
        LuskySequence with certified_b = b and a posteriori certified_K

    Raises:
        NumericDomainError: "weight degenerate for Lusky construction"
    """
    if int(count) != count or count < 1:
        raise ArgumentError(f"count must be a positive integer, got {count}")
    m = cfg.m_start if cfg.m_start is not None else default_m_start(w, cfg.b)
    log_b = math.log(cfg.b)
    boundaries = [float(m)]
    pk = r_peak(w, m, search)
    for i in range(int(count) - 1):
        m = _next_boundary(w, pk, log_b, search)
        boundaries.append(m)
        pk = r_peak(w, m, search)
        if verbose and (i + 1) % 10 == 0:
            print(f"  boundary {i + 2}/{count}: m = {m:.6g}")

    seq = LuskySequence.from_boundaries(w, boundaries, certified_b=cfg.b, search=search)
    worst = max((abs(min(pa, pb) - log_b) for pa, pb in zip(seq.log_A, seq.log_B)), default=0.0)
    if worst > cfg.tol_log:
        logger.warning("construct_sequence: worst |ln min(A,B) - ln b| = %.3e exceeds tol %.1e",
                       worst, cfg.tol_log)
    logger.debug("construct_sequence(%s): %d boundaries, K=%.6g", w, seq.count, seq.certified_K)
    return seq


def construct_covering(
    w: Weight,
    cfg: LuskyConfig,
    degree: float,
    search: SearchConfig = DEFAULT_SEARCH,
    max_count: int = 100000
) -> LuskySequence:
    """Construct boundaries until the last one reaches `degree`."""
    m = cfg.m_start if cfg.m_start is not None else default_m_start(w, cfg.b)
    log_b = math.log(cfg.b)
    boundaries = [float(m)]
    pk = r_peak(w, m, search)
    while boundaries[-1] < degree or len(boundaries) < 2:
        if len(boundaries) >= max_count:
            raise NumericDomainError(f"{max_count} boundaries do not reach degree {degree}")
        m = _next_boundary(w, pk, log_b, search)
        boundaries.append(m)
        pk = r_peak(w, m, search)
    return LuskySequence.from_boundaries(w, boundaries, certified_b=cfg.b, search=search)


def closed_form_exp_weight(a: float, p: float, b: float, n_max: int) -> LuskySequence:
    """
    Boundaries m_n = p (ln b) n^2, n = 1..n_max, for v(r) = exp(-a r^p).

    From n = 4 on, ln b <= ln A <= (9/2) ln b and ln b <= ln B <= 4 ln b;
    certified_K = b^(9/2). Both ratios are independent of a.
    """
    if not (math.isfinite(b) and b > 2):
        raise ArgumentError(f"b must exceed 2, got {b}")
    if int(n_max) != n_max or n_max < 1:
        raise ArgumentError(f"n_max must be a positive integer, got {n_max}")
    w = Weight.exp_power(a, p)
    scale = p * math.log(b)
    boundaries = [scale * n * n for n in range(1, int(n_max) + 1)]
    return LuskySequence.from_boundaries(
        w, boundaries, certified_b=b, certified_K=b ** 4.5, certified_from=4
    )


def closed_form_count(p: float, b: float, degree: float) -> int:
    """Smallest n_max whose last closed-form boundary reaches `degree` (at least 2)."""
    return max(2, math.ceil(math.sqrt(max(degree, 0.0) / (p * math.log(b)))) + 1)


def validate_condition_35(seq: LuskySequence, b: float, K: float) -> CertificateReport:
    """
    Check b <= min(A_n, B_n) <= max(A_n, B_n) <= K on every certified block.

    The margin of block n is min(min(ln A, ln B) - ln b, ln K - max(ln A, ln B)).
    Blocks before seq.certified_from are listed as uncertified.
    """
    if seq.count < 2:
        raise ArgumentError("need at least two boundaries to validate")
    if not (b > 0 and K > 0):
        raise ArgumentError(f"b and K must be positive, got b={b}, K={K}")
    log_b, log_k = math.log(b), math.log(K)

    margins: List[float] = []
    witnesses: List[Dict] = []
    uncertified: List[int] = []
    for i, (pa, pb) in enumerate(zip(seq.log_A, seq.log_B)):
        n = i + 1
        if n < seq.certified_from:
            uncertified.append(n)
            continue
        margins.append(min(min(pa, pb) - log_b, log_k - max(pa, pb)))
        witnesses.append({"n": n, "m_n": seq.boundaries[i], "log_A": pa, "log_B": pb})

    return CertificateReport.from_margins(
        "condition_35",
        f"blocks {seq.certified_from}..{seq.blocks}, b={b:g}, K={K:g}",
        margins, witnesses, uncertified=uncertified,
    )


def log_boundary_swap(seq: LuskySequence, n: int, m: float) -> float:
    """
    ln[(r_{m_{n+1}} / r_{m_n})^m v(r_{m_{n+1}}) / v(r_{m_n})] for m in [m_n, m_{n+1}].

    Linear in m, equal to -ln A_n at m_n and ln B_n at m_{n+1}, hence within
    [-ln K, ln K].
    """
    if not 1 <= n <= seq.blocks:
        raise ArgumentError(f"block index must be in 1..{seq.blocks}, got {n}")
    lo, hi = seq.r_at[n - 1], seq.r_at[n]
    if not lo.m <= m <= hi.m:
        raise ArgumentError(f"m must lie in [{lo.m:g}, {hi.m:g}], got {m}")
    phi_lo = lo.m * lo.log_r - lo.log_peak_value
    phi_hi = hi.m * hi.log_r - hi.log_peak_value
    return m * (hi.log_r - lo.log_r) - phi_hi + phi_lo


if __name__ == "__main__":
    # Demo: constructed boundaries against the closed form m_n = n^2
    weight = Weight.exp_power(1.0, 1.0)
    built = construct_sequence(weight, LuskyConfig(b=math.e, m_start=1.0), count=8)
    exact = closed_form_exp_weight(1.0, 1.0, math.e, 8)
    for n, (m_built, m_exact) in enumerate(zip(built.boundaries, exact.boundaries), start=1):
        print(f"n={n}  constructed m_n={m_built:10.4f}  closed form {m_exact:8.1f}")

    report = validate_condition_35(exact, math.e, math.e ** 4.5)
    print(report.summary())
    print("\n✅ Lusky module ready!")
