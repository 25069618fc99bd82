"""
Inequality Certification Module
Floating-point sweeps over the elementary inequalities behind the Lusky
estimates for exp(-a r^p), each producing a CertificateReport:

- check_scalar_65 / check_scalar_70: the two log1p bounds
- check_lemma_log1 / check_lemma_log2: the (m, M) bounds they imply
- check_lemma_estimates: two-sided bounds for m_n = alpha n^2
- check_prop_exp: b <= A <= b^(9/2) and b <= B <= b^4 from n = 4 on
- check_remark9: A <= B, gamma_n >= e, eta_n decreasing, |eta_n - e| asymptotics
- check_stirling_ratio / check_stirling_divergence: ||z^n|| under exp(-r) versus n!

Margins are log-space differences; a report passes when its worst margin is
at least -1e-9. Sweeps are deterministic given their grids and seed.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from certificates import CertificateReport
from exceptions import ArgumentError
from lusky import closed_form_exp_weight, validate_condition_35
from numerics import gap_log1m, gap_log1p
from weights import Weight, monomial_norm_log

logger = logging.getLogger(__name__)

E_LN2 = math.e * math.log(2.0)
ETA_SERIES_FROM = 100
_ETA_SERIES_TERMS = 12


@dataclass
class VerifyConfig:
    """Grids and seed of the certificate suite."""
    seed: int = 1729
    scalar_samples: int = 10000
    pair_samples: int = 10000
    m_log10_range: Tuple[float, float] = (-1.0, 6.0)
    alpha_grid: Tuple[float, ...] = (0.5, 1.0, 2.0, E_LN2)
    n_min: int = 4
    n_max: int = 2503
    prop_a: float = 1.0
    prop_p: float = 1.0
    prop_b: float = math.e
    prop_n_max: int = 10003
    remark_n_max: int = 2500
    stirling_n: Tuple[int, ...] = (10, 100, 1000, 10000)
    stirling_sum_n: int = 100000
    condition_35_n_max: int = 200

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "VerifyConfig":
        """Load overrides from a JSON object; unknown keys are rejected."""
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ArgumentError(f"Cannot read verify parameters from {path}: {exc}")
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Dict) -> "VerifyConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ArgumentError(f"Unknown verify parameters: {sorted(unknown)}")
        values = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        return cls(**values)

    def to_dict(self) -> Dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


# Grids

def default_x_grid(upper: float, samples: int) -> np.ndarray:
    """Points in (0, upper): a log-spaced head near 0 and an even body."""
    head = samples // 5
    return np.concatenate((
        np.geomspace(1e-8, 1e-2, head, endpoint=False),
        np.linspace(1e-2, upper, samples - head, endpoint=False),
    ))


def random_pairs(rng: np.random.Generator, count: int, max_excess: float,
                 m_log10_range: Tuple[float, float] = (-1.0, 6.0)) -> np.ndarray:
    """
    Pairs (m, M) with m log-uniform and M = m (1 + u), 0 < u < max_excess.

    Half of the u are log-uniform down to 1e-6 to exercise the near-diagonal.
    """
    m = 10.0 ** rng.uniform(*m_log10_range, size=count)
    half = count // 2
    u = np.concatenate((
        10.0 ** rng.uniform(-6.0, math.log10(max_excess), size=half),
        rng.uniform(0.0, max_excess, size=count - half),
    ))
    u = np.clip(u, 1e-12, max_excess * (1 - 1e-12))
    return np.column_stack((m, m * (1.0 + u)))


def _log_bound_margins(value: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        log_value = np.log(value)
        return np.minimum(log_value - np.log(lower), np.log(upper) - log_value)


def _grid_label(values: np.ndarray, name: str) -> str:
    return f"{len(values)} points {name} in [{values.min():.3g}, {values.max():.3g}]"


# Scalar bounds

def check_scalar_65(x_grid: Sequence[float]) -> CertificateReport:
    """
    x^2/2 <= -ln(1 - x) - x <= x^2 for 0 < x < 1/2.
    """
    x = np.asarray(x_grid, dtype=float)
    if x.size == 0 or np.any((x <= 0) | (x >= 0.5)):
        raise ArgumentError("x grid must lie in (0, 1/2)")
    margins = _log_bound_margins(gap_log1m(x), x * x / 2.0, x * x)
    return CertificateReport.from_margins(
        "scalar_65", _grid_label(x, "x"), margins, [{"x": xi} for xi in x]
    )


def check_scalar_70(x_grid: Sequence[float]) -> CertificateReport:
    """
    -x^2/2 <= ln(1 + x) - x <= -x^2/4 for 0 < x < 3/4, checked on x - ln(1 + x).
    """
    x = np.asarray(x_grid, dtype=float)
    if x.size == 0 or np.any((x <= 0) | (x >= 0.75)):
        raise ArgumentError("x grid must lie in (0, 3/4)")
    margins = _log_bound_margins(gap_log1p(x), x * x / 4.0, x * x / 2.0)
    return CertificateReport.from_margins(
        "scalar_70", _grid_label(x, "x"), margins, [{"x": xi} for xi in x]
    )


# (m, M) bounds

def _as_pairs(pairs) -> Tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    m, big_m = arr[:, 0], arr[:, 1]
    if np.any(m <= 0) or np.any(big_m <= m):
        raise ArgumentError("pairs must satisfy 0 < m < M")
    return m, big_m


def check_lemma_log1(pairs, seed: Optional[int] = None) -> CertificateReport:
    """
    (M-m)^2/(2M) <= M ln(M/m) + m - M <= (M-m)^2/M for 0 < m < M < 2m.

    With y = (M - m)/M the middle term is M (-ln(1 - y) - y), so the check
    runs on the scalar kernel with y < 1/2.
    """
    m, big_m = _as_pairs(pairs)
    if np.any(big_m >= 2 * m):
        raise ArgumentError("pairs must satisfy M < 2m")
    y = (big_m - m) / big_m
    margins = _log_bound_margins(gap_log1m(y), y * y / 2.0, y * y)
    witnesses = [{"m": a, "M": b} for a, b in zip(m, big_m)]
    return CertificateReport.from_margins(
        "lemma_log1", f"{len(m)} pairs with M < 2m", margins, witnesses, seed=seed
    )


def check_lemma_log2(pairs, seed: Optional[int] = None) -> CertificateReport:
    """
    (M-m)^2/(4m) <= m ln(m/M) + M - m <= (M-m)^2/(2m) for 0 < m < M < 7m/4.

    With x = M/m - 1 the middle term is m (x - ln(1 + x)).
    """
    m, big_m = _as_pairs(pairs)
    if np.any(big_m >= 1.75 * m):
        raise ArgumentError("pairs must satisfy M < 7m/4")
    x = big_m / m - 1.0
    margins = _log_bound_margins(gap_log1p(x), x * x / 4.0, x * x / 2.0)
    witnesses = [{"m": a, "M": b} for a, b in zip(m, big_m)]
    return CertificateReport.from_margins(
        "lemma_log2", f"{len(m)} pairs with M < 7m/4", margins, witnesses, seed=seed
    )


def quadratic_block_quantities(alpha: float, n) -> Tuple[np.ndarray, np.ndarray]:
    """
    For m_n = alpha n^2:
        Q1 = m_n ln(m_n/m_{n+1}) + m_{n+1} - m_n
        Q2 = m_{n+1} ln(m_{n+1}/m_n) - (m_{n+1} - m_n)
    These are p ln A and p ln B for exp(-a r^p) with m_n = alpha n^2.
    """
    n = np.asarray(n, dtype=float)
    m_n = alpha * n * n
    m_next = alpha * (n + 1.0) ** 2
    q1 = m_n * gap_log1p((2.0 * n + 1.0) / (n * n))
    q2 = m_next * gap_log1m((2.0 * n + 1.0) / (n + 1.0) ** 2)
    return np.asarray(q1), np.asarray(q2)


def check_lemma_estimates(alpha_grid: Sequence[float], n_range: Sequence[int]) -> CertificateReport:
    """
    alpha <= Q1 <= 9 alpha/4 and alpha <= Q2 <= 4 alpha for m_n = alpha n^2, n >= 4.
    """
    n = np.asarray(list(n_range), dtype=float)
    if n.size == 0 or n.min() < 4:
        raise ArgumentError("n range must start at 4 or later")
    margins, witnesses = [], []
    for alpha in alpha_grid:
        if not alpha > 0:
            raise ArgumentError(f"alpha must be positive, got {alpha}")
        q1, q2 = quadratic_block_quantities(alpha, n)
        margins.append(np.minimum(
            _log_bound_margins(q1, np.full_like(q1, alpha), np.full_like(q1, 2.25 * alpha)),
            _log_bound_margins(q2, np.full_like(q2, alpha), np.full_like(q2, 4.0 * alpha)),
        ))
        witnesses.extend({"alpha": alpha, "n": int(k), "Q1": a, "Q2": b} for k, a, b in zip(n, q1, q2))
    return CertificateReport.from_margins(
        "lemma_estimates",
        f"alpha in {list(np.round(alpha_grid, 6))}, n in [{int(n.min())}, {int(n.max())}]",
        np.concatenate(margins), witnesses,
    )


def check_prop_exp(a: float, p: float, b: float, n_range: Sequence[int]) -> CertificateReport:
    """
    ln b <= ln A_n <= (9/2) ln b and ln b <= ln B_n <= 4 ln b for the closed-form
    boundaries m_n = p (ln b) n^2 under exp(-a r^p). Blocks n < 4 are uncertified.
    """
    n_values = sorted({int(k) for k in n_range})
    if not n_values or n_values[0] < 1:
        raise ArgumentError("n range must be a nonempty set of positive integers")
    seq = closed_form_exp_weight(a, p, b, n_values[-1] + 1)
    log_b = math.log(b)

    margins, witnesses, uncertified = [], [], []
    for n in n_values:
        if n < 4:
            uncertified.append(n)
            continue
        la, lb = seq.log_A[n - 1], seq.log_B[n - 1]
        margins.append(min(la - log_b, 4.5 * log_b - la, lb - log_b, 4.0 * log_b - lb))
        witnesses.append({"n": n, "log_A": la, "log_B": lb})
    return CertificateReport.from_margins(
        "prop_exp", f"a={a:g}, p={p:g}, b={b:g}, n in [{n_values[0]}, {n_values[-1]}]",
        margins, witnesses, uncertified=uncertified,
    )


# eta_n = (1 + 1/n)^(n + 1/2) and gamma_n = (1 + 1/n)^((2n^2 + 2n + 1)/(2n + 1))

def eta_excess(n) -> np.ndarray:
    """
    ln eta_n - 1, accurate for large n.

    From n = 100 on, the series sum_{k>=2} (-1)^k (1/(k+1) - 1/(2k)) n^-k is
    used; its leading term is 1/(12 n^2).
    """
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    big = n >= ETA_SERIES_FROM
    u = 1.0 / n[big]
    series = np.zeros_like(u)
    for k in range(_ETA_SERIES_TERMS, 1, -1):
        series = (series + ((-1) ** k) * (1.0 / (k + 1) - 1.0 / (2 * k))) * u
    out[big] = series * u
    small = n[~big]
    out[~big] = (small + 0.5) * np.log1p(1.0 / small) - 1.0
    return out


def eta(n) -> np.ndarray:
    """eta_n = (1 + 1/n)^(n + 1/2)."""
    return np.exp(1.0 + eta_excess(n))


def gamma_excess(n) -> np.ndarray:
    """ln gamma_n - 1; the exponent is n + 1/2 + 1/(4n + 2)."""
    n = np.asarray(n, dtype=float)
    return eta_excess(n) + np.log1p(1.0 / n) / (4.0 * n + 2.0)


def check_remark9(alpha_grid: Sequence[float], n_range: Sequence[int]) -> CertificateReport:
    """
    Four claims over n in n_range:
      (i)   A(m_n, m_{n+1}) <= B(m_n, m_{n+1}) for m_n = alpha n^2
      (ii)  gamma_n >= e
      (iii) eta_n > eta_{n+1}
      (iv)  |eta_n - e| <= 1.1 e / (12 n^2) for n >= 10
    """
    n = np.asarray(sorted({int(k) for k in n_range}), dtype=float)
    if n.size == 0 or n.min() < 1:
        raise ArgumentError("n range must be a nonempty set of positive integers")
    margins: List[np.ndarray] = []
    witnesses: List[Dict] = []

    for alpha in alpha_grid:
        q1, q2 = quadratic_block_quantities(alpha, n)
        margins.append(np.log(q2) - np.log(q1))
        witnesses.extend({"claim": "A<=B", "alpha": alpha, "n": int(k)} for k in n)

    excess = eta_excess(n)
    margins.append(gamma_excess(n))
    witnesses.extend({"claim": "gamma>=e", "n": int(k)} for k in n)

    margins.append(np.log(excess) - np.log(eta_excess(n + 1.0)))
    witnesses.extend({"claim": "eta decreasing", "n": int(k)} for k in n)

    tail = n[n >= 10]
    if tail.size:
        margins.append(np.log(1.1 / (12.0 * tail * tail)) - np.log(np.expm1(eta_excess(tail))))
        witnesses.extend({"claim": "eta asymptotics", "n": int(k)} for k in tail)

    return CertificateReport.from_margins(
        "remark9", f"alpha in {list(np.round(alpha_grid, 6))}, n in [{int(n.min())}, {int(n.max())}]",
        np.concatenate(margins), witnesses,
    )


# Stirling remarks for v(r) = exp(-r), where ||z^n||_v = (n/e)^n

def stirling_log_ratio(n) -> np.ndarray:
    """ln[(n^n / (n! e^n)) sqrt(2 pi n)]."""
    n = np.asarray(n, dtype=float)
    return n * np.log(n) - n - gammaln(n + 1.0) + 0.5 * np.log(2.0 * np.pi * n)


def check_stirling_ratio(n_values: Sequence[int], tolerance: float = 0.01) -> CertificateReport:
    """
    (n^n / (n! e^n)) sqrt(2 pi n) within [1 - tolerance, 1 + tolerance].

    ||z^n|| is taken from monomial_norm_log for the weight exp(-r).
    """
    w = Weight.exp_power(1.0, 1.0)
    n = np.asarray(list(n_values), dtype=float)
    if n.size == 0 or n.min() < 1:
        raise ArgumentError("n values must be positive")
    log_ratio = np.array([monomial_norm_log(w, k) for k in n]) - gammaln(n + 1.0) + 0.5 * np.log(2.0 * np.pi * n)
    margins = np.minimum(log_ratio - math.log(1.0 - tolerance), math.log(1.0 + tolerance) - log_ratio)
    return CertificateReport.from_margins(
        "stirling_ratio", f"n in {[int(k) for k in n]}", margins,
        [{"n": int(k), "ratio": math.exp(r)} for k, r in zip(n, log_ratio)],
    )


def stirling_partial_sum(n_terms: int) -> float:
    """sum_{n=1}^{N} (n^n / (n! e^n))^2."""
    n = np.arange(1, n_terms + 1, dtype=float)
    return float(np.exp(2.0 * (n * np.log(n) - n - gammaln(n + 1.0))).sum())


def check_stirling_divergence(n_terms: int, tolerance: float = 0.1) -> CertificateReport:
    """
    The squared terms behave like 1/(2 pi n), so the partial sum up to N is
    within `tolerance` (relative) of ln(N) / (2 pi).
    """
    if n_terms < 2:
        raise ArgumentError(f"need at least two terms, got {n_terms}")
    total = stirling_partial_sum(n_terms)
    reference = math.log(n_terms) / (2.0 * math.pi)
    margin = math.log(1.0 + tolerance) - abs(math.log(total / reference))
    return CertificateReport.from_margins(
        "stirling_divergence", f"N={n_terms}", [margin],
        [{"N": n_terms, "partial_sum": total, "reference": reference}],
    )


CHECK_NAMES = (
    "scalar_65", "scalar_70", "lemma_log1", "lemma_log2", "lemma_estimates",
    "prop_exp", "remark9", "stirling_ratio", "stirling_divergence", "condition_35",
)


def run_all(
    config: Optional[VerifyConfig] = None,
    verbose: bool = False,
    names: Optional[Sequence[str]] = None
) -> List[CertificateReport]:
    """
    Run the checks on the configured grids.

    Args:
        config: Grids and seed (defaults when None)
        verbose: Print one summary line per report
        names: Subset of CHECK_NAMES to run (all when None)

    Returns:
        Reports in the fixed CHECK_NAMES order
    """
    config = config or VerifyConfig()
    wanted = set(CHECK_NAMES if names is None else names)
    unknown = wanted - set(CHECK_NAMES)
    if unknown:
        raise ArgumentError(f"Unknown checks: {sorted(unknown)}")
    estimates_n = range(config.n_min, config.n_max + 1)

    # each random check owns a stream, so a subset reproduces the full run
    steps = {
        "scalar_65": lambda: check_scalar_65(default_x_grid(0.5, config.scalar_samples)),
        "scalar_70": lambda: check_scalar_70(default_x_grid(0.75, config.scalar_samples)),
        "lemma_log1": lambda: check_lemma_log1(
            random_pairs(np.random.default_rng([config.seed, 1]), config.pair_samples, 1.0,
                         config.m_log10_range),
            seed=config.seed),
        "lemma_log2": lambda: check_lemma_log2(
            random_pairs(np.random.default_rng([config.seed, 2]), config.pair_samples, 0.75,
                         config.m_log10_range),
            seed=config.seed),
        "lemma_estimates": lambda: check_lemma_estimates(config.alpha_grid, estimates_n),
        "prop_exp": lambda: check_prop_exp(config.prop_a, config.prop_p, config.prop_b,
                                           range(1, config.prop_n_max + 1)),
        "remark9": lambda: check_remark9(config.alpha_grid, range(1, config.remark_n_max + 1)),
        "stirling_ratio": lambda: check_stirling_ratio(config.stirling_n),
        "stirling_divergence": lambda: check_stirling_divergence(config.stirling_sum_n),
        "condition_35": lambda: validate_condition_35(
            closed_form_exp_weight(1.0, 1.0, math.e, config.condition_35_n_max + 1),
            math.e, math.e ** 4.5,
        ),
    }

    reports = []
    for name in CHECK_NAMES:
        if name not in wanted:
            continue
        report = steps[name]()
        reports.append(report)
        logger.info(report.summary())
        if verbose:
            print(f"  {report.summary()}")
    return reports


if __name__ == "__main__":
    # Demo: the full certificate suite on the default grids
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    results = run_all(VerifyConfig(), verbose=True)
    failed = [r.name for r in results if not r.passed]
    print(f"\n{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print(f"❌ failed: {', '.join(failed)}")
    else:
        print("✅ Verification suite ready!")
