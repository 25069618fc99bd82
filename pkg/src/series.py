"""
Coefficient Sequences and Weighted Norms
Finitely supported Taylor/sequence coefficients with the norms built on them:

- hull_block_norms: per-block l2 norms H_n at the peak radii of a Lusky sequence
- hull_block_norms_exp_closed_form: the same for exp(-a r^p) with m_n = p (ln b) n^2
- core_norm_log: sup_r v(r) sum |a_n| r^n
- coeff_l2_lower_bound_log: sup_r v(r) (sum |a_n|^2 r^2n)^(1/2)
- poly_norm_v_log: sup_r v(r) M(f, r), with M sampled on the circle by FFT

All norms are returned as logarithms; -inf encodes zero.

Note on the exp(-a r^p) closed form: substituting r_{m_n} = (n^2 ln b / a)^(1/p)
into the block norm gives a per-term factor a^(-2m/p), which is what is
implemented. The printed variant (ap)^(-m/p) agrees only at a = p = 1.
"""

import cmath
import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import mpmath
import numpy as np
import pandas as pd

from exceptions import ArgumentError, CoverageError
from lusky import LuskySequence, closed_form_count
from numerics import (
    DEFAULT_SEARCH,
    LOG_TWO,
    LOG_ZERO,
    SearchConfig,
    logsumexp,
    logsumexp_rows,
    maximize_log_radius,
)
from weights import Weight, eval_log_v, r_peak

logger = logging.getLogger(__name__)

_MP_TYPES = (mpmath.mpf, mpmath.mpc)


def _log_abs(value) -> float:
    """ln|value| for int, float, complex, Fraction or mpmath numbers."""
    if isinstance(value, _MP_TYPES):
        return float(mpmath.log(abs(value)))
    if isinstance(value, Fraction):
        return math.log(abs(value.numerator)) - math.log(value.denominator)
    if isinstance(value, int):
        return math.log(abs(value))
    return math.log(abs(complex(value)))


def _unit_phase(value) -> complex:
    """value / |value| as a Python complex."""
    if isinstance(value, mpmath.mpc):
        return complex(value / abs(value))
    if isinstance(value, complex):
        return value / abs(value)
    return 1.0 if value > 0 else -1.0


def _is_finite(value) -> bool:
    if isinstance(value, _MP_TYPES):
        return bool(mpmath.isfinite(value))
    if isinstance(value, (int, Fraction)):
        return True
    return cmath.isfinite(complex(value))


def _scale_value(value, factor):
    if factor == 1:
        return value
    if isinstance(value, _MP_TYPES) and isinstance(factor, Fraction):
        return value * mpmath.mpf(factor.numerator) / factor.denominator
    return value * factor


class CoefficientSequence:
    """
    Finitely supported sequence (a_m), m >= 0, stored sparsely.

    Zero entries are dropped on construction.
    """

    def __init__(self, entries: Optional[Mapping[int, Number]] = None):
        clean: Dict[int, Number] = {}
        for index, value in (entries or {}).items():
            if isinstance(index, bool) or int(index) != index or index < 0:
                raise ArgumentError(f"indices must be nonnegative integers, got {index!r}")
            if not isinstance(value, (Number, *_MP_TYPES)):
                raise ArgumentError(f"coefficient at {index} is not a number: {value!r}")
            if not _is_finite(value):
                raise ArgumentError(f"coefficient at {index} must be finite, got {value!r}")
            if value != 0:
                clean[int(index)] = value
        self._entries = clean
        self._terms = None

    @classmethod
    def from_list(cls, values: Iterable[Number]) -> "CoefficientSequence":
        return cls(dict(enumerate(values)))

    @classmethod
    def unit(cls, k: int) -> "CoefficientSequence":
        """The unit sequence e_k (the monomial z^k)."""
        return cls({k: 1})

    @property
    def entries(self) -> Dict[int, Number]:
        return dict(self._entries)

    @property
    def degree(self) -> int:
        """Largest supported index; -1 for the zero sequence."""
        return max(self._entries) if self._entries else -1

    def is_zero(self) -> bool:
        return not self._entries

    def __getitem__(self, index: int):
        return self._entries.get(index, 0)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefficientSequence):
            return NotImplemented
        return self._entries == other._entries

    def __add__(self, other: "CoefficientSequence") -> "CoefficientSequence":
        out = dict(self._entries)
        for index, value in other._entries.items():
            out[index] = out.get(index, 0) + value
        return CoefficientSequence(out)

    def scale(self, alpha) -> "CoefficientSequence":
        return CoefficientSequence({k: alpha * v for k, v in self._entries.items()})

    def apply_weights(self, factors: Mapping[int, Fraction]) -> "CoefficientSequence":
        """Multiply entry k by factors[k]; indices without a factor are dropped."""
        return CoefficientSequence({
            k: _scale_value(v, factors[k]) for k, v in self._entries.items() if k in factors
        })

    def truncate(self, degree: int) -> "CoefficientSequence":
        return CoefficientSequence({k: v for k, v in self._entries.items() if k <= degree})

    def log_terms(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Sorted indices, ln|a_m| and unit phases as numpy arrays (cached; treat as read-only).
        """
        if self._terms is None:
            idx = np.array(sorted(self._entries), dtype=np.int64)
            log_abs = np.array([_log_abs(self._entries[k]) for k in idx], dtype=float)
            phase = np.array([_unit_phase(self._entries[k]) for k in idx], dtype=complex)
            self._terms = (idx, log_abs, phase)
        return self._terms

    def to_dict(self) -> Dict:
        entries = []
        for k in sorted(self._entries):
            z = complex(self._entries[k])
            entries.append([k, z.real, z.imag])
        return {"entries": entries}

    @classmethod
    def from_dict(cls, data: Dict) -> "CoefficientSequence":
        """Parse {"entries": [[m, re, im], ...]}; im may be omitted."""
        try:
            rows = data["entries"]
            values = {}
            for row in rows:
                m, re = int(row[0]), float(row[1])
                im = float(row[2]) if len(row) > 2 else 0.0
                values[m] = values.get(m, 0) + (complex(re, im) if im else re)
        except (KeyError, TypeError, IndexError, ValueError) as exc:
            raise ArgumentError(f"Malformed coefficient JSON: {exc}")
        return cls(values)

    @classmethod
    def from_json(cls, text: str) -> "CoefficientSequence":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"Malformed coefficient JSON: {exc}")

    def __repr__(self) -> str:
        return f"CoefficientSequence(degree={self.degree}, nonzero={len(self)})"


def aggregate_log_norms(log_values, q: float) -> float:
    """
    Log of the l_q norm of a sequence given by its logs; q = inf gives the max.
    """
    arr = np.asarray(log_values, dtype=float)
    if arr.size == 0 or not np.any(arr > LOG_ZERO):
        return LOG_ZERO
    if math.isinf(q):
        return float(arr.max())
    return logsumexp(q * arr) / q


@dataclass
class BlockNormProfile:
    """
    Per-block log-norms and their aggregate.

    Attributes:
        frame: DataFrame with columns n, m_lo, m_hi, log_H, included
        q: Outer exponent of the aggregate (inf = sup over blocks)
        log_sup: Aggregate over the included blocks
        label: Short description for reports
    """
    frame: pd.DataFrame
    q: float
    log_sup: float
    label: str = ""

    @classmethod
    def from_blocks(
        cls,
        n: List[int],
        m_lo: List[int],
        m_hi: List[int],
        log_h: List[float],
        included: List[bool],
        q: float = math.inf,
        label: str = ""
    ) -> "BlockNormProfile":
        frame = pd.DataFrame({
            "n": np.asarray(n, dtype=np.int64),
            "m_lo": np.asarray(m_lo, dtype=np.int64),
            "m_hi": np.asarray(m_hi, dtype=np.int64),
            "log_H": np.asarray(log_h, dtype=float),
            "included": np.asarray(included, dtype=bool),
        })
        log_sup = aggregate_log_norms(frame.loc[frame["included"], "log_H"].to_numpy(), q)
        return cls(frame=frame, q=q, log_sup=log_sup, label=label)

    @property
    def log_H(self) -> np.ndarray:
        return self.frame["log_H"].to_numpy()

    def block(self, n: int) -> pd.Series:
        rows = self.frame[self.frame["n"] == n]
        if rows.empty:
            raise ArgumentError(f"no block {n} in profile")
        return rows.iloc[0]

    def to_csv(self, path_or_buf=None) -> Optional[str]:
        """CSV with columns n, m_lo, m_hi, log_H at 17 significant digits."""
        return self.frame[["n", "m_lo", "m_hi", "log_H"]].to_csv(
            path_or_buf, index=False, float_format="%.17g"
        )

    def to_dict(self) -> Dict:
        def finite(x):
            return float(x) if math.isfinite(x) else None

        return {
            "label": self.label,
            "q": None if math.isinf(self.q) else self.q,
            "log_sup": finite(self.log_sup),
            "blocks": [
                {"n": int(row.n), "m_lo": int(row.m_lo), "m_hi": int(row.m_hi),
                 "log_H": finite(row.log_H), "included": bool(row.included)}
                for row in self.frame.itertuples(index=False)
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "BlockNormProfile":
        """Parse to_dict output; null log-norms are zero norms and a null q is inf."""
        def log_or_zero(x):
            return LOG_ZERO if x is None else float(x)

        try:
            blocks = data["blocks"]
            q = math.inf if data.get("q") is None else float(data["q"])
            profile = cls.from_blocks(
                [int(b["n"]) for b in blocks],
                [int(b["m_lo"]) for b in blocks],
                [int(b["m_hi"]) for b in blocks],
                [log_or_zero(b["log_H"]) for b in blocks],
                [bool(b["included"]) for b in blocks],
                q=q,
                label=str(data.get("label", "")),
            )
            profile.log_sup = log_or_zero(data["log_sup"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"Malformed block norm JSON: {exc}")
        return profile


# Hull block norms

def _hull_profile(
    c: CoefficientSequence,
    floors: np.ndarray,
    log_radius: np.ndarray,
    log_v: np.ndarray,
    label: str
) -> BlockNormProfile:
    """
    Blocks: 0 covers 0..floors[0], block n covers floors[n-1]+1..floors[n].
    log_radius / log_v give the evaluation point of each block.
    """
    if c.degree > floors[-1]:
        raise CoverageError(
            f"degree {c.degree} exceeds last block boundary {int(floors[-1])}: extend Lusky sequence"
        )
    n_blocks = len(floors)
    log_h = np.full(n_blocks, LOG_ZERO)
    if not c.is_zero():
        idx, log_abs, _ = c.log_terms()
        block_of = np.searchsorted(floors, idx, side="left")
        # squared moduli at the block radius
        terms = pd.DataFrame({
            "block": block_of,
            "term": 2.0 * (log_abs + idx * log_radius[block_of]),
        })
        per_block = terms.groupby("block")["term"].apply(logsumexp)
        for block, value in per_block.items():
            log_h[block] = log_v[block] + 0.5 * value

    m_lo = np.concatenate(([0], floors[:-1] + 1))
    # block 0 is reported only
    included = np.arange(n_blocks) >= 1
    return BlockNormProfile.from_blocks(
        list(range(n_blocks)), m_lo, floors, log_h, included, q=math.inf, label=label
    )


def hull_block_norms(
    c: CoefficientSequence,
    seq: LuskySequence,
    use_upper_radius: bool = False
) -> BlockNormProfile:
    """
    Solid-hull block norms ln H_n = ln v(r) + 1/2 LSE(2 (ln|b_m| + m ln r)).

    Block n >= 1 covers m_n < m <= m_{n+1} and is evaluated at r = r_{m_n}
    (or r_{m_{n+1}} with use_upper_radius). Block 0 covers 0 <= m <= m_1 at
    r_{m_1}; it is reported but excluded from log_sup.

    Args:
        c: Coefficients
        seq: Lusky sequence covering the support of c
        use_upper_radius: Evaluate block n at the right boundary's peak radius

    Returns:
        BlockNormProfile with log_sup = max over n >= 1

    Raises:
        CoverageError: degree of c beyond the last boundary
    """
    floors = np.floor(np.asarray(seq.boundaries)).astype(np.int64)
    log_r = np.array([pk.log_r for pk in seq.r_at])
    log_v = np.array([pk.log_peak_value - pk.m * pk.log_r for pk in seq.r_at])
    if use_upper_radius:
        at = np.concatenate(([0], np.arange(1, len(floors))))
    else:
        at = np.concatenate(([0], np.arange(0, len(floors) - 1)))
    return _hull_profile(c, floors, log_r[at], log_v[at], label=f"hull under {seq.weight}")


def hull_block_norms_exp_closed_form(
    c: CoefficientSequence,
    a: float,
    p: float,
    b: float = math.e,
    n_max: Optional[int] = None
) -> BlockNormProfile:
    """
    Hull block norms for v(r) = exp(-a r^p) with m_n = p (ln b) n^2.

    Uses ln r_{m_n} = (ln ln b + 2 ln n - ln a) / p and ln v(r_{m_n}) = -(ln b) n^2
    directly; for b = e and a = p = 1 the per-term log-weight is
    2 (ln|b_m| + 2m ln n) - 2 n^2.
    """
    if not (a > 0 and p > 0):
        raise ArgumentError(f"need a > 0 and p > 0, got a={a}, p={p}")
    if not b > 2:
        raise ArgumentError(f"b must exceed 2, got {b}")
    if n_max is None:
        n_max = closed_form_count(p, b, c.degree)
    n = np.arange(1, n_max + 1, dtype=float)
    log_b = math.log(b)
    floors = np.floor(p * log_b * n * n).astype(np.int64)
    log_r = (math.log(log_b) + 2.0 * np.log(n) - math.log(a)) / p
    log_v = -log_b * n * n
    at = np.concatenate(([0], np.arange(0, n_max - 1)))
    return _hull_profile(c, floors, log_r[at], log_v[at],
                         label=f"hull under exp(-{a:g} r^{p:g}), closed form")


# Radial suprema

def _check_inputs(c: CoefficientSequence, w: Weight) -> None:
    if not isinstance(c, CoefficientSequence):
        raise ArgumentError(f"expected CoefficientSequence, got {type(c).__name__}")
    if not isinstance(w, Weight):
        raise ArgumentError(f"expected Weight, got {type(w).__name__}")


def _radial_sup(
    c: CoefficientSequence,
    w: Weight,
    log_modulus,
    search: SearchConfig,
    log_radius_range: Optional[Tuple[float, float]]
) -> float:
    """
    sup over r of -phi(r) + log_modulus(ln r), including r = 0 when a_0 != 0
    and no annulus is requested.
    """
    _check_inputs(c, w)
    if c.is_zero():
        return LOG_ZERO

    def objective(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(invalid="ignore"):
            return log_modulus(t) - w.phi_log_radius(t)

    idx = c.log_terms()[0]
    positive = idx[idx > 0]
    min_right = r_peak(w, c.degree, search).log_r if c.degree > 0 else None
    # the lowest nonconstant term peaks leftmost
    max_left = r_peak(w, int(positive[0]), search).log_r - LOG_TWO if positive.size else None
    _, best = maximize_log_radius(objective, search, min_right=min_right,
                                  interval=log_radius_range, max_left=max_left)
    if log_radius_range is None and c[0] != 0:
        best = max(best, _log_abs(c[0]) + eval_log_v(w, 0.0))
    return best


def core_norm_log(
    c: CoefficientSequence,
    w: Weight,
    search: SearchConfig = DEFAULT_SEARCH,
    log_radius_range: Optional[Tuple[float, float]] = None
) -> float:
    """
    Solid-core norm: ln sup_r [ -phi(r) + ln sum |a_n| r^n ].

    Args:
        c: Coefficients
        w: Weight
        search: Search configuration
        log_radius_range: Optional (lo, hi) in ln r restricting the sup to an annulus

    Returns:
        Log of the norm; -inf for the zero sequence
    """
    if c.is_zero():
        return LOG_ZERO
    idx, log_abs, _ = c.log_terms()

    def log_modulus(t):
        return logsumexp_rows(log_abs[None, :] + np.outer(t, idx))

    return _radial_sup(c, w, log_modulus, search, log_radius_range)


def coeff_l2_lower_bound_log(
    c: CoefficientSequence,
    w: Weight,
    search: SearchConfig = DEFAULT_SEARCH,
    log_radius_range: Optional[Tuple[float, float]] = None
) -> float:
    """ln sup_r v(r) (sum |a_n|^2 r^2n)^(1/2); a lower bound for the sup norm."""
    if c.is_zero():
        return LOG_ZERO
    idx, log_abs, _ = c.log_terms()

    def log_modulus(t):
        return 0.5 * logsumexp_rows(2.0 * (log_abs[None, :] + np.outer(t, idx)))

    return _radial_sup(c, w, log_modulus, search, log_radius_range)


def circle_sample_size(degree: int) -> int:
    """Number of equispaced angles used to sample M(f, r)."""
    return 4 * max(degree, 0) + 64


def log_circle_max(c: CoefficientSequence, t) -> np.ndarray:
    """
    ln M(f, e^t), vectorised over t.

    |f| is sampled by FFT on 4 deg + 64 angles; the best sample is refined once
    by fitting a parabola through it and its two neighbours and evaluating f
    directly at the vertex. The result never exceeds the true maximum modulus.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if c.is_zero():
        return np.full(t.shape, LOG_ZERO)
    idx, log_abs, phase = c.log_terms()
    n_angles = circle_sample_size(int(idx[-1]))

    expo = log_abs[None, :] + np.outer(t, idx)
    shift = expo.max(axis=1)
    scaled = phase[None, :] * np.exp(expo - shift[:, None])
    padded = np.zeros((len(t), n_angles), dtype=complex)
    padded[:, idx] = scaled
    modulus = np.abs(np.fft.fft(padded, axis=1))

    rows = np.arange(len(t))
    j = modulus.argmax(axis=1)
    y0 = modulus[rows, j]
    ym = modulus[rows, (j - 1) % n_angles]
    yp = modulus[rows, (j + 1) % n_angles]
    curvature = ym - 2.0 * y0 + yp
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(curvature < 0, 0.5 * (ym - yp) / curvature, 0.0)
    delta = np.clip(np.nan_to_num(delta), -0.5, 0.5)
    angle = -2.0 * np.pi * (j + delta) / n_angles
    refined = np.abs((scaled * np.exp(1j * np.outer(angle, idx))).sum(axis=1))

    best = np.maximum(y0, refined)
    with np.errstate(divide="ignore"):
        return np.log(best) + shift


def poly_norm_v_log(
    c: CoefficientSequence,
    w: Weight,
    search: SearchConfig = DEFAULT_SEARCH,
    log_radius_range: Optional[Tuple[float, float]] = None
) -> float:
    """
    Weighted sup norm ln sup_r v(r) M(f, r) of the polynomial with coefficients c.

    M(f, r) is sampled (see log_circle_max), so the value is a lower bound of
    the true norm, exact for positive coefficients where M(f, r) = f(r).

    Args:
        c: Coefficients
        w: Weight
        search: Search configuration
        log_radius_range: Optional (lo, hi) in ln r restricting the sup to an annulus

    Returns:
        Log of the norm; -inf for the zero polynomial
    """
    return _radial_sup(c, w, lambda t: log_circle_max(c, t), search, log_radius_range)


if __name__ == "__main__":
    # Demo: norms of sum z^m / m! under exp(-r)
    from lusky import closed_form_exp_weight

    weight = Weight.exp_power(1.0, 1.0)
    exp_series = CoefficientSequence.from_list([1.0 / math.factorial(m) for m in range(61)])
    print(f"core norm    {math.exp(core_norm_log(exp_series, weight)):.6f}")
    print(f"sup norm     {math.exp(poly_norm_v_log(exp_series, weight)):.6f}")
    print(f"l2 bound     {math.exp(coeff_l2_lower_bound_log(exp_series, weight)):.6f}")

    profile = hull_block_norms(exp_series, closed_form_exp_weight(1.0, 1.0, math.e, 9))
    print(profile.frame.to_string(index=False))
    print("\n✅ Series module ready!")
