"""
Radial Weights Module
Rapidly decreasing radial weights v = exp(-phi), their peak radii r_m and the
monomial norms ||z^m||_v.

Built-in families:
- exp_power: v(r) = exp(-a r^p)
- exp_exp:   v(r) = exp(-exp r)
- log_power: v(r) = exp(-(log+ r)^p)
- custom:    any nondecreasing log-weight phi supplied as a callable

Everything is carried in log-space; nothing here returns v(r) or r^m raw.
"""

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional

import numpy as np
from scipy.special import lambertw

from exceptions import ArgumentError, NumericDomainError
from numerics import DEFAULT_SEARCH, SearchConfig, bracket_left_log_radius, maximize_log_radius

logger = logging.getLogger(__name__)


class WeightKind(Enum):
    """Weight families."""
    EXP_POWER = "exp_power"
    EXP_EXP = "exp_exp"
    LOG_POWER = "log_power"
    CUSTOM = "custom"


# Radii used to sanity-check a custom log-weight for monotonicity.
_MONOTONE_SAMPLE = np.concatenate(([0.0], np.geomspace(2.0 ** -20, 64.0, 256)))


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class Weight:
    """
    Radial weight described by its log-weight phi(r) = -ln v(r).

    Attributes:
        kind: Weight family
        a: Scale of exp_power
        p: Exponent of exp_power / log_power
        log_weight: Callable r -> phi(r), custom weights only
        domain_floor: Below this radius phi is frozen at phi(domain_floor)
    """
    kind: WeightKind
    a: float = 1.0
    p: float = 1.0
    log_weight: Optional[Callable[[float], float]] = None   # compared by identity
    domain_floor: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.domain_floor) and self.domain_floor >= 0):
            raise ArgumentError(f"domain_floor must be finite and >= 0, got {self.domain_floor}")
        if self.kind is WeightKind.EXP_POWER:
            if not (self.a > 0 and self.p > 0 and math.isfinite(self.a) and math.isfinite(self.p)):
                raise ArgumentError(f"exp_power needs a > 0 and p > 0, got a={self.a}, p={self.p}")
        elif self.kind is WeightKind.LOG_POWER:
            if not (self.p >= 2 and math.isfinite(self.p)):
                raise ArgumentError(f"log_power needs p >= 2, got p={self.p}")
        elif self.kind is WeightKind.CUSTOM:
            if not callable(self.log_weight):
                raise ArgumentError("custom weight needs a callable log_weight")
            check_log_weight_monotone(self, _MONOTONE_SAMPLE)

    # Constructors

    @classmethod
    def exp_power(cls, a: float = 1.0, p: float = 1.0, domain_floor: float = 0.0) -> "Weight":
        return cls(WeightKind.EXP_POWER, a=float(a), p=float(p), domain_floor=domain_floor)

    @classmethod
    def exp_exp(cls, domain_floor: float = 0.0) -> "Weight":
        return cls(WeightKind.EXP_EXP, domain_floor=domain_floor)

    @classmethod
    def log_power(cls, p: float = 2.0, domain_floor: float = 0.0) -> "Weight":
        return cls(WeightKind.LOG_POWER, p=float(p), domain_floor=domain_floor)

    @classmethod
    def custom(cls, log_weight: Callable[[float], float], domain_floor: float = 0.0) -> "Weight":
        return cls(WeightKind.CUSTOM, log_weight=log_weight, domain_floor=domain_floor)

    @classmethod
    def from_dict(cls, data: Dict) -> "Weight":
        """Build a weight from its JSON object form."""
        if not isinstance(data, dict) or "kind" not in data:
            raise ArgumentError(f"Weight spec must be an object with a 'kind', got {data!r}")
        try:
            kind = WeightKind(data["kind"])
        except ValueError:
            raise ArgumentError(f"Unknown weight kind: {data['kind']!r}")
        if kind is WeightKind.CUSTOM:
            raise ArgumentError("custom weights cannot be built from JSON")
        try:
            floor = float(data.get("domain_floor", 0.0))
            a = float(data.get("a", 1.0))
            p = float(data.get("p", 2.0 if kind is WeightKind.LOG_POWER else 1.0))
        except (TypeError, ValueError):
            raise ArgumentError(f"Malformed weight parameters: {data!r}")
        if kind is WeightKind.EXP_POWER:
            return cls.exp_power(a, p, floor)
        if kind is WeightKind.EXP_EXP:
            return cls.exp_exp(floor)
        return cls.log_power(p, floor)

    @classmethod
    def from_spec(cls, text: str) -> "Weight":
        """
        Parse a weight from inline JSON or the shorthand forms
        'exp_power:a:p', 'exp_exp', 'log_power:p'.
        """
        text = text.strip()
        if text.startswith("{"):
            try:
                return cls.from_dict(json.loads(text))
            except json.JSONDecodeError as exc:
                raise ArgumentError(f"Malformed weight JSON: {exc}")
        name, *params = text.split(":")
        keys = {"exp_power": ("a", "p"), "exp_exp": (), "log_power": ("p",)}.get(name)
        if keys is None:
            raise ArgumentError(f"Unknown weight kind: {name!r}")
        if len(params) > len(keys):
            raise ArgumentError(f"Too many parameters for {name}: {text!r}")
        try:
            values = {k: float(v) for k, v in zip(keys, params)}
        except ValueError:
            raise ArgumentError(f"Malformed weight shorthand: {text!r}")
        return cls.from_dict({"kind": name, **values})

    def to_dict(self) -> Dict:
        """JSON object form of the weight."""
        if self.kind is WeightKind.CUSTOM:
            raise ArgumentError("custom weights are not serialisable")
        data = {"kind": self.kind.value}
        if self.kind is WeightKind.EXP_POWER:
            data.update(a=self.a, p=self.p)
        elif self.kind is WeightKind.LOG_POWER:
            data["p"] = self.p
        if self.domain_floor:
            data["domain_floor"] = self.domain_floor
        return data

    # Log-weight

    def phi(self, r: float) -> float:
        """phi(r) = -ln v(r) for a scalar radius r >= 0."""
        r = max(r, self.domain_floor)
        if self.kind is WeightKind.EXP_POWER:
            try:
                return self.a * r ** self.p
            except OverflowError:
                return math.inf
        if self.kind is WeightKind.EXP_EXP:
            return _safe_exp(r)
        if self.kind is WeightKind.LOG_POWER:
            return max(math.log(r), 0.0) ** self.p if r > 0 else 0.0
        return float(self.log_weight(r))

    def phi_log_radius(self, t) -> np.ndarray:
        """
        phi evaluated at r = exp(t), vectorised over t.

        Radii beyond float range are fine as long as phi itself is
        representable, which matters for log_power at large degrees.
        """
        t = np.asarray(t, dtype=float)
        if self.domain_floor > 0:
            t = np.maximum(t, math.log(self.domain_floor))
        with np.errstate(over="ignore"):
            if self.kind is WeightKind.EXP_POWER:
                return self.a * np.exp(self.p * t)
            if self.kind is WeightKind.EXP_EXP:
                return np.exp(np.exp(t))
            if self.kind is WeightKind.LOG_POWER:
                return np.maximum(t, 0.0) ** self.p
            radii = np.exp(t)
        return np.array([float(self.log_weight(float(r))) for r in radii.ravel()]).reshape(t.shape)

    def __str__(self) -> str:
        if self.kind is WeightKind.EXP_POWER:
            return f"exp(-{self.a:g} r^{self.p:g})"
        if self.kind is WeightKind.EXP_EXP:
            return "exp(-exp r)"
        if self.kind is WeightKind.LOG_POWER:
            return f"exp(-(log+ r)^{self.p:g})"
        return "custom"


@dataclass(frozen=True)
class PeakRadius:
    """
    Global maximiser r_m of r^m v(r).

    Attributes:
        m: Monomial degree (any positive real)
        log_r: ln r_m
        log_peak_value: m ln r_m - phi(r_m), i.e. ln ||z^m||_v
    """
    m: float
    log_r: float
    log_peak_value: float

    @property
    def r(self) -> float:
        return _safe_exp(self.log_r)

    @property
    def log_v(self) -> float:
        """ln v(r_m); the peak value itself at m = 0."""
        if self.m == 0:
            return self.log_peak_value
        return self.log_peak_value - self.m * self.log_r

    def to_dict(self) -> Dict:
        return {"m": self.m, "r": self.r, "log_r": self.log_r,
                "log_v": self.log_v, "log_norm": self.log_peak_value}

    @classmethod
    def from_dict(cls, data: Dict) -> "PeakRadius":
        """Parse to_dict output; a null log_r is the origin."""
        try:
            log_r = data["log_r"]
            return cls(m=float(data["m"]),
                       log_r=-math.inf if log_r is None else float(log_r),
                       log_peak_value=float(data["log_norm"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"Malformed peak radius JSON: {exc}")


def check_log_weight_monotone(w: Weight, radii, tol: float = 1e-12) -> None:
    """
    Raise ArgumentError unless phi is nondecreasing along the sorted radii.
    """
    radii = np.sort(np.asarray(radii, dtype=float))
    values = []
    for r in radii:
        try:
            values.append(w.phi(float(r)))
        except OverflowError:
            values.append(math.inf)
    values = np.asarray(values, dtype=float)
    if np.any(np.isnan(values)):
        raise ArgumentError("log-weight returned NaN on sampled radii")
    drops = np.flatnonzero(values[:-1] > values[1:] + tol)
    if drops.size:
        i = drops[0]
        raise ArgumentError(
            f"log-weight decreases between r={radii[i]:g} and r={radii[i + 1]:g} "
            f"({values[i]:g} > {values[i + 1]:g})"
        )


def eval_log_v(w: Weight, r: float) -> float:
    """
    ln v(r) = -phi(r).

    Args:
        w: Weight
        r: Radius, finite and >= 0

    Returns:
        ln v(r)
    """
    r = float(r)
    if not math.isfinite(r):
        raise NumericDomainError(f"radius must be finite, got {r}")
    if r < 0:
        raise ArgumentError(f"radius must be >= 0, got {r}")
    return -w.phi(r)


def _closed_form_log_radius(w: Weight, m: float) -> Optional[float]:
    if w.kind is WeightKind.EXP_POWER:
        return (math.log(m) - math.log(w.a * w.p)) / w.p
    if w.kind is WeightKind.EXP_EXP:
        # r e^r = m
        return math.log(float(lambertw(m).real))
    if w.kind is WeightKind.LOG_POWER:
        return (m / w.p) ** (1.0 / (w.p - 1.0))
    return None


def r_peak(w: Weight, m: float, search: SearchConfig = DEFAULT_SEARCH) -> PeakRadius:
    """
    Peak radius of r^m v(r).

    Closed forms are used for the built-in families; custom weights go through
    the bracketed search on m ln r - phi(r).

    Args:
        w: Weight
        m: Degree, > 0
        search: Search configuration for custom weights

    Returns:
        PeakRadius

    Raises:
        NumericDomainError: bracket search failed (weight not rapidly decreasing)
    """
    m = float(m)
    if not (m > 0 and math.isfinite(m)):
        raise ArgumentError(f"degree must be positive and finite, got {m}")

    log_r = _closed_form_log_radius(w, m)
    if log_r is None:
        return r_peak_search(w, m, search)

    floored = w.domain_floor > 0 and log_r < math.log(w.domain_floor)
    if floored:
        log_r = math.log(w.domain_floor)
        log_peak = m * log_r - float(w.phi_log_radius(log_r))
    elif w.kind is WeightKind.EXP_EXP:
        # phi(r_m) = e^{r_m} = m / r_m
        log_peak = m * log_r - m / _safe_exp(log_r)
    elif w.kind is WeightKind.LOG_POWER:
        # phi(r_m) = (ln r_m)^p = (m / p) ln r_m
        log_peak = m * log_r * (1.0 - 1.0 / w.p)
    else:
        log_peak = m * log_r - float(w.phi_log_radius(log_r))
    return PeakRadius(m=m, log_r=log_r, log_peak_value=log_peak)


def r_peak_search(w: Weight, m: float, search: SearchConfig = DEFAULT_SEARCH) -> PeakRadius:
    """Peak radius by bracketed search in ln r, for any weight kind."""
    m = float(m)
    if not (m > 0 and math.isfinite(m)):
        raise ArgumentError(f"degree must be positive and finite, got {m}")

    def objective(t):
        return m * np.asarray(t, dtype=float) - w.phi_log_radius(t)

    # small m or a steep weight can put the peak below the default left end
    left = bracket_left_log_radius(objective, search)
    log_r, value = maximize_log_radius(objective, search, max_left=left)
    logger.debug("r_peak_search(%s, m=%g): ln r=%.12g value=%.12g", w, m, log_r, value)
    return PeakRadius(m=m, log_r=log_r, log_peak_value=value)


def monomial_norm_log(w: Weight, n: float, search: SearchConfig = DEFAULT_SEARCH) -> float:
    """
    ln ||z^n||_v = n ln r_n - phi(r_n); ln v(0) for n = 0.

    Args:
        w: Weight
        n: Degree, >= 0

    Returns:
        Log of the monomial norm
    """
    n = float(n)
    if not (n >= 0 and math.isfinite(n)):
        raise ArgumentError(f"degree must be >= 0 and finite, got {n}")
    if n == 0:
        return eval_log_v(w, 0.0)
    return r_peak(w, n, search).log_peak_value


if __name__ == "__main__":
    # Demo: peak radii of the built-in families
    for weight in [Weight.exp_power(1.0, 1.0), Weight.exp_power(1e7, 1.0),
                   Weight.exp_exp(), Weight.log_power(2.0)]:
        for m in [1.0, 10.0, 100.0]:
            pk = r_peak(weight, m)
            print(f"{weight}  m={m:>5g}  ln r_m={pk.log_r:+.6f}  ln||z^m||={pk.log_peak_value:+.6f}")

    # A custom weight goes through the bracketed search
    pk = r_peak(Weight.custom(lambda r: r * r), 4.0)
    print(f"custom exp(-r^2), m=4: r_m={pk.r:.6f} (expected {math.sqrt(2.0):.6f})")
    print("\n✅ Weights module ready!")
