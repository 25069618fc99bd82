"""
Certificate Reports
Pass/fail records of inequality sweeps, shared by the Lusky validator and the
verification suite.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from exceptions import ArgumentError

MARGIN_TOLERANCE = 1e-9


@dataclass
class CertificateReport:
    """
    Outcome of one inequality sweep.

    Margins are measured in log-space: for a sample with value y and bounds
    [lo, hi] the margin is min(y - lo, hi - y). A negative margin is a violation.

    Attributes:
        name: Check name
        grid: Human-readable description of the parameter grid
        samples: Number of certified samples
        worst_margin: Smallest margin over the samples (+inf when empty)
        witness: Parameters of the worst sample
        passed: worst_margin >= -MARGIN_TOLERANCE
        seed: RNG seed of random sweeps
        uncertified: Parameters outside the certified range, reported only
    """
    name: str
    grid: str
    samples: int
    worst_margin: float
    witness: Dict[str, Any] = field(default_factory=dict)
    passed: bool = True
    seed: Optional[int] = None
    uncertified: List[Any] = field(default_factory=list)

    @classmethod
    def from_margins(
        cls,
        name: str,
        grid: str,
        margins,
        witnesses: Sequence[Dict[str, Any]],
        seed: Optional[int] = None,
        uncertified: Optional[List[Any]] = None,
        tolerance: float = MARGIN_TOLERANCE
    ) -> "CertificateReport":
        """
        Build a report from per-sample margins.

        Args:
            name: Check name
            grid: Grid description
            margins: Array of margins, one per sample
            witnesses: Parameters per sample, aligned with margins
            seed: RNG seed, if the grid is random
            uncertified: Samples reported but not certified
            tolerance: Allowed negative slack

        Returns:
            CertificateReport
        """
        margins = np.asarray(margins, dtype=float).ravel()
        if margins.size == 0:
            return cls(name, grid, 0, math.inf, {}, True, seed, list(uncertified or []))
        # NaN margins count as violations
        clean = np.where(np.isnan(margins), -math.inf, margins)
        worst = int(np.argmin(clean))
        worst_margin = float(clean[worst])
        return cls(
            name=name,
            grid=grid,
            samples=int(margins.size),
            worst_margin=worst_margin,
            witness=dict(witnesses[worst]),
            passed=worst_margin >= -tolerance,
            seed=seed,
            uncertified=list(uncertified or []),
        )

    def to_dict(self) -> Dict[str, Any]:
        """JSON-safe form; a non-finite worst margin becomes None."""
        margin = self.worst_margin if math.isfinite(self.worst_margin) else None
        return {
            "name": self.name,
            "grid": self.grid,
            "samples": self.samples,
            "worst_margin": margin,
            "witness": {k: _json_scalar(v) for k, v in self.witness.items()},
            "pass": self.passed,
            "seed": self.seed,
            "uncertified": [_json_scalar(u) for u in self.uncertified],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CertificateReport":
        """
        Parse to_dict output.

        A null worst margin is +inf for a passing report (no samples) and
        -inf for a failing one.
        """
        try:
            passed = bool(data["pass"])
            margin = data["worst_margin"]
            if margin is None:
                margin = math.inf if passed else -math.inf
            seed = data.get("seed")
            return cls(
                name=str(data["name"]),
                grid=str(data["grid"]),
                samples=int(data["samples"]),
                worst_margin=float(margin),
                witness=dict(data.get("witness") or {}),
                passed=passed,
                seed=None if seed is None else int(seed),
                uncertified=list(data.get("uncertified") or []),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ArgumentError(f"Malformed certificate JSON: {exc}")

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.samples} samples, worst margin {self.worst_margin:.3e}"


def _json_scalar(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value
