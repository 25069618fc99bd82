"""
solidhull Command-Line Interface
Batch front end over the library with JSON (default) or CSV output.

Subcommands: weight-info, lusky, hull, core, poly-norm, multiplier, verify.

Exit codes:
    0 success / all certificates pass
    1 a certificate failed
    2 argument error
    3 coverage error (extend the Lusky sequence)
    4 numeric domain error
"""

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Sequence

import pandas as pd

from exceptions import ArgumentError, CoverageError, NumericDomainError
from lusky import (
    LuskyConfig,
    LuskySequence,
    closed_form_count,
    closed_form_exp_weight,
    construct_covering,
    construct_sequence,
)
from multipliers import multiplier_profile
from numerics import SearchConfig
from series import (
    BlockNormProfile,
    CoefficientSequence,
    coeff_l2_lower_bound_log,
    core_norm_log,
    hull_block_norms,
    poly_norm_v_log,
)
from verify import VerifyConfig, run_all
from weights import PeakRadius, Weight, WeightKind, eval_log_v, r_peak

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_ARGUMENT = 2
EXIT_COVERAGE = 3
EXIT_NUMERIC = 4

SEED_ENV = "SOLIDHULL_SEED"


@dataclass
class CliConfig:
    """Parsed command line."""
    subcommand: str
    weight_spec: Optional[str] = None
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    fmt: str = "json"
    tol_log: float = 1e-9
    grid_points: int = 256
    seed: Optional[int] = None
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "CliConfig":
        common = {"subcommand", "weight", "input", "output", "format", "tol_log",
                  "grid_points", "seed", "verbose", "handler"}
        seed = ns.seed
        if seed is None and os.environ.get(SEED_ENV):
            try:
                seed = int(os.environ[SEED_ENV])
            except ValueError:
                raise ArgumentError(f"{SEED_ENV} must be an integer, got {os.environ[SEED_ENV]!r}")
        return cls(
            subcommand=ns.subcommand,
            weight_spec=getattr(ns, "weight", None),
            input_path=getattr(ns, "input", None),
            output_path=ns.output,
            fmt=ns.format,
            tol_log=ns.tol_log,
            grid_points=ns.grid_points,
            seed=seed,
            options={k: v for k, v in vars(ns).items() if k not in common},
        )

    @property
    def search(self) -> SearchConfig:
        if self.grid_points < 8:
            raise ArgumentError(f"grid points must be >= 8, got {self.grid_points}")
        return SearchConfig(grid_points=self.grid_points)


# Input helpers

def load_weight(spec: Optional[str]) -> Weight:
    """Weight from inline JSON, shorthand ('exp_power:1:1') or a file holding either."""
    if not spec:
        raise ArgumentError("a weight is required (--weight)")
    if os.path.isfile(spec):
        with open(spec) as f:
            spec = f.read()
    return Weight.from_spec(spec)


def load_coefficients(path: Optional[str]) -> CoefficientSequence:
    """Coefficient JSON from a file, or stdin for '-'."""
    if not path:
        raise ArgumentError("an input sequence is required (--input)")
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path) as f:
                text = f.read()
    except OSError as exc:
        raise ArgumentError(f"Cannot read {path}: {exc}")
    return CoefficientSequence.from_json(text)


def _positive_float(text: str) -> float:
    value = _extended_float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _extended_float(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text}")


def _json_safe(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def emit(cfg: CliConfig, payload: Dict, frame: Optional[pd.DataFrame] = None) -> None:
    """Write JSON (or CSV of `frame`) to the output path or stdout."""
    if cfg.fmt == "csv":
        if frame is None:
            raise ArgumentError(f"{cfg.subcommand} has no CSV form")
        text = frame.to_csv(index=False, float_format="%.17g")
    else:
        text = json.dumps(_json_safe(payload), indent=2) + "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _sequence_for(cfg: CliConfig, w: Weight, degree: int) -> LuskySequence:
    """Lusky sequence covering `degree`: from --sequence, the closed form, or construction."""
    opts = cfg.options
    if opts.get("sequence"):
        try:
            with open(opts["sequence"]) as f:
                return LuskySequence.from_dict(json.load(f), cfg.search)
        except (OSError, json.JSONDecodeError) as exc:
            raise ArgumentError(f"Cannot read Lusky sequence: {exc}")
    b = opts.get("b", math.e)
    if opts.get("closed_form"):
        if w.kind is not WeightKind.EXP_POWER:
            raise ArgumentError("--closed-form needs an exp_power weight")
        return closed_form_exp_weight(w.a, w.p, b, closed_form_count(w.p, b, degree))
    return construct_covering(w, LuskyConfig(b=b, tol_log=cfg.tol_log), degree, cfg.search)


def _profile_frame(profile: BlockNormProfile) -> pd.DataFrame:
    return profile.frame[["n", "m_lo", "m_hi", "log_H"]]


# Subcommands

def cmd_weight_info(cfg: CliConfig) -> int:
    """r_m, ln v(r_m) and ln ||z^m||_v for each requested m."""
    w = load_weight(cfg.weight_spec)
    rows = []
    for m in cfg.options["m"]:
        if m < 0:
            raise ArgumentError(f"m must be >= 0, got {m}")
        if m == 0:
            pk = PeakRadius(m=0.0, log_r=-math.inf, log_peak_value=eval_log_v(w, 0.0))
        else:
            pk = r_peak(w, m, cfg.search)
        rows.append(pk.to_dict())
    emit(cfg, {"weight": w.to_dict(), "peaks": rows}, pd.DataFrame(rows))
    return EXIT_OK


def cmd_lusky(cfg: CliConfig) -> int:
    """Closed-form or constructed Lusky sequence."""
    w = load_weight(cfg.weight_spec)
    opts = cfg.options
    count = opts["count"]
    if count < 1:
        raise ArgumentError(f"count must be >= 1, got {count}")
    if opts["closed_form"]:
        if w.kind is not WeightKind.EXP_POWER:
            raise ArgumentError("--closed-form needs an exp_power weight")
        seq = closed_form_exp_weight(w.a, w.p, opts["b"], count)
    else:
        lusky_cfg = LuskyConfig(b=opts["b"], tol_log=cfg.tol_log, m_start=opts.get("m_start"))
        seq = construct_sequence(w, lusky_cfg, count, cfg.search)
    frame = pd.DataFrame({
        "n": range(1, seq.count + 1),
        "m_n": seq.boundaries,
        "log_A": list(seq.log_A) + [math.nan],
        "log_B": list(seq.log_B) + [math.nan],
    })
    emit(cfg, seq.to_dict(), frame)
    return EXIT_OK


def cmd_hull(cfg: CliConfig) -> int:
    """Solid-hull block norms of the input sequence."""
    w = load_weight(cfg.weight_spec)
    c = load_coefficients(cfg.input_path)
    seq = _sequence_for(cfg, w, max(c.degree, 1))
    profile = hull_block_norms(c, seq, use_upper_radius=cfg.options.get("upper_radius", False))
    emit(cfg, profile.to_dict(), _profile_frame(profile))
    return EXIT_OK


def cmd_core(cfg: CliConfig) -> int:
    """Solid-core norm of the input sequence."""
    w = load_weight(cfg.weight_spec)
    c = load_coefficients(cfg.input_path)
    value = core_norm_log(c, w, cfg.search)
    emit(cfg, {"log_norm": value}, pd.DataFrame([{"log_norm": value}]))
    return EXIT_OK


def cmd_poly_norm(cfg: CliConfig) -> int:
    """Weighted sup norm with its l2 lower bound and core upper bound."""
    w = load_weight(cfg.weight_spec)
    c = load_coefficients(cfg.input_path)
    row = {
        "log_l2_lower_bound": coeff_l2_lower_bound_log(c, w, cfg.search),
        "log_norm": poly_norm_v_log(c, w, cfg.search),
        "log_core": core_norm_log(c, w, cfg.search),
    }
    emit(cfg, row, pd.DataFrame([row]))
    return EXIT_OK


def cmd_multiplier(cfg: CliConfig) -> int:
    """Multiplier profile of the input sequence into l_p."""
    w = load_weight(cfg.weight_spec)
    lam = load_coefficients(cfg.input_path)
    seq = _sequence_for(cfg, w, max(lam.degree, 1))
    profile = multiplier_profile(lam, seq, cfg.options["p"])
    emit(cfg, profile.to_dict(), _profile_frame(profile))
    return EXIT_OK


def cmd_verify(cfg: CliConfig) -> int:
    """Run the certificate suite; exit 1 if any report fails."""
    opts = cfg.options
    config = VerifyConfig.from_json(opts["params"]) if opts.get("params") else VerifyConfig()
    if cfg.seed is not None:
        config = replace(config, seed=cfg.seed)
    if opts.get("check"):
        reports = run_all(config, names=opts["check"])
    elif opts.get("all"):
        reports = run_all(config)
    else:
        raise ArgumentError("choose --all or at least one --check")

    passed = all(r.passed for r in reports)
    frame = pd.DataFrame([
        {"name": r.name, "samples": r.samples, "worst_margin": r.worst_margin, "pass": r.passed}
        for r in reports
    ])
    emit(cfg, {"pass": passed, "seed": config.seed, "reports": [r.to_dict() for r in reports]}, frame)
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solidhull",
        description="Solid hulls, solid cores and multipliers of weighted spaces of entire functions.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--output", help="write to this file instead of stdout")
    parser.add_argument("--tol-log", type=_positive_float, default=1e-9,
                        help="bisection tolerance on ln min(A, B)")
    parser.add_argument("--grid-points", type=int, default=256, help="radial search grid size")
    parser.add_argument("--seed", type=int, default=None, help=f"sweep seed (overrides ${SEED_ENV})")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def with_weight(p):
        p.add_argument("--weight", required=True,
                       help="JSON object, shorthand like exp_power:1:1, or a file")
        return p

    def with_sequence_source(p):
        p.add_argument("--b", type=_positive_float, default=math.e, help="Lusky lower bound b > 2")
        p.add_argument("--closed-form", action="store_true", help="use m_n = p (ln b) n^2")
        p.add_argument("--sequence", help="Lusky sequence JSON from the lusky subcommand")
        return p

    p = with_weight(sub.add_parser("weight-info", help="peak radii and monomial norms"))
    p.add_argument("--m", type=float, nargs="+", required=True)
    p.set_defaults(handler=cmd_weight_info)

    p = with_weight(sub.add_parser("lusky", help="Lusky block sequence"))
    p.add_argument("--b", type=_positive_float, default=math.e)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--closed-form", action="store_true")
    p.add_argument("--m-start", type=_positive_float, default=None)
    p.set_defaults(handler=cmd_lusky)

    p = with_sequence_source(with_weight(sub.add_parser("hull", help="solid-hull block norms")))
    p.add_argument("--input", required=True, help="coefficient JSON file or '-'")
    p.add_argument("--upper-radius", action="store_true", help="evaluate block n at r_{m_{n+1}}")
    p.set_defaults(handler=cmd_hull)

    for name, handler, text in (("core", cmd_core, "solid-core norm"),
                                ("poly-norm", cmd_poly_norm, "weighted sup norm")):
        p = with_weight(sub.add_parser(name, help=text))
        p.add_argument("--input", required=True, help="coefficient JSON file or '-'")
        p.set_defaults(handler=handler)

    p = with_sequence_source(with_weight(sub.add_parser("multiplier", help="multiplier profile into l_p")))
    p.add_argument("--input", required=True, help="multiplier coefficient JSON file or '-'")
    p.add_argument("--p", type=_extended_float, required=True, help="target exponent in [1, inf]")
    p.set_defaults(handler=cmd_multiplier)

    p = sub.add_parser("verify", help="run the inequality certificates")
    p.add_argument("--all", action="store_true")
    p.add_argument("--check", action="append", help="run only this check (repeatable)")
    p.add_argument("--params", help="VerifyConfig JSON (see params/verify_params.json)")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if ns.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = CliConfig.from_args(ns)
        return ns.handler(cfg)
    except CoverageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COVERAGE
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    except NumericDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
