#!/usr/bin/env python3
"""
solidhull - Full Certificate Run
Runs every inequality sweep plus the closed-form Lusky and hull spot checks
and prints a boxed summary.
"""

import math
import os
import sys
import time

sys.path.insert(0, 'src')

from lusky import closed_form_exp_weight, construct_sequence, LuskyConfig, validate_condition_35
from series import CoefficientSequence, core_norm_log, hull_block_norms
from verify import VerifyConfig, run_all
from weights import Weight

params_path = os.path.join('params', 'verify_params.json')
config = VerifyConfig.from_json(params_path) if os.path.exists(params_path) else VerifyConfig()

print("=" * 60)
print("SOLIDHULL - CERTIFICATE SUITE")
print("=" * 60)

# 1. Inequality sweeps
print("\n[1] Running inequality sweeps...")
start = time.time()
reports = run_all(config, verbose=True)
sweep_seconds = time.time() - start

# 2. Constructed Lusky sequence for exp(-r)
print("\n[2] Constructing Lusky sequence for exp(-r), b = e...")
weight = Weight.exp_power(1.0, 1.0)
constructed = construct_sequence(weight, LuskyConfig(b=math.e, m_start=1.0), 51)
constructed_report = validate_condition_35(constructed, constructed.certified_b, constructed.certified_K)
print(f"    Boundaries: {constructed.count}, last m = {constructed.boundaries[-1]:.4f}")
print(f"    A posteriori K: {constructed.certified_K:.4f}")

# 3. Norm spot checks
print("\n[3] Norm spot checks for 1/m!...")
factorial = CoefficientSequence.from_list([1.0 / math.factorial(m) for m in range(61)])
core = math.exp(core_norm_log(factorial, weight))
hull = hull_block_norms(factorial, closed_form_exp_weight(1.0, 1.0, math.e, 9))
block_2 = math.exp(hull.block(2)["log_H"])
print(f"    Core norm:   {core:.12f}")
print(f"    Hull H_2:    {block_2:.12f}")

all_reports = reports + [constructed_report]
failed = [r for r in all_reports if not r.passed]

print("\n" + "=" * 60)
print("CERTIFICATE RESULTS")
print("=" * 60)
print("""
┌─────────────────────────────────────────────────────────────┐
│  CHECK                      SAMPLES      WORST MARGIN  PASS │
├─────────────────────────────────────────────────────────────┤""")
for r in all_reports:
    print(f"│  {r.name:<24} {r.samples:>8}  {r.worst_margin:>16.3e}  {'yes' if r.passed else 'NO':>4} │")
print("└─────────────────────────────────────────────────────────────┘")
print(f"\nSweep time: {sweep_seconds:.2f}s, seed {config.seed}")

print("=" * 60)
print("ALL CERTIFICATES PASS" if not failed else f"{len(failed)} CERTIFICATE(S) FAILED")
print("=" * 60)
sys.exit(0 if not failed else 1)
