#!/usr/bin/env python3
"""Run the fault-free and faulty Monte Carlo campaigns and compare the
campaign tail maxima against the predicted bounds.

Usage: run_campaigns.py [n_instances]   (default 10; the original study
used 100, which takes roughly ten times longer)
"""

import math
import os
import sys
from pathlib import Path

from ftacs import export_summary_jsonl, run_campaign
from ftacs.scenario import paper_fault_free, paper_faulty

OUT = Path(os.environ.get("FTACS_OUT_DIR", "."))


def campaign(scenario, n):
    summary = run_campaign(scenario, n)
    pred = summary.predicted
    theta_bound = math.degrees(pred.theta_bound)
    omega_bound = math.degrees(pred.omega_bound)
    print(f"\n=== {scenario.name} ({n} instances, {scenario.duration:.0f} s each) ===")
    print(f"  predicted: theta_e <= {theta_bound:.4g} deg, |omega_e| <= {omega_bound:.4g} deg/s")
    print(
        f"  simulated: theta_e tail max {summary.theta_e_max_deg:.4g} deg, "
        f"|omega_e| tail max {math.degrees(summary.omega_e_max):.4g} deg/s"
    )
    print(
        f"  margins  : theta x{theta_bound / summary.theta_e_max_deg:.2f}, "
        f"omega x{omega_bound / math.degrees(summary.omega_e_max):.2f}"
    )
    ok = summary.theta_e_max_deg <= theta_bound and math.degrees(summary.omega_e_max) <= omega_bound
    print(f"  envelope : {'holds' if ok else 'VIOLATED'}")
    out = OUT / f"campaign-{scenario.name}-n{n}.jsonl"
    export_summary_jsonl(summary, out)
    print(f"  wrote {out}")
    return ok


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    OUT.mkdir(parents=True, exist_ok=True)
    ok = campaign(paper_fault_free(), n)
    ok &= campaign(paper_faulty(), n)
    sys.exit(0 if ok else 2)


if __name__ == "__main__":
    main()
