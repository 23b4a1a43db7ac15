#!/usr/bin/env python3
"""Print a gain-selection table: predicted steady-state bounds over a grid of
feedback gains K = c*I, sorted by the attitude-error bound."""

import math

import numpy as np

from ftacs import ControllerGains, gain_sweep
from ftacs.scenario import paper_budget


def main():
    budget = paper_budget(rho_E=0.08)
    grid = [
        ControllerGains(k=k, K=c * np.eye(3), epsilon=0.01, gamma=0.01)
        for k in (0.1, 0.2, 0.4)
        for c in (0.1, 0.35, 0.7, 1.4, 2.8)
    ]
    rows = gain_sweep(budget, grid)
    header = f"{'k':>5} {'lmin(K)':>8} {'ok':>4} {'iters':>6} {'q bound':>12} {'theta bound (deg)':>18}"
    print(header)
    print("-" * len(header))
    for r in rows:
        theta = math.degrees(r["theta_bound"]) if r["ok"] else float("inf")
        print(
            f"{r['k']:>5.2f} {r['lambda_min_K']:>8.2f} {str(r['ok']):>4} "
            f"{r['iterations']:>6d} {r['q_bound']:>12.4e} {theta:>18.6g}"
            + ("" if r["ok"] else f"   ({r['reason']})")
        )


if __name__ == "__main__":
    main()
