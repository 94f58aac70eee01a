"""Small threshold sweep, critical-exponent fit and hashing bounds.

The desk-scale preset uses small codes and few trials, so the fitted
threshold is only indicative. The full depolarizing preset is available
from the command line: ``dwcode sweep --preset depolarizing --out dep``.

Run: python3 demos/04_threshold_fit.py
"""
from __future__ import annotations

from dwcode import SweepConfig, fit_threshold, hashing_bound, run_sweep


def main():
    cfg = SweepConfig("x3z3", (7, 9, 11), (0.11, 0.115, 0.12, 0.125, 0.13, 0.135), eta="0.5", trials=20_000, seed=4)
    stats = run_sweep(cfg)
    for pt in stats:
        print(f"d={pt.size:<3d} p={pt.p:<6g} p_L={pt.p_L:.4f}  [{pt.ci_lo:.4f}, {pt.ci_hi:.4f}]")
    est = fit_threshold(stats)
    print(f"\nfitted threshold {est.p_th:.4f} +/- {est.stderr['p_th']:.4f}, beta = {est.beta:.2f}")

    print("\nhashing bound")
    for eta in ("0.5", "3", "10", "100", "1000", "inf"):
        print(f"  eta={eta:>5}: {hashing_bound(eta):.5f}")


if __name__ == "__main__":
    main()
