"""Detector deflection against field amplitude under both force laws.

    python3 scripts/md_vs_qm.py [--config configs/compare.ini] [--scales 1,2,4,8]

Scales the inhomogeneous profile by s, runs a fixed plus-branch beam under
the microdynamic and the quantum baseline force, and fits the power law of
the mean deflection in s for each.
"""
import argparse

from microdyn.harness.config import ExperimentConfig, load_config, validate
from microdyn.harness.experiments import compare_deflections
from microdyn.harness.fitting import fit_scaling


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="compare-scenario config file")
    parser.add_argument("--scales", default="1,2,4,8", help="comma-separated amplitude scales")
    args = parser.parse_args()
    cfg = load_config(args.config) if args.config else validate(ExperimentConfig(scenario="compare"))
    scales = [float(s) for s in args.scales.split(",")]
    rows = compare_deflections(cfg, scales)
    print(f"{'s':>6}  {'md deflection':>16}  {'qm deflection':>16}")
    for s, md, qm in rows:
        print(f"{s:6g}  {md:16.9e}  {qm:16.9e}")
    if len(rows) >= 3:
        md = fit_scaling([(r[0], r[1]) for r in rows])
        qm = fit_scaling([(r[0], r[2]) for r in rows])
        print(f"\nexponent md = {md.exponent:.4f} (r2 {md.r_squared:.6f})")
        print(f"exponent qm = {qm.exponent:.4f} (r2 {qm.r_squared:.6f})")


if __name__ == "__main__":
    main()
