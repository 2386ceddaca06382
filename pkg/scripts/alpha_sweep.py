"""Sweep stepsizes for a config file and print the summary table.

Thin wrapper over the harness sweep, convenient for quick comparisons.

    python3 scripts/alpha_sweep.py configs/bilinear_path5.cfg 0.25 0.5 1 2 4
"""

import argparse
import sys

from dppsp.harness import SUMMARY_COLUMNS, parse_config, sweep


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config")
    parser.add_argument("alphas", nargs="+", help="numbers or stepsize rules such as lemma2*0.5")
    args = parser.parse_args(argv)

    code, rows = sweep(parse_config(args.config), args.alphas)
    for values in rows:
        row = dict(zip(SUMMARY_COLUMNS, values))
        print(f"alpha {row['alpha']:<10.4g} mean gap {row['mean_gap']:.3e}  mean consensus {row['mean_consensus']:.3e}  slope {row['slope']:+.3f}  {row['status']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
