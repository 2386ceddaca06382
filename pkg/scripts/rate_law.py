"""Measure the decay of the averaged stationarity gap on bilinear Minty instances.

Runs one long trajectory per graph and reports the log-log slope of the running
mean gap at the requested horizons, together with the final consensus error.

    python3 scripts/rate_law.py --N 5 --T 10000 --graphs path er
"""

import argparse
import csv
import sys

import numpy as np

from dppsp import AlgoConfig, InstanceSpec, make_instance, run
from dppsp.core import initial_point
from dppsp.diagnostics import rate_slope
from dppsp.graph import build_er_graph, complete_graph, laplacian, mixing_from_laplacian, path_graph


def build(kind, n, seed):
    g = {"path": lambda: path_graph(n), "complete": lambda: complete_graph(n), "er": lambda: build_er_graph(n, 0.4, seed)}[kind]()
    return mixing_from_laplacian(laplacian(g), graph=g)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--N", type=int, default=5)
    parser.add_argument("--T", type=int, default=10_000)
    parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--graphs", nargs="+", default=["path", "er"], choices=["path", "er", "complete"])
    parser.add_argument("--out", default=None, help="optional CSV of running-mean gaps")
    args = parser.parse_args(argv)

    inst = make_instance(InstanceSpec("bilinear", N=args.N, p=2, q=2, seed=args.seed))
    horizons = [t for t in np.logspace(2, np.log10(args.T), 3).astype(int)]
    rows = []
    for kind in args.graphs:
        W = build(kind, args.N, args.seed)
        trace = run(inst.problems, W, inst.sets, AlgoConfig(args.alpha, args.T), z0=initial_point(inst.sets, "random", seed=args.seed))
        running = np.cumsum(trace.gaps()) / np.arange(1, len(trace) + 1)
        slope = rate_slope(trace, points=horizons)
        print(f"{kind:>8}: slope {slope:+.3f}  final consensus {trace.consensus()[-1]:.2e}")
        rows.append((kind, running))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", *[k for k, _ in rows]])
            for t in range(args.T):
                writer.writerow([t + 1, *[f"{r[t]:.17g}" for _, r in rows]])
    return 0


if __name__ == "__main__":
    sys.exit(main())
