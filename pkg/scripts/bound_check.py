"""Compare measured averages against the averaged upper bounds over many seeds.

Each seed draws a weakly monotone quadratic instance on an ER graph, runs at the
requested stepsize rules and evaluates the bounds on a doubling schedule.

    python3 scripts/bound_check.py --rho 0.1 0.5 --seeds 10
"""

import argparse
import sys

import numpy as np

from dppsp import AlgoConfig, InstanceSpec, make_instance, run
from dppsp.core import initial_point, lemma2_cap, theorem1_cap
from dppsp.diagnostics import bound_inputs, theorem1_floor, theorem1_rhs
from dppsp.graph import build_er_graph, laplacian, mixing_from_laplacian
from dppsp.harness import doubling_schedule


def check_seed(rho, seed, N, T_max, t_min):
    g = build_er_graph(N, 0.5, seed)
    W = mixing_from_laplacian(laplacian(g), graph=g)
    inst = make_instance(InstanceSpec("weakly-quadratic", N=N, p=2, q=2, rho=rho, seed=seed))
    z0 = initial_point(inst.sets, "random", seed=seed)
    worst = 0.0
    for alpha in (theorem1_cap(rho), lemma2_cap(rho, W.lambda_min)):
        trace = run(inst.problems, W, inst.sets, AlgoConfig(alpha, T_max + 1), z0=z0)
        b = bound_inputs(W, inst.problems, inst.sets, alpha, z0, inst.z_star)
        gaps, cons = trace.gaps(), trace.consensus()
        for T in doubling_schedule(t_min, T_max):
            bg, bc = theorem1_rhs(b, T)
            c = max(np.mean(cons[:T]), np.mean(cons[1 : T + 1]))
            worst = max(worst, np.mean(gaps[:T]) / bg, c / bc)
        fg, fc = theorem1_floor(b)
        worst = max(worst, np.mean(gaps[T_max // 2 : T_max]) / fg, np.mean(cons[T_max // 2 : T_max]) / fc)
    return worst


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rho", type=float, nargs="+", default=[0.1, 0.5])
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--N", type=int, default=4)
    parser.add_argument("--T", type=int, default=1024)
    parser.add_argument("--t-min", type=int, default=16)
    args = parser.parse_args(argv)

    failures = 0
    for rho in args.rho:
        ratios = [check_seed(rho, s, args.N, args.T, args.t_min) for s in range(args.seeds)]
        failures += sum(r > 1 for r in ratios)
        print(f"rho {rho}: worst measured/bound ratio {max(ratios):.3e} over {args.seeds} seeds")
    print(f"violations: {failures}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
