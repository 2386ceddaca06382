"""Acceptance criteria at their stated tolerances; each prints one PASS/FAIL line."""

import time
import warnings

import numpy as np
import pytest

from dppsp.core import AlgoConfig, StepSizeWarning, initial_point, lemma2_cap, proximal_point_reference, run, theorem1_cap
from dppsp.diagnostics import bound_inputs, check_mvi, lemma2_margin, rate_slope, reference_solution, theorem1_floor, theorem1_rhs
from dppsp.errors import SpectrumViolation, StepSizeViolation
from dppsp.graph import MixingMatrix, build_er_graph, complete_graph, laplacian, mixing_from_laplacian, path_graph
from dppsp.operators import Ball, Box, ProductSet, eval_B, gradient_fd_error
from dppsp.problems import FAMILIES, InstanceSpec, make_instance
from dppsp.resolvent import LocalResolvent, ResolventConfig

from conftest import identity_bound, record_criterion
from test_diagnostics import assembled_margin
from test_graph import assert_mixing_invariants


def er_mixing(N, seed, p=0.5):
    g = build_er_graph(N, p, seed)
    return mixing_from_laplacian(laplacian(g), graph=g)


def path_mixing(N):
    g = path_graph(N)
    return mixing_from_laplacian(laplacian(g), graph=g)


def quiet_run(*args, **kwargs):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StepSizeWarning)
        return run(*args, **kwargs)


def identity_ratio(trace, N):
    """Worst identity residual relative to its allowed bound (<= 1 passes)."""
    return max(r.identity_residual for r in trace.records) / identity_bound(N, trace.config["inner_tol"])


def test_criterion_1_form_equivalence():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst, worst_identity = 0.0, 0.0
    for k in range(20):
        N = int(rng.choice([2, 3, 5]))
        family = "bilinear" if k % 2 == 0 else "weakly-quadratic"
        rho = float(rng.uniform(0.1, 0.5)) if family == "weakly-quadratic" else 0.0
        spec = InstanceSpec(family, N=N, p=2, q=2, seed=k, rho=rho)
        inst = make_instance(spec)
        W = er_mixing(N, seed=k)
        alpha = theorem1_cap(rho) if rho > 0 else float(rng.uniform(0.3, 2.0))
        z0 = initial_point(inst.sets, "random", seed=k)
        a = quiet_run(inst.problems, W, inst.sets, AlgoConfig(alpha, 100, snapshot_every=1), z0=z0)
        b = quiet_run(inst.problems, W, inst.sets, AlgoConfig(alpha, 100, form="q-carrying", snapshot_every=1), z0=z0)
        assert not a.partial and not b.partial
        worst = max(worst, max(np.max(np.abs(a.snapshots[t] - b.snapshots[t])) for t in a.snapshots))
        worst_identity = max(worst_identity, identity_ratio(a, N), identity_ratio(b, N))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-7 and elapsed < 10 and worst_identity <= 1
    record_criterion(1, "q-carrying and q-eliminated trajectories agree", ok, f"max deviation {worst:.2e} <= 1e-7, {elapsed:.1f}s < 10s")
    assert ok


def test_criterion_2_resolvent_identity():
    runs = [
        (InstanceSpec("bilinear", N=5, p=2, q=2, seed=1), er_mixing(5, 1), 1.0, "q-eliminated"),
        (InstanceSpec("bilinear", N=3, p=2, q=2, seed=2, set_kind="ball"), path_mixing(3), 2.0, "q-carrying"),
        (InstanceSpec("weakly-quadratic", N=4, p=2, q=2, rho=0.5, seed=3), er_mixing(4, 3), 1.0, "q-eliminated"),
        (InstanceSpec("sc-sc-quadratic", N=3, p=2, q=2, seed=4, offset_scale=1.0), path_mixing(3), 1.5, "q-carrying"),
        (InstanceSpec("mvi-scalar", N=5, seed=5), er_mixing(5, 5), 0.5, "q-eliminated"),
        (InstanceSpec("mvi-scalar", N=3, seed=6), path_mixing(3), 0.5, "q-carrying"),
    ]
    worst, rounds = 0.0, 0
    for spec, W, alpha, form in runs:
        inst = make_instance(spec)
        trace = quiet_run(inst.problems, W, inst.sets, AlgoConfig(alpha, 300, form=form), z0=initial_point(inst.sets, "random", seed=spec.seed))
        assert not trace.partial, trace.error
        worst = max(worst, identity_ratio(trace, W.n))
        rounds += len(trace)
    ok = worst <= 1
    record_criterion(2, "summed-resolvent identity at every round", ok, f"{rounds} rounds, worst residual {worst:.2e} x (10 N inner_tol)")
    assert ok


def test_criterion_3_single_node_reduction():
    W = MixingMatrix.from_weights([[1.0]])
    mismatches, checked = 0, 0
    specs = [
        (InstanceSpec("bilinear", N=1, p=2, q=2, seed=0, box_radius=0.5), 1.0),
        (InstanceSpec("weakly-quadratic", N=1, p=2, q=2, rho=0.5, seed=1), 1.0),
        (InstanceSpec("mvi-scalar", N=1, seed=2), 0.5),
        (InstanceSpec("sc-sc-quadratic", N=1, p=2, q=1, seed=3, set_kind="ball", offset_scale=2.0), 1.0),
    ]
    for spec, alpha in specs:
        inst = make_instance(spec)
        cfg = AlgoConfig(alpha, 500, snapshot_every=1)
        z0 = initial_point(inst.sets, "random", seed=7)
        trace = quiet_run(inst.problems, W, inst.sets, cfg, z0=z0)
        ref = proximal_point_reference(inst.problems[0], inst.sets[0], cfg, z0[0], 500)
        for t in range(501):
            checked += 1
            mismatches += not np.array_equal(trace.snapshots[t][0], ref[t])
    ok = mismatches == 0
    record_criterion(3, "N=1 trace equals proximal point reference exactly", ok, f"{mismatches} mismatching iterates of {checked}, 500 rounds x 4 families")
    assert ok


def test_criterion_4_rate_law():
    start = time.perf_counter()
    spec = InstanceSpec("bilinear", N=5, p=2, q=2, seed=3)
    inst = make_instance(spec)
    assert check_mvi(inst.problems, inst.sets, inst.z_star).holds
    results = []
    for name, W in (("path", path_mixing(5)), ("er", er_mixing(5, 3, p=0.4))):
        trace = run(inst.problems, W, inst.sets, AlgoConfig(1.0, 10_000), z0=initial_point(inst.sets, "random", seed=3))
        assert identity_ratio(trace, 5) <= 1
        slope = rate_slope(trace, points=[100, 1000, 10_000])
        results.append((name, slope, trace.consensus()[-1]))
    elapsed = time.perf_counter() - start
    ok = all(-1.2 <= s <= -0.35 and c <= 1e-3 for _, s, c in results) and elapsed < 60
    detail = ", ".join(f"{n}: slope {s:.3f}, consensus {c:.1e}" for n, s, c in results)
    record_criterion(4, "O(1/sqrt T) rate on bilinear Minty instance", ok, f"{detail}, {elapsed:.1f}s < 60s")
    assert ok


def test_criterion_5_weak_monotone_bounds():
    schedule = [16, 32, 64, 128, 256, 512, 1024]
    violations, checks = [], 0
    for rho in (0.1, 0.5):
        for seed in range(10):
            N = 4
            W = er_mixing(N, seed)
            inst = make_instance(InstanceSpec("weakly-quadratic", N=N, p=2, q=2, rho=rho, seed=seed))
            z0 = initial_point(inst.sets, "random", seed=seed)
            for alpha in (theorem1_cap(rho), lemma2_cap(rho, W.lambda_min)):
                trace = run(inst.problems, W, inst.sets, AlgoConfig(alpha, schedule[-1] + 1), z0=z0)
                assert not trace.partial and identity_ratio(trace, N) <= 1
                b = bound_inputs(W, inst.problems, inst.sets, alpha, z0, inst.z_star)
                gaps, cons = trace.gaps(), trace.consensus()
                for T in schedule:
                    bg, bc = theorem1_rhs(b, T)
                    g = np.mean(gaps[:T])
                    c = max(np.mean(cons[:T]), np.mean(cons[1 : T + 1]))
                    checks += 2
                    if g > bg or c > bc:
                        violations.append((rho, seed, alpha, T, g, bg, c, bc))
                fg, fc = theorem1_floor(b)
                T = schedule[-1]
                checks += 2
                if np.mean(gaps[T // 2 : T]) > fg or np.mean(cons[T // 2 : T]) > fc:
                    violations.append((rho, seed, alpha, "plateau"))
    ok = not violations
    record_criterion(5, "averaged bounds and floors on weakly monotone family", ok, f"{len(violations)} violations in {checks} checks, 10 seeds")
    assert ok, violations[:3]


@pytest.mark.parametrize("graph", ["path3", "er5"])
def test_criterion_6_strong_monotonicity_margin(graph):
    if graph == "path3":
        g = path_graph(3)
        W = mixing_from_laplacian(laplacian(g), tau=4.0, graph=g)
    else:
        W = er_mixing(5, 0, p=0.5)
    rho = 0.5
    inst = make_instance(InstanceSpec("weakly-quadratic", N=W.n, p=1, q=1, rho=rho, seed=1))
    alpha = lemma2_cap(rho, W.lambda_min)
    sampled = lemma2_margin(W, inst.problems, inst.sets, alpha, samples=10_000, seed=0)
    dense = assembled_margin(W, inst.problems, alpha)
    target = W.lambda_min / 4
    ok = sampled >= target - 1e-8 and abs(sampled - dense) <= 1e-6
    record_criterion(6, f"strong monotonicity margin at the cap ({graph})", ok, f"sampled {sampled:.9f} >= {target:.9f}, dense {dense:.9f}, diff {abs(sampled - dense):.1e}")
    assert ok


def _independent_residual(node, fset, z, rhs, alpha):
    x, y = z[: node.dim_x], z[node.dim_x :]
    op = np.concatenate([np.ravel(node.grad_x(x, y)), -np.ravel(node.grad_y(x, y))])
    w = rhs - alpha * op
    if isinstance(fset, Box):
        proj = np.minimum(np.maximum(w, fset.lower), fset.upper)
    else:
        proj = np.empty_like(w)
        k = 0
        for part in fset.parts:
            seg = w[k : k + part.dim]
            if isinstance(part, Ball):
                off = seg - part.centre
                r = np.sqrt(off @ off)
                seg = part.centre + off * min(1.0, part.radius / r) if r > 0 else seg
            else:
                seg = np.minimum(np.maximum(seg, part.lower), part.upper)
            proj[k : k + part.dim] = seg
            k += part.dim
    return float(np.sqrt(np.sum((z - proj) ** 2)))


def test_criterion_7_resolvent_contract():
    rng = np.random.default_rng(77)
    specs = [
        InstanceSpec("bilinear", N=1, p=2, q=2, seed=1),
        InstanceSpec("bilinear", N=1, p=2, q=2, seed=2, set_kind="ball"),
        InstanceSpec("weakly-quadratic", N=1, p=2, q=2, rho=0.5, seed=3),
        InstanceSpec("sc-sc-quadratic", N=1, p=2, q=2, seed=4, offset_scale=1.0),
        InstanceSpec("mvi-scalar", N=1, seed=5),
    ]
    calls, worst = 0, 0.0
    nonexpansive_bad, pairs = 0, 0
    for k, spec in enumerate(specs):
        inst = make_instance(spec)
        node, fset = inst.problems[0], inst.sets[0]
        for _ in range(10):
            alpha = float(rng.uniform(0.05, 0.95 / node.rho if node.rho > 0 else 4.0))
            cfg = ResolventConfig(alpha)
            solver = LocalResolvent(node, fset, cfg)
            prev = None
            for _ in range(200):
                rhs = 3 * rng.standard_normal(node.dim)
                z, _ = solver(rhs)
                calls += 1
                worst = max(worst, _independent_residual(node, fset, z, rhs, alpha) / cfg.inner_tol)
                if node.rho == 0 and prev is not None:
                    dz, dr = z - prev[0], rhs - prev[1]
                    pairs += 1
                    nonexpansive_bad += dz @ dz > dz @ dr + 1e-8
                prev = (z, rhs)
    # the boundary alpha * rho = 1 itself must raise, anything below must not
    boundary_ok = True
    for rho in (0.1, 1 / 3, 0.5, 2.0):
        node = make_instance(InstanceSpec("weakly-quadratic", N=1, rho=rho, seed=0)).problems[0]
        fset = Box.cube(2)
        for alpha, should_raise in ((1 / rho, True), (1.5 / rho, True), (np.nextafter(1 / rho, 0), False), (0.5 / rho, False)):
            try:
                LocalResolvent(node, fset, ResolventConfig(alpha))
                raised = False
            except StepSizeViolation:
                raised = True
            boundary_ok &= raised == should_raise
    ok = worst <= 1 and nonexpansive_bad == 0 and boundary_ok and calls >= 10_000
    record_criterion(
        7,
        "resolvent residual, firm nonexpansiveness, stepsize boundary",
        ok,
        f"{calls} calls, worst residual {worst:.2f} x inner_tol, {nonexpansive_bad}/{pairs} nonexpansive failures, boundary {'exact' if boundary_ok else 'wrong'}",
    )
    assert ok


def test_criterion_8_mixing_validation():
    rng = np.random.default_rng(8)
    count = 0
    graphs = [path_graph(n) for n in range(2, 9)] + [complete_graph(n) for n in range(2, 7)]
    graphs += [build_er_graph(int(rng.integers(2, 15)), float(rng.uniform(0.05, 1.0)), int(s)) for s in range(80)]
    for g in graphs:
        L = laplacian(g)
        lmax = np.linalg.eigvalsh(L)[-1]
        for factor in (1.01, 1.1, 2.0):
            W = mixing_from_laplacian(L, tau=factor * lmax, graph=g)
            assert_mixing_invariants(W, g)
            count += 1
    try:
        g = path_graph(3)
        mixing_from_laplacian(laplacian(g), tau=3.0, graph=g)
        rejected = False
    except SpectrumViolation:
        rejected = True
    ok = rejected
    record_criterion(8, "generated mixing matrices valid, tau <= lambda_max rejected", ok, f"{count} matrices validated, path-3 tau=3 {'rejected' if rejected else 'accepted'}")
    assert ok


def test_criterion_9_oracle_agreement():
    fixtures = [
        InstanceSpec("mvi-scalar", N=3, seed=1, mvi_lower=0.5),
        InstanceSpec("mvi-scalar", N=4, seed=2, mvi_lower=0.5, mvi_x0=1.4),
        InstanceSpec("bilinear", N=3, seed=3),
        InstanceSpec("sc-sc-quadratic", N=3, seed=4, offset_scale=0.8),
        InstanceSpec("sc-sc-quadratic", N=2, seed=5, offset_scale=3.0, box_radius=0.5),
    ]
    worst = 0.0
    for spec in fixtures:
        inst = make_instance(spec)
        a, _ = reference_solution(inst.problems, inst.sets, "grid")
        b, _ = reference_solution(inst.problems, inst.sets, "centralized-extragradient")
        worst = max(worst, float(np.max(np.abs(a - b))))
    rng = np.random.default_rng(9)
    fd_worst = 0.0
    for family in FAMILIES:
        spec = InstanceSpec(family, N=3, p=1 if family == "mvi-scalar" else 2, q=1 if family == "mvi-scalar" else 2, seed=9, rho=0.3)
        inst = make_instance(spec)
        for node, fset in zip(inst.problems, inst.sets):
            for z in fset.sample(rng, 50):
                fd_worst = max(fd_worst, gradient_fd_error(node, z))
    ok = worst <= 2e-3 and fd_worst <= 1e-5
    record_criterion(9, "grid vs extragradient oracles, gradients vs finite differences", ok, f"oracle gap {worst:.1e} <= 2e-3, fd error {fd_worst:.1e} <= 1e-5")
    assert ok
