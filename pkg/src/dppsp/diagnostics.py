"""
Certifiable quantities: stationarity gap, consensus error, the strong
monotonicity margin of ``D + T``, Minty checks, the two convergence bounds,
empirical rate slopes and reference stationary points.

Set diameters ``D`` are pairwise diameters throughout; every bound derivation
only ever needs ``||z_n - z*_n|| <= D`` for two members of the set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateFit, OracleInconclusive, RegimeViolation
from .graph import apply_lifted, apply_U, apply_U_pinv
from .operators import estimate_lipschitz, eval_B, eval_stacked


def stationarity_gap(z_t, z_next, alpha):
    """``||sum_n (z_n^t - z_n^{t+1})|| / alpha``, equal to ``||sum_n (B_n + R_n)(z_n^{t+1})||``."""
    moved = np.asarray(z_t, dtype=float) - np.asarray(z_next, dtype=float)
    return float(np.linalg.norm(moved.sum(axis=0))) / alpha


def stationarity_selection(problems, z_block):
    """Per-node ``F_n(z*) = B_n(z*) + nu_n`` with the normal-cone share ``nu_n`` chosen
    as ``-mean_m B_m(z*)``, so that ``sum_n F_n(z*) = 0``."""
    Bs = np.stack([eval_B(node, z_block) for node in problems])
    return Bs - Bs.mean(axis=0)


def W_norm(W, z):
    z = np.asarray(z, dtype=float)
    return float(np.sqrt(max(0.0, float(np.sum(z * apply_lifted(W, z))))))


@dataclass(frozen=True, eq=False)
class BoundInputs:
    z_star: np.ndarray
    q_star: np.ndarray
    rho: float
    alpha: float
    N: int
    D: float
    lambda_min_W: float
    phi0_M_norm: float


def bound_inputs(W, problems, sets, alpha, z0, z_star_block, q_star=None, check=True):
    """Assemble :class:`BoundInputs` for a run started at ``z0``.

    ``q_star`` defaults to the minimum-norm solution of ``U q = -alpha F(z*)``.
    """
    N = W.n
    Zs = np.tile(np.asarray(z_star_block, dtype=float), (N, 1))
    F = stationarity_selection(problems, z_star_block)
    if q_star is None:
        q_star = -alpha * apply_U_pinv(W, F)
    q_star = np.asarray(q_star, dtype=float).reshape(N, -1)
    if check:
        bad = np.max(np.abs(apply_U(W, q_star) + alpha * F))
        if bad > 1e-8 and np.any(q_star):
            raise ValueError(f"U q* + alpha F(z*) = 0 violated by {bad:.3e}")
    Z0 = np.asarray(z0, dtype=float).reshape(N, -1)
    phi0 = W_norm(W, Z0 - Zs) + float(np.linalg.norm(apply_U(W, Z0) - q_star))
    return BoundInputs(
        z_star=Zs,
        q_star=q_star,
        rho=max(node.rho for node in problems),
        alpha=alpha,
        N=N,
        D=max(s.diameter for s in sets),
        lambda_min_W=W.lambda_min,
        phi0_M_norm=phi0,
    )


def phi_from_state(W, z, q):
    """``phi = (z, U z + q)``, the coordinates in which the iteration is nonexpansive in ``M``.

    ``||phi||_M^2`` equals ``v^T D v`` for ``v = (z, q)`` and
    ``D = [[I, U], [U, I]]``.
    """
    z = np.asarray(z, dtype=float)
    return z, apply_U(W, z) + np.asarray(q, dtype=float)


def M_norm_sq(W, z, p, z_star, p_star):
    """``||phi - phi*||_M^2`` with ``M = diag(W (x) I, I)`` and ``phi = (z, p)``."""
    dz = np.asarray(z) - np.asarray(z_star)
    return float(np.sum(dz * apply_lifted(W, dz)) + np.sum((np.asarray(p) - np.asarray(p_star)) ** 2))


def theorem1_rhs(b, T, check=True):
    """Right-hand sides ``(gap bound, consensus bound)`` of the weakly monotone guarantee.

    With ``check=False`` the formula is evaluated even outside its stepsize
    regime, for reporting.
    """
    if check and b.rho > 0 and b.alpha > (1 + 1e-12) / (2 * b.rho):
        raise RegimeViolation(f"alpha = {b.alpha} exceeds 1/(2 rho) = {1 / (2 * b.rho)}")
    inner = b.phi0_M_norm / np.sqrt(T) + np.sqrt(2 * b.alpha * b.rho * b.N) * b.D
    return np.sqrt(b.N / b.lambda_min_W) * inner / b.alpha, inner


def theorem1_floor(b):
    """``T -> infinity`` limits of :func:`theorem1_rhs`."""
    cons = np.sqrt(2 * b.alpha * b.rho * b.N) * b.D
    return np.sqrt(b.N / b.lambda_min_W) * cons / b.alpha, cons


def theorem2_rhs(N, D, alpha, T):
    """``(N D / (alpha sqrt T), sqrt(N) D / sqrt T)`` under the Minty condition."""
    return N * D / (alpha * np.sqrt(T)), np.sqrt(N) * D / np.sqrt(T)


def _augmented(W, problems, alpha, Z, Q):
    """``(D + T)(v)`` for ``v = (z, q)`` at interior ``z``: ``[z + 2Uq + a B(z); q]``."""
    top = Z + 2.0 * apply_U(W, Q) + alpha * eval_stacked(problems, Z)
    return top, Q


def _pair_quotient(W, problems, alpha, v1, v2):
    e1 = _augmented(W, problems, alpha, *v1)
    e2 = _augmented(W, problems, alpha, *v2)
    dz, dq = v1[0] - v2[0], v1[1] - v2[1]
    num = np.sum((e1[0] - e2[0]) * dz) + np.sum((e1[1] - e2[1]) * dq)
    return float(num / (np.sum(dz * dz) + np.sum(dq * dq)))


def lemma2_margin(W, problems, sets, alpha, samples=10_000, seed=0, refine=True):
    """Empirical strong-monotonicity constant of ``D + T``.

    Minimum over sampled interior pairs of
    ``<E(v1) - E(v2), v1 - v2> / ||v1 - v2||^2``. With ``refine`` the best
    pair's midpoint is used to estimate the local symmetric Jacobian by
    central differences, and the pair along its lowest eigenvector is added to
    the sample. Every reported value is the quotient of an actual pair.
    """
    rng = np.random.default_rng(seed)
    N = W.n
    d = problems[0].dim
    best = np.inf
    best_mid = None
    for _ in range(samples):
        Z1 = np.stack([s.interior_sample(rng, 1)[0] for s in sets])
        Z2 = np.stack([s.interior_sample(rng, 1)[0] for s in sets])
        Q1 = rng.standard_normal((N, d))
        Q2 = rng.standard_normal((N, d))
        val = _pair_quotient(W, problems, alpha, (Z1, Q1), (Z2, Q2))
        if val < best:
            best = val
            best_mid = (0.5 * (Z1 + Z2), 0.5 * (Q1 + Q2))
    if not refine or best_mid is None:
        return best

    Zm, Qm = best_mid
    room = min(s.boundary_distance(z) for s, z in zip(sets, Zm))
    h = min(1e-2, 0.5 * room) if np.isfinite(room) else 1e-2
    n = 2 * N * d
    J = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        ez, eq = e[: N * d].reshape(N, d), e[N * d :].reshape(N, d)
        plus = _augmented(W, problems, alpha, Zm + ez, Qm + eq)
        minus = _augmented(W, problems, alpha, Zm - ez, Qm - eq)
        J[:, k] = np.concatenate([(plus[0] - minus[0]).ravel(), (plus[1] - minus[1]).ravel()]) / (2 * h)
    lam, vec = np.linalg.eigh(0.5 * (J + J.T))
    u = vec[:, 0]
    # frozen coordinates (degenerate set axes) must not move
    for idx in range(N * d):
        n_, k_ = divmod(idx, d)
        lo, hi = sets[n_].bounding_box()
        if lo[k_] == hi[k_]:
            u[idx] = 0.0
    if np.linalg.norm(u) > 0:
        u = h * u / np.linalg.norm(u)
        uz, uq = u[: N * d].reshape(N, d), u[N * d :].reshape(N, d)
        val = _pair_quotient(W, problems, alpha, (Zm + uz, Qm + uq), (Zm - uz, Qm - uq))
        best = min(best, val)
    return best


class MVIReport(NamedTuple):
    holds: bool
    worst: float
    witness: np.ndarray
    node: int


def _grid_points(fset, per_axis):
    lo, hi = fset.bounding_box()
    axes = [np.array([a]) if a == b else np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return np.array([p for p in pts if fset.contains(p, tol=1e-12)])


def check_mvi(problems, sets, z_star_block, per_axis=41, samples=4000, seed=0, tol=1e-12):
    """Minimum of ``B_n(z)^T (z - z*)`` over a grid (``d <= 3``) or seeded samples."""
    zs = np.asarray(z_star_block, dtype=float)
    worst, witness, node_idx = np.inf, None, -1
    for n, (node, fset) in enumerate(zip(problems, sets)):
        if fset.dim <= 3:
            pts = _grid_points(fset, per_axis)
        else:
            pts = fset.sample(np.random.default_rng(seed + n), samples)
        pts = np.vstack([pts, zs[None, :]])
        for z in pts:
            val = float(eval_B(node, z) @ (z - zs))
            if val < worst:
                worst, witness, node_idx = val, z, n
    return MVIReport(worst >= -tol, worst, witness, node_idx)


def lifted_mvi_min(W, problems, sets, alpha, z_star_block, samples=2000, seed=0):
    """Sampled minimum of ``T(v)^T (v - v*)`` with ``v* = (1 (x) z*, 0)``.

    Only the ``B`` part of ``T`` is evaluated (interior samples); the ``U``
    blocks cancel identically.
    """
    rng = np.random.default_rng(seed)
    N = W.n
    d = problems[0].dim
    Zs = np.tile(np.asarray(z_star_block, dtype=float), (N, 1))
    worst = np.inf
    for _ in range(samples):
        Z = np.stack([s.sample(rng, 1)[0] for s in sets])
        Q = rng.standard_normal((N, d))
        top = alpha * eval_stacked(problems, Z) + apply_U(W, Q)
        bottom = -apply_U(W, Z)
        val = float(np.sum(top * (Z - Zs)) + np.sum(bottom * Q))
        worst = min(worst, val)
    return worst


def rate_slope(trace, window=None, points=None):
    """Least-squares slope of ``log(running mean of gap)`` against ``log(round)``.

    ``trace`` is a :class:`~dppsp.core.RunTrace` or a sequence of per-round
    gaps for rounds ``1..T``. Fit points are ``points`` if given, otherwise up
    to 64 log-spaced rounds inside ``window = (first, last)``.
    """
    gaps = trace.gaps() if hasattr(trace, "gaps") else np.asarray(trace, dtype=float)
    T = gaps.size
    lo, hi = window if window is not None else (1, T)
    hi = min(hi, T)
    in_window = gaps[lo - 1 : hi]
    if np.count_nonzero(in_window > 0) < 10:
        zero = np.flatnonzero(gaps <= 0)
        floor_round = int(zero[0]) + 1 if zero.size else None
        raise DegenerateFit("fewer than 10 positive gaps in the fit window", floor_round)
    running = np.cumsum(gaps) / np.arange(1, T + 1)
    if points is None:
        rounds = np.unique(np.geomspace(lo, hi, num=64).round().astype(int))
    else:
        rounds = np.asarray(points, dtype=int)
    vals = running[rounds - 1]
    if np.any(vals <= 0):
        raise DegenerateFit("running mean vanished", int(rounds[np.argmax(vals <= 0)]))
    slope, _ = np.polyfit(np.log(rounds), np.log(vals), 1)
    return float(slope)


def _natural_residual(F, fset, z, step=1.0):
    return float(np.linalg.norm(z - fset.project(z - step * F(z))))


def _sum_operator(problems):
    return lambda z: sum(eval_B(node, z) for node in problems)


def reference_solution(problems, sets, method="closed-form", W=None, alpha=None, tol=1e-10, max_iter=200_000):
    """Stationary point ``z*`` of the summed problem, plus ``q*`` when ``W`` and ``alpha`` are given.

    ``method`` is ``"closed-form"`` (affine nodes, interior solution),
    ``"centralized-extragradient"`` or ``"grid"`` (at most two free
    coordinates, final resolution 1e-3). Returns ``(z_star_block, q_star)``;
    ``q_star`` is the minimum-norm solution of ``U q = -alpha F(z*)`` or None.
    """
    fset = sets[0]
    F = _sum_operator(problems)
    if method == "closed-form":
        if any(node.affine_form is None for node in problems):
            raise OracleInconclusive("closed form needs affine nodes")
        K = sum(node.affine_form[0] for node in problems)
        c = sum(node.affine_form[1] for node in problems)
        try:
            z = np.linalg.solve(K, -c)
        except np.linalg.LinAlgError:
            raise OracleInconclusive("summed operator is singular") from None
        if not fset.contains(z, tol=1e-12):
            raise OracleInconclusive("unconstrained solution leaves the set")
    elif method == "centralized-extragradient":
        L = sum(estimate_lipschitz(node, fset) for node in problems)
        eta = 0.5 / max(L, 1e-12)
        z = fset.center()
        for _ in range(max_iter):
            if _natural_residual(F, fset, z) <= tol:
                break
            y = fset.project(z - eta * F(z))
            z = fset.project(z - eta * F(y))
        else:
            raise OracleInconclusive(f"extragradient did not reach residual {tol:g}")
    elif method == "grid":
        z = _grid_search(F, fset)
    else:
        raise ValueError(f"unknown method {method!r}")

    q = None
    if W is not None and alpha is not None:
        q = -alpha * apply_U_pinv(W, stationarity_selection(problems, z))
    return z, q


def _grid_search(F, fset, final_step=1e-3, coarse=60):
    lo, hi = fset.bounding_box()
    free = hi > lo
    if np.count_nonzero(free) > 2:
        raise OracleInconclusive("grid oracle handles at most two free coordinates")
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    step = max(np.max(2 * half[free]) / coarse, final_step) if np.any(free) else final_step
    best = centre
    while True:
        axes = []
        for k in range(lo.size):
            if not free[k]:
                axes.append(np.array([lo[k]]))
                continue
            a, b = max(lo[k], centre[k] - half[k]), min(hi[k], centre[k] + half[k])
            n = int(np.floor((b - a) / step + 1e-9)) + 1
            axes.append(a + step * np.arange(n))
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        scores = [
            _natural_residual(F, fset, p) if fset.contains(p, tol=1e-12) else np.inf for p in pts
        ]
        best = pts[int(np.argmin(scores))]
        if step <= final_step * (1 + 1e-12):
            return best
        centre = best
        half = np.where(free, 3 * step, 0.0)
        step = max(step / 10, final_step)


def format_report(values):
    """Flat ``key = value`` block; floats at 17 significant digits."""
    lines = []
    for k, v in values.items():
        if isinstance(v, (bool, np.bool_)):
            s = "true" if v else "false"
        elif isinstance(v, (float, np.floating)):
            s = format(float(v), ".17g")
        else:
            s = str(v)
        lines.append(f"{k} = {s}")
    return "\n".join(lines) + "\n"
