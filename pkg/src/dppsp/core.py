"""
DPPSP iterations.

Two equivalent recursions are provided:

* the q-eliminated local update used in practice, where node ``n`` solves

      z_n^{t+1} + a[B_n + R_n](z_n^{t+1})
          = sum_m w_nm (2 z_m^t - z_m^{t-1}) + a[B_n + R_n](z_n^t),

  reading only its neighbours, and
* the global form carrying the dual ``q``:

      z^{t+1} + a[B + R](z^{t+1}) = (2W - I) z^t - U q^t,   q^{t+1} = U z^t + q^t.

The operator value ``a[B_n + R_n](z_n^t)`` is never re-evaluated: each
resolvent call stores ``rhs - z`` (``a`` times the selected element of
``B_n + R_n`` at its output) and the next round reuses it verbatim.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DPPSPError, DimensionMismatch, EmptyTrace
from .graph import apply_lifted, apply_U, consensus_seminorm
from .operators import system_rho
from .resolvent import LocalResolvent, ResolventConfig

FORMS = ("q-eliminated", "q-carrying")
REGIMES = ("lemma2", "theorem1", "theorem2")
CSV_COLUMNS = ("round", "stationarity_gap", "consensus_error", "mean_inner_iters", "wall_time_ms")


class StepSizeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class AlgoConfig:
    alpha: float
    T: int
    form: str = "q-eliminated"
    seed: int = 0
    snapshot_every: int = 0
    inner_tol: float = 1e-10
    max_inner_iters: int = 10_000
    inner_step: float | None = None
    regime: str = "theorem1"
    record_wall_time: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.form not in FORMS:
            raise ValueError(f"form must be one of {FORMS}")
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")

    @property
    def resolvent(self):
        return ResolventConfig(self.alpha, self.inner_tol, self.max_inner_iters, self.inner_step)


def lemma2_cap(rho, lambda_min_W):
    """Largest alpha for which D + T is lambda_min(W)/4-strongly monotone."""
    if rho == 0:
        return np.inf
    return (1.0 - np.sqrt(1.0 - lambda_min_W)) / (2.0 * rho)


def theorem1_cap(rho):
    return np.inf if rho == 0 else 1.0 / (2.0 * rho)


def regime_flags(alpha, rho, lambda_min_W):
    """Which stepsize conditions ``alpha`` satisfies."""
    return {
        "lemma2": alpha <= lemma2_cap(rho, lambda_min_W) * (1 + 1e-12),
        "theorem1": alpha <= theorem1_cap(rho) * (1 + 1e-12),
        # for rho = 0 the alpha = 1/(2 rho) stipulation is vacuous
        "theorem2": rho == 0 or abs(alpha * 2 * rho - 1) <= 1e-12,
        "well_defined": alpha * rho < 1,
    }


@dataclass
class StackedState:
    """Network state at round ``t``.

    ``resid[n]`` holds ``rhs_n - z_n^t`` from the resolvent call that produced
    ``z_n^t``, i.e. ``alpha`` times the element of ``(B_n + R_n)(z_n^t)``.
    """

    current: np.ndarray
    previous: np.ndarray | None
    resid: np.ndarray | None
    round: int
    alpha: float
    inner_iters: np.ndarray | None = None

    @property
    def cached_op(self):
        return None if self.resid is None else self.resid / self.alpha


@dataclass
class DualState:
    q: np.ndarray


class RoundRecord(NamedTuple):
    round: int
    stationarity_gap: float
    consensus_error: float
    mean_inner_iters: float
    wall_time_ms: float
    identity_residual: float


@dataclass
class RunTrace:
    records: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    initial_consensus: float = 0.0
    final_state: StackedState | None = None
    final_dual: DualState | None = None
    regimes: dict = field(default_factory=dict)
    error: str | None = None

    def __len__(self):
        return len(self.records)

    @property
    def T(self):
        return len(self.records)

    @property
    def partial(self):
        return self.error is not None

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def gaps(self):
        return self.column("stationarity_gap")

    def consensus(self):
        return self.column("consensus_error")

    def to_csv(self):
        lines = [",".join(CSV_COLUMNS)]
        for r in self.records:
            vals = [str(r.round)] + [format(getattr(r, c), ".17g") for c in CSV_COLUMNS[1:]]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        Path(path).write_text(self.to_csv())

    def snapshots_text(self):
        return "".join(
            f"{t} " + " ".join(format(x, ".17g") for x in z.ravel()) + "\n"
            for t, z in sorted(self.snapshots.items())
        )

    @staticmethod
    def read_csv(path):
        rows = Path(path).read_text().strip().splitlines()
        if rows[0].split(",") != list(CSV_COLUMNS):
            raise ValueError("unexpected trace header")
        out = []
        for row in rows[1:]:
            vals = row.split(",")
            out.append((int(vals[0]), *map(float, vals[1:])))
        return out


def _blocks(z, n):
    z = np.array(z, dtype=float)
    if z.ndim == 1:
        if z.size % n:
            raise DimensionMismatch("stacked vector does not split into N blocks")
        z = z.reshape(n, -1)
    if z.shape[0] != n:
        raise DimensionMismatch(f"expected {n} blocks, got {z.shape[0]}")
    return z


def make_solvers(problems, sets, cfg):
    rcfg = cfg.resolvent if isinstance(cfg, AlgoConfig) else cfg
    return [LocalResolvent(node, s, rcfg) for node, s in zip(problems, sets)]


def initial_point(sets, kind="zero", seed=0, scale=1.0):
    """Default start: projection of the zero vector, the same at every node.

    ``kind="random"`` draws each node's block uniformly from its set (shrunk
    by ``scale`` towards the centre) instead.
    """
    if kind == "zero":
        return np.stack([s.project(np.zeros(s.dim)) for s in sets])
    if kind == "random":
        rng = np.random.default_rng(seed)
        return np.stack([s.center() + scale * (s.sample(rng, 1)[0] - s.center()) for s in sets])
    raise ValueError(f"unknown initialisation {kind!r}")


def _check_dims(problems, sets, W):
    if len(problems) != W.n or len(sets) != W.n:
        raise DimensionMismatch("need one problem and one set per node")
    dims = {p.dim for p in problems} | {s.dim for s in sets}
    if len(dims) != 1:
        raise DimensionMismatch(f"inconsistent local dimensions {sorted(dims)}")
    return dims.pop()


def init_step(z0, W, problems, sets, cfg, solvers=None):
    """Round 0 -> 1: ``z_n^1 = J_n(sum_m (2 w_nm - delta_nm) z_m^0)``."""
    solvers = solvers or make_solvers(problems, sets, cfg)
    Z0 = np.stack([s.project(z) for s, z in zip(sets, _blocks(z0, W.n))])
    Z1 = np.empty_like(Z0)
    resid = np.empty_like(Z0)
    iters = np.zeros(W.n)
    for n in range(W.n):
        a = 0.0
        for m in W.neighbors(n):
            a = a + W.weights[n, m] * Z0[m]
        rhs = 2.0 * a - Z0[n]
        Z1[n], iters[n] = solvers[n](rhs, z_init=Z0[n])
        resid[n] = rhs - Z1[n]
    return StackedState(Z1, Z0, resid, 1, cfg.alpha, iters)


def local_rhs(state, W, n):
    """Right-hand side node ``n`` feeds to its resolvent; reads neighbours only."""
    a = 0.0
    b = 0.0
    for m in W.neighbors(n):
        w = W.weights[n, m]
        a = a + w * state.current[m]
        b = b + w * state.previous[m]
    # = 2a - b + resid, grouped so the single-node case cancels exactly
    return a + ((a - b) + state.resid[n])


def step(state, W, problems, sets, cfg, solvers=None):
    """One synchronous round of the q-eliminated recursion."""
    if state.round < 1 or state.previous is None or state.resid is None:
        raise ValueError("step() needs a state produced by init_step() or step()")
    solvers = solvers or make_solvers(problems, sets, cfg)
    Z = state.current
    Znew = np.empty_like(Z)
    resid = np.empty_like(Z)
    iters = np.zeros(W.n)
    for n in range(W.n):
        rhs = local_rhs(state, W, n)
        Znew[n], iters[n] = solvers[n](rhs, z_init=Z[n])
        resid[n] = rhs - Znew[n]
    return StackedState(Znew, Z.copy(), resid, state.round + 1, cfg.alpha, iters)


def step_q_form(state, dual, W, problems, sets, cfg, solvers=None):
    """One round of the dual-carrying recursion; returns ``(state, dual)``."""
    solvers = solvers or make_solvers(problems, sets, cfg)
    Z = state.current
    rhs_all = 2.0 * apply_lifted(W, Z) - Z - apply_U(W, dual.q)
    Znew = np.empty_like(Z)
    resid = np.empty_like(Z)
    iters = np.zeros(W.n)
    for n in range(W.n):
        Znew[n], iters[n] = solvers[n](rhs_all[n], z_init=Z[n])
        resid[n] = rhs_all[n] - Znew[n]
    qnew = apply_U(W, Z) + dual.q
    return StackedState(Znew, Z.copy(), resid, state.round + 1, cfg.alpha, iters), DualState(qnew)


def initial_state(z0, W, sets, alpha):
    Z0 = np.stack([s.project(z) for s, z in zip(sets, _blocks(z0, W.n))])
    return StackedState(Z0, None, None, 0, alpha)


def run(problems, W, sets, cfg, z0=None, solvers=None):
    """Run ``cfg.T`` rounds and return a :class:`RunTrace`.

    Resolvent failures end the run early; the trace then carries the error
    message and every round completed before it.
    """
    _check_dims(problems, sets, W)
    rho = system_rho(problems)
    flags = regime_flags(cfg.alpha, rho, W.lambda_min)
    if not flags[cfg.regime]:
        warnings.warn(
            f"alpha = {cfg.alpha} lies outside the {cfg.regime} stepsize regime (rho = {rho})",
            StepSizeWarning,
            stacklevel=2,
        )
    if z0 is None:
        z0 = initial_point(sets)
    echo = asdict(cfg)
    echo.update(rho=rho, lambda_min_W=W.lambda_min, N=W.n)
    trace = RunTrace(config=echo, regimes=flags)

    try:
        solvers = solvers or make_solvers(problems, sets, cfg)
    except DPPSPError as exc:
        trace.error = f"{type(exc).__name__}: {exc}"
        return trace
    state = initial_state(z0, W, sets, cfg.alpha)
    dual = DualState(np.zeros_like(state.current))
    trace.initial_consensus = consensus_seminorm(W, state.current)
    if cfg.snapshot_every:
        trace.snapshots[0] = state.current.copy()

    t0 = time.perf_counter()
    for t in range(cfg.T):
        prev = state.current
        try:
            if cfg.form == "q-carrying":
                state, dual = step_q_form(state, dual, W, problems, sets, cfg, solvers)
            elif t == 0:
                state = init_step(prev, W, problems, sets, cfg, solvers)
            else:
                state = step(state, W, problems, sets, cfg, solvers)
        except DPPSPError as exc:
            trace.error = f"round {t + 1}: {type(exc).__name__}: {exc}"
            break
        moved = (prev - state.current).sum(axis=0)
        gap = float(np.linalg.norm(moved)) / cfg.alpha
        ident = float(np.linalg.norm(state.resid.sum(axis=0) - moved))
        wall = 1e3 * (time.perf_counter() - t0) if cfg.record_wall_time else 0.0
        trace.records.append(
            RoundRecord(
                state.round,
                gap,
                consensus_seminorm(W, state.current),
                float(np.mean(state.inner_iters)),
                wall,
                ident,
            )
        )
        if cfg.snapshot_every and state.round % cfg.snapshot_every == 0:
            trace.snapshots[state.round] = state.current.copy()
    trace.final_state = state
    trace.final_dual = dual if cfg.form == "q-carrying" else None
    return trace


def sample_iterate(trace, seed):
    """Round index drawn uniformly from ``1..T``."""
    if len(trace) == 0:
        raise EmptyTrace("trace has no rounds")
    rng = np.random.default_rng(seed)
    return int(rng.integers(1, len(trace) + 1))


def proximal_point_reference(node, fset, cfg, z0, T, solver=None):
    """Single-node proximal point ``z^{t+1} = J(z^t)``; returns the iterates."""
    solver = solver or LocalResolvent(node, fset, cfg.resolvent)
    z = fset.project(np.asarray(z0, dtype=float))
    out = [z]
    for _ in range(T):
        z, _ = solver(z, z_init=z)
        out.append(z)
    return np.array(out)
