"""
Synthetic saddle-point families with known structure.

=================  =====================================  ==========================
family             local objective                        known stationary point
=================  =====================================  ==========================
bilinear           x'A_n y + b_n'x + c_n'y                z* = 0 (zero-sum b, c)
sc-sc-quadratic    1/2 x'P_n x + x'A_n y - 1/2 y'Q_n y    KKT solve
                   + b_n'x + c_n'y, P_n, Q_n >= mu I
weakly-quadratic   as above, lambda_min(P_n) = -rho        z* = 0 (zero-sum b, c)
mvi-scalar         gamma_n (x^4/4 - x0 x^3/3), y frozen   z* = (x0, 0)
=================  =====================================  ==========================
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ConstructionFailed, SingularKKT
from .operators import Ball, Box, LocalSaddle, ProductSet, probe_weak_monotonicity

FAMILIES = ("bilinear", "sc-sc-quadratic", "weakly-quadratic", "mvi-scalar")


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    N: int
    p: int = 1
    q: int = 1
    seed: int = 0
    rho: float = 0.0
    box_radius: float = 1.0
    set_kind: str = "box"
    heterogeneity: float = 0.5
    offset_scale: float = 0.0
    coupling: float = 1.0
    mu: float = 0.5
    mvi_x0: float = 1.0
    mvi_lower: float = -0.5
    mvi_upper: float = 2.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.p < 1 or self.q < 0:
            raise ValueError("need p >= 1 and q >= 0")
        if self.rho < 0 or self.box_radius <= 0 or self.heterogeneity < 0:
            raise ValueError("rho, heterogeneity must be >= 0 and box_radius > 0")
        if self.set_kind not in ("box", "ball"):
            raise ValueError("set_kind must be 'box' or 'ball'")
        if self.family == "mvi-scalar":
            if self.p != 1 or self.q > 1:
                raise ValueError("mvi-scalar needs p = 1 and q in {0, 1}")
            if not self.mvi_lower <= self.mvi_x0 <= self.mvi_upper:
                raise ValueError("mvi_x0 must lie in [mvi_lower, mvi_upper]")
        elif self.q < 1:
            raise ValueError(f"{self.family} needs q >= 1")

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


class Instance(NamedTuple):
    problems: list
    sets: list
    z_star: np.ndarray | None


def bilinear_node(A, b=None, c=None):
    """``f(x, y) = x'A y + b'x + c'y``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    p, q = A.shape
    b = np.zeros(p) if b is None else np.asarray(b, dtype=float)
    c = np.zeros(q) if c is None else np.asarray(c, dtype=float)
    op = np.block([[np.zeros((p, p)), A], [-A.T, np.zeros((q, q))]])
    return LocalSaddle(
        p,
        q,
        grad_x=lambda x, y: A @ y + b,
        grad_y=lambda x, y: A.T @ x + c,
        rho=0.0,
        affine_form=(op, np.concatenate([b, -c])),
        objective=lambda x, y: x @ A @ y + b @ x + c @ y,
        name="bilinear",
    )


def quadratic_node(P, A, Q, b=None, c=None):
    """``f(x, y) = 1/2 x'P x + x'A y - 1/2 y'Q y + b'x + c'y``.

    The declared modulus is ``max(0, -lambda_min(diag(P, Q)))``; the coupling
    block is skew in the operator and contributes nothing to it.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    A = np.atleast_2d(np.asarray(A, dtype=float))
    p, q = A.shape
    b = np.zeros(p) if b is None else np.asarray(b, dtype=float)
    c = np.zeros(q) if c is None else np.asarray(c, dtype=float)
    op = np.block([[P, A], [-A.T, Q]])
    sym_min = min(np.linalg.eigvalsh(P)[0], np.linalg.eigvalsh(Q)[0])
    return LocalSaddle(
        p,
        q,
        grad_x=lambda x, y: P @ x + A @ y + b,
        grad_y=lambda x, y: A.T @ x - Q @ y + c,
        rho=float(max(0.0, -sym_min)),
        affine_form=(op, np.concatenate([b, -c])),
        objective=lambda x, y: 0.5 * x @ P @ x + x @ A @ y - 0.5 * y @ Q @ y + b @ x + c @ y,
        name="quadratic",
    )


def mvi_scalar_node(gamma, x0, rho):
    """``F(x) = gamma (x - x0) x^2`` on x, with a frozen scalar y."""

    def gx(x, y):
        return gamma * (x**3 - x0 * x**2)

    return LocalSaddle(
        1,
        1,
        grad_x=gx,
        grad_y=lambda x, y: np.zeros(1),
        rho=rho,
        objective=lambda x, y: float(gamma * (x[0] ** 4 / 4 - x0 * x[0] ** 3 / 3)),
        name="mvi-scalar",
    )


def _feasible_set(spec):
    r = spec.box_radius
    if spec.set_kind == "box":
        return ProductSet((Box.cube(spec.p, r), Box.cube(spec.q, r)))
    return ProductSet((Ball(np.zeros(spec.p), r), Ball(np.zeros(spec.q), r)))


def _zero_sum(rng, N, dim, scale):
    v = scale * rng.standard_normal((N, dim))
    return v - v.mean(axis=0)


def _couplings(rng, spec):
    base = rng.standard_normal((spec.p, spec.q))
    base += np.eye(spec.p, spec.q)
    return [spec.coupling * (base + spec.heterogeneity * rng.standard_normal(base.shape)) for _ in range(spec.N)]


def make_bilinear(spec):
    if spec.family != "bilinear":
        raise ValueError("spec.family must be 'bilinear'")
    rng = np.random.default_rng(spec.seed)
    As = _couplings(rng, spec)
    bs = _zero_sum(rng, spec.N, spec.p, spec.offset_scale)
    cs = _zero_sum(rng, spec.N, spec.q, spec.offset_scale)
    problems = [bilinear_node(A, b, c) for A, b, c in zip(As, bs, cs)]
    fset = _feasible_set(spec)
    return Instance(problems, [fset] * spec.N, np.zeros(spec.p + spec.q))


def _spd(rng, dim, floor, spread=1.0):
    G = rng.standard_normal((dim, dim))
    return floor * np.eye(dim) + spread * (G @ G.T) / dim


def make_scsc_quadratic(spec):
    if spec.family != "sc-sc-quadratic":
        raise ValueError("spec.family must be 'sc-sc-quadratic'")
    if spec.mu <= 0:
        raise ValueError("mu must be positive")
    rng = np.random.default_rng(spec.seed)
    p, q = spec.p, spec.q
    Ps = [_spd(rng, p, spec.mu, spec.heterogeneity) for _ in range(spec.N)]
    Qs = [_spd(rng, q, spec.mu, spec.heterogeneity) for _ in range(spec.N)]
    As = _couplings(rng, spec)
    bs = spec.offset_scale * rng.standard_normal((spec.N, p))
    cs = spec.offset_scale * rng.standard_normal((spec.N, q))

    K = sum(np.block([[P, A], [-A.T, Q]]) for P, A, Q in zip(Ps, As, Qs))
    if np.linalg.cond(K) > 1e12:
        raise SingularKKT("summed KKT matrix is singular")
    rhs = -np.concatenate([bs.sum(axis=0), -cs.sum(axis=0)])
    z_star = np.linalg.solve(K, rhs)
    # keep z* well inside the set
    limit = 0.5 * spec.box_radius / np.sqrt(p + q) if spec.set_kind == "ball" else 0.5 * spec.box_radius
    big = np.max(np.abs(z_star)) if z_star.size else 0.0
    if big > limit:
        scale = limit / big
        bs, cs, z_star = bs * scale, cs * scale, z_star * scale
    problems = [quadratic_node(P, A, Q, b, c) for P, A, Q, b, c in zip(Ps, As, Qs, bs, cs)]
    return Instance(problems, [_feasible_set(spec)] * spec.N, z_star)


def _pinned_spectrum(rng, dim, rho):
    eig = rng.uniform(-rho, rho, size=dim)
    eig[0] = -rho
    V, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return V @ np.diag(eig) @ V.T


def make_weakly_quadratic(spec):
    """Quadratic family whose symmetric part has ``lambda_min = -rho`` at every node."""
    if spec.family != "weakly-quadratic":
        raise ValueError("spec.family must be 'weakly-quadratic'")
    rng = np.random.default_rng(spec.seed)
    rho = spec.rho
    Ps = [_pinned_spectrum(rng, spec.p, rho) for _ in range(spec.N)]
    Qs = [_pinned_spectrum(rng, spec.q, rho) for _ in range(spec.N)]
    As = _couplings(rng, spec)
    bs = _zero_sum(rng, spec.N, spec.p, spec.offset_scale)
    cs = _zero_sum(rng, spec.N, spec.q, spec.offset_scale)
    problems = []
    for P, A, Q, b, c in zip(Ps, As, Qs, bs, cs):
        node = quadratic_node(0.5 * (P + P.T), A, 0.5 * (Q + Q.T), b, c)
        # pin the declared modulus to the construction value rather than eigvalsh round-off
        problems.append(
            LocalSaddle(node.dim_x, node.dim_y, node.grad_x, node.grad_y, rho, node.affine_form, node.objective, "weakly-quadratic")
        )
    return Instance(problems, [_feasible_set(spec)] * spec.N, np.zeros(spec.p + spec.q))


def mvi_modulus(x0, lower, upper):
    """``max(0, -min_{x in [lower, upper]} d/dx[(x - x0) x^2])``."""
    g = lambda x: 3 * x * x - 2 * x0 * x  # noqa: E731
    cands = [lower, upper]
    if lower <= x0 / 3 <= upper:
        cands.append(x0 / 3)
    return max(0.0, -min(g(x) for x in cands))


def make_mvi_scalar(spec, require_nonmonotone=True, grid_step=1e-3):
    """Non-monotone scalar operators sharing the Minty point ``x0``.

    Raises :class:`ConstructionFailed` if the operator turns out monotone on
    the interval (when ``require_nonmonotone``) or if the Minty inequality
    fails anywhere on the ``grid_step`` grid.
    """
    if spec.family != "mvi-scalar":
        raise ValueError("spec.family must be 'mvi-scalar'")
    rng = np.random.default_rng(spec.seed)
    x0, lo, hi = spec.mvi_x0, spec.mvi_lower, spec.mvi_upper
    unit = mvi_modulus(x0, lo, hi)
    gammas = 1.0 + spec.heterogeneity * np.abs(rng.standard_normal(spec.N))
    problems = [mvi_scalar_node(float(g), x0, float(g) * unit) for g in gammas]
    fset = ProductSet((Box([lo], [hi]), Box([0.0], [0.0])))

    grid = np.arange(lo, hi + 0.5 * grid_step, grid_step)
    for g in gammas:
        vals = g * (grid - x0) * grid**2 * (grid - x0)
        if np.min(vals) < -1e-12:
            raise ConstructionFailed("Minty inequality fails on the grid")
    if require_nonmonotone:
        probed = probe_weak_monotonicity(problems[0], fset, samples=2000, seed=spec.seed)
        if unit <= 0 or probed <= 0:
            raise ConstructionFailed("operator is monotone on the interval; pick another x0 or interval")
    return Instance(problems, [fset] * spec.N, np.array([x0, 0.0]))


_BUILDERS = {
    "bilinear": make_bilinear,
    "sc-sc-quadratic": make_scsc_quadratic,
    "weakly-quadratic": make_weakly_quadratic,
}


def make_instance(spec):
    if spec.family == "mvi-scalar":
        return make_mvi_scalar(spec, require_nonmonotone=spec.mvi_x0 != 0)
    return _BUILDERS[spec.family](spec)


def dump_matrices(instance, directory):
    """Write each affine node's ``A`` and ``b`` as ``node<k>_A.csv`` / ``node<k>_b.csv``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for k, node in enumerate(instance.problems):
        if node.affine_form is None:
            continue
        A, b = node.affine_form
        for tag, arr in (("A", A), ("b", b[None, :])):
            path = out / f"node{k}_{tag}.csv"
            path.write_text("\n".join(",".join(format(x, ".17g") for x in row) for row in arr) + "\n")
            written.append(path)
    return written
