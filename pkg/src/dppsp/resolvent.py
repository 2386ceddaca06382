"""
Local resolvent ``(I + alpha (B_n + R_n))^{-1}``.

The output ``z`` is the unique point of the set with
``z = Proj(rhs - alpha B_n(z))``, i.e. the solution of the variational
inequality for ``G(z) = z + alpha B_n(z) - rhs``, which is
``(1 - alpha rho)``-strongly monotone whenever ``alpha rho < 1``.

Affine nodes are solved by a dense linear solve, with a primal-dual
active-set correction on boxes. Everything else goes through projected
extragradient on ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import NoConvergence, SingularSystem, StepSizeViolation
from .operators import LocalSaddle, estimate_lipschitz, eval_B

MAX_COND = 1e12


@dataclass(frozen=True)
class ResolventConfig:
    alpha: float
    inner_tol: float = 1e-10
    max_inner_iters: int = 10_000
    # extragradient step; None -> 0.5 / (1 + alpha * L_hat)
    inner_step: float | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.inner_tol > 0:
            raise ValueError("inner_tol must be positive")
        if self.max_inner_iters < 1:
            raise ValueError("max_inner_iters must be >= 1")
        if self.inner_step is not None and not 0 < self.inner_step <= 1:
            raise ValueError("inner_step must lie in (0, 1]")


def check_stepsize(alpha, rho):
    if alpha * rho >= 1:
        raise StepSizeViolation(f"alpha * rho = {alpha * rho!r} >= 1; resolvent is not well-defined")


def fixed_point_residual(node, fset, z, rhs, alpha):
    """``||z - Proj(rhs - alpha B_n(z))||``."""
    return float(np.linalg.norm(z - fset.project(np.asarray(rhs) - alpha * eval_B(node, z))))


def _affine_residual(M, c, fset, z):
    # z - G(z) = rhs - alpha B(z) for G(z) = M z - c
    return float(np.linalg.norm(z - fset.project(z - (M @ z - c))))


def _box_active_set(M, c, box, start, max_iter):
    """Primal-dual active-set method for the affine VI on a box.

    Returns ``(z, iterations)`` or ``None`` when the sets cycle or the reduced
    system is singular.
    """
    lo, hi = box.lower, box.upper
    w = start - (M @ start - c)
    lower = w <= lo
    upper = (w >= hi) & ~lower
    seen = set()
    for it in range(1, max_iter + 1):
        key = (lower.tobytes(), upper.tobytes())
        if key in seen:
            return None
        seen.add(key)
        z = np.where(lower, lo, np.where(upper, hi, 0.0))
        free = ~(lower | upper)
        if np.any(free):
            fixed = ~free
            rhs = c[free] - M[np.ix_(free, fixed)] @ z[fixed]
            Mff = M[np.ix_(free, free)]
            try:
                z[free] = np.linalg.solve(Mff, rhs)
            except np.linalg.LinAlgError:
                return None
        w = z - (M @ z - c)
        new_lower = w < lo
        new_upper = (w > hi) & ~new_lower
        # w_i == lo_i on the boundary is already optimal; keep the current label
        new_lower |= lower & (w <= lo)
        new_upper |= upper & (w >= hi) & ~new_lower
        if np.array_equal(new_lower, lower) and np.array_equal(new_upper, upper):
            return np.clip(z, lo, hi), it
        lower, upper = new_lower, new_upper
    return None


def _extragradient(op, fset, rhs, alpha, z0, tol, max_iter, step):
    """Projected extragradient on ``G(z) = z + alpha op(z) - rhs``.

    The residual tested is the natural one, ``||z - Proj(rhs - alpha op(z))||``.
    ``step`` is halved whenever the residual blows up past the best seen.
    """
    z = fset.project(z0)
    best_z, best_r = z, np.inf
    eta = step
    for it in range(max_iter + 1):
        Bz = op(z)
        r = float(np.linalg.norm(z - fset.project(rhs - alpha * Bz)))
        if r <= tol:
            return z, it, r
        if r < best_r:
            best_z, best_r = z, r
        elif r > 1e3 * best_r or not np.isfinite(r):
            eta *= 0.5
            z = best_z
            continue
        if it == max_iter:
            break
        y = fset.project(z - eta * (z + alpha * Bz - rhs))
        z = fset.project(z - eta * (y + alpha * op(y) - rhs))
    raise NoConvergence(best_r, max_iter)


class LocalResolvent:
    """Resolvent of one node, with the factorisation and step size cached.

    Calling it returns ``(z, inner_iterations)``; direct solves count as zero
    iterations, active-set corrections count their set updates.
    """

    def __init__(self, node: LocalSaddle, fset, cfg: ResolventConfig, method="auto", lipschitz=None):
        check_stepsize(cfg.alpha, node.rho)
        if method not in ("auto", "iterative", "affine"):
            raise ValueError(f"unknown resolvent method {method!r}")
        if method == "affine" and node.affine_form is None:
            raise ValueError("affine method requested for a non-affine node")
        self.node = node
        self.fset = fset
        self.cfg = cfg
        self.method = method
        self._factor = None
        if node.affine_form is not None and method != "iterative":
            A, b = node.affine_form
            self._M = np.eye(node.dim) + cfg.alpha * A
            if np.linalg.cond(self._M) > MAX_COND:
                raise SingularSystem("I + alpha A is numerically singular")
            self._factor = lu_factor(self._M)
            self._b = b
        if cfg.inner_step is not None:
            self.step = cfg.inner_step
        else:
            L = lipschitz if lipschitz is not None else estimate_lipschitz(node, fset)
            self.step = 0.5 / (1.0 + cfg.alpha * L)
        self._box = fset.as_box() if hasattr(fset, "as_box") else None

    def _op(self, z):
        return eval_B(self.node, z)

    def __call__(self, rhs, z_init=None):
        rhs = np.asarray(rhs, dtype=float)
        alpha, tol = self.cfg.alpha, self.cfg.inner_tol
        if self._factor is not None:
            c = rhs - alpha * self._b
            z = lu_solve(self._factor, c)
            if self.fset.contains(z, tol=0.0):
                return z, 0
            if self._box is not None:
                start = z if z_init is None else np.asarray(z_init, dtype=float)
                got = _box_active_set(self._M, c, self._box, start, 2 * self.node.dim + 10)
                if got is not None and _affine_residual(self._M, c, self.fset, got[0]) <= tol:
                    return got
        z0 = self.fset.project(rhs if z_init is None else np.asarray(z_init, dtype=float))
        z, iters, r = _extragradient(
            self._op, self.fset, rhs, alpha, z0, tol, self.cfg.max_inner_iters, self.step
        )
        if self._factor is not None and self._box is not None:
            c = rhs - alpha * self._b
            got = _box_active_set(self._M, c, self._box, z, 2 * self.node.dim + 10)
            if got is not None and _affine_residual(self._M, c, self.fset, got[0]) <= r:
                z = got[0]
        return z, iters


def resolve(node, fset, rhs, cfg, z_init=None, method="auto"):
    """``(I + alpha (B_n + R_n))^{-1}(rhs)`` for one node.

    ``z_init`` is a warm start for the iterative path. ``method`` selects
    ``"auto"`` (direct solve for affine nodes), ``"iterative"`` or ``"affine"``.
    """
    return LocalResolvent(node, fset, cfg, method=method)(rhs, z_init)[0]


def resolve_affine_exact(A, b, fset, rhs, alpha, cfg=None, z_init=None):
    """Resolvent of ``z -> A z + b`` plus the normal cone of ``fset``.

    The unconstrained solution of ``(I + alpha A) z = rhs - alpha b`` is
    returned when it lies in the set; otherwise the constrained problem is
    handed to :func:`resolve`.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b.size
    M = np.eye(d) + alpha * A
    if np.linalg.cond(M) > MAX_COND:
        raise SingularSystem("I + alpha A is numerically singular")
    z = np.linalg.solve(M, np.asarray(rhs, dtype=float) - alpha * b)
    if fset.contains(z, tol=0.0):
        return z
    sym_min = float(np.linalg.eigvalsh(0.5 * (A + A.T))[0])
    node = affine_node(A, b, dim_x=d, dim_y=0, rho=max(0.0, -sym_min))
    if cfg is None:
        cfg = ResolventConfig(alpha=alpha)
    return resolve(node, fset, rhs, cfg, z_init=z_init)


def affine_node(A, b, dim_x, dim_y, rho=0.0):
    """A :class:`LocalSaddle` whose operator is ``A z + b`` (no objective)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    p = dim_x

    def gx(x, y):
        return (A @ np.concatenate([x, y]) + b)[:p]

    def gy(x, y):
        return -(A @ np.concatenate([x, y]) + b)[p:]

    return LocalSaddle(dim_x, dim_y, gx, gy, rho=rho, affine_form=(A, b))
