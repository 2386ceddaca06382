"""
Local saddle operators ``B_n(z) = [grad_x f_n; -grad_y f_n]`` and the convex
sets whose normal cones make up ``R_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, OracleFailure

FD_STEP = 1e-6


class FeasibleSet:
    """Convex compact set with a Euclidean projection.

    Subclasses fill in ``kind``, ``dim``, :meth:`project`, :meth:`contains`,
    the pairwise ``diameter`` and ``norm_radius = sup ||z||``.
    """

    kind = "abstract"
    dim: int

    def project(self, v):
        raise NotImplementedError

    def contains(self, v, tol=1e-12):
        raise NotImplementedError

    def sample(self, rng, size):
        raise NotImplementedError

    def interior_sample(self, rng, size, shrink=0.9):
        """Points strictly inside (relative interior for degenerate boxes)."""
        raise NotImplementedError

    def boundary_distance(self, v):
        """Distance from ``v`` to the relative boundary (non-degenerate axes only)."""
        raise NotImplementedError

    def center(self):
        raise NotImplementedError

    def bounding_box(self):
        raise NotImplementedError

    def _check(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f"expected vector of length {self.dim}, got shape {v.shape}")
        return v


@dataclass(frozen=True, eq=False)
class Box(FeasibleSet):
    lower: np.ndarray
    upper: np.ndarray
    kind = "box"

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise DimensionMismatch("box bounds must be 1-D arrays of equal length")
        if np.any(lo > hi) or not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite with lower <= upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, dim, radius=1.0, center=0.0):
        c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))
        return cls(c - radius, c + radius)

    @property
    def dim(self):
        return self.lower.size

    @property
    def diameter(self):
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def norm_radius(self):
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def project(self, v):
        return np.clip(self._check(v), self.lower, self.upper)

    def contains(self, v, tol=1e-12):
        v = self._check(v)
        return bool(np.all(v >= self.lower - tol) and np.all(v <= self.upper + tol))

    def sample(self, rng, size):
        return rng.uniform(self.lower, self.upper, size=(size, self.dim))

    def interior_sample(self, rng, size, shrink=0.9):
        c = self.center()
        half = 0.5 * (self.upper - self.lower) * shrink
        return rng.uniform(c - half, c + half, size=(size, self.dim))

    def boundary_distance(self, v):
        v = self._check(v)
        free = self.upper > self.lower
        if not np.any(free):
            return np.inf
        return float(min(np.min(v[free] - self.lower[free]), np.min(self.upper[free] - v[free])))

    def center(self):
        return 0.5 * (self.lower + self.upper)

    def bounding_box(self):
        return self.lower.copy(), self.upper.copy()

    def as_box(self):
        return self

    def describe(self):
        return {"kind": self.kind, "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True, eq=False)
class Ball(FeasibleSet):
    centre: np.ndarray
    radius: float
    kind = "ball"

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.centre, dtype=float))
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")
        object.__setattr__(self, "centre", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.centre.size

    @property
    def diameter(self):
        return 2.0 * self.radius

    @property
    def norm_radius(self):
        return float(np.linalg.norm(self.centre) + self.radius)

    def project(self, v):
        v = self._check(v)
        off = v - self.centre
        r = np.linalg.norm(off)
        if r <= self.radius:
            return v.copy()
        return self.centre + off * (self.radius / r)

    def contains(self, v, tol=1e-12):
        return bool(np.linalg.norm(self._check(v) - self.centre) <= self.radius + tol)

    def sample(self, rng, size, scale=1.0):
        g = rng.standard_normal((size, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = self.radius * scale * rng.random(size) ** (1.0 / self.dim)
        return self.centre + g * r[:, None]

    def interior_sample(self, rng, size, shrink=0.9):
        return self.sample(rng, size, scale=shrink)

    def boundary_distance(self, v):
        return float(self.radius - np.linalg.norm(self._check(v) - self.centre))

    def center(self):
        return self.centre.copy()

    def bounding_box(self):
        return self.centre - self.radius, self.centre + self.radius

    def as_box(self):
        return None

    def describe(self):
        return {"kind": self.kind, "center": self.centre.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class ProductSet(FeasibleSet):
    """Cartesian product; projection acts blockwise."""

    parts: tuple
    kind = "product"

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("product of zero sets")

    @property
    def dim(self):
        return sum(s.dim for s in self.parts)

    @property
    def diameter(self):
        return float(np.sqrt(sum(s.diameter**2 for s in self.parts)))

    @property
    def norm_radius(self):
        return float(np.sqrt(sum(s.norm_radius**2 for s in self.parts)))

    def _split(self, v):
        cuts = np.cumsum([s.dim for s in self.parts])[:-1]
        return np.split(v, cuts, axis=-1)

    def project(self, v):
        v = self._check(v)
        return np.concatenate([s.project(b) for s, b in zip(self.parts, self._split(v))])

    def contains(self, v, tol=1e-12):
        v = self._check(v)
        return all(s.contains(b, tol) for s, b in zip(self.parts, self._split(v)))

    def sample(self, rng, size):
        return np.hstack([s.sample(rng, size) for s in self.parts])

    def interior_sample(self, rng, size, shrink=0.9):
        return np.hstack([s.interior_sample(rng, size, shrink) for s in self.parts])

    def boundary_distance(self, v):
        v = self._check(v)
        return float(min(s.boundary_distance(b) for s, b in zip(self.parts, self._split(v))))

    def center(self):
        return np.concatenate([s.center() for s in self.parts])

    def bounding_box(self):
        lo, hi = zip(*(s.bounding_box() for s in self.parts))
        return np.concatenate(lo), np.concatenate(hi)

    def as_box(self):
        boxes = [s.as_box() for s in self.parts]
        if any(b is None for b in boxes):
            return None
        return Box(np.concatenate([b.lower for b in boxes]), np.concatenate([b.upper for b in boxes]))

    def describe(self):
        return {"kind": self.kind, "parts": [s.describe() for s in self.parts]}


def project(fset, v):
    return fset.project(v)


@dataclass(frozen=True, eq=False)
class LocalSaddle:
    """One node's objective ``f_n(x, y)`` seen through its gradient oracles.

    ``affine_form = (A, b)`` may be supplied when ``B_n(z) = A z + b``; the
    resolvent then takes a direct linear-solve path. ``objective`` is optional
    and only used for finite-difference validation.
    """

    dim_x: int
    dim_y: int
    grad_x: Callable
    grad_y: Callable
    rho: float = 0.0
    affine_form: tuple | None = None
    objective: Callable | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")
        if self.affine_form is not None:
            A, b = self.affine_form
            A = np.asarray(A, dtype=float)
            b = np.asarray(b, dtype=float)
            if A.shape != (self.dim, self.dim) or b.shape != (self.dim,):
                raise DimensionMismatch("affine form has the wrong shape")
            object.__setattr__(self, "affine_form", (A, b))

    @property
    def dim(self):
        return self.dim_x + self.dim_y


def eval_B(node, z):
    """``[grad_x f(x, y); -grad_y f(x, y)]``."""
    z = np.asarray(z, dtype=float)
    if z.shape != (node.dim,):
        raise DimensionMismatch(f"expected point of length {node.dim}, got shape {z.shape}")
    x, y = z[: node.dim_x], z[node.dim_x :]
    try:
        gx = np.asarray(node.grad_x(x, y), dtype=float).reshape(-1)
        gy = np.asarray(node.grad_y(x, y), dtype=float).reshape(-1)
    except Exception as exc:
        raise OracleFailure(f"gradient oracle failed: {exc}") from exc
    if gx.size != node.dim_x or gy.size != node.dim_y:
        raise OracleFailure("gradient oracle returned a vector of the wrong length")
    out = np.concatenate([gx, -gy])
    if not np.all(np.isfinite(out)):
        raise OracleFailure("gradient oracle returned a non-finite value")
    return out


def eval_stacked(problems, Z):
    """Stacked ``B(z) = [B_1(z_1); ...; B_N(z_N)]`` on an ``(N, d)`` block array."""
    return np.stack([eval_B(node, z) for node, z in zip(problems, Z)])


def fd_operator(node, z, h=FD_STEP):
    """Central-difference estimate of ``B_n(z)`` from the objective."""
    if node.objective is None:
        raise ValueError("node has no objective for finite differences")
    z = np.asarray(z, dtype=float)
    p = node.dim_x
    out = np.empty(node.dim)
    for k in range(node.dim):
        e = np.zeros(node.dim)
        e[k] = h
        zp, zm = z + e, z - e
        g = (node.objective(zp[:p], zp[p:]) - node.objective(zm[:p], zm[p:])) / (2 * h)
        out[k] = g if k < p else -g
    return out


def gradient_fd_error(node, z, h=FD_STEP):
    """Relative error ``||B - B_fd|| / max(1, ||B||)``."""
    exact = eval_B(node, z)
    return float(np.linalg.norm(exact - fd_operator(node, z, h)) / max(1.0, np.linalg.norm(exact)))


def probe_weak_monotonicity(node, fset, samples=1000, seed=0):
    """Empirical modulus ``max (-<B(z1)-B(z2), z1-z2> / ||z1-z2||^2)_+`` over sampled pairs."""
    if samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    Z1 = fset.sample(rng, samples)
    Z2 = fset.sample(rng, samples)
    worst = 0.0
    for z1, z2 in zip(Z1, Z2):
        dz = z1 - z2
        nrm = dz @ dz
        if nrm < 1e-20:
            continue
        q = -float((eval_B(node, z1) - eval_B(node, z2)) @ dz) / nrm
        worst = max(worst, q)
    return worst


def probe_stacked_weak_monotonicity(problems, sets, samples=1000, seed=0):
    """Same probe applied to the stacked operator over ``Z_1 x ... x Z_N``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        Z1 = np.stack([s.sample(rng, 1)[0] for s in sets])
        Z2 = np.stack([s.sample(rng, 1)[0] for s in sets])
        dz = (Z1 - Z2).ravel()
        nrm = dz @ dz
        if nrm < 1e-20:
            continue
        val = (eval_stacked(problems, Z1) - eval_stacked(problems, Z2)).ravel() @ dz
        worst = max(worst, -float(val) / nrm)
    return worst


def system_rho(problems):
    return max(float(node.rho) for node in problems)


def estimate_lipschitz(node, fset, samples=100, seed=0):
    """Lipschitz constant of ``B_n`` over the set (exact spectral norm for affine nodes)."""
    if node.affine_form is not None:
        return float(np.linalg.norm(node.affine_form[0], 2))
    rng = np.random.default_rng(seed)
    Z1 = fset.sample(rng, samples)
    Z2 = fset.sample(rng, samples)
    best = 0.0
    for z1, z2 in zip(Z1, Z2):
        dz = np.linalg.norm(z1 - z2)
        if dz < 1e-14:
            continue
        best = max(best, np.linalg.norm(eval_B(node, z1) - eval_B(node, z2)) / dz)
    return float(best)
