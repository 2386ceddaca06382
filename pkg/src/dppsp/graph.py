"""
Communication graphs, Laplacians and mixing matrices.

A mixing matrix ``W`` is accepted only if it is symmetric, row-stochastic,
has spectrum in (0, 1] and a simple eigenvalue at 1. The Kronecker lift
``W (x) I_d`` and its complement root ``U = (I - W (x) I_d)^{1/2}`` are applied
blockwise from one cached eigendecomposition; neither is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    Disconnected,
    DimensionMismatch,
    NumericalError,
    ParseError,
    SpectrumViolation,
)

# multiplicity decisions on eigenvalues
EIG_TOL = 1e-10
ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes ``0..node_count-1``."""

    node_count: int
    edges: frozenset
    seed: int | None = None

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("node_count must be positive")
        norm = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValueError(f"edge ({i}, {j}) out of range")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))
        if not self.is_connected():
            raise Disconnected("graph has more than one component")

    @property
    def n(self):
        return self.node_count

    def adjacency(self):
        A = np.zeros((self.node_count, self.node_count))
        for i, j in self.edges:
            A[i, j] = A[j, i] = 1.0
        return A

    def neighbors(self, i):
        return sorted({b if a == i else a for a, b in self.edges if i in (a, b)})

    def is_connected(self):
        return _component_labels(self.node_count, self.edges)[0] <= 1

    def to_edgelist(self):
        lines = [f"n {self.node_count}"]
        lines += [f"{i} {j}" for i, j in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text):
        """Parse the ``n <N>`` header + ``i j`` lines format."""
        n = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 2 or parts[0] != "n":
                    raise ParseError("expected header 'n <N>'", lineno)
                try:
                    n = int(parts[1])
                except ValueError:
                    raise ParseError(f"bad node count {parts[1]!r}", lineno) from None
                continue
            if len(parts) != 2:
                raise ParseError(f"expected 'i j', got {line!r}", lineno)
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ParseError(f"non-integer endpoint in {line!r}", lineno) from None
        if n is None:
            raise ParseError("missing header 'n <N>'", 1)
        try:
            return cls(n, frozenset(edges))
        except ValueError as exc:
            if isinstance(exc, Disconnected):
                raise
            raise ParseError(str(exc)) from None

    def save(self, path):
        Path(path).write_text(self.to_edgelist())

    @classmethod
    def load(cls, path):
        return cls.from_edgelist(Path(path).read_text())


def _component_labels(n, edges):
    if not edges:
        return n, np.arange(n)
    rows, cols = zip(*edges)
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    return connected_components(adj, directed=False)


def build_er_graph(n, p, seed):
    """Erdos-Renyi draw, repaired to connectivity with a seeded spanning tree.

    Every unordered pair ``i < j`` is kept independently with probability ``p``.
    If the draw is disconnected, components are shuffled and each one after the
    first is attached to a uniformly chosen earlier component through uniformly
    chosen endpoints.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    edges = {(int(i), int(j)) for i, j, k in zip(iu, ju, keep) if k}

    ncomp, labels = _component_labels(n, edges)
    if ncomp > 1:
        comps = [np.flatnonzero(labels == c) for c in range(ncomp)]
        order = rng.permutation(ncomp)
        for k in range(1, ncomp):
            here = comps[order[k]]
            there = comps[order[rng.integers(k)]]
            a, b = int(rng.choice(here)), int(rng.choice(there))
            edges.add((min(a, b), max(a, b)))
    return Graph(n, frozenset(edges), seed)


def path_graph(n):
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def complete_graph(n):
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def laplacian(g):
    """Combinatorial Laplacian ``deg - adjacency``."""
    A = g.adjacency()
    return np.diag(A.sum(axis=1)) - A


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    """Validated gossip matrix with its cached eigendecomposition.

    Build through :meth:`from_weights` or :func:`mixing_from_laplacian`;
    construction fails unless every consensus condition holds.
    """

    weights: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    graph: Graph | None = None
    _neighbors: tuple = field(default=(), repr=False)

    @classmethod
    def from_weights(cls, W, graph=None):
        W = np.array(W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise DimensionMismatch(f"W must be square, got shape {W.shape}")
        n = W.shape[0]
        if not np.allclose(W, W.T, rtol=0, atol=1e-12):
            raise SpectrumViolation("W is not symmetric")
        W = 0.5 * (W + W.T)
        if np.max(np.abs(W.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise SpectrumViolation("rows of W do not sum to one")
        if graph is not None:
            if graph.node_count != n:
                raise DimensionMismatch("graph and W disagree on node count")
            allowed = graph.adjacency() + np.eye(n)
            if np.any((W != 0) & (allowed == 0)):
                raise SpectrumViolation("W has a nonzero weight off the graph's edges")

        lam, V = np.linalg.eigh(W)
        if lam[0] <= EIG_TOL:
            raise SpectrumViolation(f"lambda_min(W) = {lam[0]:.3e} is not positive")
        if lam[-1] > 1.0 + EIG_TOL:
            raise SpectrumViolation(f"lambda_max(W) = {lam[-1]:.3e} exceeds one")
        if np.count_nonzero(lam > 1.0 - EIG_TOL) != 1:
            raise Disconnected("eigenvalue 1 of W is not simple")

        nbrs = tuple(tuple(int(m) for m in np.flatnonzero(W[i])) for i in range(n))
        return cls(W, lam, V, graph, nbrs)

    @property
    def n(self):
        return self.weights.shape[0]

    @property
    def lambda_min(self):
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self):
        return float(self.eigenvalues[-1])

    @property
    def fiedler_gap(self):
        if self.n == 1:
            return 1.0
        return float(1.0 - self.eigenvalues[-2])

    def neighbors(self, i):
        """Nodes ``m`` with ``w_im != 0``, including ``i`` itself."""
        return self._neighbors[i]

    def to_csv(self):
        rows = (",".join(format(x, ".17g") for x in row) for row in self.weights)
        return "\n".join(rows) + "\n"

    def lifted(self, block_dim):
        return LiftedOperator(self, block_dim)


def mixing_from_laplacian(L, tau=None, graph=None):
    """``W = I - L / tau`` with the strict requirement ``tau > lambda_max(L)``.

    ``tau`` defaults to ``1.1 * lambda_max(L)`` (or 1 for a single node).
    """
    L = np.asarray(L, dtype=float)
    lmax = float(np.linalg.eigvalsh(L)[-1]) if L.size else 0.0
    if tau is None:
        tau = 1.1 * lmax if lmax > 0 else 1.0
    if tau <= 0:
        raise ValueError("tau must be positive")
    if tau <= lmax:
        raise SpectrumViolation(
            f"tau = {tau!r} must exceed lambda_max(L) = {lmax!r}; W would have an eigenvalue <= 0"
        )
    W = np.eye(L.shape[0]) - L / tau
    return MixingMatrix.from_weights(W, graph)


def _as_blocks(W, z):
    z = np.asarray(z, dtype=float)
    n = W.n
    if z.ndim == 2:
        if z.shape[0] != n:
            raise DimensionMismatch(f"expected {n} blocks, got {z.shape[0]}")
        return z, z.shape
    if z.ndim != 1 or z.size % n:
        raise DimensionMismatch(f"stacked vector of length {z.size} does not split into {n} blocks")
    return z.reshape(n, -1), z.shape


def apply_lifted(W, z):
    """``(W (x) I_d) z``; accepts a stacked vector or an ``(N, d)`` block array."""
    Z, shape = _as_blocks(W, z)
    return (W.weights @ Z).reshape(shape)


def apply_U(W, z):
    """``U z`` with ``U = (I - W (x) I_d)^{1/2}``, via the eigenbasis of ``W``."""
    Z, shape = _as_blocks(W, z)
    V = W.eigenvectors
    s = np.sqrt(np.clip(1.0 - W.eigenvalues, 0.0, None))
    return (V @ (s[:, None] * (V.T @ Z))).reshape(shape)


def apply_U_pinv(W, z):
    """Minimum-norm solution ``q`` of ``U q = z`` (Moore-Penrose pseudoinverse)."""
    Z, shape = _as_blocks(W, z)
    V = W.eigenvectors
    s = np.sqrt(np.clip(1.0 - W.eigenvalues, 0.0, None))
    inv = np.where(s > np.sqrt(EIG_TOL), 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return (V @ (inv[:, None] * (V.T @ Z))).reshape(shape)


def consensus_seminorm(W, z):
    """``||U z|| = sqrt(z^T (I - W (x) I_d) z)``.

    Evaluated as ``0.5 * sum_{i != j} w_ij ||z_i - z_j||^2`` so that nearly
    agreeing blocks do not lose precision to cancellation.
    """
    Z, _ = _as_blocks(W, z)
    diff = Z[:, None, :] - Z[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    quad = 0.5 * float(np.sum(W.weights * sq))
    if quad < 0:
        if quad < -1e-12:
            raise NumericalError(f"consensus quadratic form is negative ({quad:.3e})")
        return 0.0
    return float(np.sqrt(quad))


@dataclass(frozen=True)
class LiftedOperator:
    """``W (x) I_d`` bound to a block dimension."""

    base: MixingMatrix
    block_dim: int

    def _check(self, z):
        z = np.asarray(z, dtype=float)
        if z.size != self.base.n * self.block_dim:
            raise DimensionMismatch(
                f"expected {self.base.n} blocks of size {self.block_dim}, got length {z.size}"
            )
        return z

    def __matmul__(self, z):
        return apply_lifted(self.base, self._check(z))

    def sqrt_complement(self, z):
        return apply_U(self.base, self._check(z))

    def seminorm(self, z):
        return consensus_seminorm(self.base, self._check(z))

    def dense(self):
        return np.kron(self.base.weights, np.eye(self.block_dim))
