"""Epsilon-neighborhood graphs and their Laplacian as a linear operator.

Edges connect points at Euclidean distance <= eps (closed ball) with
weight eta(dist/eps).  The Laplacian acts as
``(L u)_i = pref * sum_j (u_i - u_j) w_ij`` with the scaling
``pref = 1 / (n * eps^(2 + intrinsic_dim))``.  Kernels are stored
unnormalized: the PCR-LE fit is invariant to positive rescalings of L,
so only eigenvalue ratios are meaningful, never absolute values.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Kernel",
    "boxcar",
    "triangular",
    "truncated_quadratic",
    "kernel_by_name",
    "NeighborhoodGraph",
    "build_graph",
    "laplacian_apply",
    "sobolev_seminorm",
    "connected_components",
    "save_edge_list",
]


@dataclass(frozen=True)
class Kernel:
    """Nonincreasing weight profile on [0, 1], zero beyond 1."""

    kind: str

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        inside = t <= 1.0
        if self.kind == "boxcar":
            return inside.astype(float)
        if self.kind == "triangular":
            return np.where(inside, 1.0 - t, 0.0)
        if self.kind == "truncated-quadratic":
            return np.where(inside, 1.0 - t * t, 0.0)
        raise ValueError(f"unknown kernel {self.kind!r}")


boxcar = Kernel("boxcar")
triangular = Kernel("triangular")
truncated_quadratic = Kernel("truncated-quadratic")

_KERNELS = {k.kind: k for k in (boxcar, triangular, truncated_quadratic)}


def kernel_by_name(name: str) -> Kernel:
    try:
        return _KERNELS[name]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; choose from {sorted(_KERNELS)}") from None


@dataclass
class NeighborhoodGraph:
    """Immutable weighted graph over n design points.

    Edges are stored once as coordinate lists with rows < cols, sorted by
    (row, col).  The adjacency matrix and weighted degrees are cached on
    first use; instances are safe to share across threads after
    construction.
    """

    n: int
    eps: float
    kernel: Kernel
    intrinsic_dim: int
    rows: np.ndarray  # (m,) int64, rows < cols
    cols: np.ndarray  # (m,)
    weights: np.ndarray  # (m,) strictly positive
    _adjacency: sp.csr_matrix | None = field(default=None, repr=False)
    _degrees: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.intrinsic_dim < 1:
            raise ValueError("intrinsic_dim must be >= 1")
        if np.any(self.rows >= self.cols):
            raise ValueError("edges must satisfy row < col (no self-loops)")
        if np.any(self.weights <= 0):
            raise ValueError("edge weights must be strictly positive")

    @property
    def n_edges(self) -> int:
        return self.rows.shape[0]

    @property
    def prefactor(self) -> float:
        return 1.0 / (self.n * self.eps ** (2 + self.intrinsic_dim))

    @property
    def adjacency(self) -> sp.csr_matrix:
        if self._adjacency is None:
            i = np.concatenate([self.rows, self.cols])
            j = np.concatenate([self.cols, self.rows])
            w = np.concatenate([self.weights, self.weights])
            self._adjacency = sp.csr_matrix((w, (i, j)), shape=(self.n, self.n))
        return self._adjacency

    @property
    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            self._degrees = np.asarray(self.adjacency.sum(axis=1)).ravel()
        return self._degrees

    def laplacian_dense(self) -> np.ndarray:
        """Dense Laplacian matrix, prefactor included.  For small n only."""
        W = self.adjacency.toarray()
        return self.prefactor * (np.diag(self.degrees) - W)

    def reweighted(self, rows, cols, weights) -> "NeighborhoodGraph":
        """Same vertex set and scaling, different edge list."""
        return NeighborhoodGraph(
            n=self.n, eps=self.eps, kernel=self.kernel,
            intrinsic_dim=self.intrinsic_dim,
            rows=np.asarray(rows, dtype=np.int64),
            cols=np.asarray(cols, dtype=np.int64),
            weights=np.asarray(weights, dtype=float),
        )

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha1()
        h.update(np.array([self.n, self.intrinsic_dim], dtype=np.int64).tobytes())
        h.update(np.array([self.eps], dtype=np.float64).tobytes())
        h.update(self.kernel.kind.encode())
        h.update(self.rows.tobytes())
        h.update(self.cols.tobytes())
        h.update(self.weights.tobytes())
        return h.hexdigest()[:16]


def _cell_groups(points: np.ndarray, eps: float):
    """Group point indices by their grid cell of width eps."""
    mins = points.min(axis=0)
    cells = np.floor((points - mins) / eps).astype(np.int64)
    order = np.lexsort(cells.T[::-1])
    sorted_cells = cells[order]
    change = np.any(np.diff(sorted_cells, axis=0) != 0, axis=1)
    starts = np.concatenate([[0], np.nonzero(change)[0] + 1, [points.shape[0]]])
    groups = {}
    for a, b in zip(starts[:-1], starts[1:]):
        groups[tuple(sorted_cells[a])] = order[a:b]
    return groups


def build_graph(
    points: np.ndarray,
    eps: float,
    kernel: Kernel = boxcar,
    intrinsic_dim: int | None = None,
) -> NeighborhoodGraph:
    """Build the eps-neighborhood graph with grid-based neighbor search.

    Candidate pairs are found by binning points into cells of width eps
    and scanning adjacent cells, so the cost scales with the number of
    nearby pairs rather than all n^2 pairs.  An edge is stored iff
    ||X_i - X_j|| <= eps and the kernel weight is positive.
    """
    pts = np.ascontiguousarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be an (n, d) array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite coordinates")
    if eps <= 0:
        raise ValueError("eps must be positive")
    n, d = pts.shape
    dim = d if intrinsic_dim is None else intrinsic_dim

    groups = _cell_groups(pts, eps)
    eps2 = eps * eps

    # enumerate each cell pair once: the zero offset plus offsets that are
    # lexicographically positive
    offsets = []
    for off in np.ndindex(*([3] * d)):
        delta = tuple(o - 1 for o in off)
        if delta > (0,) * d:
            offsets.append(delta)

    rows_parts, cols_parts, w_parts = [], [], []

    def _collect(ii, jj, dist2):
        mask = dist2 <= eps2
        if not np.any(mask):
            return
        i_sel, j_sel = ii[mask], jj[mask]
        w = kernel(np.sqrt(dist2[mask]) / eps)
        keep = w > 0
        if not np.any(keep):
            return
        i_sel, j_sel, w = i_sel[keep], j_sel[keep], w[keep]
        lo = np.minimum(i_sel, j_sel)
        hi = np.maximum(i_sel, j_sel)
        rows_parts.append(lo)
        cols_parts.append(hi)
        w_parts.append(w)

    for cell, idx in groups.items():
        a = pts[idx]
        if idx.size > 1:
            iu, ju = np.triu_indices(idx.size, k=1)
            diff = a[iu] - a[ju]
            _collect(idx[iu], idx[ju], np.einsum("ij,ij->i", diff, diff))
        for delta in offsets:
            other = tuple(c + dl for c, dl in zip(cell, delta))
            jdx = groups.get(other)
            if jdx is None:
                continue
            b = pts[jdx]
            diff = a[:, None, :] - b[None, :, :]
            dist2 = np.einsum("ijk,ijk->ij", diff, diff)
            ii = np.broadcast_to(idx[:, None], dist2.shape).ravel()
            jj = np.broadcast_to(jdx[None, :], dist2.shape).ravel()
            _collect(ii, jj, dist2.ravel())

    if rows_parts:
        rows = np.concatenate(rows_parts)
        cols = np.concatenate(cols_parts)
        weights = np.concatenate(w_parts)
        order = np.lexsort((cols, rows))
        rows, cols, weights = rows[order], cols[order], weights[order]
    else:
        rows = np.empty(0, dtype=np.int64)
        cols = np.empty(0, dtype=np.int64)
        weights = np.empty(0, dtype=float)

    return NeighborhoodGraph(
        n=n, eps=float(eps), kernel=kernel, intrinsic_dim=dim,
        rows=rows, cols=cols, weights=weights,
    )


def laplacian_apply(g: NeighborhoodGraph, u: np.ndarray) -> np.ndarray:
    """Apply the scaled Laplacian to a vector or to columns of a matrix."""
    u = np.asarray(u, dtype=float)
    if u.shape[0] != g.n:
        raise ValueError(f"vector length {u.shape[0]} != vertex count {g.n}")
    if u.ndim == 1:
        out = g.degrees * u - g.adjacency @ u
    else:
        out = g.degrees[:, None] * u - g.adjacency @ u
    return g.prefactor * out


def sobolev_seminorm(g: NeighborhoodGraph, f: np.ndarray, s: int = 1) -> float:
    """Graph Sobolev seminorm (1/n) <L^s f, f> via repeated operator application."""
    if s < 1:
        raise ValueError("seminorm order s must be a positive integer")
    f = np.asarray(f, dtype=float)
    v = f
    for _ in range(s):
        v = laplacian_apply(g, v)
    return float(f @ v) / g.n


def connected_components(g: NeighborhoodGraph) -> np.ndarray:
    """Component label per vertex; labels are numbered by smallest member index."""
    n_comp, raw = sp.csgraph.connected_components(g.adjacency, directed=False)
    first = np.full(n_comp, g.n, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(g.n))
    remap = np.empty(n_comp, dtype=np.int64)
    remap[np.argsort(first)] = np.arange(n_comp)
    return remap[raw]


def save_edge_list(g: NeighborhoodGraph, path) -> None:
    """Plain-text edge list ``i j w`` with 0-based vertex indices."""
    with open(path, "w") as fh:
        for i, j, w in zip(g.rows, g.cols, g.weights):
            fh.write(f"{i} {j} {w:.17g}\n")
