"""Design-point samplers, regression functions, and noisy responses.

Three design models are supported: the uniform cube [-1,1]^d, a
two-cluster interval with an empty gap, and the unit circle embedded in
R^d.  Regression functions are built from the Neumann cosine eigenbasis
of the cube (or the circle's Fourier basis), from the piecewise-constant
cluster signal, or from arbitrary callables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Design",
    "Dataset",
    "RegressionFunction",
    "sample_uniform_cube",
    "sample_cluster_model",
    "sample_circle_manifold",
    "cube_eigenvalue",
    "cube_eigenfunction",
    "cube_multi_indices",
    "cube_basis_values",
    "circle_eigenvalue",
    "circle_basis_values",
    "single_eigenfunction",
    "eigenfunction_sum",
    "piecewise_cluster",
    "constant",
    "custom",
    "make_responses",
    "save_dataset_csv",
    "load_dataset_csv",
]


@dataclass(frozen=True)
class Design:
    """Sampled design points plus the intrinsic dimension of their support."""

    points: np.ndarray  # (n, d)
    intrinsic_dim: int

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class Dataset:
    """Design points with noisy responses and the noiseless truth."""

    points: np.ndarray  # (n, d)
    responses: np.ndarray  # (n,)
    truth: np.ndarray  # (n,)
    ambient_dim: int
    intrinsic_dim: int

    def __post_init__(self):
        n = self.points.shape[0]
        if n < 1:
            raise ValueError("dataset must contain at least one point")
        if self.responses.shape != (n,) or self.truth.shape != (n,):
            raise ValueError("responses/truth length must match the point count")
        if not 1 <= self.intrinsic_dim <= self.ambient_dim:
            raise ValueError("intrinsic_dim must lie in [1, ambient_dim]")

    @property
    def n(self) -> int:
        return self.points.shape[0]


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

def sample_uniform_cube(n: int, d: int, rng: np.random.Generator) -> Design:
    """n i.i.d. points uniform on [-1, 1]^d."""
    if n < 1 or d < 1:
        raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    pts = rng.uniform(-1.0, 1.0, size=(n, d))
    return Design(points=pts, intrinsic_dim=d)


def sample_cluster_model(n: int, r: float, rng: np.random.Generator) -> Design:
    """Uniform draws from the two-cluster support [0, 1/2-r] u [1/2+r, 1].

    Each cluster carries probability mass 1/2.  The separation r must lie
    in (0, 1/4] so that both clusters are non-degenerate.
    """
    if not 0.0 < r <= 0.25:
        raise ValueError(f"cluster separation r must lie in (0, 1/4], got {r}")
    if n < 1:
        raise ValueError("need n >= 1")
    half = 0.5 - r
    u = rng.uniform(0.0, 1.0, size=n)
    side = rng.uniform(0.0, 1.0, size=n) < 0.5
    x = np.where(side, u * half, 0.5 + r + u * half)
    return Design(points=x[:, None], intrinsic_dim=1)


def sample_circle_manifold(n: int, d: int, rng: np.random.Generator) -> Design:
    """Uniform points on the unit circle in the first two coordinates of R^d."""
    if d < 2:
        raise ValueError(f"circle embedding needs ambient dimension >= 2, got {d}")
    if n < 1:
        raise ValueError("need n >= 1")
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    pts = np.zeros((n, d))
    pts[:, 0] = np.cos(theta)
    pts[:, 1] = np.sin(theta)
    return Design(points=pts, intrinsic_dim=1)


# ---------------------------------------------------------------------------
# Cube eigenbasis: Neumann cosines on [-1, 1]^d
#
# phi_0 = 1, phi_k(t) = sqrt(2) cos(k pi (t+1)/2), rho = sum_i (k_i pi/2)^2.
# Orthonormal in L^2 of the uniform density on the cube.
# ---------------------------------------------------------------------------

def cube_eigenvalue(multi_index) -> float:
    """Eigenvalue of the product cosine eigenfunction with the given multi-index."""
    k = np.asarray(multi_index, dtype=float)
    return float(np.sum((k * np.pi / 2.0) ** 2))


def cube_eigenfunction(multi_index, x: np.ndarray) -> np.ndarray:
    """Evaluate the product Neumann cosine eigenfunction at points in [-1,1]^d.

    ``x`` may be a single point of shape (d,) or a batch of shape (n, d).
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    k = np.asarray(multi_index, dtype=int)
    if k.shape != (pts.shape[1],):
        raise ValueError("multi_index length must equal the point dimension")
    out = np.ones(pts.shape[0])
    for i, ki in enumerate(k):
        if ki > 0:
            out *= math.sqrt(2.0) * np.cos(ki * np.pi * (pts[:, i] + 1.0) / 2.0)
    return out[0] if single else out


def cube_multi_indices(d: int, count: int) -> list[tuple[int, ...]]:
    """First ``count`` multi-indices in ascending eigenvalue order, ties lexicographic."""
    if count < 1:
        raise ValueError("count must be >= 1")
    bound = 1
    while True:
        # all multi-indices with every component <= bound cover at least the
        # first (bound+1) eigenvalue ranks along each axis
        cand = [
            (sum(c * c for c in k), k)
            for k in itertools.product(range(bound + 1), repeat=d)
        ]
        cand.sort()
        # complete iff the count-th candidate has eigenvalue below the first
        # excluded single-axis index
        if len(cand) >= count and cand[count - 1][0] < (bound + 1) ** 2:
            return [k for _, k in cand[:count]]
        bound *= 2


def cube_basis_values(points: np.ndarray, K: int) -> np.ndarray:
    """(n, K) matrix of the first K cube eigenfunctions at the design points."""
    pts = np.asarray(points, dtype=float)
    idx = cube_multi_indices(pts.shape[1], K)
    return np.column_stack([cube_eigenfunction(k, pts) for k in idx])


def cube_eigenvalues(d: int, K: int) -> np.ndarray:
    """Eigenvalues paired with ``cube_basis_values`` columns."""
    return np.array([cube_eigenvalue(k) for k in cube_multi_indices(d, K)])


# ---------------------------------------------------------------------------
# Circle eigenbasis: 1, cos, sin pairs; rank k has frequency j = floor(k/2)
# ---------------------------------------------------------------------------

def circle_eigenvalue(k: int) -> float:
    """Eigenvalue of the k-th circle eigenfunction (1-based, k=1 constant)."""
    if k < 1:
        raise ValueError("eigenfunction rank is 1-based")
    j = k // 2
    return float(j * j)


def _circle_eigenfunction(k: int, points: np.ndarray) -> np.ndarray:
    theta = np.arctan2(points[:, 1], points[:, 0])
    if k == 1:
        return np.ones(points.shape[0])
    j = k // 2
    if k % 2 == 0:
        return math.sqrt(2.0) * np.cos(j * theta)
    return math.sqrt(2.0) * np.sin(j * theta)


def circle_basis_values(points: np.ndarray, K: int) -> np.ndarray:
    """(n, K) matrix of the first K circle eigenfunctions at embedded points."""
    pts = np.asarray(points, dtype=float)
    return np.column_stack([_circle_eigenfunction(k, pts) for k in range(1, K + 1)])


def circle_eigenvalues(K: int) -> np.ndarray:
    return np.array([circle_eigenvalue(k) for k in range(1, K + 1)])


# ---------------------------------------------------------------------------
# Regression functions
# ---------------------------------------------------------------------------

_KINDS = (
    "single-eigenfunction",
    "eigenfunction-sum",
    "piecewise-cluster",
    "constant",
    "custom",
)


@dataclass(frozen=True)
class RegressionFunction:
    """A regression function f0, evaluable on a batch of design points.

    Parameters live in ``params`` so instances stay picklable; ``custom``
    wraps an arbitrary callable.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown regression function kind {self.kind!r}")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        p = self.params
        if self.kind == "constant":
            return np.full(pts.shape[0], float(p["value"]))
        if self.kind == "custom":
            return np.asarray(p["fn"](pts), dtype=float)
        if self.kind == "piecewise-cluster":
            theta, r = float(p["theta"]), float(p["r"])
            x = pts[:, 0]
            return np.where(x <= 0.5 - r, theta, np.where(x >= 0.5 + r, -theta, 0.0))
        if self.kind == "single-eigenfunction":
            k, s, M = int(p["index"]), int(p["smoothness"]), float(p["amplitude"])
            if p["domain"] == "circle":
                rho = circle_eigenvalue(k)
                psi = _circle_eigenfunction(k, pts)
            else:
                idx = cube_multi_indices(pts.shape[1], k)[k - 1]
                rho = cube_eigenvalue(idx)
                psi = cube_eigenfunction(idx, pts)
            return (M / rho ** (s / 2.0)) * psi
        # eigenfunction-sum
        decay, amp, k_max = float(p["decay"]), float(p["amplitude"]), int(p["k_max"])
        if p["domain"] == "circle":
            basis = circle_basis_values(pts, k_max)
            rho = circle_eigenvalues(k_max)
        else:
            basis = cube_basis_values(pts, k_max)
            rho = cube_eigenvalues(pts.shape[1], k_max)
        weights = np.where(rho > 0, rho, np.inf) ** (-decay / 2.0)
        return amp * basis @ weights

    def squared_norm(self) -> float:
        """Analytic ||f0||_P^2 where the basis is orthonormal under P."""
        p = self.params
        if self.kind == "constant":
            return float(p["value"]) ** 2
        if self.kind == "single-eigenfunction":
            k, s, M = int(p["index"]), int(p["smoothness"]), float(p["amplitude"])
            if p["domain"] == "circle":
                rho = circle_eigenvalue(k)
            else:
                rho = cube_eigenvalue(cube_multi_indices(int(p["dim"]), k)[k - 1])
            return M * M / rho**s
        if self.kind == "piecewise-cluster":
            return float(p["theta"]) ** 2
        raise ValueError(f"no closed-form norm for kind {self.kind!r}")


def single_eigenfunction(
    index: int, amplitude: float = 1.0, smoothness: int = 1,
    domain: str = "cube", dim: int = 1,
) -> RegressionFunction:
    """f0 = amplitude / rho_k^{s/2} * psi_k, with Sobolev seminorm budget amplitude^2."""
    if index < 2:
        raise ValueError("rank-1 eigenfunction is constant (eigenvalue 0); need index >= 2")
    return RegressionFunction(
        "single-eigenfunction",
        {"index": index, "amplitude": amplitude, "smoothness": smoothness,
         "domain": domain, "dim": dim},
    )


def eigenfunction_sum(
    decay: float, amplitude: float = 1.0, domain: str = "cube",
    dim: int = 1, k_max: int = 100,
) -> RegressionFunction:
    """f0 = amplitude * sum_{k>=2} rho_k^{-decay/2} psi_k, truncated at k_max."""
    return RegressionFunction(
        "eigenfunction-sum",
        {"decay": decay, "amplitude": amplitude, "domain": domain,
         "dim": dim, "k_max": k_max},
    )


def piecewise_cluster(theta: float, r: float) -> RegressionFunction:
    """+theta on the left cluster, -theta on the right cluster."""
    return RegressionFunction("piecewise-cluster", {"theta": theta, "r": r})


def constant(value: float) -> RegressionFunction:
    return RegressionFunction("constant", {"value": value})


def custom(fn) -> RegressionFunction:
    """Wrap a callable mapping an (n, d) array to an (n,) array."""
    return RegressionFunction("custom", {"fn": fn})


def make_responses(
    design: Design,
    f: RegressionFunction,
    noise_sd: float = 1.0,
    rng: np.random.Generator | None = None,
) -> Dataset:
    """Attach truth f(X_i) and responses truth + noise_sd * N(0,1) to a design."""
    if noise_sd < 0:
        raise ValueError("noise_sd must be nonnegative")
    truth = f.evaluate(design.points)
    if noise_sd == 0:
        responses = truth.copy()
    else:
        if rng is None:
            raise ValueError("rng required when noise_sd > 0")
        responses = truth + noise_sd * rng.standard_normal(design.n)
    return Dataset(
        points=design.points,
        responses=responses,
        truth=truth,
        ambient_dim=design.ambient_dim,
        intrinsic_dim=design.intrinsic_dim,
    )


# ---------------------------------------------------------------------------
# CSV round trip: header x1..xd,y,f0
# ---------------------------------------------------------------------------

def save_dataset_csv(dataset: Dataset, path) -> None:
    d = dataset.ambient_dim
    header = ",".join([f"x{i + 1}" for i in range(d)] + ["y", "f0"])
    table = np.column_stack([dataset.points, dataset.responses, dataset.truth])
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.17g")


def load_dataset_csv(path, intrinsic_dim: int | None = None) -> Dataset:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if len(header) < 3 or header[-2:] != ["y", "f0"]:
            raise ValueError(f"{path}: expected header x1..xd,y,f0, got {header}")
        d = len(header) - 2
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != d + 2:
                raise ValueError(f"{path}: row {lineno} has {len(parts)} fields, expected {d + 2}")
            try:
                rows.append([float(v) for v in parts])
            except ValueError as exc:
                raise ValueError(f"{path}: row {lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    table = np.asarray(rows)
    return Dataset(
        points=table[:, :d],
        responses=table[:, d],
        truth=table[:, d + 1],
        ambient_dim=d,
        intrinsic_dim=d if intrinsic_dim is None else intrinsic_dim,
    )
