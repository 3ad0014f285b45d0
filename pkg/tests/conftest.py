import numpy as np
import pytest

from pcrle.graph import NeighborhoodGraph, boxcar, build_graph, triangular, truncated_quadratic
from pcrle.sampling import sample_uniform_cube
from pcrle.seeding import make_rng

KERNELS = (boxcar, triangular, truncated_quadratic)


def dense_laplacian(g: NeighborhoodGraph) -> np.ndarray:
    """Independent dense Laplacian oracle built straight from the edge list."""
    L = np.zeros((g.n, g.n))
    for i, j, w in zip(g.rows, g.cols, g.weights):
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    return g.prefactor * L


def brute_force_edges(points: np.ndarray, eps: float, kernel) -> set:
    """All-pairs neighbor oracle: (i, j, weight) for i < j."""
    n = points.shape[0]
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            d2 = float(np.sum((points[i] - points[j]) ** 2))
            if d2 <= eps * eps:
                w = float(kernel(np.sqrt(d2) / eps))
                if w > 0:
                    edges.add((i, j, w))
    return edges


def fuzz_graph(seed: int, n_max: int = 200) -> NeighborhoodGraph:
    """Random geometric graph: uniform points, random radius and kernel."""
    rng = make_rng(seed)
    n = int(rng.integers(30, n_max + 1))
    d = int(rng.integers(1, 3))
    eps = float(rng.uniform(0.15, 0.6))
    kernel = KERNELS[int(rng.integers(0, len(KERNELS)))]
    design = sample_uniform_cube(n, d, rng)
    return build_graph(design.points, eps, kernel, d)


def principal_angles(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Principal angles between the column spans of A and B."""
    Qa, _ = np.linalg.qr(A)
    Qb, _ = np.linalg.qr(B)
    sv = np.linalg.svd(Qa.T @ Qb, compute_uv=False)
    return np.arccos(np.clip(sv, -1.0, 1.0))


@pytest.fixture(scope="session")
def rng_factory():
    return make_rng
