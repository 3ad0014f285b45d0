import numpy as np
import pytest

from pcrle.graph import (
    boxcar,
    build_graph,
    connected_components,
    kernel_by_name,
    laplacian_apply,
    save_edge_list,
    sobolev_seminorm,
    triangular,
)
from pcrle.sampling import sample_cluster_model, sample_uniform_cube
from pcrle.seeding import make_rng

from conftest import KERNELS, brute_force_edges, dense_laplacian, fuzz_graph


class TestBuildGraph:
    def test_beyond_radius_no_edges(self):
        pts = np.array([[0.0], [1.0]])
        g = build_graph(pts, 0.5, boxcar)
        assert g.n_edges == 0

    def test_within_radius_boxcar_weight_one(self):
        pts = np.array([[0.0], [0.25]])
        g = build_graph(pts, 0.5, boxcar)
        assert g.n_edges == 1
        assert g.weights[0] == 1.0
        assert (g.rows[0], g.cols[0]) == (0, 1)

    def test_tie_at_exactly_eps_included(self):
        pts = np.array([[0.0], [0.5]])
        g = build_graph(pts, 0.5, boxcar)
        assert g.n_edges == 1

    def test_triangular_zero_weight_dropped(self):
        # kernel value at the boundary is 0, so the edge is not stored
        pts = np.array([[0.0], [0.5]])
        g = build_graph(pts, 0.5, triangular)
        assert g.n_edges == 0

    def test_matches_brute_force_oracle(self):
        pts = sample_uniform_cube(100, 1, make_rng(0)).points
        g = build_graph(pts, 0.1, boxcar)
        got = {(i, j, w) for i, j, w in zip(g.rows, g.cols, g.weights)}
        assert got == brute_force_edges(pts, 0.1, boxcar)

    @pytest.mark.parametrize("seed", range(8))
    def test_spatial_index_equivalence_fuzz(self, seed):
        rng = make_rng(1000 + seed)
        n = int(rng.integers(20, 500))
        d = int(rng.integers(1, 4))
        eps = float(rng.uniform(0.1, 0.9))
        kernel = KERNELS[seed % len(KERNELS)]
        pts = sample_uniform_cube(n, d, rng).points
        g = build_graph(pts, eps, kernel)
        got = {(i, j) for i, j in zip(g.rows, g.cols)}
        want = {(i, j) for i, j, _ in brute_force_edges(pts, eps, kernel)}
        assert got == want

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            build_graph(np.array([[0.0], [np.nan]]), 0.1)

    def test_edges_sorted(self):
        g = fuzz_graph(3)
        order = np.lexsort((g.cols, g.rows))
        assert np.array_equal(order, np.arange(g.n_edges))


class TestLaplacianApply:
    def test_constant_in_kernel(self):
        g = fuzz_graph(11)
        out = laplacian_apply(g, np.ones(g.n))
        assert np.abs(out).max() < 1e-12

    def test_two_vertex_hand_expansion(self):
        pts = np.array([[0.0], [0.3]])
        g = build_graph(pts, 0.5, triangular, 1)
        w = g.weights[0]
        rho = 1.0 / (2 * 0.5**3)
        out = laplacian_apply(g, np.array([1.0, 0.0]))
        assert out == pytest.approx([rho * w, -rho * w])

    def test_matches_dense_oracle(self):
        rng = make_rng(21)
        pts = sample_uniform_cube(50, 2, rng).points
        g = build_graph(pts, 0.5, boxcar, 2)
        L = dense_laplacian(g)
        u = rng.standard_normal(50)
        got = laplacian_apply(g, u)
        want = L @ u
        assert np.abs(got - want).max() < 1e-12 * max(np.abs(want).max(), 1.0)

    def test_length_mismatch(self):
        g = fuzz_graph(5)
        with pytest.raises(ValueError):
            laplacian_apply(g, np.ones(g.n + 1))

    def test_symmetry_invariant(self):
        for seed in range(5):
            g = fuzz_graph(30 + seed, n_max=120)
            rng = make_rng(seed)
            u = rng.standard_normal(g.n)
            v = rng.standard_normal(g.n)
            lu, lv = laplacian_apply(g, u), laplacian_apply(g, v)
            scale = np.linalg.norm(u) * np.linalg.norm(v) * max(np.abs(lu).max(), 1e-300)
            assert abs(u @ lv - v @ lu) <= 1e-10 * max(scale, 1e-12)

    def test_psd_invariant(self):
        g = fuzz_graph(77, n_max=100)
        rng = make_rng(8)
        for _ in range(100):
            f = rng.standard_normal(g.n)
            assert sobolev_seminorm(g, f, 1) >= -1e-12


class TestSobolevSeminorm:
    def test_constant_is_zero(self):
        g = fuzz_graph(40)
        for s in (1, 2, 3):
            assert abs(sobolev_seminorm(g, np.full(g.n, 2.5), s)) < 1e-18

    def test_dirichlet_identity(self):
        # operator-based s=1 value equals the explicit edge-sum formula
        for seed in range(6):
            g = fuzz_graph(50 + seed, n_max=150)
            f = make_rng(seed).standard_normal(g.n)
            edge_sum = float(np.sum((f[g.rows] - f[g.cols]) ** 2 * g.weights))
            want = edge_sum * g.prefactor / g.n
            got = sobolev_seminorm(g, f, 1)
            assert abs(got - want) <= 1e-10 * max(abs(want), 1e-300)

    def test_s2_algebraic_identity(self):
        g = fuzz_graph(60, n_max=100)
        f = make_rng(4).standard_normal(g.n)
        lf = laplacian_apply(g, f)
        want = float(lf @ lf) / g.n
        got = sobolev_seminorm(g, f, 2)
        assert abs(got - want) <= 1e-12 * max(abs(want), 1e-300)

    def test_rejects_s_zero(self):
        g = fuzz_graph(1)
        with pytest.raises(ValueError):
            sobolev_seminorm(g, np.ones(g.n), 0)


class TestConnectedComponents:
    def test_edgeless(self):
        g = build_graph(np.array([[0.0], [10.0], [20.0]]), 0.1)
        assert g.n_edges == 0
        assert np.array_equal(connected_components(g), [0, 1, 2])

    def test_path_graph(self):
        pts = np.arange(5, dtype=float)[:, None]
        g = build_graph(pts, 1.0, boxcar)
        assert np.all(connected_components(g) == 0)

    def test_cluster_components_match_membership(self):
        rng = make_rng(12)
        design = sample_cluster_model(1500, 0.1, rng)
        g = build_graph(design.points, 0.05, boxcar, 1)
        labels = connected_components(g)
        member = (design.points[:, 0] >= 0.5).astype(int)
        assert labels.max() + 1 == 2
        # labels numbered by smallest vertex index; map to membership
        assert np.array_equal(labels, member) or np.array_equal(labels, 1 - member)


class TestExportAndKernels:
    def test_edge_list_format(self, tmp_path):
        pts = np.array([[0.0], [0.25], [10.0]])
        g = build_graph(pts, 0.5, boxcar)
        path = tmp_path / "graph.edges"
        save_edge_list(g, path)
        assert path.read_text() == "0 1 1\n"

    def test_kernel_lookup(self):
        assert kernel_by_name("boxcar") is boxcar
        with pytest.raises(ValueError):
            kernel_by_name("gaussian")

    def test_kernel_shapes(self):
        t = np.array([0.0, 0.5, 1.0, 1.5])
        assert np.array_equal(boxcar(t), [1, 1, 1, 0])
        assert np.allclose(triangular(t), [1, 0.5, 0, 0])
        assert np.allclose(kernel_by_name("truncated-quadratic")(t), [1, 0.75, 0, 0])
        # nonincreasing on [0, 1] with eta(1/2) > 0
        for k in KERNELS:
            grid = np.linspace(0, 1, 101)
            vals = k(grid)
            assert np.all(np.diff(vals) <= 1e-12)
            assert k(np.array([0.5]))[0] > 0
