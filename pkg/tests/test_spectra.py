import numpy as np
import pytest
import scipy.linalg

from pcrle.graph import boxcar, build_graph, laplacian_apply
from pcrle.sampling import sample_circle_manifold, sample_cluster_model, sample_uniform_cube
from pcrle.seeding import make_rng
from pcrle.spectra import (
    LaplacianSpectrum,
    eigenvalue_scaling_check,
    save_spectrum_csv,
    smallest_eigenpairs,
)
from pcrle.tune import TuningRule, choose_K, choose_eps

from conftest import dense_laplacian, fuzz_graph, principal_angles


def spectrum_invariants(g, spec):
    K = spec.K
    V = spec.eigenvectors
    assert np.abs(np.linalg.norm(V, axis=0) - 1).max() < 1e-10
    gram = V.T @ V - np.eye(K)
    assert np.abs(gram - np.diag(np.diag(gram))).max() < 1e-8
    w = spec.eigenvalues
    assert np.all(np.diff(w) >= 0) and np.all(w >= 0)
    resid = np.linalg.norm(laplacian_apply(g, V) - V * w, axis=0)
    assert resid.max() <= spec.residual_tol


class TestSmallestEigenpairs:
    def test_connected_constant_null_vector(self):
        pts = np.arange(20, dtype=float)[:, None] / 20
        g = build_graph(pts, 0.11, boxcar, 1)
        spec = smallest_eigenpairs(g, 1)
        assert spec.eigenvalues[0] < 1e-10 * 2 * g.degrees.max() * g.prefactor
        v = spec.eigenvectors[:, 0]
        assert np.abs(np.abs(v) - 1 / np.sqrt(20)).max() < 1e-8

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_dense_oracle_equivalence(self, seed):
        g = fuzz_graph(500 + seed, n_max=150)
        K = min(10, g.n)
        sparse = smallest_eigenpairs(g, K, dense_cutoff=0)
        w_oracle, V_oracle = scipy.linalg.eigh(dense_laplacian(g))
        assert np.abs(sparse.eigenvalues - w_oracle[:K]).max() < 1e-8
        spectrum_invariants(g, sparse)

    def test_two_component_null_space(self):
        design = sample_cluster_model(600, 0.1, make_rng(4))
        g = build_graph(design.points, 0.05, boxcar, 1)
        spec = smallest_eigenpairs(g, 2)
        assert np.all(spec.eigenvalues == 0)
        left = design.points[:, 0] <= 0.5
        U = np.column_stack([left.astype(float), (~left).astype(float)])
        angles = principal_angles(spec.eigenvectors, U)
        assert angles.max() < 1e-8

    def test_monotone_K(self):
        g = fuzz_graph(42, n_max=180)
        a = smallest_eigenpairs(g, 5, dense_cutoff=0)
        b = smallest_eigenpairs(g, 12, dense_cutoff=0)
        assert np.abs(a.eigenvalues - b.eigenvalues[:5]).max() < 1e-8

    def test_determinism(self):
        g = fuzz_graph(9, n_max=150)
        a = smallest_eigenpairs(g, 6, dense_cutoff=0)
        b = smallest_eigenpairs(g, 6, dense_cutoff=0)
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.eigenvectors, b.eigenvectors)

    def test_residual_certification(self):
        for seed in (13, 14):
            g = fuzz_graph(seed, n_max=150)
            spec = smallest_eigenpairs(g, min(8, g.n), dense_cutoff=0)
            spectrum_invariants(g, spec)

    def test_sign_convention(self):
        g = fuzz_graph(17, n_max=120)
        spec = smallest_eigenpairs(g, 4)
        for k in range(4):
            v = spec.eigenvectors[:, k]
            nz = np.nonzero(np.abs(v) > 1e-12 * np.abs(v).max())[0]
            assert v[nz[0]] > 0

    def test_K_out_of_range(self):
        g = fuzz_graph(2)
        with pytest.raises(ValueError):
            smallest_eigenpairs(g, 0)
        with pytest.raises(ValueError):
            smallest_eigenpairs(g, g.n + 1)

    def test_edgeless_graph(self):
        g = build_graph(np.array([[0.0], [5.0], [9.0]]), 0.1)
        spec = smallest_eigenpairs(g, 2)
        assert np.all(spec.eigenvalues == 0)


class TestScalingCheck:
    def test_flat_1d_slope(self):
        rng = make_rng(100)
        design = sample_uniform_cube(2000, 1, rng)
        rule = TuningRule(task="estimation", n=2000, dim=1)
        eps = choose_eps(rule, choose_K(rule))
        g = build_graph(design.points, eps, boxcar, 1)
        spec = smallest_eigenpairs(g, 30)
        slope, ref = eigenvalue_scaling_check(spec, 1)
        assert ref == 2.0
        assert 1.5 <= slope <= 2.5

    def test_circle_slope_uses_intrinsic_dim(self):
        rng = make_rng(101)
        design = sample_circle_manifold(2000, 3, rng)
        rule = TuningRule(task="estimation", n=2000, dim=1, C0=2 * np.pi)
        eps = choose_eps(rule, choose_K(rule))
        g = build_graph(design.points, eps, boxcar, 1)
        spec = smallest_eigenpairs(g, 30)
        slope, ref = eigenvalue_scaling_check(spec, 1)
        # intrinsic rate 2/m = 2, not the ambient 2/3
        assert 1.5 <= slope <= 2.5

    def test_constant_eigenvalues_slope_zero(self):
        spec = LaplacianSpectrum(
            eigenvalues=np.full(12, 3.0), eigenvectors=np.eye(12),
            residual_tol=0.0, n=12, K=12, graph_fingerprint="",
        )
        slope, _ = eigenvalue_scaling_check(spec, 1)
        assert slope == pytest.approx(0.0, abs=1e-12)

    def test_needs_ten_pairs(self):
        spec = LaplacianSpectrum(
            eigenvalues=np.ones(5), eigenvectors=np.eye(5),
            residual_tol=0.0, n=5, K=5, graph_fingerprint="",
        )
        with pytest.raises(ValueError):
            eigenvalue_scaling_check(spec, 1)


def test_spectrum_csv(tmp_path):
    g = fuzz_graph(33, n_max=80)
    spec = smallest_eigenpairs(g, 3)
    path = tmp_path / "spec.csv"
    save_spectrum_csv(spec, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "k,lambda"
    assert len(lines) == 4
