import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypstab import Mesh, uniform_random_ensemble


class TestMesh:
    def test_basic_layout(self):
        mesh = Mesh(100)
        assert mesh.dx == pytest.approx(0.01)
        assert mesh.x[0] == 0.0
        assert mesh.x[100] == pytest.approx(1.0, abs=1e-15)
        assert np.allclose(np.diff(mesh.x), mesh.dx)

    def test_telescoping_sum(self):
        mesh = Mesh(137)
        total = np.sum(np.diff(mesh.x[:mesh.M + 1]))
        assert abs(total - 1.0) <= 1e-12

    def test_rejects_tiny(self):
        with pytest.raises(ValueError):
            Mesh(1)

    @given(st.integers(min_value=2, max_value=5000))
    def test_dx_times_m_is_one(self, M):
        mesh = Mesh(M)
        assert abs(mesh.dx * M - 1.0) <= 4 * np.finfo(float).eps

    def test_centers(self):
        mesh = Mesh(4)
        assert np.allclose(mesh.centers, [0.125, 0.375, 0.625, 0.875])


class TestEnsemble:
    def test_tiny_ensemble_nodes(self):
        ens = uniform_random_ensemble(1.0, 2)
        assert np.allclose(ens.nodes, [-1.0, 0.0, 1.0])
        assert ens.dxi == pytest.approx(1.0)
        assert np.allclose(ens.density, 0.5)

    def test_published_resolution(self):
        ens = uniform_random_ensemble(0.5, 100)
        assert ens.dxi == pytest.approx(0.01)
        assert np.allclose(ens.density, 1.0)

    def test_quadrature_mass_exact(self):
        # hand sum: 4 nodes x (1/4 spacing-weight) x density 1/4 each... = 1
        ens = uniform_random_ensemble(2.0, 4)
        assert ens.quadrature_mass() == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(min_value=1e-3, max_value=50, allow_nan=False),
           st.integers(min_value=1, max_value=2000))
    def test_normalization_property(self, sigma, K):
        ens = uniform_random_ensemble(sigma, K)
        assert abs(ens.quadrature_mass() - 1.0) <= 1e-12
        assert ens.nodes[0] == pytest.approx(-sigma)
        assert ens.nodes[-1] == pytest.approx(sigma)

    @pytest.mark.parametrize("sigma,K", [(0.0, 10), (-1.0, 10), (1.0, 0)])
    def test_validation(self, sigma, K):
        with pytest.raises(ValueError):
            uniform_random_ensemble(sigma, K)
