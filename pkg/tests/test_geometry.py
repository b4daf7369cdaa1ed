import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mimocs.geometry import (TRANSCEIVER, AngleGrid, ArrayConfig, ConfigurationError, Discrete,
                             PointMass, Uniform, canonical_grid, nyquist_array, sample_positions,
                             steering_rx, steering_tx, steering_virtual, ElementPositions)


class TestArrayConfig:
    def test_defaults_split_aperture(self):
        cfg = ArrayConfig(4, 5, 50)
        assert cfg.Z_tx == cfg.Z_rx == 25
        assert cfg.tx_dist == Uniform(-0.5, 0.5)
        assert cfg.MN == 20

    @pytest.mark.parametrize("kw", [dict(M=0, N=1, Z=1), dict(M=1, N=1, Z=0),
                                    dict(M=1, N=1, Z=2, Z_tx=1.5, Z_rx=1.0),
                                    dict(M=2, N=3, Z=4, mode=TRANSCEIVER),
                                    dict(M=2, N=2, Z=4, mode="bistatic")])
    def test_rejects_invalid(self, kw):
        with pytest.raises(ConfigurationError):
            ArrayConfig(**kw)

    def test_support_must_fit_interval(self):
        with pytest.raises(ConfigurationError):
            ArrayConfig(2, 2, 10, tx_dist=Uniform(-1.0, 1.0))

    def test_transceiver_needs_equal_distributions(self):
        with pytest.raises(ConfigurationError):
            ArrayConfig(2, 2, 10, mode=TRANSCEIVER, tx_dist=PointMass(0.0))


class TestSamplePositions:
    def test_within_support(self):
        pos = sample_positions(ArrayConfig(4, 4, 50), 7)
        assert np.all(np.abs(pos.xi) <= 0.5) and np.all(np.abs(pos.zeta) <= 0.5)
        assert pos.M == 4 and pos.N == 4

    def test_transceiver_copies_receive_draw(self):
        pos = sample_positions(ArrayConfig(3, 3, 50, mode=TRANSCEIVER), 1)
        np.testing.assert_array_equal(pos.xi, pos.zeta)

    def test_reproducible(self):
        cfg = ArrayConfig(5, 6, 50)
        a, b = sample_positions(cfg, 99), sample_positions(cfg, 99)
        np.testing.assert_array_equal(a.xi, b.xi)
        np.testing.assert_array_equal(a.zeta, b.zeta)
        assert not np.array_equal(sample_positions(cfg, 100).xi, a.xi)

    def test_sample_mean_clt(self):
        # oracle: mean 0, sd 1/sqrt(12) for the uniform on [-1/2, 1/2]
        pos = sample_positions(ArrayConfig(2000, 2000, 50), 2024)
        assert abs(pos.xi.mean()) <= 3 / np.sqrt(12) / np.sqrt(2000)

    def test_unsupported_distribution(self):
        with pytest.raises(ConfigurationError):
            ArrayConfig(2, 2, 10, tx_dist="gaussian")

    def test_discrete_and_point_mass(self):
        cfg = ArrayConfig(50, 3, 10, tx_dist=Discrete((-0.25, 0.25)), rx_dist=PointMass(0.1))
        pos = sample_positions(cfg, 0)
        assert set(pos.xi) <= {-0.25, 0.25}
        np.testing.assert_array_equal(pos.zeta, 0.1)


class TestGrid:
    def test_reference_size(self):
        g = canonical_grid(250)
        assert g.G == 251
        assert g.spacing == pytest.approx(0.008)

    def test_endpoints_only(self):
        np.testing.assert_array_equal(canonical_grid(1).phi, [-1.0, 1.0])

    def test_center_point(self):
        g = canonical_grid(50)
        assert g.G == 51 and g.phi[25] == 0.0

    @pytest.mark.parametrize("Z", [0, -3, 2.5, True])
    def test_rejects_bad_z(self, Z):
        with pytest.raises(ConfigurationError):
            canonical_grid(Z)

    def test_u_offsets_are_multiples_of_two_pi(self):
        g = canonical_grid(50)
        np.testing.assert_allclose(g.u_first_row(), 2 * np.pi * np.arange(51), atol=1e-12)

    def test_non_uniform_grid(self):
        g = AngleGrid(np.linspace(-1, 1, 11) ** 3, Z=10)
        assert not g.is_uniform

    def test_rejects_unsorted(self):
        with pytest.raises(ConfigurationError):
            AngleGrid(np.array([0.0, -0.5]), Z=2)


class TestSteering:
    def test_broadside_is_all_ones(self):
        pos = sample_positions(ArrayConfig(3, 4, 20), 0)
        np.testing.assert_array_equal(steering_rx(pos, 20, 0.0), np.ones(4))
        np.testing.assert_array_equal(steering_virtual(pos, 20, 0.0), np.ones(12))

    def test_rx_closed_form(self):
        pos = ElementPositions(xi=[0.0], zeta=[-0.5, 0.5])
        np.testing.assert_allclose(steering_rx(pos, 2, 0.5), [-1j, 1j], atol=1e-15)

    def test_tx_closed_form(self):
        pos = ElementPositions(xi=[0.25], zeta=[0.0])
        np.testing.assert_allclose(steering_tx(pos, 4, 1.0), [-1.0], atol=1e-15)

    def test_transceiver_tx_equals_rx(self):
        pos = sample_positions(ArrayConfig(5, 5, 30, mode=TRANSCEIVER), 3)
        np.testing.assert_array_equal(steering_tx(pos, 30, 0.3), steering_rx(pos, 30, 0.3))

    def test_virtual_index_ordering(self):
        # entry N*m + n (zero-based) holds exp(j pi Z theta (xi_m + zeta_n))
        pos = ElementPositions(xi=[0.1, -0.3], zeta=[0.2, 0.45])
        a = steering_virtual(pos, 7, 0.6)
        for m in range(2):
            for n in range(2):
                expect = np.exp(1j * np.pi * 7 * 0.6 * (pos.xi[m] + pos.zeta[n]))
                assert a[2 * m + n] == pytest.approx(expect, abs=1e-14)

    def test_array_theta(self):
        pos = sample_positions(ArrayConfig(2, 3, 10), 0)
        theta = np.array([-0.5, 0.0, 0.7])
        V = steering_virtual(pos, 10, theta)
        assert V.shape == (6, 3)
        np.testing.assert_allclose(V[:, 2], steering_virtual(pos, 10, 0.7))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 6), st.integers(1, 6), st.floats(-1, 1), st.integers(0, 2**31))
    def test_kronecker_and_unit_modulus(self, M, N, theta, seed):
        pos = sample_positions(ArrayConfig(M, N, 40), seed)
        a = steering_virtual(pos, 40, theta)
        np.testing.assert_allclose(a, np.kron(steering_tx(pos, 40, theta),
                                              steering_rx(pos, 40, theta)), atol=1e-13)
        np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-13)
        assert np.vdot(a, a).real == pytest.approx(M * N, rel=1e-12)


def test_nyquist_array_spans_full_aperture():
    cfg, pos, grid = nyquist_array(3, 4)
    assert grid.G == 12
    assert np.max(np.abs(np.concatenate([pos.xi, pos.zeta]))) <= 1.0
