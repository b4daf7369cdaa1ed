import numpy as np
import pytest

from mimocs.geometry import ArrayConfig, ConfigurationError, canonical_grid, nyquist_array
from mimocs.geometry import sample_positions, steering_virtual
from mimocs.model import (Scene, build_matrix, fourier_codes, observe, sigma_from_snr,
                          snr_from_sigma, synthesize_scene, waveform_roundtrip_check)
from mimocs.serialize import read_complex_csv, write_complex_csv


def _matrix(M=3, N=4, Z=50, seed=0, normalized=False):
    cfg = ArrayConfig(M, N, Z)
    return build_matrix(cfg, sample_positions(cfg, seed), canonical_grid(Z), normalized)


class TestBuildMatrix:
    def test_nyquist_gram_is_scaled_identity(self):
        cfg, pos, grid = nyquist_array(4, 5)
        A = build_matrix(cfg, pos, grid).entries
        np.testing.assert_allclose(A.conj().T @ A, 20 * np.eye(20), atol=1e-10)

    def test_column_norms(self):
        raw, unit = _matrix(), _matrix(normalized=True)
        np.testing.assert_allclose(raw.column_norms() ** 2, 12.0)
        np.testing.assert_allclose(unit.column_norms(), 1.0)
        np.testing.assert_allclose(raw.as_normalized().entries, unit.entries)

    def test_columns_are_virtual_steering(self):
        A = _matrix()
        g = 17
        np.testing.assert_allclose(A.entries[:, g],
                                   steering_virtual(A.positions, 50, A.grid.phi[g]))

    def test_single_element(self):
        A = _matrix(M=1, N=1)
        assert A.shape == (1, 51)
        np.testing.assert_allclose(np.abs(A.entries), 1.0)

    def test_dimension_mismatch(self):
        pos = sample_positions(ArrayConfig(2, 2, 10), 0)
        with pytest.raises(ConfigurationError):
            build_matrix(ArrayConfig(3, 2, 10), pos, canonical_grid(10))


class TestScene:
    def test_reference_settings(self):
        s = synthesize_scene(canonical_grid(250), 5, 1, 3)
        assert s.K == 5 and len(set(s.support)) == 5
        assert np.all(np.diff(s.support) > 0) and s.support.max() < 251
        np.testing.assert_allclose(np.abs(s.gains), 1.0)

    def test_empty(self):
        s = synthesize_scene(51, 0, 1, 0)
        assert s.K == 0 and not np.any(s.X)

    def test_swerling_phases_vary_per_pulse(self):
        s = synthesize_scene(51, 3, 5, 0)
        assert s.gains.shape == (3, 5)
        assert np.all(np.abs(np.diff(s.gains, axis=1)) > 0)

    def test_too_many_targets(self):
        with pytest.raises(ConfigurationError):
            synthesize_scene(10, 11)

    def test_scene_sorts_and_validates(self):
        s = Scene([5, 2], [1.0, 2.0], 10)
        np.testing.assert_array_equal(s.support, [2, 5])
        np.testing.assert_array_equal(s.gains[:, 0], [2.0, 1.0])
        with pytest.raises(ConfigurationError):
            Scene([1, 1], [1, 1], 10)


class TestSnr:
    def test_values(self):
        assert sigma_from_snr(20) ** 2 == pytest.approx(0.01)
        assert sigma_from_snr(0) == 1.0
        assert sigma_from_snr(-10) ** 2 == pytest.approx(10.0)
        assert snr_from_sigma(sigma_from_snr(13.5)) == pytest.approx(13.5)


class TestObserve:
    def test_noise_free_single_target(self):
        A = _matrix(normalized=True)
        s = Scene([9], [1.0], 51)
        Y = observe(A, s, 0.0, 0).Y
        np.testing.assert_allclose(Y[:, 0], A.entries[:, 9])

    def test_noise_power(self):
        # oracle: E|e|^2 = sigma^2 for circular complex Gaussian noise
        A = np.zeros((100_000, 1))
        Y = observe(A, Scene([], np.zeros((0, 1)), 1), 0.1, 5).Y
        assert np.mean(np.abs(Y) ** 2) == pytest.approx(0.01, rel=0.02)
        assert np.var(Y.real) == pytest.approx(np.var(Y.imag), rel=0.03)

    def test_empirical_snr_within_tenth_db(self):
        A = np.zeros((1_000_000, 1))
        Y = observe(A, Scene([], np.zeros((0, 1)), 1), sigma_from_snr(20.0), 1).Y
        assert abs(-10 * np.log10(np.mean(np.abs(Y) ** 2)) - 20.0) <= 0.1

    def test_linear_in_x_without_noise(self):
        A = _matrix(normalized=True)
        s1 = Scene([3, 8], [1.0, 1j], 51)
        s2 = Scene([3, 8], [2.0, 2j], 51)
        np.testing.assert_allclose(observe(A, s2, 0).Y, 2 * observe(A, s1, 0).Y)

    def test_independent_pulses(self):
        A = _matrix(normalized=True)
        Y = observe(A, synthesize_scene(51, 2, 5, 0), 0.1, 0).Y
        assert Y.shape == (12, 5)
        assert not np.allclose(Y[:, 0], Y[:, 1])

    def test_nyquist_beamformer_inverts(self):
        cfg, pos, grid = nyquist_array(3, 3)
        A = build_matrix(cfg, pos, grid)
        s = synthesize_scene(grid, 4, 2, 0)
        Y = observe(A, s, 0.0).Y
        np.testing.assert_allclose(A.entries.conj().T @ Y / 9, s.X, atol=1e-12)


class TestRoundtrip:
    @pytest.mark.parametrize("M", [1, 2, 4, 8])
    def test_exact(self, M):
        pos = sample_positions(ArrayConfig(M, 3, 50), M)
        X = synthesize_scene(51, 2, 1, M).X
        rep = waveform_roundtrip_check(pos, 50, canonical_grid(50), X)
        assert rep.ok and rep.max_deviation <= 1e-10

    def test_raw_codes_reported(self):
        pos = sample_positions(ArrayConfig(4, 3, 50), 0)
        X = synthesize_scene(51, 2, 1, 0).X
        rep = waveform_roundtrip_check(pos, 50, canonical_grid(50), X, fourier_codes(4, False))
        np.testing.assert_allclose(rep.W, 4 * np.eye(4), atol=1e-12)
        assert rep.gram_deviation == pytest.approx(3.0)
        assert not rep.ok

    def test_normalized_codes_unitary(self):
        S = fourier_codes(6)
        np.testing.assert_allclose(S @ S.conj().T, np.eye(6), atol=1e-14)


def test_complex_csv_roundtrip(tmp_path):
    a = np.random.default_rng(0).standard_normal((4, 3)) * (1 + 2j)
    path = tmp_path / "a.csv"
    write_complex_csv(path, a)
    assert path.read_text().splitlines()[0] == "4,3"
    np.testing.assert_array_equal(read_complex_csv(path), a)


def test_complex_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x\n1,2\n")
    with pytest.raises(ValueError):
        read_complex_csv(path)
