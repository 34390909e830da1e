import math

import numpy as np
import pytest
from scipy import stats

from softnull.channels import (
    ChannelSet,
    SiChannelParams,
    coupling_map,
    eigenvalue_concentration,
    geometric_self_interference,
    rayleigh_channel,
)
from softnull.geometry import ArrayGeometry, Partition, east_west

from conftest import crandn


@pytest.fixture
def geom():
    return ArrayGeometry()


@pytest.fixture
def ew(geom):
    return east_west(geom, 36)


class TestGeometricSelfInterference:
    def test_pitch_coupling_anchor(self):
        g = ArrayGeometry(1, 2)
        part = Partition([0], [1], 2)
        h = geometric_self_interference(g, part, SiChannelParams(g.wavelength, math.inf, -15.0))
        assert abs(h[0, 0]) == pytest.approx(10 ** (-15 / 20), rel=1e-12)

    def test_inverse_distance(self):
        g = ArrayGeometry(1, 3)
        part = Partition([0], [1, 2], 3)
        h = geometric_self_interference(g, part, SiChannelParams(g.wavelength, math.inf))
        assert abs(h[0, 0]) / abs(h[1, 0]) == pytest.approx(2.0, rel=1e-12)

    def test_los_phase(self, geom, ew):
        h = geometric_self_interference(geom, ew, SiChannelParams(geom.wavelength, math.inf))
        pos = geom.positions
        r, t = ew.rx_indices[3], ew.tx_indices[7]
        d = np.linalg.norm(pos[r] - pos[t])
        expected = 10 ** (-15 / 20) * geom.spacing / d * np.exp(-2j * np.pi * d / geom.wavelength)
        assert h[3, 7] == pytest.approx(expected, rel=1e-12)

    def test_shape_and_determinism(self, geom, ew):
        p = SiChannelParams(geom.wavelength, 1.0, seed=4)
        h1 = geometric_self_interference(geom, ew, p)
        h2 = geometric_self_interference(geom, ew, p)
        assert h1.shape == (36, 36)
        assert np.array_equal(h1, h2)

    def test_mixture_power_preserved(self, geom, ew):
        los = geometric_self_interference(geom, ew, SiChannelParams(geom.wavelength, math.inf))
        ratios = []
        for s in range(40):
            h = geometric_self_interference(geom, ew, SiChannelParams(geom.wavelength, 1.0, seed=s))
            ratios.append(np.mean(np.abs(h) ** 2) / np.mean(np.abs(los) ** 2))
        # LOS and scatter carry equal mean power, mixed with weights summing to one
        assert np.mean(ratios) == pytest.approx(1.0, abs=0.02)

    def test_kappa_zero_is_complex_gaussian(self, geom, ew):
        los = geometric_self_interference(geom, ew, SiChannelParams(geom.wavelength, math.inf))
        scale = np.mean(np.abs(los) ** 2)
        samples = np.concatenate([
            geometric_self_interference(geom, ew, SiChannelParams(geom.wavelength, 0.0, seed=s)).ravel()
            for s in range(8)
        ])
        assert samples.size >= 10_000
        sd = math.sqrt(scale / 2)
        assert stats.kstest(samples.real / sd, "norm").pvalue > 0.01
        assert stats.kstest(samples.imag / sd, "norm").pvalue > 0.01
        assert stats.kstest(np.abs(samples) ** 2 / scale, "expon").pvalue > 0.01

    def test_coincident_elements_rejected(self):
        g = ArrayGeometry(1, 2)
        object.__setattr__(g, "positions", np.zeros((2, 3)))
        with pytest.raises(ValueError):
            geometric_self_interference(g, Partition([0], [1], 2), SiChannelParams(0.1, math.inf))

    def test_bad_params(self):
        with pytest.raises(ValueError):
            SiChannelParams(wavelength=0.0)
        with pytest.raises(ValueError):
            SiChannelParams(wavelength=0.1, backscatter_ratio=-1.0)

    def test_more_backscatter_less_concentration(self, geom, ew):
        def mean_conc(kappa, n):
            return np.mean([
                eigenvalue_concentration(
                    geometric_self_interference(geom, ew, SiChannelParams(geom.wavelength, kappa, seed=s)), n)
                for s in range(50)
            ])

        for n in (1, 3, 8, 16, 30, 35):
            assert mean_conc(100.0, n) > mean_conc(1.0, n)


class TestRayleigh:
    def test_unit_power(self):
        h = rayleigh_channel(100, 1000, 0.0, seed=1)
        assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.02)

    def test_path_loss_scaling(self):
        h = rayleigh_channel(100, 1000, 80.0, seed=1)
        assert np.mean(np.abs(h) ** 2) == pytest.approx(1e-8, rel=0.02)

    def test_deterministic(self):
        assert np.array_equal(rayleigh_channel(3, 4, 10.0, 9), rayleigh_channel(3, 4, 10.0, 9))

    def test_seeds_independent(self):
        a = rayleigh_channel(100, 1000, 0.0, seed=1).ravel()
        b = rayleigh_channel(100, 1000, 0.0, seed=2).ravel()
        corr = abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
        assert corr < 0.05

    def test_negative_path_loss(self):
        with pytest.raises(ValueError):
            rayleigh_channel(2, 2, -1.0)


class TestCouplingMap:
    def test_anchor(self):
        assert coupling_map([[10 ** (-15 / 20)]])[0, 0] == pytest.approx(-15.0)

    def test_zero(self):
        assert coupling_map([[0.0]])[0, 0] == -np.inf

    def test_unit(self):
        assert coupling_map([[1j]])[0, 0] == 0.0


class TestEigenvalueConcentration:
    def test_diag(self):
        assert eigenvalue_concentration(np.diag([2.0, 1.0, 1.0]), 1) == pytest.approx(4 / 6)

    def test_full(self):
        h = crandn(np.random.default_rng(0), 4, 3)
        assert eigenvalue_concentration(h, 3) == pytest.approx(1.0)

    def test_rank_one(self):
        rng = np.random.default_rng(1)
        h = np.outer(crandn(rng, 5), crandn(rng, 4))
        assert eigenvalue_concentration(h, 1) == pytest.approx(1.0)

    def test_range(self):
        with pytest.raises(ValueError):
            eigenvalue_concentration(np.eye(3), 4)


class TestChannelSet:
    def test_default_h_usr(self):
        cs = ChannelSet(np.zeros((3, 2)), np.zeros((3, 1)), np.zeros((2, 2)))
        assert cs.h_usr.shape == (2, 1) and not np.any(cs.h_usr)
        assert cs.dims == (3, 2, 1, 2)

    def test_inconsistent(self):
        with pytest.raises(ValueError):
            ChannelSet(np.zeros((3, 2)), np.zeros((2, 1)), np.zeros((2, 2)))
