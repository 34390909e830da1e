import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from softnull.errors import CapabilityError, RankError
from softnull.numerics import hermitian, random_orthonormal_columns
from softnull.precoding import (
    decorrelator,
    effective_channel,
    matched_filter_precoder,
    per_antenna_suppression_db,
    softnull_precoder,
    suppression_db,
    suppression_profile,
    zf_precoder,
)

from conftest import crandn

seeds = st.integers(0, 2**32 - 1)


def smallest_sq_eigs(h, d):
    # independent oracle: eigenvalues of the Gram matrix are the squared singular values
    ev = np.linalg.eigvalsh(hermitian(h) @ h)
    return float(np.sum(np.clip(ev[:d], 0.0, None)))


def projector(p):
    return p @ hermitian(p)


class TestSoftNullPrecoder:
    def test_identity(self):
        pre = softnull_precoder(np.eye(3), 3)
        assert pre.residual_power == pytest.approx(3.0)
        assert np.allclose(hermitian(pre.p_self) @ pre.p_self, np.eye(3))

    def test_diagonal(self):
        pre = softnull_precoder(np.diag([3.0, 2.0, 1.0]), 1)
        assert pre.residual_power == pytest.approx(1.0)
        assert np.allclose(np.abs(pre.p_self[:, 0]), [0.0, 0.0, 1.0])

    def test_random_seed3_against_oracles(self):
        h = crandn(np.random.default_rng(3), 6, 6)
        pre = softnull_precoder(h, 2)
        assert pre.residual_power == pytest.approx(smallest_sq_eigs(h, 2), rel=1e-9)
        q = random_orthonormal_columns(6, 2, seed=33, batch=100_000)
        objectives = np.sum(np.abs(h @ q) ** 2, axis=(1, 2))
        assert pre.residual_power <= objectives.min()

    def test_wide_channel_has_null_space(self):
        h = crandn(np.random.default_rng(4), 2, 5)
        pre = softnull_precoder(h, 3)
        assert pre.residual_power < 1e-20
        assert pre.sigma.shape == (5,)

    @pytest.mark.parametrize("d_tx", [0, 4, -1])
    def test_range(self, d_tx):
        with pytest.raises(ValueError):
            softnull_precoder(np.eye(3), d_tx)

    @settings(max_examples=60, deadline=None)
    @given(m_rx=st.integers(1, 8), m_tx=st.integers(1, 8), seed=seeds, data=st.data())
    def test_optimal_residual_and_orthonormal(self, m_rx, m_tx, seed, data):
        d = data.draw(st.integers(1, m_tx))
        h = crandn(np.random.default_rng(seed), m_rx, m_tx)
        pre = softnull_precoder(h, d)
        gram = hermitian(pre.p_self) @ pre.p_self
        assert np.linalg.norm(gram - np.eye(d)) < 1e-10
        expected = smallest_sq_eigs(h, d)
        # absolute floor covers null-space modes, where both sides are roundoff
        assert abs(pre.residual_power - expected) <= 1e-9 * expected + 1e-12 * np.sum(np.abs(h) ** 2)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, c_re=st.floats(-50, 50), c_im=st.floats(-50, 50), data=st.data())
    def test_scaling_equivariance(self, seed, c_re, c_im, data):
        c = complex(c_re, c_im)
        if abs(c) < 1e-3:
            c = 1.0 + 0.5j
        h = crandn(np.random.default_rng(seed), 5, 4)
        d = data.draw(st.integers(1, 4))
        pa = softnull_precoder(h, d).p_self
        pb = softnull_precoder(c * h, d).p_self
        assert np.linalg.norm(projector(pa) - projector(pb)) < 1e-9

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, m_rx=st.integers(1, 7), m_tx=st.integers(1, 7))
    def test_residual_monotone(self, seed, m_rx, m_tx):
        h = crandn(np.random.default_rng(seed), m_rx, m_tx)
        res = [softnull_precoder(h, d).residual_power for d in range(1, m_tx + 1)]
        assert all(b >= a - 1e-12 for a, b in zip(res, res[1:]))


class TestSuppression:
    def test_identity_hand_value(self):
        pre = softnull_precoder(np.eye(3), 3)
        assert suppression_db(np.eye(3), pre, 3) == pytest.approx(10 * math.log10(3), abs=1e-12)

    def test_rank_deficient_gives_inf(self):
        rng = np.random.default_rng(6)
        h = crandn(rng, 3, 2) @ crandn(rng, 2, 3)
        assert suppression_db(h, softnull_precoder(h, 1), 3) == math.inf

    def test_dimension_check(self):
        pre = softnull_precoder(np.eye(3), 2)
        with pytest.raises(ValueError):
            suppression_db(np.eye(3), pre, 4)

    def test_per_antenna_average(self):
        h = crandn(np.random.default_rng(7), 4, 5)
        pre = softnull_precoder(h, 3)
        pa = per_antenna_suppression_db(h, pre)
        linear = np.mean(10 ** (-pa / 10))
        assert -10 * np.log10(linear) == pytest.approx(suppression_db(h, pre), abs=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, m_rx=st.integers(1, 8), m_tx=st.integers(1, 8))
    def test_monotone_non_increasing(self, seed, m_rx, m_tx):
        h = crandn(np.random.default_rng(seed), m_rx, m_tx)
        s = [suppression_db(h, softnull_precoder(h, d)) for d in range(1, m_tx + 1)]
        assert all(b <= a + 1e-9 for a, b in zip(s, s[1:]))

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, m_rx=st.integers(1, 7), m_tx=st.integers(1, 7))
    def test_profile_matches_pointwise(self, seed, m_rx, m_tx):
        h = crandn(np.random.default_rng(seed), m_rx, m_tx)
        ds = list(range(1, m_tx + 1))
        pa, mean = suppression_profile(h, ds)
        for i, d in enumerate(ds):
            pre = softnull_precoder(h, d)
            ref = suppression_db(h, pre)
            if math.isinf(ref):
                assert math.isinf(mean[i])
            else:
                assert mean[i] == pytest.approx(ref, abs=1e-7)
            ref_pa = per_antenna_suppression_db(h, pre)
            finite = np.isfinite(ref_pa) & np.isfinite(pa[i])
            assert np.allclose(pa[i][finite], ref_pa[finite], atol=1e-6)


class TestEffectiveChannel:
    def test_identity(self):
        h = crandn(np.random.default_rng(0), 2, 4)
        assert np.array_equal(effective_channel(h, np.eye(4)), h)

    def test_zero(self):
        assert not np.any(effective_channel(np.zeros((2, 4)), np.eye(4)[:, :2]))

    def test_random_seed5(self):
        rng = np.random.default_rng(5)
        h, p = crandn(rng, 3, 6), crandn(rng, 6, 4)
        direct = np.einsum("ik,kj->ij", h, p)
        assert np.max(np.abs(effective_channel(h, p) - direct)) < 1e-12

    def test_mismatch(self):
        with pytest.raises(ValueError):
            effective_channel(np.zeros((2, 3)), np.zeros((4, 2)))


class TestZeroForcing:
    def test_identity(self):
        assert np.allclose(zf_precoder(np.eye(2), 2.0), np.eye(2))

    def test_diagonal(self):
        h = np.diag([2.0, 1.0])
        g = h @ zf_precoder(h, 3.0)
        assert abs(g[0, 1]) < 1e-12 and abs(g[1, 0]) < 1e-12
        assert g[0, 0] == pytest.approx(g[1, 1])

    def test_random_seed9(self):
        h = crandn(np.random.default_rng(9), 2, 4)
        p = zf_precoder(h, 0.7)
        g = h @ p
        diag = np.abs(np.diag(g))
        assert np.max(np.abs(g - np.diag(np.diag(g)))) < 1e-9 * diag.min()
        assert np.sum(np.abs(p) ** 2) == pytest.approx(0.7, rel=1e-9)

    def test_too_many_users(self):
        with pytest.raises(CapabilityError):
            zf_precoder(np.ones((3, 2)), 1.0)

    def test_rank_deficient(self):
        with pytest.raises(RankError):
            zf_precoder(np.array([[1.0, 2.0], [2.0, 4.0]]), 1.0)


class TestMatchedFilter:
    def test_single_user_direction(self):
        h = crandn(np.random.default_rng(1), 1, 5)
        p = matched_filter_precoder(h, 2.0)
        assert np.allclose(p / np.linalg.norm(p), hermitian(h) / np.linalg.norm(h))
        assert np.sum(np.abs(p) ** 2) == pytest.approx(2.0)

    def test_identity_matches_zf(self):
        assert np.allclose(matched_filter_precoder(np.eye(3), 3.0), zf_precoder(np.eye(3), 3.0))

    def test_beats_sampled_beams(self):
        rng = np.random.default_rng(2)
        h = crandn(rng, 3, 6)
        p = matched_filter_precoder(h, 1.0)
        beams = crandn(rng, 10_000, 6)
        beams /= np.linalg.norm(beams, axis=1, keepdims=True)
        for j in range(3):
            mf_gain = abs(h[j] @ (p[:, j] / np.linalg.norm(p[:, j]))) ** 2
            assert mf_gain >= np.max(np.abs(beams @ h[j]) ** 2) - 1e-12

    def test_zero_channel(self):
        with pytest.raises(ValueError):
            matched_filter_precoder(np.zeros((1, 2)), 1.0)


class TestDecorrelator:
    def test_identity(self):
        assert np.allclose(decorrelator(np.eye(3)), np.eye(3))

    def test_scaled(self):
        assert np.allclose(decorrelator(2 * np.eye(2)), 0.5 * np.eye(2))

    def test_random_seed13(self):
        h = crandn(np.random.default_rng(13), 6, 3)
        assert np.max(np.abs(decorrelator(h) @ h - np.eye(3))) < 1e-10

    def test_capability(self):
        with pytest.raises(CapabilityError):
            decorrelator(np.ones((2, 3)))

    def test_rank(self):
        with pytest.raises(RankError):
            decorrelator(np.ones((4, 2)))
