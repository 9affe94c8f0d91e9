import math

import numpy as np
import pytest
from scipy import stats

from matprod.core import ChainParams, ConstraintError, interlaces
from matprod.haar import (MatrixSample, RngState, sample_haar,
                          sample_product_chain, sample_product_chains,
                          squared_singular_values, truncate)
from matprod.jack import jack_eval_many, jack_moment, jack_principal

GROUPS = ("orthogonal", "unitary", "symplectic")


class TestRngState:
    def test_reproducible(self):
        a = RngState(42, 1).generator().standard_normal(5)
        b = RngState(42, 1).generator().standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = RngState(42, 0).generator().standard_normal(5)
        b = RngState(42, 1).generator().standard_normal(5)
        assert not np.allclose(a, b)


class TestSampleHaar:
    @pytest.mark.parametrize("group,m", [("orthogonal", 3), ("orthogonal", 64),
                                         ("unitary", 5), ("unitary", 32),
                                         ("symplectic", 2), ("symplectic", 16)])
    def test_unitarity(self, group, m):
        s = sample_haar(group, m, RngState(1))
        e = s.entries
        resid = np.max(np.abs(e.conj().T @ e - np.eye(e.shape[0])))
        assert resid <= 1e-10

    def test_unitary_m1_unimodular(self):
        s = sample_haar("unitary", 1, RngState(2))
        assert math.isclose(abs(s.entries[0, 0]), 1.0, rel_tol=1e-12)

    def test_symplectic_structure(self):
        m = 3
        s = sample_haar("symplectic", m, RngState(3)).entries
        j = np.kron(np.eye(m), np.array([[0.0, 1.0], [-1.0, 0.0]]))
        resid = np.max(np.abs(j @ s.conj() @ np.linalg.inv(j) - s))
        assert resid <= 1e-12

    def test_orthogonal_entry_arcsine_law(self):
        # S_{11} of Haar O(2) has density 1/(pi sqrt(1-x^2)); this pins the
        # QR phase fix (naive QR is visibly non-Haar here)
        from matprod.haar import _sample_haar_batch
        n = 100000
        samples = _sample_haar_batch("orthogonal", 2, n, RngState(4).generator())
        vals = samples[:, 0, 0]
        res = stats.kstest(vals, lambda t: np.arcsin(t) / np.pi + 0.5)
        assert res.pvalue > 0.01

    def test_second_moment_left_invariance(self):
        from matprod.haar import _sample_haar_batch
        m, n = 4, 40000
        s = _sample_haar_batch("unitary", m, n, RngState(5).generator())
        mom = np.mean(np.abs(s) ** 2, axis=0)
        se = 1.0 / m / math.sqrt(n)
        assert np.max(np.abs(mom - 1.0 / m)) <= 4 * se


class TestTruncate:
    def test_full_truncation_is_identity(self):
        s = sample_haar("unitary", 4, RngState(6))
        t = truncate(s, 4, 4)
        np.testing.assert_array_equal(t.entries, s.entries)

    def test_scalar_truncation_contraction(self):
        s = sample_haar("unitary", 5, RngState(7))
        t = truncate(s, 1, 1)
        assert abs(t.entries[0, 0]) <= 1.0

    def test_symplectic_block_shape(self):
        s = sample_haar("symplectic", 4, RngState(8))
        t = truncate(s, 2, 3)
        assert t.entries.shape == (4, 6)

    def test_out_of_range(self):
        s = sample_haar("orthogonal", 3, RngState(9))
        with pytest.raises(ValueError):
            truncate(s, 4, 1)


class TestSquaredSingularValues:
    def test_identity_matrix(self):
        t = MatrixSample(entries=np.eye(3), group="unitary", rows=3, cols=3)
        np.testing.assert_allclose(squared_singular_values(t), np.ones(3))

    def test_scalar(self):
        t = MatrixSample(entries=np.array([[0.5]]), group="unitary", rows=1, cols=1)
        np.testing.assert_allclose(squared_singular_values(t), [0.25])

    @pytest.mark.parametrize("m", [4, 8])
    def test_kramers_doubling(self, m):
        # the collapse helper raises if any pair gap exceeds 1e-8
        from matprod.haar import _sample_haar_batch, _collapse_kramers
        s = _sample_haar_batch("symplectic", m, 10000, RngState(10).generator())
        t = s[:, : 2 * (m - 1), : 2 * (m - 1)]
        ev = np.linalg.eigvalsh(np.swapaxes(t.conj(), -2, -1) @ t)
        collapsed = _collapse_kramers(ev)
        assert collapsed.shape == (10000, m - 1)


class TestProductChain:
    def test_requires_matrix_theta(self):
        params = ChainParams(theta=1.5, n=1, p=1, m=(3,), nu=(0, 0))
        with pytest.raises(ConstraintError):
            sample_product_chain(params, RngState(11))

    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
    def test_trajectories_interlace(self, theta):
        params = ChainParams(theta=theta, n=2, p=3, m=(7, 4, 5),
                             nu=(0, 1, 1, 2))
        trajs = sample_product_chains(params, 200, RngState(12))
        for t in trajs:
            assert interlaces(t[1], t[0])
            assert interlaces(t[2], t[1])

    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
    def test_mean_matches_moment_formula(self, theta):
        params = ChainParams(theta=theta, n=2, p=2, m=(6, 4), nu=(0, 1, 1))
        n_samp = 30000
        trajs = sample_product_chains(params, n_samp, RngState(13))
        vals = trajs[:, -1, :].mean(axis=1)
        want = jack_moment((1,), params)
        se = vals.std() / math.sqrt(n_samp)
        assert abs(vals.mean() - want) <= 3 * se

    def test_p1_single_config(self):
        params = ChainParams(theta=1.0, n=2, p=1, m=(6,), nu=(0, 1))
        traj = sample_product_chain(params, RngState(14))
        assert len(traj) == 1 and traj[0].size == 2

    @pytest.mark.parametrize("theta,kappa", [(0.5, (2,)), (1.0, (1, 1)),
                                             (2.0, (2,))])
    def test_higher_jack_moments(self, theta, kappa):
        params = ChainParams(theta=theta, n=2, p=2, m=(6, 4), nu=(0, 1, 1))
        n_samp = 30000
        trajs = sample_product_chains(params, n_samp, RngState(15))
        vals = jack_eval_many(kappa, trajs[:, -1, :], theta) \
            / jack_principal(kappa, 2, theta)
        want = jack_moment(kappa, params)
        se = vals.std() / math.sqrt(n_samp)
        assert abs(vals.mean() - want) <= 3 * se
