import math

import numpy as np
import pytest
from scipy import stats

from helpers import matrix_transition, two_sample_ks_all_coords
from matprod.core import ChainParams
from matprod.crystal import crystal_chain, crystal_step, jacobi_crystal
from matprod.density import JacobiParams, KernelParams, selberg_jack_average
from matprod.haar import RngState, sample_product_chains
from matprod.jack import jack_eval_many, jack_moment, jack_principal
from matprod.sampler import (GibbsSettings, ParameterRegimeWarning,
                             sample_chain_beta, sample_jacobi_beta,
                             sample_kernel_beta)

FAST = GibbsSettings(burn_in=40, sweeps=5, rng=RngState(0))


class TestJacobiBeta:
    def test_n1_exact_beta_law(self):
        jp = JacobiParams(n=1, m=5, nu=1, theta=0.7)
        d = sample_jacobi_beta(jp, GibbsSettings(rng=RngState(1)), size=20000)[:, 0]
        th = jp.theta
        res = stats.kstest(d, stats.beta(th * 2, th * 3).cdf)
        assert res.pvalue > 0.01

    def test_single_draw_shape(self):
        jp = JacobiParams(n=2, m=6, nu=0, theta=1.0)
        d = sample_jacobi_beta(jp, FAST)
        assert d.shape == (2,) and np.all(np.diff(d) > 0)

    def test_moment_vs_selberg_average(self):
        theta, n, m, nu = 2.0, 2, 6, 1
        jp = JacobiParams(n=n, m=m, nu=nu, theta=theta)
        d = sample_jacobi_beta(jp, GibbsSettings(burn_in=60, sweeps=5,
                                                 rng=RngState(2)), size=20000)
        vals = jack_eval_many((1,), d, theta) / jack_principal((1,), n, theta)
        # the Kadell average returns E[J_kappa]; normalize by J_kappa(1^n)
        want = selberg_jack_average((1,), n, theta * (nu + 1) - 1,
                                    theta * (m - 2 * n - nu + 1) - 1, theta) \
            / jack_principal((1,), n, theta)
        se = vals.std() / math.sqrt(d.shape[0])
        assert abs(vals.mean() - want) <= 3 * se

    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
    def test_two_sample_vs_matrix_model(self, theta):
        n, m, nu = 2, 6, 1
        jp = JacobiParams(n=n, m=m, nu=nu, theta=theta)
        d = sample_jacobi_beta(jp, GibbsSettings(burn_in=60, sweeps=5,
                                                 rng=RngState(3)), size=15000)
        params = ChainParams(theta=theta, n=n, p=1, m=(m,), nu=(0, nu))
        mm = sample_product_chains(params, 15000, RngState(4))[:, 0, :]
        ok, pvals = two_sample_ks_all_coords(d, mm, level=0.01)
        assert ok, pvals

    def test_debug_mode_runs(self):
        jp = JacobiParams(n=2, m=6, nu=0, theta=1.0)
        sample_jacobi_beta(jp, GibbsSettings(burn_in=3, sweeps=2, debug=True,
                                             rng=RngState(5)), size=10)

    def test_grid_floor_enforced(self):
        with pytest.raises(ValueError):
            GibbsSettings(grid=32).validate()


class TestKernelBeta:
    def test_n1_mean(self):
        kp = KernelParams(n=1, nu=2, theta=1.3)
        d = sample_kernel_beta([0.6], kp, GibbsSettings(rng=RngState(6)),
                               size=30000)[:, 0]
        se = d.std() / math.sqrt(d.size)
        assert abs(d.mean() - 0.6 * 3 / 4) <= 3 * se

    def test_support_interlaces_exactly(self):
        x = np.array([0.3, 0.7])
        kp = KernelParams(n=2, nu=1, theta=0.7)
        d = sample_kernel_beta(x, kp, FAST, size=2000)
        assert np.all(d[:, 0] >= 0) and np.all(d[:, 0] <= x[0])
        assert np.all(d[:, 1] >= x[0]) and np.all(d[:, 1] <= x[1])

    @pytest.mark.parametrize("theta,nu", [(0.5, 0), (1.0, 1), (2.0, 2)])
    def test_two_sample_vs_matrix_transition(self, theta, nu):
        x = np.array([0.35, 0.8])
        kp = KernelParams(n=2, nu=nu, theta=theta)
        d = sample_kernel_beta(x, kp, GibbsSettings(burn_in=40, sweeps=5,
                                                    rng=RngState(7)), size=15000)
        mm = matrix_transition(x, nu, theta, 15000, RngState(8))
        ok, pvals = two_sample_ks_all_coords(d, mm, level=0.01)
        assert ok, pvals

    def test_degenerate_x_rejected(self):
        kp = KernelParams(n=2, nu=0, theta=1.0)
        with pytest.raises(ValueError):
            sample_kernel_beta([0.4, 0.4], kp, FAST)


class TestChainBeta:
    def test_low_nu_warns(self):
        params = ChainParams(theta=1.0, n=1, p=2, m=(3, 3), nu=(0, 0, 1))
        with pytest.warns(ParameterRegimeWarning):
            sample_chain_beta(params, "jacobi", FAST, size=4)

    def test_jacobi_start_moment(self):
        theta = 1.0
        params = ChainParams(theta=theta, n=2, p=3, m=(6, 4, 5), nu=(0, 1, 1, 2))
        with pytest.warns(ParameterRegimeWarning):
            traj = sample_chain_beta(params, "jacobi",
                                     GibbsSettings(burn_in=50, sweeps=5,
                                                   rng=RngState(9)), size=12000)
        vals = jack_eval_many((1,), traj[:, -1, :], theta) / 2.0
        want = jack_moment((1,), params)
        se = vals.std() / math.sqrt(traj.shape[0])
        assert abs(vals.mean() - want) <= 3 * se

    @pytest.mark.parametrize("theta,kappa", [(0.7, (1,)), (0.7, (2,)),
                                             (1.5, (1,)), (1.5, (2,))])
    def test_factorization_identity(self, theta, kappa):
        # one kernel step from a deterministic state: E[J_k(y)/J_k(1^n)] =
        # J_k(x)/J_k(1^n) * E[J_k(u1, 1^{n-1})/J_k(1^n)], u1 ~ 1-d Jacobi
        from matprod._quad import cell_nodes
        n, nu = 2, 2
        x = np.array([0.4, 0.85])
        kp = KernelParams(n=n, nu=nu, theta=theta)
        d = sample_kernel_beta(x, kp, GibbsSettings(burn_in=40, sweeps=5,
                                                    rng=RngState(10)), size=20000)
        norm = jack_principal(kappa, n, theta)
        vals = jack_eval_many(kappa, d, theta) / norm
        # right-hand side by quadrature over the 1-d Jacobi law (m = n+nu+1)
        m1 = n + nu + 1
        p = theta * (nu + 1) - 1
        q = theta * (m1 - nu - 1) - 1
        u, w = cell_nodes(0.0, 1.0, p, q, 48, 14)
        dens = u ** 0  # weight absorbed in rule
        pts = np.column_stack([u, np.ones_like(u)])
        ju = jack_eval_many(kappa, pts, theta) / norm
        mass = float(np.dot(w, dens))
        rhs_u = float(np.dot(w, ju)) / mass
        want = jack_eval_many(kappa, x[None, :], theta)[0] / norm * rhs_u
        se = vals.std() / math.sqrt(d.shape[0])
        assert abs(vals.mean() - want) <= 3 * se, (vals.mean(), want)

    def test_large_beta_concentrates_at_crystal(self):
        beta = 1e4
        x1 = np.array([0.3, 0.75])
        params = ChainParams(theta=beta / 2, n=2, p=3, m=(8, 5, 6),
                             nu=(0, 1, 2, 3))
        traj = sample_chain_beta(params, x1,
                                 GibbsSettings(burn_in=40, sweeps=5,
                                               rng=RngState(11)), size=500)
        chain = crystal_chain(x1, [2, 3])
        for k in (1, 2):
            dev = np.max(np.abs(traj[:, k, :].mean(axis=0) - chain.configs[k]))
            assert dev <= 5.0 / math.sqrt(beta)

    def test_deterministic_start_shape(self):
        params = ChainParams(theta=0.9, n=2, p=2, m=(6, 5), nu=(0, 1, 2))
        traj = sample_chain_beta(params, [0.3, 0.8], FAST, size=7)
        assert traj.shape == (7, 2, 2)
        assert np.all(traj[:, 0, :] == np.array([0.3, 0.8]))
