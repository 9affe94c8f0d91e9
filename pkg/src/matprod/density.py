"""Closed-form densities and integral identities for truncated-product chains.

All evaluators return log densities of *ordered* configurations (strictly
increasing), so the Jacobi law integrates to one over the ordered simplex and
the process law over interlaced trajectories.  Constants are assembled in log
space from the printed Gamma products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from . import _quad
from .core import (ChainParams, ConstraintError, DegenerateConfigError, as_config,
                   interlaces, log_factorial, log_vandermonde, partition,
                   validate_chain_params, validate_trajectory)
from .jack import jack_eval, jack_principal

__all__ = [
    "JacobiParams", "KernelParams", "JackDensityData",
    "jacobi_log_density", "kernel_log_density", "process_log_density",
    "selberg", "log_selberg", "selberg_jack_average", "dixon_check",
    "product_log_density_integral", "build_mu", "product_log_density_jack",
]


@dataclass(frozen=True)
class JacobiParams:
    """Jacobi ensemble parameters; the weight is x^{theta(nu+1)-1} (1-x)^{theta(m-2n-nu+1)-1}."""
    n: int
    m: int
    nu: int
    theta: float

    def validate(self):
        if self.theta <= 0:
            raise ConstraintError(f"theta must be positive, got {self.theta}")
        if self.n < 1 or self.nu < 0:
            raise ConstraintError(f"need n >= 1 and nu >= 0, got n={self.n}, nu={self.nu}")
        if self.m < 2 * self.n + self.nu:
            raise ConstraintError(
                f"m < 2n+nu: m={self.m}, 2n+nu={2 * self.n + self.nu}")


@dataclass(frozen=True)
class KernelParams:
    """Rank-1 transition parameters; the ambient size is implied, m = n+nu+1."""
    n: int
    nu: int
    theta: float

    @property
    def m(self) -> int:
        return self.n + self.nu + 1

    def validate(self):
        if self.theta <= 0:
            raise ConstraintError(f"theta must be positive, got {self.theta}")
        if self.n < 1 or self.nu < 0:
            raise ConstraintError(f"need n >= 1 and nu >= 0, got n={self.n}, nu={self.nu}")


# ---------------------------------------------------------------------------
# Jacobi ensemble
# ---------------------------------------------------------------------------

def log_z_jacobi(theta: float, n: int, m: int, nu: int) -> float:
    """log of the Jacobi normalization over the full cube [0,1]^n (includes n!)."""
    acc = log_factorial(n) + n * gammaln(theta)
    j = np.arange(nu + 1, m - n + 1, dtype=float)
    acc += float(np.sum(gammaln(theta * j) - gammaln(theta * (j + n))))
    j = np.arange(1, n + 1, dtype=float)
    acc += float(np.sum(gammaln(theta * (m - 2 * n - nu + j)) + gammaln(theta * j)
                        - 2 * gammaln(theta)))
    return acc


def jacobi_log_density(x, jp: JacobiParams) -> float:
    """Ordered Jacobi density of the squared singular values of one truncation."""
    jp.validate()
    x = as_config(x)
    if x.size != jp.n:
        raise ValueError(f"config has {x.size} particles, expected n={jp.n}")
    if x[0] <= 0.0 or x[-1] >= 1.0:
        raise DegenerateConfigError("jacobi density requires x strictly inside (0,1)")
    theta, n, m, nu = jp.theta, jp.n, jp.m, jp.nu
    # ordered density: the printed Z divided by n!
    log_z = log_z_jacobi(theta, n, m, nu) - log_factorial(n)
    return (2.0 * theta * log_vandermonde(x)
            + float(np.sum((theta * (nu + 1) - 1.0) * np.log(x)
                           + (theta * (m - 2 * n - nu + 1) - 1.0) * np.log1p(-x)))
            - log_z)


# ---------------------------------------------------------------------------
# rank-1 Markov kernel
# ---------------------------------------------------------------------------

def _log_abs_cross(a: np.ndarray, b: np.ndarray) -> float:
    """sum over i,j of log|a_i - b_j| (may be -inf on coincidence)."""
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(np.abs(a[:, None] - b[None, :]))))


def kernel_log_density(y, x, kp: KernelParams) -> float:
    """Log transition density of the rank-1 truncation step, product form.

    Returns -inf when the interlacing support constraint fails.  Evaluation
    exactly at a point x_i == y_j is the (integrable for theta < 1) singular
    set; the limit value +inf is returned there rather than NaN.
    """
    kp.validate()
    x = as_config(x, name="x")
    y = np.asarray(y, dtype=float)
    if y.shape != x.shape:
        raise ValueError("y and x must have equal length")
    if np.any(np.diff(y) < 0.0):
        raise ValueError("y must be sorted increasingly")
    if x[0] <= 0.0 or x[-1] >= 1.0:
        raise DegenerateConfigError("kernel density requires x strictly inside (0,1)")
    if not interlaces(y, x):
        return -np.inf
    theta, n, nu = kp.theta, kp.n, kp.nu
    const = -n * gammaln(theta) + gammaln(theta * (nu + n + 1)) - gammaln(theta * (nu + 1))
    cross = 0.0 if theta == 1.0 else (theta - 1.0) * _log_abs_cross(x, y)
    with np.errstate(divide="ignore"):
        body = (log_vandermonde(y) - (2.0 * theta - 1.0) * log_vandermonde(x)
                + float(np.sum((theta * (nu + 1) - 1.0) * np.log(y)))
                - float(np.sum((theta * (nu + 2) - 1.0) * np.log(x))))
    return const + cross + body


# ---------------------------------------------------------------------------
# joint process law
# ---------------------------------------------------------------------------

def log_z_process(params: ChainParams) -> float:
    theta, n, p = params.theta, params.n, params.p
    m1, nu1 = params.m[0], params.nu[1]
    acc = n * p * gammaln(theta)
    for k in range(2, p + 1):
        nuk = params.nu[k]
        acc += gammaln(theta * (nuk + 1)) - gammaln(theta * (nuk + n + 1))
    j = np.arange(nu1 + 1, m1 - n + 1, dtype=float)
    acc += float(np.sum(gammaln(theta * j) - gammaln(theta * (j + n))))
    j = np.arange(1, n + 1, dtype=float)
    acc += float(np.sum(gammaln(theta * (m1 - 2 * n - nu1 + j)) + gammaln(theta * j)
                        - 2 * gammaln(theta)))
    return acc


def process_log_density(trajectory, params: ChainParams) -> float:
    """Joint log density of the interlaced trajectory (x^1, ..., x^p).

    Evaluated from the printed product formula; it factorizes exactly as
    jacobi(x^1) + sum_k kernel(x^k | x^{k-1}) and the test suite asserts that
    identity.
    """
    validate_chain_params(params)
    theta, n, p = params.theta, params.n, params.p
    configs = [as_config(c, name=f"x^{k + 1}") for k, c in enumerate(trajectory)]
    if len(configs) != p or any(c.size != n for c in configs):
        raise ValueError(f"trajectory must be p={p} configs of n={n} particles")
    for k in range(1, p):
        if not interlaces(configs[k], configs[k - 1]):
            return -np.inf
    x1 = configs[0]
    if x1[0] <= 0.0 or x1[-1] >= 1.0:
        raise DegenerateConfigError("process density requires x^1 strictly inside (0,1)")
    m1, nu1 = params.m[0], params.nu[1]
    acc = -log_z_process(params)
    acc += theta * log_vandermonde(configs[-1])
    for k in range(2, p + 1):
        xk, xkm = configs[k - 1], configs[k - 2]
        nuk = params.nu[k]
        if theta != 1.0:
            acc += (1.0 - theta) * (log_vandermonde(xkm) + log_vandermonde(xk)
                                    - _log_abs_cross(xkm, xk))
        with np.errstate(divide="ignore"):
            acc += float(np.sum((theta * (nuk + 1) - 1.0) * np.log(xk)
                                - (theta * (nuk + 2) - 1.0) * np.log(xkm)))
    acc += theta * log_vandermonde(x1)
    acc += float(np.sum((theta * (nu1 + 1) - 1.0) * np.log(x1)
                        + (theta * (m1 - 2 * n - nu1 + 1) - 1.0) * np.log1p(-x1)))
    return acc


# ---------------------------------------------------------------------------
# Selberg integrals
# ---------------------------------------------------------------------------

def log_selberg(n: int, a: float, b: float, theta: float) -> float:
    """log of the Selberg integral with weight u^a (1-u)^b and repulsion |du|^{2 theta}."""
    if a <= -1 or b <= -1 or theta <= 0:
        raise ValueError("need a, b > -1 and theta > 0")
    acc = 0.0
    for j in range(n):
        acc += (gammaln(a + 1 + j * theta) + gammaln(b + 1 + j * theta)
                + gammaln(1 + (j + 1) * theta)
                - gammaln(a + b + 2 + (n + j - 1) * theta) - gammaln(1 + theta))
    return acc


def selberg(n: int, a: float, b: float, theta: float) -> float:
    return math.exp(log_selberg(n, a, b, theta))


def selberg_jack_average(kappa, n: int, a: float, b: float, theta: float) -> float:
    """Normalized Jack average over the Selberg density (Kadell-type formula)."""
    kappa = partition(kappa)
    if len(kappa) > n:
        raise ValueError(f"l(kappa)={len(kappa)} exceeds n={n}")
    if not kappa:
        return 1.0  # all Gamma ratios cancel identically
    kap = list(kappa) + [0] * (n - len(kappa))
    acc = 0.0
    for j in range(1, n + 1):
        k_j = kap[j - 1]
        acc += (gammaln(a + theta * (n - j) + 1 + k_j)
                - gammaln(a + b + theta * (2 * n - j - 1) + 2 + k_j)
                + gammaln(a + b + theta * (2 * n - j - 1) + 2)
                - gammaln(a + theta * (n - j) + 1))
    return jack_principal(kappa, n, theta) * math.exp(acc)


# ---------------------------------------------------------------------------
# Dixon integral identity (corollary form, b_0 -> -inf)
# ---------------------------------------------------------------------------

def dixon_check(a_knots, alpha, b_knots, beta, npts: int = 32, panels: int = 16):
    """Evaluate both sides of the Dixon-type corollary identity by quadrature.

    ``a_knots`` = (a_0..a_n) with exponents ``alpha`` = (alpha_0..alpha_n);
    ``b_knots`` = (b_1..b_m) with ``beta`` = (beta_0..beta_m), beta_0 being the
    exponent carried off to -infinity.  Returns (lhs, rhs).
    """
    a_knots = np.asarray(a_knots, dtype=float)
    b_knots = np.asarray(b_knots, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n = a_knots.size - 1
    m = b_knots.size
    if alpha.size != n + 1 or beta.size != m + 1:
        raise ValueError("need len(alpha) == len(a_knots) and len(beta) == len(b_knots)+1")
    if abs(alpha.sum() - beta.sum()) > 1e-10:
        raise ConstraintError(
            f"sum(alpha)={alpha.sum()} must equal sum(beta)={beta.sum()}")
    if np.any(alpha <= 0) or np.any(beta <= 0):
        raise ConstraintError("alpha and beta must have positive parts")
    if np.any(np.diff(a_knots) <= 0) or (m > 1 and np.any(np.diff(b_knots) <= 0)):
        raise ConstraintError("knots must be strictly ordered")
    if m and b_knots.max() >= a_knots.min():
        raise ConstraintError("b knots must lie strictly below the a knots "
                              "(non-integrable exponent configuration otherwise)")

    def lhs_logf(pts):
        out = np.zeros(pts.shape[0])
        for i in range(n):
            for j in range(i + 1, n):
                out += np.log(np.abs(pts[:, j] - pts[:, i]))
        for j in range(n + 1):
            out += (alpha[j] - 1.0) * np.log(np.abs(a_knots[j] - pts)).sum(axis=1)
        for j in range(m):
            out += -beta[j + 1] * np.log(np.abs(b_knots[j] - pts)).sum(axis=1)
        return out

    cells = [(a_knots[i], a_knots[i + 1], alpha[i] - 1.0, alpha[i + 1] - 1.0)
             for i in range(n)]
    lhs = math.exp(_quad.log_integral_cells(lhs_logf, cells, npts=npts, panels=panels))

    # prefactor of the right-hand side
    log_pref = 0.0
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            log_pref += (alpha[i] + alpha[j] - 1.0) * math.log(a_knots[j] - a_knots[i])
    for i in range(m):
        for j in range(i + 1, m):
            log_pref += (1.0 - beta[i + 1] - beta[j + 1]) * math.log(b_knots[j] - b_knots[i])
    for i in range(n + 1):
        for j in range(m):
            log_pref += (alpha[i] - beta[j + 1]) * math.log(abs(b_knots[j] - a_knots[i]))
    log_pref += float(np.sum(gammaln(alpha)) - np.sum(gammaln(beta)))

    def rhs_logg(pts):
        out = np.zeros(pts.shape[0])
        for i in range(m):
            for j in range(i + 1, m):
                out += np.log(np.abs(pts[:, j] - pts[:, i]))
        for j in range(n + 1):
            out += -alpha[j] * np.log(np.abs(a_knots[j] - pts)).sum(axis=1)
        for j in range(m):
            out += (beta[j + 1] - 1.0) * np.log(np.abs(b_knots[j] - pts)).sum(axis=1)
        return out

    # dimension 1 is the tail cell (-inf, b_1]; the rest are bounded cells
    node_list, logw_list, absorb = [], [], []
    v, w = _quad.neg_tail_nodes(b_knots[0], beta[1] - 1.0, npts=npts, panels=panels + 8)
    node_list.append(v)
    logw_list.append(np.log(w) - (beta[1] - 1.0) * np.log(np.abs(b_knots[0] - v)))
    for i in range(1, m):
        y, w = _quad.cell_nodes(b_knots[i - 1], b_knots[i], beta[i] - 1.0,
                                beta[i + 1] - 1.0, npts=npts, panels=panels)
        node_list.append(y)
        logw_list.append(np.log(w) - (beta[i] - 1.0) * np.log(y - b_knots[i - 1])
                         - (beta[i + 1] - 1.0) * np.log(b_knots[i] - y))
    grids = np.meshgrid(*node_list, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    logw = np.zeros(pts.shape[0])
    for d, lw in enumerate(logw_list):
        logw += np.broadcast_to(
            lw.reshape([-1 if i == d else 1 for i in range(m)]), grids[0].shape).ravel()
    rhs_int = float(logsumexp(logw + rhs_logg(pts)))
    rhs = math.exp(log_pref + rhs_int)
    return lhs, rhs


# ---------------------------------------------------------------------------
# integral representation of the product density
# ---------------------------------------------------------------------------

def log_w_const(params: ChainParams) -> float:
    """log W_{n,p}; parenthesization resolved as
    prod_r Gamma(theta(m1-n-nu_r)) Gamma(theta(nu_r-nu_1+1)) /
    [Gamma(theta)^{n-r+2} Gamma(theta(m1-2n-nu_1+r-1))]."""
    theta, n = params.theta, params.n
    m1, nu1 = params.m[0], params.nu[1]
    acc = 0.0
    for r in range(2, params.p + 1):
        nur = params.nu[r]
        if m1 - n - nur <= 0 or nur - nu1 + 1 <= 0:
            raise ConstraintError(
                f"integral representation requires m1-n-nu_r > 0 and nu_r-nu_1+1 > 0 "
                f"(r={r}, m1={m1}, n={n}, nu_r={nur}, nu_1={nu1})")
        acc += (gammaln(theta * (m1 - n - nur)) + gammaln(theta * (nur - nu1 + 1))
                - (n - r + 2) * gammaln(theta) - gammaln(theta * (m1 - 2 * n - nu1 + r - 1)))
    return acc


def _log_i_p2(x: np.ndarray, params: ChainParams, npts: int, panels: int) -> float:
    theta, n = params.theta, params.n
    m1, nu1, nu2 = params.m[0], params.nu[1], params.nu[2]
    c = theta * (nu2 - nu1 + 1)
    a_exp = theta * (m1 - 2 * n - nu1 + 1)

    def log_g(u):
        return -theta * np.sum(np.log(x[None, :] + u[:, None] * (1.0 - x[None, :])),
                               axis=1)

    return _quad.log_integrate_01_weighted(log_g, c - 1.0, a_exp - c - 1.0 + n * theta,
                                           npts=npts, panels=panels)


def _log_i_p3(x: np.ndarray, params: ChainParams, npts: int, panels: int) -> float:
    theta, n = params.theta, params.n
    m1, nu1 = params.m[0], params.nu[1]
    nu2, nu3 = params.nu[2], params.nu[3]
    b_exp = theta * (m1 - 2 * n - nu1 + 2)
    c3 = theta * (nu3 - nu1 + 1)

    def log_f_smooth(v, k):
        # F(v) without the |v - v1|^{theta-1} cell factor, with extra power v^k
        out = -b_exp * np.log1p(-v) + (c3 - 1.0 + k) * np.log(np.abs(v))
        out += -theta * np.sum(np.log(x[None, :] - v[:, None]), axis=1)
        return out

    def log_inner_pair(v1):
        # A_k over (-inf, v1), B_k over (v1, 0); the tail weight absorbs only
        # |v-v1|^{theta-1}, the cell weight absorbs that and |v|^{c3-1}
        va, wa = _quad.neg_tail_nodes(v1, theta - 1.0, npts=npts, panels=panels + 6)
        vb, wb = _quad.cell_nodes(v1, 0.0, theta - 1.0, c3 - 1.0,
                                  npts=npts, panels=panels)
        lb = np.log(wb) - (c3 - 1.0) * np.log(-vb)
        log_a0 = logsumexp(np.log(wa) + log_f_smooth(va, 0))
        log_a1 = logsumexp(np.log(wa) + log_f_smooth(va, 1))
        log_b0 = logsumexp(lb + log_f_smooth(vb, 0))
        log_b1 = logsumexp(lb + log_f_smooth(vb, 1))
        # A0 > 0, B0 > 0; A1, B1 carry the sign of v (negative axis), so
        # inner = A0*B1 - A1*B0 = |A1|*B0 - A0*|B1| > 0 on the ordered region
        hi = max(log_a1 + log_b0, log_a0 + log_b1)
        val = math.exp(log_a1 + log_b0 - hi) - math.exp(log_a0 + log_b1 - hi)
        if val <= 0.0:
            return -np.inf
        return hi + math.log(val)

    # inner-level exponent theta*(nu_2 - nu_3 - 1): the printed theorem writes
    # theta*(nu_r - nu_{r+1} - 1), but redoing the Dixon induction shows the
    # subscripts shift by one; only this reading reproduces the marginal of the
    # process law (cross-checked in the test suite)
    inner_exp = theta * (nu2 - nu3 - 1.0)
    p_eff = theta * (nu2 - nu1 + 1) - 1.0
    v1_nodes, w1 = _quad.neg_tail_nodes(0.0, p_eff, npts=npts, panels=panels + 6)
    logw = np.log(w1) - p_eff * np.log(-v1_nodes)
    vals = np.array([log_inner_pair(v1) for v1 in v1_nodes])
    vals += inner_exp * np.log(-v1_nodes)
    return float(logsumexp(logw + vals))


def product_log_density_integral(x, params: ChainParams, npts: int = 32,
                                 panels: int = 14) -> float:
    """Joint log density of the final-step configuration via the nested
    Dixon-integral representation; supports p <= 3."""
    validate_chain_params(params)
    if params.p > 3:
        raise ConstraintError(
            f"integral representation implemented for p <= 3, got p={params.p} "
            "(unsupported nested-quadrature dimension)")
    x = as_config(x)
    theta, n, p = params.theta, params.n, params.p
    m1, nu1 = params.m[0], params.nu[1]
    if x.size != n:
        raise ValueError(f"config has {x.size} particles, expected n={n}")
    if x[0] <= 0.0 or x[-1] >= 1.0:
        raise DegenerateConfigError("density requires x strictly inside (0,1)")
    if p == 1:
        return jacobi_log_density(x, JacobiParams(n=n, m=m1, nu=nu1, theta=theta))
    if p == 3:
        # the nested rules converge slowly in the outer variable; keep a floor
        npts, panels = max(npts, 72), max(panels, 28)
    log_w = log_w_const(params)  # raises first on divergent parameter corners
    log_i = (_log_i_p2 if p == 2 else _log_i_p3)(x, params, npts, panels)
    acc = -log_z_process(params) - log_w
    acc += 2.0 * theta * log_vandermonde(x)
    acc += float(np.sum((theta * (m1 - 2 * n - nu1 + p) - 1.0) * np.log1p(-x)
                        + (theta * (nu1 + 1) - 1.0) * np.log(x)))
    return acc + log_i


# ---------------------------------------------------------------------------
# Jack-polynomial representation of the product density
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JackDensityData:
    """Data for the Jack-function density: M variables and the partition mu."""
    big_m: int
    mu: tuple
    params: ChainParams


def build_mu(params: ChainParams, tol: float = 1e-9) -> JackDensityData:
    """Solve the rearrangement condition for the partition mu, or raise.

    The multiset {theta(nu_i+1), ..., theta(m_i-n)}_i must be a rearrangement
    of mu_j + theta(M-j); the hypothesis can genuinely fail, in which case a
    ConstraintError reports that no admissible partition exists.
    """
    validate_chain_params(params)
    theta, n = params.theta, params.n
    values = []
    for i in range(params.p):
        lo, hi = params.nu[i + 1] + 1, params.m[i] - n
        values.extend(theta * j for j in range(lo, hi + 1))
    big_m = params.big_m
    assert len(values) == big_m
    values.sort(reverse=True)
    mu = []
    for j in range(1, big_m + 1):
        mu_j = values[j - 1] - theta * (big_m - j)
        if abs(mu_j - round(mu_j)) > tol or round(mu_j) < 0:
            raise ConstraintError(
                f"no admissible partition: mu_{j} = {mu_j} is not a nonnegative integer")
        mu.append(int(round(mu_j)))
    if any(mu[i] < mu[i + 1] for i in range(len(mu) - 1)):
        raise ConstraintError(
            f"no admissible partition: candidate {tuple(mu)} is not weakly decreasing")
    return JackDensityData(big_m=big_m, mu=partition(mu), params=params)


def log_z_jack(data: JackDensityData) -> float:
    params = data.params
    theta, n = params.theta, params.n
    acc = 0.0
    for i in range(params.p):
        j = np.arange(params.nu[i + 1] + 1, params.m[i] - n + 1, dtype=float)
        acc += float(np.sum(gammaln(theta * j) - gammaln(theta * (j + n))))
    i = np.arange(1, n + 1, dtype=float)
    acc += float(np.sum(gammaln(theta * (data.big_m - n + i)) + gammaln(theta * i)
                        - gammaln(theta)))
    return acc


def product_log_density_jack(x, data: JackDensityData) -> float:
    """Joint log density of the final configuration via the Jack representation."""
    params = data.params
    theta, n = params.theta, params.n
    x = as_config(x)
    if x.size != n:
        raise ValueError(f"config has {x.size} particles, expected n={n}")
    if x[0] <= 0.0 or x[-1] >= 1.0:
        raise DegenerateConfigError("density requires x strictly inside (0,1)")
    big_m, mu = data.big_m, data.mu
    values = np.concatenate([np.ones(big_m - n), x])
    num = jack_eval(mu, values, theta)
    den = jack_principal(mu, big_m, theta)
    if num <= 0.0 or den <= 0.0:
        raise ArithmeticError("Jack ratio is nonpositive; parameters out of range")
    acc = -log_z_jack(data) + math.log(num) - math.log(den)
    acc += 2.0 * theta * log_vandermonde(x)
    acc += float(np.sum((theta * (big_m - n) + theta - 1.0) * np.log1p(-x) - np.log(x)))
    return acc
