"""Jack and Schur polynomial evaluation, principal specializations, moments.

Jack polynomials are evaluated in the P-normalization (monic in the dominance
leading monomial), the normalization inherited from the Macdonald-P limit.
Evaluation uses the one-variable branching recursion

    P_lam(x_1..x_k) = sum_{mu < lam} psi_{lam/mu}(theta) x_k^{|lam|-|mu|}
                      P_mu(x_1..x_{k-1})

over interlacing mu, with branching coefficients obtained as the theta-limit
of the (q,t) skew one-variable coefficients.
"""

from __future__ import annotations

import math
import threading

import numpy as np
from scipy.special import gammaln

from .core import ChainParams, partition, validate_chain_params

__all__ = [
    "jack_eval", "jack_principal", "jack_monomials", "jack_eval_many",
    "schur_eval", "jack_moment",
]


def _log_f(a: int, b: int, theta: float) -> float:
    # theta-limit of f(q^a t^b) ratios: Gamma(a+1+theta*b) / Gamma(a+theta*(b+1))
    return gammaln(a + 1 + theta * b) - gammaln(a + theta * (b + 1))


def branching_psi(lam: tuple, mu: tuple, theta: float) -> float:
    """Branching coefficient psi_{lam/mu}(theta) for one added variable, mu < lam."""
    lm = len(mu)
    lam_get = lambda i: lam[i] if i < len(lam) else 0
    acc = 0.0
    for j in range(lm):
        for i in range(j + 1):
            d = j - i
            acc += _log_f(mu[i] - mu[j], d, theta)
            acc += _log_f(lam_get(i) - lam_get(j + 1), d, theta)
            acc -= _log_f(lam_get(i) - mu[j], d, theta)
            acc -= _log_f(mu[i] - lam_get(j + 1), d, theta)
    return math.exp(acc)


def _interlacing_predecessors(lam: tuple):
    """All partitions mu with mu < lam (interlacing), trailing zeros stripped."""
    if not lam:
        yield ()
        return
    ranges = []
    for i in range(len(lam)):
        lo = lam[i + 1] if i + 1 < len(lam) else 0
        ranges.append(range(lo, lam[i] + 1))
    for combo in _product_ranges(ranges):
        mu = combo
        while mu and mu[-1] == 0:
            mu = mu[:-1]
        yield mu


def _product_ranges(ranges):
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for tail in _product_ranges(ranges[1:]):
            yield (head,) + tail


_principal_cache: dict = {}
_principal_lock = threading.Lock()


def jack_principal(lam, n: int, theta: float) -> float:
    """J_lam(1^n; theta) in P-normalization; 0 when l(lam) > n."""
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    lam = partition(lam)
    if len(lam) > n:
        return 0.0
    if not lam:
        return 1.0
    key = (lam, n, theta)
    val = _principal_cache.get(key)
    if val is not None:
        return val
    total = 0.0
    for mu in _interlacing_predecessors(lam):
        total += branching_psi(lam, mu, theta) * jack_principal(mu, n - 1, theta)
    with _principal_lock:
        _principal_cache[key] = total
    return total


def jack_eval(lam, values, theta: float) -> float:
    """J_lam(values; theta), P-normalized; 0 when l(lam) exceeds the variable count."""
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    lam = partition(lam)
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError("values must be a 1-d array")
    if np.any(~np.isfinite(x)):
        raise ValueError("values must be finite")
    cache: dict = {}

    def rec(mu: tuple, k: int) -> float:
        if len(mu) > k:
            return 0.0
        if not mu:
            return 1.0
        if k == 0:
            return 0.0
        # all-ones prefixes delegate to the shared principal cache
        if np.all(x[:k] == 1.0):
            return jack_principal(mu, k, theta)
        key = (mu, k)
        val = cache.get(key)
        if val is not None:
            return val
        xk = x[k - 1]
        wmu = sum(mu)
        total = 0.0
        for nu in _interlacing_predecessors(mu):
            if len(nu) > k - 1:
                continue
            sub = rec(nu, k - 1)
            if sub != 0.0:
                total += branching_psi(mu, nu, theta) * xk ** (wmu - sum(nu)) * sub
        cache[key] = total
        return total

    return rec(lam, x.size)


def jack_monomials(lam, nvars: int, theta: float):
    """Monomial expansion of J_lam in ``nvars`` variables.

    Returns (exponents, coeffs) with exponents of shape (terms, nvars); used for
    vectorized evaluation over sample batches.
    """
    lam = partition(lam)
    if len(lam) > nvars:
        return np.zeros((0, nvars), dtype=int), np.zeros(0)

    def rec(mu: tuple, k: int) -> dict:
        if not mu:
            return {(0,) * k: 1.0}
        out: dict = {}
        wmu = sum(mu)
        for nu in _interlacing_predecessors(mu):
            if len(nu) > k - 1:
                continue
            psi = branching_psi(mu, nu, theta)
            for expo, c in rec(nu, k - 1).items():
                key = expo + (wmu - sum(nu),)
                out[key] = out.get(key, 0.0) + psi * c
        return out

    table = rec(lam, nvars)
    exps = np.array(sorted(table.keys()), dtype=int).reshape(len(table), nvars)
    coeffs = np.array([table[tuple(e)] for e in exps])
    return exps, coeffs


def jack_eval_many(lam, points: np.ndarray, theta: float) -> np.ndarray:
    """Vectorized J_lam over rows of ``points`` (shape (N, nvars))."""
    points = np.asarray(points, dtype=float)
    exps, coeffs = jack_monomials(lam, points.shape[1], theta)
    if exps.shape[0] == 0:
        return np.zeros(points.shape[0])
    # (N, terms) monomials
    mono = np.prod(points[:, None, :] ** exps[None, :, :], axis=2)
    return mono @ coeffs


def schur_eval(lam, values) -> float:
    """Schur polynomial via the bialternant ratio with confluent handling.

    Repeated arguments (|x_i - x_j| < 1e-8) are collapsed into divided-difference
    blocks, which is what the 1^{M-n} specializations require.
    """
    lam = partition(lam)
    x = np.asarray(values, dtype=float)
    big_n = x.size
    if len(lam) > big_n:
        return 0.0
    lam_full = list(lam) + [0] * (big_n - len(lam))
    exps_num = np.array([lam_full[j] + big_n - 1 - j for j in range(big_n)], dtype=int)
    exps_den = np.array([big_n - 1 - j for j in range(big_n)], dtype=int)
    groups = _cluster_values(x, tol=1e-8)
    sign_n, log_n = _confluent_logdet(groups, exps_num)
    sign_d, log_d = _confluent_logdet(groups, exps_den)
    if sign_d == 0:
        raise ArithmeticError("confluent Vandermonde denominator is singular")
    if sign_n == 0:
        return 0.0
    return sign_n * sign_d * math.exp(log_n - log_d)


def _cluster_values(x: np.ndarray, tol: float):
    """Group values into (representative, multiplicity) clusters of near-equal entries."""
    order = np.argsort(x)
    xs = x[order]
    groups = []
    start = 0
    for i in range(1, len(xs) + 1):
        if i == len(xs) or abs(xs[i] - xs[i - 1]) >= tol:
            block = xs[start:i]
            groups.append((float(np.mean(block)), len(block)))
            start = i
    return groups


def _confluent_logdet(groups, exps: np.ndarray):
    """(sign, log|det|) of the confluent alternant with columns x^e, rows grouped."""
    big_n = exps.size
    mat = np.empty((big_n, big_n))
    r = 0
    for v, mult in groups:
        for d in range(mult):
            row = np.zeros(big_n)
            for c, e in enumerate(exps):
                cmb = math.comb(int(e), d) if e >= d else 0
                if cmb:
                    row[c] = cmb * v ** (e - d)
            mat[r] = row
            r += 1
    sign, logabs = np.linalg.slogdet(mat)
    return int(sign), float(logabs)


def jack_moment(kappa, params: ChainParams) -> float:
    """E[J_kappa(squared singular values of the chain) / J_kappa(1^n)].

    Closed-form double product of Gamma ratios over factors i = 1..p and rows
    j = 1..n, evaluated in log space.
    """
    validate_chain_params(params)
    kappa = partition(kappa)
    if len(kappa) > params.n:
        raise ValueError(f"l(kappa)={len(kappa)} exceeds n={params.n}")
    theta, n = params.theta, params.n
    kap = list(kappa) + [0] * (n - len(kappa))
    acc = 0.0
    for i in range(params.p):
        nu_i, m_i = params.nu[i + 1], params.m[i]
        for j in range(1, n + 1):
            k_j = kap[j - 1]
            acc += gammaln(theta * (nu_i + n - j + 1) + k_j) \
                - gammaln(theta * (m_i - j + 1) + k_j) \
                + gammaln(theta * (m_i - j + 1)) \
                - gammaln(theta * (nu_i + n - j + 1))
    return math.exp(acc)
