"""Shared test machinery: matrix-model oracles, chi-square bin probabilities
computed by singularity-aware quadrature, and small statistics utilities."""

import numpy as np
from scipy import stats

from matprod._quad import cell_nodes, gauss_jacobi_01
from matprod.density import JacobiParams, jacobi_log_density
from matprod.haar import RngState, _collapse_kramers, _sample_haar_batch

GROUP_OF_THETA = {0.5: "orthogonal", 1.0: "unitary", 2.0: "symplectic"}


def matrix_transition(x, nu, theta, size, rng: RngState):
    """Squared singular values of T X for T a (n+nu) x n truncation of a Haar
    matrix of size m = n+nu+1 and X = diag(sqrt(x))."""
    x = np.asarray(x, dtype=float)
    n = x.size
    m = n + nu + 1
    group = GROUP_OF_THETA[theta]
    c = 2 if group == "symplectic" else 1
    s = _sample_haar_batch(group, m, size, rng.generator())
    t = s[:, : c * (n + nu), : c * n]
    if c == 1:
        xmat = np.diag(np.sqrt(x))
    else:
        xmat = np.kron(np.diag(np.sqrt(x)), np.eye(2))
    prod = t @ xmat
    ev = np.linalg.eigvalsh(np.swapaxes(prod.conj(), -2, -1) @ prod)
    return _collapse_kramers(ev) if c == 2 else ev


def two_sample_ks_all_coords(a: np.ndarray, b: np.ndarray, level: float = 0.01):
    """Bonferroni-adjusted two-sample KS across coordinates; returns
    (passed, list of p-values); overall level <= ``level``."""
    n = a.shape[1]
    pvals = [stats.ks_2samp(a[:, i], b[:, i]).pvalue for i in range(n)]
    return all(p > level / n for p in pvals), pvals


def _bin_rect(logf, x_cell, y_cell, npts=20):
    """Integral of exp(logf(x1,x2)) over a rectangle, endpoint-exponent aware.

    Each cell is (lo, hi, p, q) with the weight (t-lo)^p (hi-t)^q already part
    of logf.
    """
    xs, wx = cell_nodes(*x_cell, npts=npts, panels=4)
    ys, wy = cell_nodes(*y_cell, npts=npts, panels=4)
    lwx = np.log(wx) - x_cell[2] * np.log(xs - x_cell[0]) \
        - x_cell[3] * np.log(x_cell[1] - xs)
    lwy = np.log(wy) - y_cell[2] * np.log(ys - y_cell[0]) \
        - y_cell[3] * np.log(y_cell[1] - ys)
    val = logf(xs[:, None], ys[None, :])
    mx = np.max(val)
    if not np.isfinite(mx):
        return 0.0
    return float(np.exp(mx) * np.sum(
        np.exp(val - mx + lwx[:, None] + lwy[None, :])))


def _bin_triangle(logf, a, b, p0, q1, r, npts=20):
    """Integral over the triangle {a < x1 < x2 < b} of exp(logf), with
    logf ~ p0 log x at 0 (when a == 0), q1 log(1-x) at 1 (when b == 1) and
    r log(x2 - x1) at the diagonal.

    Uses x1 = a + (x2 - a) s; the inner rule absorbs s^{p0} (1-s)^r, the outer
    rule absorbs (x2 - a)^{2 p0 + r + 1} (1 - x2)^{q1} (exponents dropping to
    r + 1 and 0 away from the global corners), and the quadrature sees only
    the smooth remainder of logf.
    """
    p_in = p0 if a == 0.0 else 0.0
    left = (2.0 * p0 if a == 0.0 else 0.0) + r + 1.0
    right = q1 if b == 1.0 else 0.0
    x2n, w2 = cell_nodes(a, b, left, right, npts=npts, panels=6)
    s, ws = gauss_jacobi_01(npts, p_in, r)
    total = 0.0
    for x2i, w2i in zip(x2n, w2):
        x1 = a + (x2i - a) * s
        vals = logf(x1, np.full_like(x1, x2i)) - r * np.log(x2i - x1)
        if a == 0.0:
            vals = vals - p0 * (np.log(x1) + np.log(x2i))
        if b == 1.0:
            vals = vals - q1 * np.log1p(-x2i)
        mx = np.max(vals)
        if not np.isfinite(mx):
            continue
        total += w2i * np.exp(mx) * np.dot(ws, np.exp(vals - mx))
    return float(total)


def simplex_bin_probs(logf, edges, p0, q1, r, npts=20):
    """Probabilities of ordered-simplex bins for a 2-particle log density.

    ``edges`` partitions [0,1]; bin (i, j) with i < j is the rectangle
    [e_i, e_{i+1}] x [e_j, e_{j+1}]; bin (i, i) is the triangle above the
    diagonal.  Endpoint exponents: p0 at 0, q1 at 1, r on the diagonal.
    Returns a dict {(i, j): prob}.
    """
    edges = np.asarray(edges, dtype=float)
    nb = edges.size - 1
    probs = {}
    for i in range(nb):
        for j in range(i, nb):
            if i == j:
                probs[(i, j)] = _bin_triangle(logf, edges[i], edges[i + 1],
                                              p0, q1, r, npts=npts)
            else:
                x_cell = (edges[i], edges[i + 1],
                          p0 if i == 0 else 0.0, 0.0)
                y_cell = (edges[j], edges[j + 1], 0.0,
                          q1 if j == nb - 1 else 0.0)
                probs[(i, j)] = _bin_rect(logf, x_cell, y_cell, npts=npts)
    return probs


def chi_square_2d(samples: np.ndarray, probs: dict, edges) -> float:
    """p-value of the chi-square test of ordered pairs against bin probs."""
    edges = np.asarray(edges, dtype=float)
    nb = edges.size - 1
    i_idx = np.clip(np.searchsorted(edges, samples[:, 0], side="right") - 1, 0, nb - 1)
    j_idx = np.clip(np.searchsorted(edges, samples[:, 1], side="right") - 1, 0, nb - 1)
    total = samples.shape[0]
    keys = [k for k, v in probs.items() if v * total >= 10.0]
    counts = {k: 0 for k in keys}
    other = 0
    key_set = set(keys)
    for a, b in zip(i_idx, j_idx):
        k = (int(a), int(b))
        if k in key_set:
            counts[k] += 1
        else:
            other += 1
    p_other = max(1.0 - sum(probs[k] for k in keys), 1e-12)
    chi2 = (other - total * p_other) ** 2 / (total * p_other)
    for k in keys:
        expect = probs[k] * total
        chi2 += (counts[k] - expect) ** 2 / expect
    dof = len(keys)  # cells - 1, counting the pooled remainder cell
    return float(stats.chi2.sf(chi2, dof))


def chi_square_1d(values: np.ndarray, bin_probs: np.ndarray, edges) -> float:
    """Chi-square p-value for scalar samples against given bin probabilities."""
    counts, _ = np.histogram(values, bins=edges)
    total = values.size
    keep = bin_probs * total >= 10.0
    expect = bin_probs[keep] * total
    chi2 = float(np.sum((counts[keep] - expect) ** 2 / expect))
    rest_p = max(1.0 - bin_probs[keep].sum(), 1e-12)
    rest_c = total - counts[keep].sum()
    chi2 += (rest_c - total * rest_p) ** 2 / (total * rest_p)
    return float(stats.chi2.sf(chi2, int(keep.sum())))


def vectorized_jacobi_logf(jp: JacobiParams):
    """Broadcast-friendly n=2 Jacobi log density; pinned against
    matprod.density.jacobi_log_density in the test suite."""
    from matprod.core import log_factorial
    from matprod.density import log_z_jacobi

    th = jp.theta
    log_z = log_z_jacobi(th, jp.n, jp.m, jp.nu) - log_factorial(jp.n)
    a_pow = th * (jp.nu + 1) - 1.0
    b_pow = th * (jp.m - 2 * jp.n - jp.nu + 1) - 1.0

    def logf(x1, x2):
        return (2.0 * th * np.log(x2 - x1)
                + a_pow * (np.log(x1) + np.log(x2))
                + b_pow * (np.log1p(-x1) + np.log1p(-x2)) - log_z)

    return logf


def jacobi_bin_probs(jp: JacobiParams, edges, npts=16):
    th = jp.theta
    return simplex_bin_probs(vectorized_jacobi_logf(jp), edges,
                             th * (jp.nu + 1) - 1.0,
                             th * (jp.m - 2 * jp.n - jp.nu + 1) - 1.0,
                             2.0 * th, npts=npts)
