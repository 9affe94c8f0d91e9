"""Composite Gauss-Jacobi quadrature helpers.

Endpoint singularities u^p (1-u)^q with p, q > -1 are absorbed exactly into
Gauss-Jacobi rules on geometrically graded end panels; interior panels use
Gauss-Legendre with the weight folded into the integrand.  All integrals are
assembled as (nodes, positive weights) pairs so that log-space accumulation is
a logsumexp away.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp, roots_jacobi, roots_legendre

_rule_cache: dict = {}


def gauss_jacobi_01(npts: int, p: float, q: float):
    """Nodes/weights on (0,1) with the weight u^p (1-u)^q built into the weights."""
    key = (npts, float(p), float(q))
    got = _rule_cache.get(key)
    if got is not None:
        return got
    if p <= -1 or q <= -1:
        raise ValueError(f"endpoint exponents must exceed -1, got p={p}, q={q}")
    if p == 0.0 and q == 0.0:
        t, w = roots_legendre(npts)
    else:
        t, w = roots_jacobi(npts, q, p)  # scipy weight: (1-t)^alpha (1+t)^beta
    u = 0.5 * (t + 1.0)
    wu = w * 0.5 ** (p + q + 1)
    _rule_cache[key] = (u, wu)
    return u, wu


def panel_edges(panels: int) -> np.ndarray:
    """Panel boundaries on (0,1), geometrically graded toward both endpoints."""
    if panels < 2:
        return np.array([0.0, 1.0])
    k = panels // 2
    left = np.concatenate([[0.0], 0.5 ** np.arange(k, 0, -1)])
    right = 1.0 - left[1:-1][::-1] if left.size > 2 else np.array([])
    return np.unique(np.concatenate([left, right, [1.0]]))


def weighted_nodes_01(p: float, q: float, npts: int = 24, panels: int = 12):
    """Composite rule for integrals of u^p (1-u)^q g(u) over (0,1).

    Returns (u, w) with sum(w * g(u)) approximating the integral; the endpoint
    weight factors are exact on the first/last panels and folded into w on
    interior panels.
    """
    key = ("comp", float(p), float(q), npts, panels)
    got = _rule_cache.get(key)
    if got is not None:
        return got
    edges = panel_edges(panels)
    us, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        h = b - a
        if a == 0.0:
            s, w = gauss_jacobi_01(npts, p, 0.0)
            u = a + h * s
            wt = w * h ** (p + 1) * (1.0 - u) ** q
        elif b == 1.0:
            s, w = gauss_jacobi_01(npts, 0.0, q)
            u = a + h * s
            wt = w * h ** (q + 1) * u ** p
        else:
            s, w = gauss_jacobi_01(npts, 0.0, 0.0)
            u = a + h * s
            wt = w * h * u ** p * (1.0 - u) ** q
        us.append(u)
        ws.append(wt)
    u = np.concatenate(us)
    w = np.concatenate(ws)
    _rule_cache[key] = (u, w)
    return u, w


def integrate_01_weighted(g, p: float, q: float, npts: int = 24, panels: int = 12) -> float:
    """integral over (0,1) of u^p (1-u)^q g(u) for vectorized smooth g."""
    u, w = weighted_nodes_01(p, q, npts, panels)
    return float(np.dot(w, g(u)))


def log_integrate_01_weighted(log_g, p: float, q: float, npts: int = 24,
                              panels: int = 12) -> float:
    """log of the same integral, accumulated via logsumexp (g > 0)."""
    u, w = weighted_nodes_01(p, q, npts, panels)
    return float(logsumexp(np.log(w) + log_g(u)))


def cell_nodes(lo: float, hi: float, p: float, q: float, npts: int = 24,
               panels: int = 12):
    """Weighted nodes on (lo, hi) for the weight (y-lo)^p (hi-y)^q."""
    u, w = weighted_nodes_01(p, q, npts, panels)
    h = hi - lo
    return lo + h * u, w * h ** (p + q + 1)


def log_integral_cells(logf, cells, npts: int = 16, panels: int = 8) -> float:
    """log of the integral of exp(logf) over a product of 1-d cells.

    ``cells`` is a sequence of (lo, hi, p, q); the weight (y-lo)^p (hi-y)^q of
    each cell must be part of logf (it is divided out here and handled by the
    Gauss-Jacobi rules).  ``logf`` maps an (npoints, ndim) array to logdensity.
    """
    node_list, logw_list = [], []
    for lo, hi, p, q in cells:
        y, w = cell_nodes(lo, hi, p, q, npts, panels)
        lw = np.log(w) - p * np.log(y - lo) - q * np.log(hi - y)
        node_list.append(y)
        logw_list.append(lw)
    grids = np.meshgrid(*node_list, indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    logw = np.zeros(pts.shape[0])
    for d, lw in enumerate(logw_list):
        logw += np.broadcast_to(
            lw.reshape([-1 if i == d else 1 for i in range(len(cells))]),
            grids[0].shape).ravel()
    vals = logf(pts)
    return float(logsumexp(logw + vals))


def log_integral_simplex2(logf, p: float, q: float, r: float, npts: int = 24,
                          panels: int = 12) -> float:
    """log integral of exp(logf(x1, x2)) over {0 < x1 < x2 < 1}.

    ``logf`` must behave like p*log(x) at x -> 0 in each coordinate,
    q*log(1-x) at x -> 1, and r*log(x2-x1) at the diagonal; those exponents
    are absorbed into the rules (Duffy substitution x1 = s*x2).
    """
    x2, w2 = weighted_nodes_01(2 * p + r + 1, q, npts, panels)
    s, ws = weighted_nodes_01(p, r, npts, panels)
    x1 = s[None, :] * x2[:, None]
    x2g = np.broadcast_to(x2[:, None], x1.shape)
    vals = logf(x1.ravel(), x2g.ravel()).reshape(x1.shape)
    # remove the absorbed endpoint factors from logf
    vals = vals - p * np.log(x1) - p * np.log(x2g) \
        - r * (np.log1p(-s)[None, :] + np.log(x2g)) - q * np.log1p(-x2g)
    logw = np.log(w2)[:, None] + np.log(ws)[None, :]
    return float(logsumexp(logw + vals))


def neg_tail_nodes(v_hi: float, p_at_hi: float, npts: int = 24, panels: int = 22):
    """Weighted nodes for integrals over (-inf, v_hi) of |v-v_hi|^p g(v) dv.

    Uses v = v_hi - t/(1-t); the decay of g at -infinity is handled by
    geometric panel grading toward t = 1, so g must decay at least like
    |v|^{-1-eps} (true for all integrands used here).
    """
    t, w = weighted_nodes_01(p_at_hi, 0.0, npts, panels)
    v = v_hi - t / (1.0 - t)
    wt = w * (1.0 - t) ** (-p_at_hi - 2.0)
    return v, wt
