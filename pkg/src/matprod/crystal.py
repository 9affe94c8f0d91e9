"""beta -> infinity crystallization: deterministic recursion and Gaussian field.

At beta = infinity the particles of the product process freeze onto a
deterministic recursion (roots of an explicit degree-n polynomial) and the
1/sqrt(beta) fluctuations form a Gaussian field whose precision matrix is read
off a quadratic form; both objects are built here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_config

__all__ = ["CrystalChain", "GaussField", "crystal_step", "argmax_solver",
           "jacobi_crystal", "crystal_chain", "gauss_field"]


def crystal_step(x, nu: int) -> np.ndarray:
    """One deterministic transition: roots of
    (1/n) sum_i (z - c x_i) prod_{j != i} (z - x_j) with c = (nu+1)/(n+nu+1).

    The polynomial has exactly one root in each bracket (x_{i-1}, x_i) with
    x_0 = 0, so bisection on those brackets is unconditionally robust.
    """
    x = as_config(x)
    n = x.size
    c = (nu + 1.0) / (n + nu + 1.0)
    # coefficients of (1/n) sum_i (z - c x_i) prod_{j != i}(z - x_j)
    coeffs = np.zeros(n + 1)
    for i in range(n):
        rest = np.poly(np.delete(x, i))          # prod_{j != i}(z - x_j)
        term = np.convolve([1.0, -c * x[i]], rest)
        coeffs += term / n
    roots = np.empty(n)
    brackets = np.concatenate([[0.0], x])
    for i in range(n):
        roots[i] = _bisect_poly(coeffs, brackets[i], brackets[i + 1])
    if np.any(~np.isfinite(roots)):
        raise ArithmeticError("crystal_step: bracket lost a root (coefficient pathology)")
    return roots


def _bisect_poly(coeffs: np.ndarray, lo: float, hi: float, iters: int = 200) -> float:
    flo = np.polyval(coeffs, lo)
    fhi = np.polyval(coeffs, hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        return np.nan
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = np.polyval(coeffs, mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < 1e-17 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def argmax_solver(x, nu: int, tol: float = 1e-14, max_iter: int = 100) -> np.ndarray:
    """Critical points of the transition weight: for each cell (x_{i-1}, x_i)
    solve sum_j 1/(y - x_j) + (nu+1)/y = 0 by safeguarded Newton.

    The log-weight is strictly concave on each cell, so the root is unique; the
    equation is strictly decreasing in y which gives the safeguard brackets.
    """
    x = as_config(x)
    n = x.size
    out = np.empty(n)
    brackets = np.concatenate([[0.0], x])
    for i in range(n):
        lo, hi = brackets[i], brackets[i + 1]
        y = 0.5 * (lo + hi)
        for it in range(max_iter):
            f = np.sum(1.0 / (y - x)) + (nu + 1.0) / y
            if f > 0.0:
                lo = y
            else:
                hi = y
            df = -np.sum(1.0 / (y - x) ** 2) - (nu + 1.0) / y ** 2
            step = -f / df
            y_new = y + step
            if not (lo < y_new < hi):
                y_new = 0.5 * (lo + hi)
            if abs(y_new - y) < tol * max(1.0, abs(y)):
                y = y_new
                break
            y = y_new
        else:
            raise ArithmeticError(f"argmax_solver: no convergence in cell {i}")
        out[i] = y
    return out


def jacobi_crystal(n: int, m: int, nu: int, tol: float = 1e-13,
                   max_iter: int = 200) -> np.ndarray:
    """Maximizer of the beta-Jacobi weight h = Delta(x)^2 prod x^{nu+1}(1-x)^{m-2n-nu+1}
    on the ordered cell, via damped Newton on the electrostatic gradient system."""
    if m - 2 * n - nu < 0:
        raise ValueError(f"need m - 2n - nu >= 0, got m={m}, n={n}, nu={nu}")
    a = nu + 1.0
    b = m - 2.0 * n - nu + 1.0
    # spread the initial guess around the n=1 solution (nu+1)/m
    x = np.sort((a + 2.0 * np.arange(n)) / (m + n))
    x = np.clip(x, 1e-6, 1 - 1e-6)

    def grad(x):
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        return 2.0 * np.sum(1.0 / diff, axis=1) + a / x - b / (1.0 - x)

    def hess(x):
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        h = 2.0 / diff ** 2
        np.fill_diagonal(h, 0.0)
        d = -np.sum(h, axis=1) - a / x ** 2 - b / (1.0 - x) ** 2
        h = -h.copy()
        np.fill_diagonal(h, -d)
        # h is now the negative Hessian (positive definite by concavity)
        return h

    for it in range(max_iter):
        g = grad(x)
        if np.max(np.abs(g)) < tol:
            return x
        step = np.linalg.solve(hess(x), g)
        lam = 1.0
        for _ in range(60):
            x_new = x + lam * step
            if (np.all(np.diff(x_new) > 0) and x_new[0] > 0 and x_new[-1] < 1
                    and np.max(np.abs(grad(x_new))) <= np.max(np.abs(g))):
                break
            lam *= 0.5
        else:
            raise ArithmeticError("jacobi_crystal: line search failed")
        x = x + lam * step
    raise ArithmeticError("jacobi_crystal: Newton did not converge")


@dataclass(frozen=True)
class CrystalChain:
    """Deterministic beta=infinity trajectory x~^1..x~^p with its step parameters
    nu_2..nu_p."""
    configs: tuple
    nus: tuple

    @property
    def n(self) -> int:
        return self.configs[0].size

    @property
    def p(self) -> int:
        return len(self.configs)


def crystal_chain(x1, nus) -> CrystalChain:
    """Iterate crystal_step from x~^1 with parameters nu_2..nu_p."""
    configs = [as_config(x1)]
    for nu in nus:
        configs.append(crystal_step(configs[-1], nu))
    return CrystalChain(configs=tuple(configs), nus=tuple(int(v) for v in nus))


@dataclass(frozen=True)
class GaussField:
    """Gaussian fluctuation field over xi_i^k for k = 2..p (xi^1 clamped to 0)."""
    precision: np.ndarray
    covariance: np.ndarray
    index: dict  # (k, i) -> flat position, k = 2..p, i = 0..n-1


def gauss_field(chain: CrystalChain) -> GaussField:
    """Assemble the precision matrix of the fluctuation field from the printed
    quadratic form and invert it (Cholesky certifies positive definiteness)."""
    n, p = chain.n, chain.p
    if p < 2:
        raise ValueError("need at least two steps for a fluctuation field")
    xs = chain.configs
    for k in range(1, p):
        if np.any(xs[k] >= xs[k - 1]) or np.any(xs[k][1:] <= xs[k - 1][:-1]):
            raise ValueError("crystal chain must interlace strictly")
    index = {(k, i): (k - 2) * n + i for k in range(2, p + 1) for i in range(n)}
    dim = n * (p - 1)
    hess = np.zeros((dim, dim))

    def var(k, i):
        # xi^1 is clamped to zero
        return None if k == 1 else index[(k, i)]

    def add_pair_sq(c, a, b):
        # contribution of c*(xi_a - xi_b)^2 to the Hessian of the log density
        if a is None and b is None:
            return
        if a is None:
            hess[b, b] += 2.0 * c
            return
        if b is None:
            hess[a, a] += 2.0 * c
            return
        hess[a, a] += 2.0 * c
        hess[b, b] += 2.0 * c
        hess[a, b] -= 2.0 * c
        hess[b, a] -= 2.0 * c

    for k in range(2, p + 1):
        xk, xkm = xs[k - 1], xs[k - 2]
        nu_k = chain.nus[k - 2]
        for i in range(n):
            for j in range(i + 1, n):
                add_pair_sq(0.5 / (xkm[i] - xkm[j]) ** 2, var(k - 1, i), var(k - 1, j))
        for i in range(n):
            for j in range(n):
                add_pair_sq(-0.25 / (xkm[i] - xk[j]) ** 2, var(k - 1, i), var(k, j))
        for i in range(n):
            a = var(k - 1, i)
            if a is not None:
                hess[a, a] += 2.0 * (nu_k + 2.0) / 4.0 / xkm[i] ** 2
            b = var(k, i)
            hess[b, b] += 2.0 * (-(nu_k + 1.0) / 4.0) / xk[i] ** 2
    precision = -hess
    try:
        np.linalg.cholesky(precision)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(
            "fluctuation precision matrix is not positive definite "
            "(interlacing degeneracy)") from exc
    covariance = np.linalg.inv(precision)
    covariance = 0.5 * (covariance + covariance.T)
    return GaussField(precision=precision, covariance=covariance, index=index)
