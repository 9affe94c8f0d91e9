"""Two-product symplectic machinery: Meijer G weights, determinantal density,
skew-orthogonal Jacobi polynomials, the closed-form skew-Hankel inverse, the
2x2 matrix correlation kernel, and Pfaffians.

Meijer G functions are evaluated by iterated beta-convolution quadrature (the
defining property used to build the density), never by contour integration;
all parameters arising here are real and the convolutions live on (0,1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import binom, gammaln
from scipy.special import jacobi as jacobi_poly

from . import _quad
from .core import ConstraintError, as_config, log_factorial

__all__ = [
    "TwoProductParams", "SkewPolySystem", "Kernel2x2",
    "meijer_g10_11", "meijer_g20_22", "meijer_gp0_pp",
    "two_product_log_density", "c_product", "hankel_inverse",
    "skew_jacobi_system", "kernel_assemble", "pfaffian",
    "schur_meijer_ratio_check",
]


@dataclass(frozen=True)
class TwoProductParams:
    """Two truncated symplectic factors (theta = 2), the second of rank-1 type.

    Derived exponents: a1 = 2 nu1 + 1, a2 = 2 nu2 + 1, b1 = 2(m1 - 2n - nu1) + 1.
    """
    n: int
    nu1: int
    nu2: int
    m1: int

    def __post_init__(self):
        if self.m1 < 2 * self.n + self.nu1:
            raise ConstraintError(
                f"m1 < 2n+nu1: m1={self.m1}, 2n+nu1={2 * self.n + self.nu1}")
        if self.n < 1 or self.nu1 < 0 or self.nu2 < 0:
            raise ConstraintError("need n >= 1 and nu1, nu2 >= 0")

    @property
    def a1(self) -> int:
        return 2 * self.nu1 + 1

    @property
    def a2(self) -> int:
        return 2 * self.nu2 + 1

    @property
    def b1(self) -> int:
        return 2 * (self.m1 - 2 * self.n - self.nu1) + 1


# ---------------------------------------------------------------------------
# Meijer G evaluators
# ---------------------------------------------------------------------------

def meijer_g10_11(a: float, b: float, x) -> np.ndarray | float:
    """G^{1,0}_{1,1}(a; b | x) = x^b (1-x)^{a-b-1} / Gamma(a-b) on [0,1], else 0."""
    if a - b <= 0:
        raise ValueError(f"need a - b > 0, got a={a}, b={b}")
    x = np.asarray(x, dtype=float)
    inside = (x >= 0.0) & (x <= 1.0)
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = xi ** b * (1.0 - xi) ** (a - b - 1.0) / math.gamma(a - b)
    return out if out.ndim else float(out)


def meijer_g20_22(alpha: float, beta_: float, a: float, b: float, y,
                  npts: int = 32, panels: int = 18) -> np.ndarray | float:
    """G^{2,0}_{2,2}(alpha, a; beta, b | y) on (0,1) via one beta convolution.

    Computed as y^b (1-y)^{alpha-beta+a-b-1} / (Gamma(alpha-beta) Gamma(a-b))
    times the Gauss-Jacobi integral of (y + (1-y)s)^{beta-a}.
    """
    if alpha - beta_ <= 0 or a - b <= 0:
        raise ValueError("need alpha - beta > 0 and a - b > 0")
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    if np.any((y <= 0) | (y >= 1)):
        raise ValueError("y must lie strictly inside (0,1)")
    s, w = _quad.weighted_nodes_01(a - b - 1.0, alpha - beta_ - 1.0, npts, panels)
    integ = ((y[:, None] + np.outer(1.0 - y, s)) ** (beta_ - a)) @ w
    out = (y ** b * (1.0 - y) ** (alpha - beta_ + a - b - 1.0) * integ
           / math.exp(gammaln(alpha - beta_) + gammaln(a - b)))
    return float(out[0]) if scalar else out


def meijer_gp0_pp(a_list, b_list, y, npts: int = 32, panels: int = 18):
    """G^{p,0}_{p,p}(a_1..a_p; b_1..b_p | y) by iterated beta convolution.

    Requires a_i - b_i > 0 for the chosen pairing; supports p <= 3 (the cost
    grows as nodes^(p-1)).
    """
    a_list = [float(v) for v in a_list]
    b_list = [float(v) for v in b_list]
    p = len(a_list)
    if p != len(b_list) or p < 1:
        raise ValueError("a_list and b_list must have equal positive length")
    if p > 3:
        raise ConstraintError("iterated convolution implemented for p <= 3")
    if p == 1:
        return meijer_g10_11(a_list[0], b_list[0], y)
    if p == 2:
        return meijer_g20_22(a_list[0], b_list[0], a_list[1], b_list[1], y,
                             npts, panels)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    a1, b1 = a_list[0], b_list[0]
    if a1 - b1 <= 0:
        raise ValueError("need a_1 - b_1 > 0")
    out = np.empty_like(y)
    for i, yi in enumerate(y):
        # x in (yi, 1): substitute x = yi + (1 - yi) s
        s, w = _quad.weighted_nodes_01(0.0, a1 - b1 - 1.0, npts, panels)
        x = yi + (1.0 - yi) * s
        inner = meijer_gp0_pp(a_list[1:], b_list[1:], yi / x, npts, panels)
        vals = x ** (b1 - 1.0) * inner
        out[i] = (1.0 - yi) ** (a1 - b1) * np.dot(w, vals) / math.gamma(a1 - b1)
    return out if out.size > 1 else float(out[0])


# ---------------------------------------------------------------------------
# determinantal density of the two-product symplectic ensemble
# ---------------------------------------------------------------------------

def _psi_matrix(tp: TwoProductParams, x: np.ndarray, npts: int = 32,
                panels: int = 18) -> np.ndarray:
    """(len(x), 2n) matrix of psi_k(x) = G^{2,0}(2nu2+2, 2(m1-2n+1)+k;
    2nu2+1, 2nu1+k | x), k = 0..2n-1."""
    cols = []
    for k in range(2 * tp.n):
        cols.append(meijer_g20_22(2 * tp.nu2 + 2, 2 * tp.nu2 + 1,
                                  2 * (tp.m1 - 2 * tp.n + 1) + k,
                                  2 * tp.nu1 + k, x, npts, panels))
    return np.stack([np.atleast_1d(c) for c in cols], axis=1)


def log_z_two_product(tp: TwoProductParams) -> float:
    """log normalization of the determinantal density.

    The printed constant has an undefined product bound (read as n) and omits
    the Gamma(2(m1-2n-nu1+1))^n absorbed when the weight rows are rewritten as
    Meijer G functions; both resolutions are pinned by quadrature normalization
    and by the pointwise match with the integral-representation density.
    """
    n, nu1, nu2, m1 = tp.n, tp.nu1, tp.nu2, tp.m1
    acc = gammaln(2 * (nu2 + 1)) - gammaln(2 * (nu2 + n + 1))
    j = np.arange(nu1 + 1, m1 - n + 1, dtype=float)
    acc += float(np.sum(gammaln(2 * j) - gammaln(2 * (j + n))))
    j = np.arange(1, n + 1, dtype=float)
    acc += float(np.sum(gammaln(2 * (m1 - 2 * n - nu1 + j)) + gammaln(2 * j)))
    acc -= n * gammaln(2 * (m1 - 2 * n - nu1 + 1))
    return acc


def two_product_log_density(x, tp: TwoProductParams, npts: int = 32,
                            panels: int = 18) -> float:
    """log of the 2n x 2n determinant density of the squared singular values
    of the symplectic two-product (monomial rows over Meijer-G weight rows)."""
    x = as_config(x)
    n = tp.n
    if x.size != n:
        raise ValueError(f"config has {x.size} particles, expected n={n}")
    if x[0] <= 0.0 or x[-1] >= 1.0:
        raise ConstraintError("density requires x strictly inside (0,1)")
    mono = x[:, None] ** np.arange(2 * n)[None, :]
    weights = _psi_matrix(tp, x, npts, panels)
    mat = np.vstack([mono, weights])
    sign, logabs = np.linalg.slogdet(mat)
    # the determinant has a fixed sign on the ordered simplex; fold it in
    expected = (-1.0) ** (n * (n - 1) // 2)
    if sign != expected:
        # a wrong sign at negligible magnitude is rounding noise at a zero of
        # the density (nearly coincident points); anything larger is a bug
        hadamard = float(np.sum(0.5 * np.log(np.sum(mat * mat, axis=1))))
        if sign == 0.0 or logabs < hadamard + math.log(1e-10):
            return -np.inf
        raise ArithmeticError("two-product determinant has unexpected sign")
    return logabs - log_z_two_product(tp)


def c_product(i: int, j: int, tp: TwoProductParams) -> float:
    """Entry of the skew moment matrix C^Product (antisymmetric in (i, j))."""
    if not (0 <= i <= 2 * tp.n - 1 and 0 <= j <= 2 * tp.n - 1):
        raise ValueError(f"indices must lie in 0..{2 * tp.n - 1}")
    num = (j - i) / ((2 * tp.nu2 + i + 2) * (2 * tp.nu2 + j + 2))
    return num * math.exp(gammaln(i + j + 2 * tp.nu1 + 1)
                          - gammaln(2 * (tp.m1 - 2 * tp.n + 1) + i + j + 1))


# ---------------------------------------------------------------------------
# closed-form inverse of the skew-symmetric Hankel-type matrix
# ---------------------------------------------------------------------------

def _theta_ratio_frac(x: int) -> Fraction:
    # Theta(x) = Gamma(x)/Gamma(2x) for positive integer x
    return Fraction(math.factorial(x - 1), math.factorial(2 * x - 1))


def hankel_matrix(n: int, a: float, b: float) -> np.ndarray:
    """C = ((j-i) Gamma(a+i+j) / Gamma(a+b+i+j+1)), size 2n x 2n."""
    idx = np.arange(2 * n)
    s = idx[:, None] + idx[None, :]
    return (idx[None, :] - idx[:, None]) * np.exp(gammaln(a + s) - gammaln(a + b + s + 1))


def hankel_inverse(n: int, a: float, b: float) -> np.ndarray:
    """Closed-form inverse Q of the skew Hankel-type matrix C (Q C = I).

    For odd integer (a, b) — the case arising from the symplectic product —
    every Gamma argument is a positive integer and the double sum is evaluated
    in exact rational arithmetic, so the result is correct to rounding.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if (float(a).is_integer() and float(b).is_integer()
            and int(a) % 2 == 1 and int(b) % 2 == 1 and a > 0 and b > 0):
        return _hankel_inverse_exact(n, int(a), int(b))
    return _hankel_inverse_float(n, float(a), float(b))


def _hankel_inverse_exact(n: int, a: int, b: int) -> np.ndarray:
    q, _ = _hankel_exact_pair(n, a, b)
    return np.array([[float(v) for v in row] for row in q])


def _hankel_exact_pair(n: int, a: int, b: int):
    """(Q, C) as exact Fraction matrices for odd integer a, b."""
    fact = math.factorial
    gam = lambda z: fact(z - 1)

    def coef(k: int, l: int) -> Fraction:
        c = Fraction(2 ** (4 * k), 2 ** (4 * l))
        c *= (a + b + 4 * l - 1) * (a + b + 4 * k + 1)
        c *= Fraction(gam(a + 2 * l) * gam(a + 1 + 2 * k),
                      gam(l + 1) * gam((a + b) // 2 + l)
                      * gam((a + 1) // 2 + l) * gam((b + 1) // 2 + l))
        c *= _theta_ratio_frac(k + 1) * _theta_ratio_frac((a + 1) // 2 + k)
        c *= _theta_ratio_frac((b + 1) // 2 + k) * _theta_ratio_frac((a + b) // 2 + k)
        return c

    def comb(m: int, r: int) -> int:
        return math.comb(m, r) if 0 <= r <= m else 0

    size = 2 * n
    q = [[Fraction(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(size):
            if i == j:
                continue
            total = Fraction(0)
            for k in range(n):
                for l in range(k + 1):
                    total += coef(k, l) * (
                        gam(a + b + 2 * l + i - 1) * gam(a + b + 2 * k + j)
                        * comb(2 * l, i) * comb(2 * k + 1, j)
                        - gam(a + b + 2 * l + j - 1) * gam(a + b + 2 * k + i)
                        * comb(2 * l, j) * comb(2 * k + 1, i))
            q[i][j] = (-1) ** (i + j) * Fraction(gam(b + 1),
                                                 gam(a + i) * gam(a + j)) * total
    c = [[Fraction((j - i) * gam(a + i + j), gam(a + b + i + j + 1))
          for j in range(size)] for i in range(size)]
    return q, c


def hankel_qc_residual(n: int, a: float, b: float) -> float:
    """max |(Q C - I)_{ij}| with the product taken in exact rational arithmetic
    for odd integer (a, b); float64 otherwise."""
    if (float(a).is_integer() and float(b).is_integer()
            and int(a) % 2 == 1 and int(b) % 2 == 1 and a > 0 and b > 0):
        q, c = _hankel_exact_pair(n, int(a), int(b))
        size = 2 * n
        worst = Fraction(0)
        for i in range(size):
            for j in range(size):
                s = sum(q[i][k] * c[k][j] for k in range(size))
                worst = max(worst, abs(s - (1 if i == j else 0)))
        return float(worst)
    q = hankel_inverse(n, a, b)
    c = hankel_matrix(n, a, b)
    return float(np.max(np.abs(q @ c - np.eye(2 * n))))


def _hankel_inverse_float(n: int, a: float, b: float) -> np.ndarray:
    def log_theta(x: float) -> float:
        return gammaln(x) - gammaln(2 * x)

    out = np.zeros((2 * n, 2 * n))
    for i in range(2 * n):
        for j in range(i + 1, 2 * n):
            total = 0.0
            for k in range(n):
                for l in range(k + 1):
                    log_c = ((4 * k - 4 * l) * math.log(2)
                             + math.log(a + b + 4 * l - 1) + math.log(a + b + 4 * k + 1)
                             + gammaln(a + 2 * l) + gammaln(a + 1 + 2 * k)
                             - gammaln(l + 1) - gammaln((a + b) / 2 + l)
                             - gammaln((a + 1) / 2 + l) - gammaln((b + 1) / 2 + l)
                             + log_theta(k + 1) + log_theta((a + 1) / 2 + k)
                             + log_theta((b + 1) / 2 + k) + log_theta((a + b) / 2 + k))
                    t1 = binom(2 * l, i) * binom(2 * k + 1, j)
                    if t1:
                        total += t1 * math.exp(log_c + gammaln(a + b + 2 * l + i - 1)
                                               + gammaln(a + b + 2 * k + j))
                    t2 = binom(2 * l, j) * binom(2 * k + 1, i)
                    if t2:
                        total -= t2 * math.exp(log_c + gammaln(a + b + 2 * l + j - 1)
                                               + gammaln(a + b + 2 * k + i))
            q = (-1) ** (i + j) * math.exp(gammaln(b + 1) - gammaln(a + i)
                                           - gammaln(a + j)) * total
            out[i, j] = q
            out[j, i] = -q
    return out


# ---------------------------------------------------------------------------
# skew-orthogonal Jacobi polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SkewPolySystem:
    """Skew-orthogonal polynomials q_0..q_{2n-1} for the weight
    (1-x)^{a+1} (1+x)^{b+1} on [-1,1], with norms r_0..r_{n-1}.

    Coefficient arrays are monomial, low degree first.
    """
    a: float
    b: float
    coeffs: tuple
    norms: tuple

    def eval(self, k: int, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs[k])

    def eval_deriv(self, k: int, x):
        return np.polynomial.polynomial.polyval(
            x, np.polynomial.polynomial.polyder(self.coeffs[k]))


def _p_jacobi_coeffs(k: int, a: float, b: float) -> np.ndarray:
    """Rescaled Jacobi polynomial p_k = 2^k k! Gamma(a+b+k+1)/Gamma(a+b+2k+1) P_k^{(a,b)}."""
    if k == 0:
        return np.array([1.0])
    c = np.asarray(jacobi_poly(k, a, b).coefficients)[::-1]  # low first
    scale = math.exp(k * math.log(2) + log_factorial(k)
                     + gammaln(a + b + k + 1) - gammaln(a + b + 2 * k + 1))
    return c * scale


def skew_jacobi_system(n: int, a: float, b: float) -> SkewPolySystem:
    """Skew-orthogonal polynomial system of the Jacobi-type weight.

    q_{2k} mixes the even-degree p_{2l}; q_{2k+1} = p_{2k+1}; the norms r_k are
    the printed closed form.  Skew-orthogonality is verified by quadrature in
    the tests.
    """
    if a <= -1 or b <= -1:
        raise ValueError("need a, b > -1")
    coeffs = []
    for k in range(n):
        q_even = np.zeros(2 * k + 1)
        for l in range(k + 1):
            scale = math.exp(
                (6 * k - 6 * l) * math.log(2) + log_factorial(k) - log_factorial(l)
                + gammaln(a / 2 + b / 2 + k + 1) - gammaln(a / 2 + b / 2 + l + 1)
                + gammaln(a / 2 + k + 1) - gammaln(a / 2 + l + 1)
                + gammaln(b / 2 + k + 1) - gammaln(b / 2 + l + 1)
                + gammaln(a + b + 4 * l + 2) - gammaln(a + b + 4 * k + 2))
            pl = _p_jacobi_coeffs(2 * l, a, b)
            q_even[: pl.size] += scale * pl
        coeffs.append(q_even)
        coeffs.append(_p_jacobi_coeffs(2 * k + 1, a, b))
    norms = []
    for k in range(n):
        log_inv_r = (gammaln(a + b + 4 * k + 2) + gammaln(a + b + 4 * k + 4)
                     - (a + b + 4 * k + 2) * math.log(2) - log_factorial(2 * k + 1)
                     - gammaln(a + 2 * k + 2) - gammaln(b + 2 * k + 2)
                     - gammaln(a + b + 2 * k + 2))
        norms.append(math.exp(-log_inv_r))
    # reorder so coeffs[j] is q_j
    ordered = []
    for k in range(n):
        ordered.append(coeffs[2 * k])
        ordered.append(coeffs[2 * k + 1])
    return SkewPolySystem(a=a, b=b, coeffs=tuple(ordered), norms=tuple(norms))


# ---------------------------------------------------------------------------
# the 2x2 correlation kernel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Kernel2x2:
    """Assembled correlation kernel of the two-product symplectic ensemble.

    ``q_product`` drives the double-sum form; ``q_skew`` is the same matrix
    reassembled from the skew-polynomial form of the final theorem — the two
    must agree, which cross-validates the closed-form inverse.
    """
    tp: TwoProductParams
    c_matrix: np.ndarray
    q_product: np.ndarray
    q_skew: np.ndarray
    _poly_coefs: np.ndarray

    def _phi(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return x[:, None] ** np.arange(2 * self.tp.n)[None, :]

    def _psi(self, x) -> np.ndarray:
        return _psi_matrix(self.tp, np.atleast_1d(np.asarray(x, dtype=float)))

    def entries(self, x, y, form: str = "sum") -> dict:
        """The four kernel blocks on the grid x cross y.

        form="sum" uses the double sums over Q^Product; form="skew" uses the
        skew-polynomial combination.
        """
        q = self.q_product if form == "sum" else self.q_skew
        phi_x, psi_x = self._phi(x), self._psi(x)
        phi_y, psi_y = self._phi(y), self._psi(y)
        return {
            "K11": psi_x @ q @ phi_y.T,
            "K12": -psi_x @ q @ psi_y.T,
            "K21": phi_x @ q @ phi_y.T,
            "K22": -phi_x @ q @ psi_y.T,
        }

    def rho1(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.einsum("ik,kl,il->i", self._psi(x), self.q_product, self._phi(x))

    def rho2(self, x, y) -> np.ndarray:
        """Two-point correlation on the grid x cross y (Pfaffian combination)."""
        e_xy = self.entries(x, y)
        e_yx = self.entries(y, x)
        r1x = self.rho1(x)
        r1y = self.rho1(y)
        return (r1x[:, None] * r1y[None, :]
                - 0.5 * (e_xy["K11"] * e_yx["K11"].T + e_xy["K22"] * e_yx["K22"].T
                         + e_xy["K12"] * e_yx["K21"].T + e_xy["K21"] * e_yx["K12"].T))


def _skew_poly_coefs(tp: TwoProductParams) -> np.ndarray:
    """Coefficients of P_m^Product: row m holds the expansion in powers/weights."""
    a1, a2, b1 = tp.a1, tp.a2, tp.b1
    size = 2 * tp.n
    out = np.zeros((size, size))
    for m in range(size):
        for i in range(m + 1):
            out[m, i] = ((-1) ** i * math.comb(m, i) * (a2 + i + 1)
                         * math.exp(gammaln(a1 + b1 + m + i - 1) - gammaln(a1 + i)))
    return out


def _skew_pair_matrix(tp: TwoProductParams) -> np.ndarray:
    """A with K^(21)(x,y) = P(x)^T A P(y): antisymmetrized (2l, 2k+1) couplings."""
    a, b = float(tp.a1), float(tp.b1)
    n = tp.n
    size = 2 * n
    amat = np.zeros((size, size))
    for k in range(n):
        for l in range(k + 1):
            log_c = ((4 * k - 4 * l) * math.log(2)
                     + math.log(a + b + 4 * l - 1) + math.log(a + b + 4 * k + 1)
                     + gammaln(a + 2 * l) + gammaln(a + 1 + 2 * k)
                     - gammaln(l + 1) - gammaln((a + b) / 2 + l)
                     - gammaln((a + 1) / 2 + l) - gammaln((b + 1) / 2 + l)
                     + gammaln(k + 1) - gammaln(2 * k + 2)
                     + gammaln((a + 1) / 2 + k) - gammaln(a + 1 + 2 * k)
                     + gammaln((b + 1) / 2 + k) - gammaln(b + 1 + 2 * k)
                     + gammaln((a + b) / 2 + k) - gammaln(a + b + 2 * k))
            c = math.exp(log_c + gammaln(b + 1))
            amat[2 * l, 2 * k + 1] += c
            amat[2 * k + 1, 2 * l] -= c
    return amat


def kernel_assemble(tp: TwoProductParams, tol: float = 1e-8) -> Kernel2x2:
    """Build C^Product, its closed-form inverse, and both kernel forms.

    The closed-form inverse is cross-checked against direct numerical
    inversion; failure of either check is raised as a formula-resolution
    incident rather than silently patched.
    """
    n = tp.n
    size = 2 * n
    c_mat = np.array([[c_product(i, j, tp) for j in range(size)] for i in range(size)])
    scale = np.arange(size) + 2.0 * tp.nu2 + 2.0
    q_hankel = hankel_inverse(n, tp.a1, tp.b1)
    q_prod = q_hankel * scale[:, None] * scale[None, :]
    resid = hankel_qc_residual(n, tp.a1, tp.b1)
    if resid > tol:
        raise ArithmeticError(
            f"closed-form inverse residual {resid:.3e} exceeds {tol:.1e}")
    direct = np.linalg.inv(c_mat)
    if np.max(np.abs(direct - q_prod)) > tol * max(1.0, np.max(np.abs(q_prod))):
        raise ArithmeticError("closed-form and direct inverses disagree")
    pcoef = _skew_poly_coefs(tp)
    q_skew = pcoef.T @ _skew_pair_matrix(tp) @ pcoef
    return Kernel2x2(tp=tp, c_matrix=c_mat, q_product=q_prod, q_skew=q_skew,
                     _poly_coefs=pcoef)


# ---------------------------------------------------------------------------
# Pfaffian
# ---------------------------------------------------------------------------

def pfaffian(a_mat, tol: float = 1e-12) -> float:
    """Pfaffian of an even-dimensional antisymmetric matrix via skew
    elimination with partial pivoting."""
    a = np.array(a_mat, dtype=float, copy=True)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("input must be a square matrix")
    if n % 2 != 0:
        raise ValueError("Pfaffian requires even dimension")
    scale = max(1.0, np.max(np.abs(a)))
    dev = np.max(np.abs(a + a.T))
    if dev > tol * scale:
        raise ValueError(f"input is not antisymmetric (deviation {dev:.3e})")
    a = 0.5 * (a - a.T)
    pf = 1.0
    for k in range(0, n - 1, 2):
        pivot = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if a[pivot, k] == 0.0:
            return 0.0
        if pivot != k + 1:
            a[[k + 1, pivot]] = a[[pivot, k + 1]]
            a[:, [k + 1, pivot]] = a[:, [pivot, k + 1]]
            pf = -pf
        pf *= a[k, k + 1]
        if k + 2 < n:
            u = a[k, k + 2:].copy()
            v = a[k + 1, k + 2:].copy()
            a[k + 2:, k + 2:] += (np.outer(v, u) - np.outer(u, v)) / a[k, k + 1]
    return pf


# ---------------------------------------------------------------------------
# Schur / Meijer-G corollary check
# ---------------------------------------------------------------------------

def schur_meijer_ratio_check(mu, n: int, big_m: int, p: int, x,
                             npts: int = 32, panels: int = 18):
    """Both sides of the Schur-as-Meijer-determinant identity; returns (lhs, rhs)."""
    from .core import log_vandermonde, partition
    from .jack import schur_eval

    mu = partition(mu)
    if len(mu) > p - 1 or p - 1 > big_m or big_m - p + 1 < n:
        raise ConstraintError("hypothesis requires l(mu) <= p-1 <= M and M-p+1 >= n")
    x = as_config(x)
    if x.size != n:
        raise ValueError(f"config has {x.size} particles, expected n={n}")
    vals = np.concatenate([x, np.ones(big_m - n)])
    lhs = schur_eval(mu, vals) / schur_eval(mu, np.ones(big_m))
    mu_full = list(mu) + [0] * (p - 1 - len(mu))
    wmat = np.empty((n, n))
    for j in range(1, n + 1):
        a_list = [mu_full[i - 1] + big_m - i + 1 for i in range(1, p)]
        a_list.append(big_m - p - n + j + 1)
        b_list = [mu_full[i - 1] + big_m - i for i in range(1, p)]
        b_list.append(j - 1)
        pref = math.exp(gammaln(big_m - n - p + 2) + gammaln(big_m - n + j)
                        - gammaln(big_m - n - p + 1 + j))
        wmat[:, j - 1] = pref * np.atleast_1d(
            meijer_gp0_pp(a_list, b_list, x, npts, panels))
    sign, logabs = np.linalg.slogdet(wmat)
    log_rhs = (logabs - (big_m - n) * float(np.sum(np.log1p(-x)))
               - log_vandermonde(x))
    rhs = sign * math.exp(log_rhs)
    return lhs, rhs
