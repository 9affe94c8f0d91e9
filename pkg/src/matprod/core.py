"""Shared primitives: partitions, particle configurations, chain parameters.

Conventions used across the package:

* particle configurations are 1-d numpy arrays, strictly increasing, with
  values in [0, 1] (the "increasing" convention; callers converting from
  decreasing-ordered sources must flip at the boundary);
* partitions are tuples of nonnegative ints, weakly decreasing, with trailing
  zeros stripped;
* all Gamma-ratio constants are assembled in log space via ``gammaln``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln


class ConstraintError(ValueError):
    """A parameter set violates one of the validity constraints."""


class DegenerateConfigError(ValueError):
    """A configuration has tied or otherwise degenerate coordinates."""


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def partition(parts) -> tuple:
    """Canonicalize a partition: ints, weakly decreasing, trailing zeros stripped."""
    parts = tuple(int(p) for p in parts)
    if any(p < 0 for p in parts):
        raise ValueError(f"partition parts must be nonnegative, got {parts}")
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        raise ValueError(f"partition parts must be weakly decreasing, got {parts}")
    while parts and parts[-1] == 0:
        parts = parts[:-1]
    return parts


def partition_weight(lam) -> int:
    return sum(partition(lam))


def partition_length(lam) -> int:
    return len(partition(lam))


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

def as_config(values, name: str = "config") -> np.ndarray:
    """Validate and return an ordered particle configuration in [0, 1]."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d array, got shape {x.shape}")
    if np.any(~np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    if np.any(np.diff(x) <= 0.0):
        raise DegenerateConfigError(f"{name} must be strictly increasing, got {x}")
    return x


def interlaces(y, x) -> bool:
    """True iff y_i <= x_i and x_{i-1} <= y_i for all i (weak interlacing y <= x)."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape != x.shape or y.ndim != 1:
        raise ValueError(f"length mismatch: y has shape {y.shape}, x has shape {x.shape}")
    if np.any(y > x):
        return False
    if y.size > 1 and np.any(x[:-1] > y[1:]):
        return False
    return True


def log_vandermonde(x) -> float:
    """Sum of log(x_j - x_i) over i < j; -inf sentinel on tied coordinates."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        return 0.0
    diffs = x[None, :] - x[:, None]
    iu = np.triu_indices(n, k=1)
    d = diffs[iu]
    if np.any(d <= 0.0):
        return -np.inf
    return float(np.sum(np.log(d)))


def cauchy_det(x, y) -> float:
    """det[1/(x_i - y_j)] via the product formula, evaluated in signed log space.

    Uses det = (-1)^{n(n-1)/2} Delta(x) Delta(y) / prod_{i,j}(x_i - y_j).
    """
    sign, logabs = cauchy_det_sign_log(x, y)
    return sign * math.exp(logabs)


def cauchy_det_sign_log(x, y) -> tuple:
    """(sign, log|det|) of the Cauchy determinant det[1/(x_i - y_j)]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    n = x.size
    diffs = x[:, None] - y[None, :]
    if np.any(diffs == 0.0):
        raise DegenerateConfigError("cauchy_det: coincident point x_i == y_j")
    lv_x = log_vandermonde(np.sort(x))
    lv_y = log_vandermonde(np.sort(y))
    # sorting changes Delta by the permutation sign
    sign = _sort_sign(x) * _sort_sign(y) * (-1) ** (n * (n - 1) // 2)
    sign *= int(np.prod(np.sign(diffs)))
    logabs = lv_x + lv_y - float(np.sum(np.log(np.abs(diffs))))
    return float(sign), logabs


def _sort_sign(x: np.ndarray) -> int:
    """Sign of the permutation sorting x increasingly (x assumed tie-free)."""
    order = np.argsort(x, kind="stable")
    visited = np.zeros(len(order), dtype=bool)
    sign = 1
    for i in range(len(order)):
        if visited[i]:
            continue
        j, clen = i, 0
        while not visited[j]:
            visited[j] = True
            j = order[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# chain parameters
# ---------------------------------------------------------------------------

MATRIX_THETAS = (0.5, 1.0, 2.0)  # orthogonal / unitary / symplectic


@dataclass(frozen=True)
class ChainParams:
    """Dimensions of the product matrix process.

    ``m`` holds m_1..m_p, ``nu`` holds nu_0..nu_p with nu_0 = 0; the k-th
    factor is an (n+nu_k) x (n+nu_{k-1}) truncation of a Haar matrix of size
    m_k.  beta = 2*theta.
    """

    theta: float
    n: int
    p: int
    m: tuple = field(default=())
    nu: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(v) for v in self.m))
        object.__setattr__(self, "nu", tuple(int(v) for v in self.nu))

    @property
    def big_m(self) -> int:
        """M = sum_i (m_i - n - nu_i), the variable count of the Jack density."""
        return sum(self.m[i] - self.n - self.nu[i + 1] for i in range(self.p))


def validate_chain_params(params: ChainParams) -> None:
    """Check conditions (c1), (c2) and basic sanity; raise ConstraintError if violated."""
    if params.theta <= 0:
        raise ConstraintError(f"theta must be positive, got {params.theta}")
    if params.n < 1:
        raise ConstraintError(f"n must be >= 1, got {params.n}")
    if params.p < 1:
        raise ConstraintError(f"p must be >= 1, got {params.p}")
    if len(params.m) != params.p:
        raise ConstraintError(f"m must have p={params.p} entries, got {len(params.m)}")
    if len(params.nu) != params.p + 1:
        raise ConstraintError(
            f"nu must have p+1={params.p + 1} entries nu_0..nu_p, got {len(params.nu)}")
    if params.nu[0] != 0:
        raise ConstraintError(f"nu_0 must be 0, got {params.nu[0]}")
    if any(v < 0 for v in params.nu):
        raise ConstraintError(f"nu entries must be nonnegative, got {params.nu}")
    if params.m[0] < 2 * params.n + params.nu[1]:
        raise ConstraintError(
            f"m_1 < 2n+nu_1: m_1={params.m[0]}, 2n+nu_1={2 * params.n + params.nu[1]}")
    for k in range(2, params.p + 1):
        want = params.n + params.nu[k] + 1
        if params.m[k - 1] != want:
            raise ConstraintError(
                f"m_{k} != n+nu_{k}+1: m_{k}={params.m[k - 1]}, n+nu_{k}+1={want}")


def validate_trajectory(configs, n: int, p: int) -> list:
    """Validate a trajectory x^1..x^p: each config ordered, consecutive interlacing."""
    if len(configs) != p:
        raise ValueError(f"trajectory must have p={p} configs, got {len(configs)}")
    out = [as_config(c, name=f"x^{k + 1}") for k, c in enumerate(configs)]
    for c in out:
        if c.size != n:
            raise ValueError(f"each config must have n={n} particles")
    for k in range(1, p):
        if not interlaces(out[k], out[k - 1]):
            raise ConstraintError(f"interlacing fails between steps {k} and {k + 1}")
    return out


# ---------------------------------------------------------------------------
# log-Gamma helpers
# ---------------------------------------------------------------------------

def log_gamma_ratio_range(theta: float, lo: int, hi: int, shift: int) -> float:
    """log prod_{j=lo}^{hi} Gamma(theta*j) / Gamma(theta*(j+shift))."""
    if hi < lo:
        return 0.0
    j = np.arange(lo, hi + 1, dtype=float)
    return float(np.sum(gammaln(theta * j) - gammaln(theta * (j + shift))))


def log_factorial(n: int) -> float:
    return math.lgamma(n + 1)
