"""Haar sampling on O(m), U(m), Sp(2m), truncations, and product chains.

Haar matrices are drawn by orthonormalizing Gaussian matrices with the
triangular-factor phase fix (naive QR is not Haar); the quaternionic case uses
modified Gram-Schmidt in 2x2-complex-block arithmetic, which keeps the
symplectic structure exact.  Batched variants power the Monte Carlo suites.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ChainParams, ConstraintError, MATRIX_THETAS, validate_chain_params

__all__ = [
    "RngState", "MatrixSample", "sample_haar", "truncate",
    "squared_singular_values", "sample_product_chain", "sample_product_chains",
    "GROUPS", "group_for_theta", "theta_for_group",
]

GROUPS = ("orthogonal", "unitary", "symplectic")
_THETA_OF_GROUP = {"orthogonal": 0.5, "unitary": 1.0, "symplectic": 2.0}


def group_for_theta(theta: float) -> str:
    for g, t in _THETA_OF_GROUP.items():
        if theta == t:
            return g
    raise ConstraintError(
        f"matrix sampling requires theta in {MATRIX_THETAS}, got {theta}")


def theta_for_group(group: str) -> float:
    return _THETA_OF_GROUP[group]


@dataclass(frozen=True)
class RngState:
    """Reproducible RNG address: identical (seed, stream) gives identical samples."""
    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,)))

    def split(self, k: int) -> "RngState":
        return RngState(self.seed, self.stream + k)


@dataclass(frozen=True)
class MatrixSample:
    """Dense matrix with its symmetry class; rows/cols count quaternionic
    dimensions for the symplectic case (entries are then 2rows x 2cols complex)."""
    entries: np.ndarray
    group: str
    rows: int
    cols: int


def _phase_fix_qr(a: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def _quaternion_gaussian(rng: np.random.Generator, size: int, m: int) -> np.ndarray:
    """(size, 2m, 2m) complex with iid standard-normal quaternion entries
    [[a+bi, c+di], [-c+di, a-bi]]."""
    a, b, c, d = rng.standard_normal((4, size, m, m))
    out = np.empty((size, 2 * m, 2 * m), dtype=complex)
    out[:, 0::2, 0::2] = a + 1j * b
    out[:, 0::2, 1::2] = c + 1j * d
    out[:, 1::2, 0::2] = -c + 1j * d
    out[:, 1::2, 1::2] = a - 1j * b
    return out


def _quaternion_mgs(z: np.ndarray, m: int) -> np.ndarray:
    """Batched modified Gram-Schmidt over quaternion columns of (size, 2m, 2m).

    Quaternion column j is the complex slab [:, :, 2j:2j+2]; the quaternionic
    inner product u*v is a 2x2 complex block and u*u is a positive multiple of
    the identity, so normalizing by its square root is the exact phase fix.
    """
    z = z.copy()
    for j in range(m):
        vj = z[:, :, 2 * j:2 * j + 2]
        for i in range(j):
            ui = z[:, :, 2 * i:2 * i + 2]
            proj = np.einsum("ska,skb->sab", ui.conj(), vj)
            vj = vj - np.einsum("ska,sab->skb", ui, proj)
        norm2 = np.einsum("ska,ska->s", vj.conj(), vj).real / 2.0
        z[:, :, 2 * j:2 * j + 2] = vj / np.sqrt(norm2)[:, None, None]
    return z


def _sample_haar_batch(group: str, m: int, size: int,
                       rng: np.random.Generator) -> np.ndarray:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if group == "orthogonal":
        return _phase_fix_qr(rng.standard_normal((size, m, m)))
    if group == "unitary":
        a = rng.standard_normal((size, m, m)) + 1j * rng.standard_normal((size, m, m))
        return _phase_fix_qr(a)
    if group == "symplectic":
        return _quaternion_mgs(_quaternion_gaussian(rng, size, m), m)
    raise ValueError(f"unknown group {group!r}")


def sample_haar(group: str, m: int, rng: RngState) -> MatrixSample:
    """One Haar-distributed matrix from O(m), U(m), or Sp(2m)."""
    entries = _sample_haar_batch(group, m, 1, rng.generator())[0]
    return MatrixSample(entries=entries, group=group, rows=m, cols=m)


def truncate(sample: MatrixSample, k: int, r: int) -> MatrixSample:
    """Upper-left k x r block; quaternionic dimensions for the symplectic case."""
    if not (1 <= k <= sample.rows and 1 <= r <= sample.cols):
        raise ValueError(
            f"truncation ({k}, {r}) out of range for a {sample.rows} x {sample.cols} sample")
    if sample.group == "symplectic":
        entries = sample.entries[: 2 * k, : 2 * r]
    else:
        entries = sample.entries[:k, :r]
    return MatrixSample(entries=entries, group=sample.group, rows=k, cols=r)


def _collapse_kramers(evals: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Collapse the doubled symplectic Gram spectrum (..., 2r) -> (..., r)."""
    pairs = evals.reshape(evals.shape[:-1] + (-1, 2))
    gap = np.abs(pairs[..., 1] - pairs[..., 0])
    if np.any(gap > tol):
        raise ArithmeticError(
            f"Kramers pair mismatch {gap.max():.3e} exceeds {tol:.1e}")
    return pairs.mean(axis=-1)


def squared_singular_values(sample: MatrixSample) -> np.ndarray:
    """Eigenvalues of T*T sorted increasingly (Kramers pairs collapsed for Sp)."""
    if sample.cols > sample.rows:
        raise ValueError("need cols <= rows (tall or square truncation)")
    t = sample.entries
    gram = t.conj().T @ t
    evals = np.linalg.eigvalsh(gram)
    if sample.group == "symplectic":
        evals = _collapse_kramers(evals)
    return evals


def _chain_batch(params: ChainParams, size: int,
                 rng: np.random.Generator) -> np.ndarray:
    group = group_for_theta(params.theta)
    n, p = params.n, params.p
    c = 2 if group == "symplectic" else 1
    traj = np.empty((size, p, n))
    prod = None
    for k in range(1, p + 1):
        mk = params.m[k - 1]
        rows, cols = n + params.nu[k], n + params.nu[k - 1]
        s = _sample_haar_batch(group, mk, size, rng)
        t = s[:, : c * rows, : c * cols]
        prod = t if prod is None else t @ prod
        gram = np.swapaxes(prod.conj(), -2, -1) @ prod
        evals = np.linalg.eigvalsh(gram)
        if group == "symplectic":
            evals = _collapse_kramers(evals)
        traj[:, k - 1, :] = evals
    return traj


def sample_product_chain(params: ChainParams, rng: RngState) -> list:
    """One trajectory x^1..x^p of squared singular values of running products."""
    validate_chain_params(params)
    traj = _chain_batch(params, 1, rng.generator())[0]
    return [traj[k] for k in range(params.p)]


def sample_product_chains(params: ChainParams, size: int, rng: RngState,
                          batch: int = 20000) -> np.ndarray:
    """(size, p, n) array of independent trajectories, drawn in batches."""
    validate_chain_params(params)
    gen = rng.generator()
    out = np.empty((size, params.p, params.n))
    done = 0
    while done < size:
        b = min(batch, size - done)
        out[done:done + b] = _chain_batch(params, b, gen)
        done += b
    return out
