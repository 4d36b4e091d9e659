"""Pure-python kernel backend.

Numerically equivalent to the compiled core in ``_core`` but vectorized
with numpy instead of explicit loops, so floating-point summation order
differs; the two backends agree to rounding error, not bit-for-bit.
Inputs are trusted here (validation happens in the calling layer): blocks
are C-contiguous complex128 and covariance diagonals are positive.
"""

from __future__ import annotations

import math

import numpy as np


def sample_covariances(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian R and symmetric C sample covariances of an (M, K) block.

    Only upper triangles are taken from the matrix products; lower
    triangles are mirrored and the diagonal of R is forced exactly real,
    matching the compiled core's triangle-plus-mirror construction.
    """
    m, k = y.shape
    scale = 1.0 / k
    gr = y @ y.conj().T
    gc = y @ y.T
    iu = np.triu_indices(m, 1)
    il = (iu[1], iu[0])
    r = np.empty((m, m), dtype=np.complex128)
    c = np.empty((m, m), dtype=np.complex128)
    r[iu] = gr[iu] * scale
    r[il] = np.conj(r[iu])
    c[iu] = gc[iu] * scale
    c[il] = c[iu]
    di = np.diag_indices(m)
    r[di] = gr[di].real * scale
    c[di] = gc[di] * scale
    return r, c


def ncc_statistic(r: np.ndarray, c: np.ndarray) -> float:
    """Sum of normalized squared off-diagonal R and full C entries."""
    d = r.diagonal().real
    iu = np.triu_indices(d.size, 1)
    denom = d[iu[0]] * d[iu[1]]
    cross = (np.abs(r[iu]) ** 2 + np.abs(c[iu]) ** 2) / denom
    diag = np.abs(c.diagonal()) ** 2 / (2.0 * d * d)
    return float(cross.sum() + diag.sum())


def cav_statistic(r: np.ndarray) -> float:
    """Total absolute covariance over total power."""
    return float(np.abs(r).sum() / r.diagonal().real.sum())


def _logdet_cholesky(a: np.ndarray) -> float:
    """log det of a Hermitian matrix, +nan when it is not positive definite."""
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return math.nan
    diag = lower.diagonal().real
    if (diag <= 0.0).any():
        return math.nan
    return float(2.0 * np.log(diag).sum())


def hdm_statistic(r: np.ndarray) -> float:
    """Hadamard ratio test statistic, -log(det R / prod diag R)."""
    d = r.diagonal().real
    logdet = _logdet_cholesky(r)
    if math.isnan(logdet):
        return math.inf
    return float(np.log(d).sum() - logdet)


def lmpit_statistic(r: np.ndarray) -> float:
    """Squared Frobenius norm of the diagonally normalized covariance."""
    d = r.diagonal().real
    dn = np.sqrt(d)
    q = r / np.outer(dn, dn)
    return float((np.abs(q) ** 2).sum())


def nchdm_statistic(r: np.ndarray, c: np.ndarray) -> float:
    """Hadamard ratio of the augmented covariance [[R, C], [C*, R*]]."""
    aug = np.block([[r, c], [c.conj(), r.conj()]])
    d = aug.diagonal().real
    logdet = _logdet_cholesky(aug)
    if math.isnan(logdet):
        return math.inf
    return float(np.log(d).sum() - logdet)
