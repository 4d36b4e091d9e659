"""Second-order sample statistics of a baseband block.

Two matrices summarize an (M, K) block Y: the Hermitian covariance
R = Y Y^H / K and the complex-symmetric pseudo-covariance C = Y Y^T / K.
Circular noise drives every entry of C toward zero; a noncircular signal
does not, which is what the detectors exploit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import DegenerateInputError
from .numerics import as_complex_matrix
from .sigmodel import SampleBlock

# An antenna whose average power underflows this floor cannot be normalized
# against; the block is treated as degenerate rather than dividing by ~0.
DEGENERATE_DIAGONAL_FLOOR = 1e-300


@dataclass(frozen=True)
class CovariancePair:
    """Sample covariance R, pseudo-covariance C, and the snapshot count."""

    rhat: np.ndarray
    chat: np.ndarray
    sample_count: int

    def __post_init__(self):
        r = np.ascontiguousarray(self.rhat, dtype=np.complex128)
        c = np.ascontiguousarray(self.chat, dtype=np.complex128)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"rhat must be square, got shape {r.shape}")
        if c.shape != r.shape:
            raise ValueError(f"chat shape {c.shape} does not match rhat {r.shape}")
        if not isinstance(self.sample_count, (int, np.integer)) or self.sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count!r}")
        r.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "rhat", r)
        object.__setattr__(self, "chat", c)
        object.__setattr__(self, "sample_count", int(self.sample_count))

    @property
    def M(self) -> int:
        return self.rhat.shape[0]

    def diagonal(self) -> np.ndarray:
        return self.rhat.diagonal().real

    def is_degenerate(self) -> bool:
        return bool(self.diagonal().min() <= DEGENERATE_DIAGONAL_FLOOR)


def require_regular(pair: CovariancePair) -> None:
    """Raise DegenerateInputError when any diagonal power is at the floor."""
    dmin = float(pair.diagonal().min())
    if dmin <= DEGENERATE_DIAGONAL_FLOOR:
        raise DegenerateInputError(
            f"covariance diagonal minimum {dmin:.3e} is at or below "
            f"{DEGENERATE_DIAGONAL_FLOOR:.0e}; an all-zero antenna cannot be normalized"
        )


def sample_covariances(block) -> CovariancePair:
    """Estimate (R, C) from a SampleBlock or a raw (M, K) complex array.

    The active kernel backend does the accumulation: upper triangles only,
    mirrored into the lower halves, so R is exactly Hermitian and C exactly
    symmetric by construction.
    """
    if isinstance(block, SampleBlock):
        y = block.samples
    else:
        y = as_complex_matrix(block, name="block")
        if y.shape[0] < 1 or y.shape[1] < 1:
            raise ValueError(f"block needs at least one antenna and snapshot, got {y.shape}")
        y = np.ascontiguousarray(y)
    r, c = kernels.sample_covariances(y)
    return CovariancePair(r, c, y.shape[1])


def population_covariances(
    channel, gamma_linear, noise_variances, signal_scale: float
) -> tuple[np.ndarray, np.ndarray]:
    """Exact (R, C) for the block model with real unit-power symbols.

    R = c H diag(gamma) H^H + diag(sigma^2) and, because the symbols are
    real, C = c H diag(gamma) H^T with no noise contribution.
    """
    h = as_complex_matrix(channel, name="channel")
    g = np.asarray(gamma_linear, dtype=np.float64)
    s2 = np.asarray(noise_variances, dtype=np.float64)
    if g.ndim != 1 or g.shape[0] != h.shape[1]:
        raise ValueError(f"gamma_linear must have shape ({h.shape[1]},), got {g.shape}")
    if s2.ndim != 1 or s2.shape[0] != h.shape[0]:
        raise ValueError(f"noise_variances must have shape ({h.shape[0]},), got {s2.shape}")
    c = float(signal_scale)
    if not (math.isfinite(c) and c >= 0.0):
        raise ValueError(f"signal_scale must be finite and >= 0, got {signal_scale!r}")
    hg = h * g[None, :]
    r = c * (hg @ h.conj().T) + np.diag(s2).astype(np.complex128)
    cmat = c * (hg @ h.T)
    return r, cmat


def population_statistic(r, c) -> float:
    """Detection statistic evaluated on exact model covariances.

    Same normalized-energy form as the sample statistic: zero for circular
    noise alone (diagonal R, zero C), strictly positive once C or the R
    off-diagonals carry anything.
    """
    r = np.ascontiguousarray(as_complex_matrix(r, name="R"))
    c = np.ascontiguousarray(as_complex_matrix(c, name="C"))
    if r.shape[0] != r.shape[1]:
        raise ValueError(f"R must be square, got shape {r.shape}")
    if c.shape != r.shape:
        raise ValueError(f"C shape {c.shape} does not match R {r.shape}")
    dmin = float(r.diagonal().real.min())
    if dmin <= DEGENERATE_DIAGONAL_FLOOR:
        raise DegenerateInputError(
            f"R diagonal minimum {dmin:.3e} is at or below {DEGENERATE_DIAGONAL_FLOOR:.0e}"
        )
    return float(kernels.ncc_statistic(r, c))
