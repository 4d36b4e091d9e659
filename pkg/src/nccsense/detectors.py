"""Detection statistics, thresholds and verdicts.

All detectors share one polarity: larger statistic means "signal present",
and a statistic exactly at threshold decides H1.  The noncircular
covariance (ncc) detector gets a closed-form threshold from its asymptotic
null law, 2K * T ~ chi-square with 2*M^2 degrees of freedom; the reference
detectors are calibrated empirically by the harness.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels as kernels
from .errors import DegenerateInputError
from .estimation import CovariancePair, require_regular
from .numerics import ChiSquare, as_complex_matrix
from .sigmodel import Hypothesis


class DetectorKind(str, Enum):
    NCC = "ncc"  # noncircular covariance test
    CAV = "cav"  # covariance absolute value
    HDM = "hdm"  # Hadamard ratio
    LMPIT = "lmpit"  # locally most powerful invariant test
    NCHDM = "nchdm"  # Hadamard ratio of the augmented covariance


class NonPositiveDefiniteWarning(RuntimeWarning):
    """A determinant-based statistic met a non-PD sample covariance."""


@dataclass(frozen=True)
class Verdict:
    """Outcome of one detection: the statistic, the bar it was held to,
    and the decision (H1 when statistic >= threshold)."""

    detector: DetectorKind
    statistic: float
    threshold: float
    decision: Hypothesis
    sample_count: int
    antenna_count: int


def ncc_statistic(pair: CovariancePair) -> float:
    """Noncircular covariance statistic of an estimated (R, C) pair.

    Off-diagonal R and C entries are normalized by the product of the two
    antenna powers, diagonal C entries by twice the squared power; the
    statistic sums the squared magnitudes of all of them.
    """
    require_regular(pair)
    return float(kernels.ncc_statistic(pair.rhat, pair.chat))


def ncc_threshold(M: int, K: int, target_pf: float) -> float:
    """Closed-form threshold with asymptotic false-alarm rate ``target_pf``."""
    if M < 1 or K < 1:
        raise ValueError(f"M and K must be >= 1, got M={M}, K={K}")
    if not 0.0 < target_pf < 1.0:
        raise ValueError(f"target_pf must lie in (0, 1), got {target_pf!r}")
    return ChiSquare(2 * M * M).inverse_survival(target_pf) / (2.0 * K)


_KERNEL_DISPATCH = {
    DetectorKind.NCC: lambda r, c: kernels.ncc_statistic(r, c),
    DetectorKind.CAV: lambda r, c: kernels.cav_statistic(r),
    DetectorKind.HDM: lambda r, c: kernels.hdm_statistic(r),
    DetectorKind.LMPIT: lambda r, c: kernels.lmpit_statistic(r),
    DetectorKind.NCHDM: lambda r, c: kernels.nchdm_statistic(r, c),
}


def _statistics_from_matrices(kinds, r, c) -> np.ndarray:
    """Unvalidated fast path shared with the experiment harness."""
    out = np.empty(len(kinds), dtype=np.float64)
    for i, kind in enumerate(kinds):
        out[i] = _KERNEL_DISPATCH[kind](r, c)
    return out


def baseline_statistic(kind: DetectorKind, pair: CovariancePair) -> float:
    """Reference-detector statistic; +inf (with a warning) on a non-PD matrix."""
    kind = DetectorKind(kind)
    if kind is DetectorKind.NCC:
        raise ValueError("ncc is not a baseline; call ncc_statistic")
    require_regular(pair)
    value = float(_KERNEL_DISPATCH[kind](pair.rhat, pair.chat))
    if math.isinf(value):
        warnings.warn(
            f"{kind.value}: sample covariance is not positive definite "
            f"(M={pair.M}, K={pair.sample_count}); statistic forced to +inf",
            NonPositiveDefiniteWarning,
            stacklevel=2,
        )
    return value


def statistic(kind: DetectorKind, pair: CovariancePair) -> float:
    """Statistic of any detector kind under the common polarity."""
    kind = DetectorKind(kind)
    if kind is DetectorKind.NCC:
        return ncc_statistic(pair)
    return baseline_statistic(kind, pair)


def statistics_vector(kinds, pair: CovariancePair) -> np.ndarray:
    """Statistics for several detectors on one pair, degeneracy checked once.

    Unlike baseline_statistic this does not warn on +inf values; bulk
    Monte-Carlo callers count them as H1 decisions directly.
    """
    kinds = [DetectorKind(k) for k in kinds]
    require_regular(pair)
    return _statistics_from_matrices(kinds, pair.rhat, pair.chat)


def detect(kind: DetectorKind, pair: CovariancePair, threshold: float) -> Verdict:
    """Compare a detector statistic against ``threshold`` (ties go to H1)."""
    kind = DetectorKind(kind)
    threshold = float(threshold)
    if not math.isfinite(threshold):
        raise ValueError(f"threshold must be finite, got {threshold!r}")
    value = statistic(kind, pair)
    if math.isnan(value):
        raise DegenerateInputError(f"{kind.value} statistic is NaN")
    decision = Hypothesis.H1 if value >= threshold else Hypothesis.H0
    return Verdict(kind, value, threshold, decision, pair.sample_count, pair.M)


def ncc_multiplication_count(M: int, K: int) -> int:
    """Complex multiplications for one block: covariances plus statistic.

    Each of the M(M+1)/2 upper-triangle entries of R and C costs K products
    and one scaling; the statistic costs three multiplies per off-diagonal
    term and four per diagonal C term.  Total M^2 (K+4) + M (K+2).
    """
    if M < 1 or K < 1:
        raise ValueError(f"M and K must be >= 1, got M={M}, K={K}")
    return M * M * (K + 4) + M * (K + 2)


@dataclass(frozen=True)
class InstrumentedResult:
    """Outcome of the counting pipeline: the statistic, the multiply tally,
    and how many terms each of the three sums contributed."""

    statistic: float
    multiplications: int
    term_counts: tuple[int, int, int]


def ncc_pipeline_instrumented(samples) -> InstrumentedResult:
    """Scalar reimplementation of the ncc pipeline that counts every
    complex multiplication it performs.

    Slow by design; exists so the advertised operation count can be
    checked against an actual execution rather than trusted.
    """
    y = as_complex_matrix(samples, name="samples")
    m, k = y.shape
    if m < 1 or k < 1:
        raise ValueError(f"samples need at least one antenna and snapshot, got {y.shape}")
    mults = 0
    r = np.zeros((m, m), dtype=np.complex128)
    c = np.zeros((m, m), dtype=np.complex128)
    for a in range(m):
        for b in range(a, m):
            racc = 0.0 + 0.0j
            cacc = 0.0 + 0.0j
            for t in range(k):
                racc += y[a, t] * np.conj(y[b, t])
                mults += 1
                cacc += y[a, t] * y[b, t]
                mults += 1
            r[a, b] = racc * (1.0 / k)
            mults += 1
            c[a, b] = cacc * (1.0 / k)
            mults += 1
            r[b, a] = np.conj(r[a, b])
            c[b, a] = c[a, b]
    diag = r.diagonal().real
    if diag.min() <= 0.0:
        raise DegenerateInputError("instrumented pipeline met a nonpositive diagonal")

    cross_r = 0.0
    n_cross_r = 0
    for a in range(m):
        for b in range(a + 1, m):
            num = abs(r[a, b]) ** 2
            mults += 1
            den = diag[a] * diag[b]
            mults += 1
            cross_r += num / den
            mults += 1
            n_cross_r += 1
    diag_c = 0.0
    n_diag_c = 0
    for a in range(m):
        num = abs(c[a, a]) ** 2
        mults += 1
        sq = diag[a] * diag[a]
        mults += 1
        den = 2.0 * sq
        mults += 1
        diag_c += num / den
        mults += 1
        n_diag_c += 1
    cross_c = 0.0
    n_cross_c = 0
    for a in range(m):
        for b in range(a + 1, m):
            num = abs(c[a, b]) ** 2
            mults += 1
            den = diag[a] * diag[b]
            mults += 1
            cross_c += num / den
            mults += 1
            n_cross_c += 1

    return InstrumentedResult(
        statistic=float(cross_r + diag_c + cross_c),
        multiplications=mults,
        term_counts=(n_cross_r, n_diag_c, n_cross_c),
    )
