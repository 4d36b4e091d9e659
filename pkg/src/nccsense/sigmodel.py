"""Synthetic multi-antenna baseband generator.

An M-antenna receiver observes K snapshots.  Under the noise-only
hypothesis each snapshot is circular complex Gaussian noise with a
per-antenna variance drawn once per block from a log-uniform spread of
``alpha_db`` decibels around unity (uncalibrated front ends).  Under the
signal hypothesis, q BPSK streams with per-stream power offsets
``gamma_db`` pass through a flat Rayleigh channel and are scaled so the
block hits an exact target SNR for the realized channel and noise floor.

Draw order within a block is part of the reproducibility contract:
noise variances, then channel, then symbols, then noise samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .streams import StreamPurpose, substream

_SQRT_HALF = math.sqrt(0.5)


class Hypothesis(str, Enum):
    H0 = "H0"  # noise only
    H1 = "H1"  # signal present


@dataclass(frozen=True)
class Scenario:
    """Static description of one simulated block family.

    ``snr_db`` is required under H1 and ignored under H0.  ``gamma_db``
    lists the per-stream power offsets and must have length q.
    """

    M: int
    K: int
    q: int
    alpha_db: float
    gamma_db: tuple[float, ...]
    hypothesis: Hypothesis
    seed: int
    snr_db: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "gamma_db", tuple(float(g) for g in self.gamma_db))
        object.__setattr__(self, "hypothesis", Hypothesis(self.hypothesis))
        for name in ("M", "K", "q"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if not (math.isfinite(self.alpha_db) and self.alpha_db >= 0.0):
            raise ValueError(f"alpha_db must be finite and >= 0, got {self.alpha_db!r}")
        if len(self.gamma_db) != self.q:
            raise ValueError(
                f"gamma_db must list one offset per stream: got {len(self.gamma_db)} for q={self.q}"
            )
        if any(not math.isfinite(g) for g in self.gamma_db):
            raise ValueError("gamma_db entries must be finite")
        if self.hypothesis is Hypothesis.H1:
            if self.snr_db is None or not math.isfinite(self.snr_db):
                raise ValueError("H1 scenarios need a finite snr_db")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed!r}")

    @property
    def gamma_linear(self) -> np.ndarray:
        return 10.0 ** (np.asarray(self.gamma_db, dtype=np.float64) / 10.0)


@dataclass(frozen=True)
class SampleBlock:
    """One realized block: samples plus the latent draw that produced it.

    ``samples`` is (M, K) complex128, C-contiguous, antenna-major.
    ``signal_scale`` is the linear power scale c applied to the signal part
    (0 under H0).  Arrays are frozen after construction.
    """

    samples: np.ndarray
    noise_variances: np.ndarray
    channel: np.ndarray
    signal_scale: float = field(default=0.0)

    def __post_init__(self):
        y = np.ascontiguousarray(self.samples, dtype=np.complex128)
        s2 = np.ascontiguousarray(self.noise_variances, dtype=np.float64)
        h = np.ascontiguousarray(self.channel, dtype=np.complex128)
        if y.ndim != 2:
            raise ValueError(f"samples must be 2-D, got shape {y.shape}")
        m, k = y.shape
        if m < 1 or k < 1:
            raise ValueError(f"samples need at least one antenna and snapshot, got {y.shape}")
        if s2.shape != (m,):
            raise ValueError(f"noise_variances must have shape ({m},), got {s2.shape}")
        if h.ndim != 2 or h.shape[0] != m:
            raise ValueError(f"channel must have shape ({m}, q), got {h.shape}")
        if not np.isfinite(y).all():
            raise ValueError("samples contain non-finite entries")
        if not (np.isfinite(s2).all() and (s2 > 0.0).all()):
            raise ValueError("noise variances must be finite and positive")
        if not np.isfinite(h).all():
            raise ValueError("channel contains non-finite entries")
        c = float(self.signal_scale)
        if not (math.isfinite(c) and c >= 0.0):
            raise ValueError(f"signal_scale must be finite and >= 0, got {c!r}")
        for arr in (y, s2, h):
            arr.flags.writeable = False
        object.__setattr__(self, "samples", y)
        object.__setattr__(self, "noise_variances", s2)
        object.__setattr__(self, "channel", h)
        object.__setattr__(self, "signal_scale", c)

    @property
    def M(self) -> int:
        return self.samples.shape[0]

    @property
    def K(self) -> int:
        return self.samples.shape[1]


def draw_noise_variances(M: int, alpha_db: float, rng: np.random.Generator) -> np.ndarray:
    """Per-antenna variances 10^(u/10) with u ~ U[-alpha_db, alpha_db]."""
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not (math.isfinite(alpha_db) and alpha_db >= 0.0):
        raise ValueError(f"alpha_db must be finite and >= 0, got {alpha_db!r}")
    u = rng.uniform(-alpha_db, alpha_db, size=M)
    return 10.0 ** (u / 10.0)


def draw_channel(M: int, q: int, rng: np.random.Generator) -> np.ndarray:
    """(M, q) flat Rayleigh channel, entries CN(0, 1)."""
    if M < 1 or q < 1:
        raise ValueError(f"M and q must be >= 1, got M={M}, q={q}")
    z = rng.standard_normal(size=(M, q, 2))
    return np.ascontiguousarray((z[..., 0] + 1j * z[..., 1]) * _SQRT_HALF)


def draw_symbols(q: int, K: int, gamma_db, rng: np.random.Generator) -> np.ndarray:
    """(q, K) real BPSK symbols, stream i at amplitude sqrt(10^(gamma_i/10))."""
    gamma_db = np.asarray(gamma_db, dtype=np.float64)
    if gamma_db.shape != (q,):
        raise ValueError(f"gamma_db must have shape ({q},), got {gamma_db.shape}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    amps = np.sqrt(10.0 ** (gamma_db / 10.0))
    bits = rng.integers(0, 2, size=(q, K))
    return np.ascontiguousarray((2.0 * bits - 1.0) * amps[:, None] + 0.0j)


def draw_noise(M: int, K: int, noise_variances, rng: np.random.Generator) -> np.ndarray:
    """(M, K) circular Gaussian noise, antenna m at variance noise_variances[m].

    Normal deviates are consumed snapshot-major so the stream layout does
    not depend on how callers post-process the block.
    """
    s2 = np.asarray(noise_variances, dtype=np.float64)
    if s2.shape != (M,):
        raise ValueError(f"noise_variances must have shape ({M},), got {s2.shape}")
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    z = rng.standard_normal(size=(K, M, 2))
    w = (z[..., 0] + 1j * z[..., 1]).T
    return np.ascontiguousarray(w * (np.sqrt(s2) * _SQRT_HALF)[:, None])


def _signal_power_terms(channel, gamma_linear, noise_variances) -> tuple[float, float]:
    """(trace of H diag(gamma) H^H, total noise power)."""
    h = np.asarray(channel)
    tr = float(np.einsum("mq,q->", np.abs(h) ** 2, np.asarray(gamma_linear, dtype=np.float64)))
    return tr, float(np.sum(noise_variances))


def signal_scale(channel, gamma_linear, noise_variances, snr_db: float) -> float:
    """Linear scale c giving 10*log10(c*tr(H diag(gamma) H^H) / sum(sigma^2)) = snr_db."""
    tr, noise_power = _signal_power_terms(channel, gamma_linear, noise_variances)
    if not (math.isfinite(tr) and tr > 0.0):
        raise ValueError(f"channel carries no signal power (trace {tr!r})")
    return 10.0 ** (float(snr_db) / 10.0) * noise_power / tr


def realized_snr_db(block: SampleBlock, gamma_linear) -> float:
    """SNR implied by a block's realized channel, noise floor and scale."""
    if block.signal_scale <= 0.0:
        raise ValueError("block carries no signal component")
    tr, noise_power = _signal_power_terms(block.channel, gamma_linear, block.noise_variances)
    return 10.0 * math.log10(block.signal_scale * tr / noise_power)


def draw_environment(
    M: int, q: int, alpha_db: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Block environment: noise variances first, then the channel."""
    s2 = draw_noise_variances(M, alpha_db, rng)
    h = draw_channel(M, q, rng)
    return s2, h


def assemble_block(
    scenario: Scenario,
    noise_variances: np.ndarray,
    channel: np.ndarray,
    rng: np.random.Generator,
) -> SampleBlock:
    """Realize one block for a fixed environment.

    ``rng`` supplies the measurement randomness only (symbols, then noise);
    the environment comes in explicitly so callers can pair hypotheses or
    sweep SNR over a common realization.
    """
    s = draw_symbols(scenario.q, scenario.K, scenario.gamma_db, rng)
    w = draw_noise(scenario.M, scenario.K, noise_variances, rng)
    if scenario.hypothesis is Hypothesis.H0:
        return SampleBlock(w, noise_variances, channel, 0.0)
    c = signal_scale(channel, scenario.gamma_linear, noise_variances, scenario.snr_db)
    y = math.sqrt(c) * (channel @ s) + w
    return SampleBlock(y, noise_variances, channel, c)


def generate_block(scenario: Scenario, rng: np.random.Generator | None = None) -> SampleBlock:
    """Draw a complete block; without an ``rng`` the scenario seed drives it."""
    if rng is None:
        rng = substream(scenario.seed, StreamPurpose.GENERATE, 0)
    s2, h = draw_environment(scenario.M, scenario.q, scenario.alpha_db, rng)
    return assemble_block(scenario, s2, h, rng)
