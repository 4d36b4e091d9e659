"""Deterministic Monte-Carlo experiment engine.

Every trial derives its randomness from (master seed, purpose, trial
index) substreams, so results depend only on the experiment spec and seed,
never on worker count or chunking.  Paired comparisons share the per-trial
environment stream (noise floor and channel) between the H0 and H1 legs,
while measurement streams stay disjoint by purpose; an SNR sweep reuses
one realized block per trial and rescales only the signal part, so curves
vary smoothly along the grid.

Detection probabilities are counted against fixed thresholds: closed-form
for the ncc detector (unless empirical mode is requested), empirical H0
quantiles from a separate calibration stream family for everything else.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detectors import DetectorKind, _statistics_from_matrices, ncc_threshold
from .errors import CalibrationError, DegenerateInputError
from .estimation import DEGENERATE_DIAGONAL_FLOOR
from . import _kernels as kernels
from .numerics import ChiSquare
from .sigmodel import (
    Hypothesis,
    Scenario,
    _signal_power_terms,
    assemble_block,
    draw_environment,
    draw_noise,
    draw_symbols,
)
from .streams import StreamPurpose, substream

SWEEP_SNR = "snr_db"
SWEEP_PF = "pf"

THRESHOLD_THEORETICAL = "theoretical"
THRESHOLD_EMPIRICAL = "empirical"

# Empirical quantiles need enough tail mass to be meaningful: at least
# 100 calibration statistics above the target false-alarm fraction.
MIN_CAL_TAIL = 100

CSV_HEADER = (
    "detector,sweep_var,sweep_value,pf_target,pf_hat,pd_hat,"
    "stderr_pd,threshold,n_trials,seed"
)

MIN_NULL_TRIALS = 10_000


@dataclass(frozen=True)
class ExperimentSpec:
    """Complete, seedable description of one Monte-Carlo experiment.

    ``pf`` is the false-alarm target for SNR sweeps; ``snr_db`` is the
    fixed operating point for false-alarm (ROC) sweeps.  ``grid`` holds
    the swept values, strictly increasing.
    """

    M: int
    K: int
    q: int
    alpha_db: float
    gamma_db: tuple[float, ...]
    detectors: tuple[DetectorKind, ...]
    sweep_var: str
    grid: tuple[float, ...]
    n_trials: int
    n_cal_trials: int
    master_seed: int
    pf: float | None = None
    snr_db: float | None = None
    ncc_threshold_mode: str = THRESHOLD_THEORETICAL

    def __post_init__(self):
        object.__setattr__(self, "gamma_db", tuple(float(g) for g in self.gamma_db))
        object.__setattr__(self, "detectors", tuple(DetectorKind(d) for d in self.detectors))
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        for name in ("M", "K", "q", "n_trials", "n_cal_trials", "master_seed"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {v!r}")
        if self.M < 1 or self.K < 1 or self.q < 1:
            raise ValueError("M, K and q must all be >= 1")
        if not (math.isfinite(self.alpha_db) and self.alpha_db >= 0.0):
            raise ValueError(f"alpha_db must be finite and >= 0, got {self.alpha_db!r}")
        if len(self.gamma_db) != self.q:
            raise ValueError(
                f"gamma_db must list one offset per stream: got {len(self.gamma_db)} for q={self.q}"
            )
        if not self.detectors:
            raise ValueError("at least one detector is required")
        if len(set(self.detectors)) != len(self.detectors):
            raise ValueError("detector list contains duplicates")
        if self.sweep_var not in (SWEEP_SNR, SWEEP_PF):
            raise ValueError(f"sweep_var must be {SWEEP_SNR!r} or {SWEEP_PF!r}")
        if not self.grid:
            raise ValueError("sweep grid is empty")
        if any(not math.isfinite(g) for g in self.grid):
            raise ValueError("sweep grid entries must be finite")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.n_cal_trials < 0:
            raise ValueError(f"n_cal_trials must be >= 0, got {self.n_cal_trials}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        if self.ncc_threshold_mode not in (THRESHOLD_THEORETICAL, THRESHOLD_EMPIRICAL):
            raise ValueError(
                f"ncc_threshold_mode must be {THRESHOLD_THEORETICAL!r} or "
                f"{THRESHOLD_EMPIRICAL!r}, got {self.ncc_threshold_mode!r}"
            )
        if self.sweep_var == SWEEP_SNR:
            if self.pf is None or not 0.0 < self.pf < 1.0:
                raise ValueError("SNR sweeps need a target pf in (0, 1)")
        else:
            if self.snr_db is None or not math.isfinite(self.snr_db):
                raise ValueError("false-alarm sweeps need a finite snr_db")
            if any(not 0.0 < g < 1.0 for g in self.grid):
                raise ValueError("false-alarm grid values must lie in (0, 1)")


@dataclass(frozen=True)
class CurvePoint:
    """One (detector, sweep value) cell of a finished experiment.

    ``wall_time_s`` is the wall-clock duration of the whole run that
    produced the point; it is informational and excluded from CSV output.
    """

    detector: DetectorKind
    sweep_var: str
    sweep_value: float
    pf_target: float
    empirical_pf: float
    empirical_pd: float
    stderr_pd: float
    threshold: float
    n_trials: int
    master_seed: int
    wall_time_s: float


@dataclass(frozen=True)
class NullDistributionSummary:
    """Moments and KS distance of the scaled null statistic 2K*T."""

    M: int
    K: int
    n_trials: int
    dof: int
    mean: float
    variance: float
    ks_distance: float
    master_seed: int


def binomial_stderr(p_hat: float, n: int) -> float:
    """Standard error sqrt(p(1-p)/n) of an empirical proportion."""
    p_hat = float(p_hat)
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"p_hat must lie in [0, 1], got {p_hat!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.sqrt(p_hat * (1.0 - p_hat) / n)


def empirical_threshold(statistics, target_pf: float) -> float:
    """Threshold whose empirical exceedance rate is at most ``target_pf``.

    With n sorted statistics the threshold is the order statistic at
    0-based index ceil((1 - pf) * n) - 1; ties above it all decide H1.
    """
    stats = np.asarray(statistics, dtype=np.float64).ravel()
    n = stats.size
    if n < 1:
        raise ValueError("need at least one calibration statistic")
    if not 0.0 < float(target_pf) < 1.0:
        raise ValueError(f"target_pf must lie in (0, 1), got {target_pf!r}")
    if np.isnan(stats).any():
        raise ValueError("calibration statistics contain NaN")
    order = np.sort(stats)
    idx = math.ceil((1.0 - float(target_pf)) * n) - 1
    idx = min(max(idx, 0), n - 1)
    return float(order[idx])


def _require_cal_budget(n_cal: int, target_pf: float) -> None:
    needed = math.ceil(MIN_CAL_TAIL / float(target_pf))
    if n_cal < needed:
        raise CalibrationError(
            f"{n_cal} calibration trials cannot resolve pf={target_pf:g}; "
            f"need at least {needed} (>= {MIN_CAL_TAIL} tail samples)"
        )


def _check_diagonal(r: np.ndarray, trial: int) -> None:
    if r.diagonal().real.min() <= DEGENERATE_DIAGONAL_FLOOR:
        raise DegenerateInputError(f"degenerate sample covariance in trial {trial}")


def _h0_stats_chunk(task) -> np.ndarray:
    """Statistics of H0 blocks for trials [start, stop), one row per trial."""
    (m, k, q, alpha_db, gamma_db, kind_values, seed, env_p, meas_p, start, stop) = task
    kinds = [DetectorKind(v) for v in kind_values]
    scenario = Scenario(
        M=m, K=k, q=q, alpha_db=alpha_db, gamma_db=gamma_db,
        hypothesis=Hypothesis.H0, seed=seed,
    )
    env_purpose = StreamPurpose(env_p)
    meas_purpose = StreamPurpose(meas_p)
    out = np.empty((stop - start, len(kinds)), dtype=np.float64)
    for trial in range(start, stop):
        s2, h = draw_environment(m, q, alpha_db, substream(seed, env_purpose, trial))
        block = assemble_block(scenario, s2, h, substream(seed, meas_purpose, trial))
        r, c = kernels.sample_covariances(block.samples)
        _check_diagonal(r, trial)
        out[trial - start] = _statistics_from_matrices(kinds, r, c)
    return out


def _pd_sweep_chunk(task) -> tuple[np.ndarray, np.ndarray]:
    """H0 and per-SNR H1 exceedance counts for trials [start, stop).

    The H1 leg realizes symbols and noise once per trial and rescales the
    signal part for every grid value, so only the scale differs along the
    sweep (common random numbers).
    """
    (m, k, q, alpha_db, gamma_db, kind_values, snr_grid, thresholds, seed, start, stop) = task
    kinds = [DetectorKind(v) for v in kind_values]
    h0_scenario = Scenario(
        M=m, K=k, q=q, alpha_db=alpha_db, gamma_db=gamma_db,
        hypothesis=Hypothesis.H0, seed=seed,
    )
    gamma_lin = 10.0 ** (np.asarray(gamma_db, dtype=np.float64) / 10.0)
    h0_counts = np.zeros(len(kinds), dtype=np.int64)
    h1_counts = np.zeros((len(snr_grid), len(kinds)), dtype=np.int64)
    ybuf = np.empty((m, k), dtype=np.complex128)
    for trial in range(start, stop):
        s2, h = draw_environment(m, q, alpha_db, substream(seed, StreamPurpose.EVAL_ENV, trial))

        block = assemble_block(h0_scenario, s2, h, substream(seed, StreamPurpose.EVAL_H0_MEAS, trial))
        r, c = kernels.sample_covariances(block.samples)
        _check_diagonal(r, trial)
        h0_counts += _statistics_from_matrices(kinds, r, c) >= thresholds

        rng = substream(seed, StreamPurpose.EVAL_H1_MEAS, trial)
        symbols = draw_symbols(q, k, gamma_db, rng)
        noise = draw_noise(m, k, s2, rng)
        hs = h @ symbols
        tr, noise_power = _signal_power_terms(h, gamma_lin, s2)
        if not (math.isfinite(tr) and tr > 0.0):
            raise DegenerateInputError(f"channel carries no signal power in trial {trial}")
        for j, snr in enumerate(snr_grid):
            scale = 10.0 ** (snr / 10.0) * noise_power / tr
            np.multiply(hs, math.sqrt(scale), out=ybuf)
            ybuf += noise
            r, c = kernels.sample_covariances(ybuf)
            _check_diagonal(r, trial)
            h1_counts[j] += _statistics_from_matrices(kinds, r, c) >= thresholds
    return h0_counts, h1_counts


def _roc_chunk(task) -> tuple[np.ndarray, np.ndarray]:
    """Per-(pf, detector) exceedance counts for trials [start, stop)."""
    (m, k, q, alpha_db, gamma_db, kind_values, snr_db, thresholds, seed, start, stop) = task
    kinds = [DetectorKind(v) for v in kind_values]
    h0_scenario = Scenario(
        M=m, K=k, q=q, alpha_db=alpha_db, gamma_db=gamma_db,
        hypothesis=Hypothesis.H0, seed=seed,
    )
    h1_scenario = Scenario(
        M=m, K=k, q=q, alpha_db=alpha_db, gamma_db=gamma_db,
        hypothesis=Hypothesis.H1, seed=seed, snr_db=snr_db,
    )
    h0_counts = np.zeros(thresholds.shape, dtype=np.int64)
    h1_counts = np.zeros(thresholds.shape, dtype=np.int64)
    for trial in range(start, stop):
        s2, h = draw_environment(m, q, alpha_db, substream(seed, StreamPurpose.EVAL_ENV, trial))
        for scenario, purpose, counts in (
            (h0_scenario, StreamPurpose.EVAL_H0_MEAS, h0_counts),
            (h1_scenario, StreamPurpose.EVAL_H1_MEAS, h1_counts),
        ):
            block = assemble_block(scenario, s2, h, substream(seed, purpose, trial))
            r, c = kernels.sample_covariances(block.samples)
            _check_diagonal(r, trial)
            counts += _statistics_from_matrices(kinds, r, c) >= thresholds
    return h0_counts, h1_counts


def _chunk_bounds(n: int, workers: int) -> list[tuple[int, int]]:
    n_chunks = 1 if workers <= 1 else min(n, workers * 4)
    edges = np.linspace(0, n, n_chunks + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _map_chunks(fn, prefix: tuple, n: int, workers: int) -> list:
    """Run ``fn`` over contiguous trial ranges, locally or in processes.

    Chunk results come back in trial order; per-trial substreams make the
    values themselves independent of the split, so any reduction over the
    ordered results is reproducible for every worker count.
    """
    tasks = [prefix + bounds for bounds in _chunk_bounds(n, workers)]
    if workers <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _collect_h0_statistics(
    spec: ExperimentSpec, kinds, n: int,
    env_purpose: StreamPurpose, meas_purpose: StreamPurpose, workers: int,
) -> np.ndarray:
    prefix = (
        spec.M, spec.K, spec.q, spec.alpha_db, spec.gamma_db,
        tuple(DetectorKind(k).value for k in kinds),
        spec.master_seed, int(env_purpose), int(meas_purpose),
    )
    chunks = _map_chunks(_h0_stats_chunk, prefix, n, workers)
    return np.concatenate(chunks, axis=0)


def run_pf_calibration(
    spec: ExperimentSpec, detector: DetectorKind, target_pf: float, workers: int = 1
) -> float:
    """Empirical H0 threshold for one detector at ``target_pf``.

    Uses the calibration stream family, which is disjoint from evaluation
    streams; the result depends only on (spec scenario, seed, target_pf).
    """
    kind = DetectorKind(detector)
    if not 0.0 < float(target_pf) < 1.0:
        raise ValueError(f"target_pf must lie in (0, 1), got {target_pf!r}")
    _require_cal_budget(spec.n_cal_trials, target_pf)
    stats = _collect_h0_statistics(
        spec, (kind,), spec.n_cal_trials,
        StreamPurpose.CALIBRATION_ENV, StreamPurpose.CALIBRATION_MEAS, workers,
    )
    return empirical_threshold(stats[:, 0], target_pf)


def _resolve_thresholds(
    spec: ExperimentSpec, target_pfs: list[float], workers: int
) -> np.ndarray:
    """(n_pf, n_detector) threshold table; calibrates what needs calibrating."""
    use_theory = spec.ncc_threshold_mode == THRESHOLD_THEORETICAL
    needs_cal = [
        k for k in spec.detectors if not (k is DetectorKind.NCC and use_theory)
    ]
    cal_stats = None
    if needs_cal:
        _require_cal_budget(spec.n_cal_trials, min(target_pfs))
        cal_stats = _collect_h0_statistics(
            spec, needs_cal, spec.n_cal_trials,
            StreamPurpose.CALIBRATION_ENV, StreamPurpose.CALIBRATION_MEAS, workers,
        )
    thresholds = np.empty((len(target_pfs), len(spec.detectors)), dtype=np.float64)
    for di, kind in enumerate(spec.detectors):
        if kind is DetectorKind.NCC and use_theory:
            for pj, pf in enumerate(target_pfs):
                thresholds[pj, di] = ncc_threshold(spec.M, spec.K, pf)
        else:
            col = cal_stats[:, needs_cal.index(kind)]
            for pj, pf in enumerate(target_pfs):
                thresholds[pj, di] = empirical_threshold(col, pf)
    return thresholds


def run_pd_vs_snr(spec: ExperimentSpec, workers: int = 1) -> list[CurvePoint]:
    """Detection probability along an SNR grid at a fixed false-alarm target.

    Points come back detector-major, grid ascending within each detector.
    Every point also carries the realized false-alarm rate measured on the
    paired H0 leg of the same trials.
    """
    if spec.sweep_var != SWEEP_SNR:
        raise ValueError(f"spec sweeps {spec.sweep_var!r}, expected {SWEEP_SNR!r}")
    started = time.perf_counter()
    thresholds = _resolve_thresholds(spec, [spec.pf], workers)[0]
    prefix = (
        spec.M, spec.K, spec.q, spec.alpha_db, spec.gamma_db,
        tuple(k.value for k in spec.detectors),
        spec.grid, thresholds, spec.master_seed,
    )
    results = _map_chunks(_pd_sweep_chunk, prefix, spec.n_trials, workers)
    h0_counts = sum(r[0] for r in results)
    h1_counts = sum(r[1] for r in results)
    wall = time.perf_counter() - started

    n = spec.n_trials
    points = []
    for di, kind in enumerate(spec.detectors):
        pf_hat = h0_counts[di] / n
        for j, snr in enumerate(spec.grid):
            pd_hat = h1_counts[j, di] / n
            points.append(
                CurvePoint(
                    detector=kind, sweep_var=SWEEP_SNR, sweep_value=snr,
                    pf_target=spec.pf, empirical_pf=pf_hat, empirical_pd=pd_hat,
                    stderr_pd=binomial_stderr(pd_hat, n),
                    threshold=float(thresholds[di]),
                    n_trials=n, master_seed=spec.master_seed, wall_time_s=wall,
                )
            )
    return points


def run_roc(spec: ExperimentSpec, workers: int = 1) -> list[CurvePoint]:
    """Operating curve along a false-alarm grid at a fixed SNR.

    All grid points share the same evaluated trials; only thresholds move.
    Thresholds weakly decrease along the grid, so both the realized pf and
    pd are nondecreasing in the target pf by construction.
    """
    if spec.sweep_var != SWEEP_PF:
        raise ValueError(f"spec sweeps {spec.sweep_var!r}, expected {SWEEP_PF!r}")
    started = time.perf_counter()
    thresholds = _resolve_thresholds(spec, list(spec.grid), workers)
    prefix = (
        spec.M, spec.K, spec.q, spec.alpha_db, spec.gamma_db,
        tuple(k.value for k in spec.detectors),
        spec.snr_db, thresholds, spec.master_seed,
    )
    results = _map_chunks(_roc_chunk, prefix, spec.n_trials, workers)
    h0_counts = sum(r[0] for r in results)
    h1_counts = sum(r[1] for r in results)
    wall = time.perf_counter() - started

    n = spec.n_trials
    points = []
    for di, kind in enumerate(spec.detectors):
        for pj, pf in enumerate(spec.grid):
            pd_hat = h1_counts[pj, di] / n
            points.append(
                CurvePoint(
                    detector=kind, sweep_var=SWEEP_PF, sweep_value=pf,
                    pf_target=pf, empirical_pf=h0_counts[pj, di] / n,
                    empirical_pd=pd_hat, stderr_pd=binomial_stderr(pd_hat, n),
                    threshold=float(thresholds[pj, di]),
                    n_trials=n, master_seed=spec.master_seed, wall_time_s=wall,
                )
            )
    return points


def run_null_distribution_check(
    M: int,
    K: int,
    n_trials: int,
    master_seed: int,
    alpha_db: float = 1.0,
    workers: int = 1,
) -> NullDistributionSummary:
    """Sample the scaled null statistic 2K*T and compare it to chi-square.

    Returns the empirical mean and variance (the reference law has mean
    2M^2 and variance 4M^2) plus the Kolmogorov-Smirnov distance to the
    reference CDF.  Needs at least MIN_NULL_TRIALS trials to be meaningful.
    """
    if n_trials < MIN_NULL_TRIALS:
        raise ValueError(f"n_trials must be >= {MIN_NULL_TRIALS}, got {n_trials}")
    spec = ExperimentSpec(
        M=M, K=K, q=1, alpha_db=alpha_db, gamma_db=(0.0,),
        detectors=(DetectorKind.NCC,), sweep_var=SWEEP_SNR, grid=(0.0,),
        n_trials=n_trials, n_cal_trials=0, master_seed=master_seed, pf=0.5,
    )
    stats = _collect_h0_statistics(
        spec, (DetectorKind.NCC,), n_trials,
        StreamPurpose.NULL_ENV, StreamPurpose.NULL_MEAS, workers,
    )[:, 0]
    scaled = 2.0 * K * stats
    dof = 2 * M * M
    dist = ChiSquare(dof)
    xs = np.sort(scaled)
    cdf = np.array([dist.cdf(x) for x in xs])
    n = n_trials
    upper = np.arange(1, n + 1) / n - cdf
    lower = cdf - np.arange(0, n) / n
    ks = float(max(upper.max(), lower.max()))
    return NullDistributionSummary(
        M=M, K=K, n_trials=n_trials, dof=dof,
        mean=float(scaled.mean()), variance=float(scaled.var(ddof=1)),
        ks_distance=ks, master_seed=master_seed,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def curve_csv_lines(points) -> list[str]:
    """Render CurvePoints to CSV lines (header first, no trailing newline)."""
    lines = [CSV_HEADER]
    for p in points:
        lines.append(
            ",".join(
                (
                    p.detector.value,
                    p.sweep_var,
                    _fmt(p.sweep_value),
                    _fmt(p.pf_target),
                    _fmt(p.empirical_pf),
                    _fmt(p.empirical_pd),
                    _fmt(p.stderr_pd),
                    _fmt(p.threshold),
                    str(p.n_trials),
                    str(p.master_seed),
                )
            )
        )
    return lines


def write_curve_csv(path, points) -> None:
    """Write points as CSV; output bytes depend only on the points."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(curve_csv_lines(points)) + "\n", encoding="ascii")
