"""Noncircular-covariance spectrum sensing for uncalibrated receivers.

Multi-antenna detection of noncircular (e.g. BPSK) signals under unequal,
unknown per-antenna noise variances.  The main detector normalizes both
the sample covariance and the sample pseudo-covariance by the per-antenna
powers and thresholds their total energy against a closed-form chi-square
quantile; classical covariance detectors are included for comparison,
together with a deterministic Monte-Carlo harness and a CLI.
"""

from ._kernels import BACKEND, available_backends
from .detectors import (
    DetectorKind,
    NonPositiveDefiniteWarning,
    Verdict,
    detect,
    ncc_multiplication_count,
    ncc_statistic,
    ncc_threshold,
    statistic,
)
from .errors import (
    CalibrationError,
    ConfigError,
    DegenerateInputError,
    IQFormatError,
    NccSenseError,
)
from .estimation import (
    CovariancePair,
    population_covariances,
    population_statistic,
    sample_covariances,
)
from .harness import (
    CurvePoint,
    ExperimentSpec,
    NullDistributionSummary,
    run_null_distribution_check,
    run_pd_vs_snr,
    run_pf_calibration,
    run_roc,
    write_curve_csv,
)
from .iqfile import read_iq, write_iq
from .numerics import ChiSquare
from .sigmodel import Hypothesis, SampleBlock, Scenario, generate_block
from .streams import StreamPurpose, substream

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CalibrationError",
    "ChiSquare",
    "ConfigError",
    "CovariancePair",
    "CurvePoint",
    "DegenerateInputError",
    "DetectorKind",
    "ExperimentSpec",
    "Hypothesis",
    "IQFormatError",
    "NccSenseError",
    "NonPositiveDefiniteWarning",
    "NullDistributionSummary",
    "SampleBlock",
    "Scenario",
    "StreamPurpose",
    "Verdict",
    "available_backends",
    "detect",
    "generate_block",
    "ncc_multiplication_count",
    "ncc_statistic",
    "ncc_threshold",
    "population_covariances",
    "population_statistic",
    "read_iq",
    "run_null_distribution_check",
    "run_pd_vs_snr",
    "run_pf_calibration",
    "run_roc",
    "sample_covariances",
    "statistic",
    "substream",
    "write_curve_csv",
    "write_iq",
    "__version__",
]
