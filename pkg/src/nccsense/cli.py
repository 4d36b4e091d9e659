"""Command-line interface.

Subcommands: ``generate`` (write a synthetic capture file), ``detect``
(run one detector on a capture file), ``calibrate`` (empirical threshold
for a detector), ``experiment`` (Monte-Carlo sweep to CSV), ``null-check``
(null-law sanity summary).

Exit codes: 0 success, 1 degenerate data, 2 usage or I/O problem,
3 configuration validation failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import MODE_NULL_CHECK, MODE_PD_VS_SNR, parse_config
from .detectors import DetectorKind, detect, ncc_threshold
from .errors import (
    CalibrationError,
    ConfigError,
    DegenerateInputError,
    IQFormatError,
)
from .estimation import sample_covariances
from .harness import (
    run_null_distribution_check,
    run_pd_vs_snr,
    run_pf_calibration,
    run_roc,
    write_curve_csv,
)
from .iqfile import read_iq, write_iq
from .sigmodel import generate_block, realized_snr_db

_DETECTOR_NAMES = [k.value for k in DetectorKind]


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nccsense",
        description="Noncircular-covariance spectrum sensing experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic baseband capture file")
    p.add_argument("--config", required=True, help="scenario configuration file")
    p.add_argument("--out", help="output capture path (falls back to [output] out)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("detect", help="run one detector on a capture file")
    p.add_argument("iq_path", help="capture file to test")
    p.add_argument("--detector", required=True, choices=_DETECTOR_NAMES)
    p.add_argument("--pf", type=float, help="false-alarm target (ncc closed form)")
    p.add_argument("--threshold", type=float, help="explicit decision threshold")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("calibrate", help="empirical H0 threshold for a detector")
    p.add_argument("--config", required=True, help="experiment configuration file")
    p.add_argument("--detector", required=True, choices=_DETECTOR_NAMES)
    p.add_argument("--pf", type=float, help="false-alarm target (default: config pf)")
    p.add_argument("--workers", type=int, help="worker processes")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("experiment", help="run a Monte-Carlo sweep, write CSV")
    p.add_argument("--config", required=True, help="experiment configuration file")
    p.add_argument("--out", help="CSV output path (falls back to [output] out)")
    p.add_argument("--seed", type=int, help="override the experiment seed")
    p.add_argument("--workers", type=int, help="worker processes")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("null-check", help="summarize the null statistic law")
    p.add_argument("--config", required=True, help="null_check configuration file")
    p.add_argument("--workers", type=int, help="worker processes")
    p.set_defaults(func=_cmd_null_check)

    return parser


def _resolve_out(args_out, cfg) -> str:
    out = args_out or cfg.out_path()
    if out is None:
        raise ConfigError(f"{cfg.source}: [output] out or --out is required")
    return out


def _resolve_workers(args_workers, cfg) -> int:
    if args_workers is not None:
        if args_workers < 1:
            raise ValueError("--workers must be >= 1")
        return args_workers
    return cfg.workers()


def _cmd_generate(args) -> int:
    cfg = parse_config(args.config)
    scenario = cfg.scenario(seed_override=args.seed)
    out = _resolve_out(args.out, cfg)
    block = generate_block(scenario)
    write_iq(out, block.samples)
    print("sigma2 =", ",".join(_fmt(v) for v in block.noise_variances))
    if block.signal_scale > 0.0:
        print("snr_db =", _fmt(realized_snr_db(block, scenario.gamma_linear)))
    else:
        print("snr_db = none")
    print("seed =", scenario.seed)
    return 0


def _cmd_detect(args) -> int:
    samples = read_iq(args.iq_path)
    pair = sample_covariances(samples)
    kind = DetectorKind(args.detector)
    if args.threshold is not None:
        threshold = args.threshold
    elif args.pf is not None:
        if kind is not DetectorKind.NCC:
            raise ValueError(
                f"{kind.value} has no closed-form threshold; pass --threshold"
            )
        threshold = ncc_threshold(pair.M, pair.sample_count, args.pf)
    else:
        raise ValueError("need --threshold, or --pf with the ncc detector")
    verdict = detect(kind, pair, threshold)
    print(
        ",".join(
            (
                verdict.detector.value,
                _fmt(verdict.statistic),
                _fmt(verdict.threshold),
                verdict.decision.value,
                str(verdict.antenna_count),
                str(verdict.sample_count),
            )
        )
    )
    return 0


def _cmd_calibrate(args) -> int:
    cfg = parse_config(args.config)
    spec = cfg.experiment_spec()
    target_pf = args.pf if args.pf is not None else spec.pf
    if target_pf is None:
        raise ValueError("need --pf (the config defines no false-alarm target)")
    threshold = run_pf_calibration(
        spec, DetectorKind(args.detector), target_pf, workers=_resolve_workers(args.workers, cfg)
    )
    print(_fmt(threshold))
    return 0


def _cmd_experiment(args) -> int:
    cfg = parse_config(args.config)
    mode = cfg.mode()
    if mode == MODE_NULL_CHECK:
        raise ConfigError(
            f"{cfg.source}: mode null_check runs via the null-check command"
        )
    spec = cfg.experiment_spec(seed_override=args.seed)
    workers = _resolve_workers(args.workers, cfg)
    runner = run_pd_vs_snr if mode == MODE_PD_VS_SNR else run_roc
    points = runner(spec, workers=workers)
    out = _resolve_out(args.out, cfg)
    write_curve_csv(out, points)
    print(f"wrote {len(points)} points to {out}")
    return 0


def _cmd_null_check(args) -> int:
    cfg = parse_config(args.config)
    params = cfg.null_check_params()
    try:
        summary = run_null_distribution_check(
            workers=_resolve_workers(args.workers, cfg), **params
        )
    except ValueError as exc:
        raise ConfigError(f"{cfg.source}: {exc}") from None
    print("M,K,n_trials,dof,mean,variance,ks_distance,seed")
    print(
        ",".join(
            (
                str(summary.M),
                str(summary.K),
                str(summary.n_trials),
                str(summary.dof),
                _fmt(summary.mean),
                _fmt(summary.variance),
                _fmt(summary.ks_distance),
                str(summary.master_seed),
            )
        )
    )
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except DegenerateInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IQFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
