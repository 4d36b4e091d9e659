"""Run configuration files.

A deliberately small INI-like dialect: ``[section]`` headers, ``key =
value`` pairs, blank lines, and whole-line ``#`` comments.  Lists are
comma-separated.  Unknown sections or keys are errors, not warnings, so a
typo cannot silently change an experiment.

Sections: [scenario] describes the signal model, [experiment] the
Monte-Carlo run, [output] where and how results are produced.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .detectors import DetectorKind
from .errors import ConfigError
from .harness import (
    SWEEP_PF,
    SWEEP_SNR,
    THRESHOLD_EMPIRICAL,
    THRESHOLD_THEORETICAL,
    ExperimentSpec,
)
from .sigmodel import Hypothesis, Scenario

MODE_PD_VS_SNR = "pd_vs_snr"
MODE_ROC = "roc"
MODE_NULL_CHECK = "null_check"
MODES = (MODE_PD_VS_SNR, MODE_ROC, MODE_NULL_CHECK)

RNG_NAME = "philox4x64"

_SECTION_RE = re.compile(r"^\[([A-Za-z_][A-Za-z0-9_]*)\]$")


def _parse_int(text: str) -> int:
    return int(text, 10)


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"value must be finite, got {text!r}")
    return value


def _parse_float_list(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if any(not p for p in parts):
        raise ValueError("empty entry in list")
    return tuple(_parse_float(p) for p in parts)


def _parse_detectors(text: str) -> tuple[DetectorKind, ...]:
    names = [p.strip().lower() for p in text.split(",")]
    if any(not n for n in names):
        raise ValueError("empty entry in detector list")
    try:
        return tuple(DetectorKind(n) for n in names)
    except ValueError:
        valid = ", ".join(k.value for k in DetectorKind)
        raise ValueError(f"unknown detector in {text!r}; valid: {valid}") from None


def _parse_hypothesis(text: str) -> Hypothesis:
    try:
        return Hypothesis(text.strip().upper())
    except ValueError:
        raise ValueError(f"hypothesis must be H0 or H1, got {text!r}") from None


def _parse_choice(*choices: str):
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in choices:
            raise ValueError(f"expected one of {choices}, got {text!r}")
        return value

    return parse


def _parse_string(text: str) -> str:
    return text


_SCHEMA = {
    "scenario": {
        "M": _parse_int,
        "K": _parse_int,
        "q": _parse_int,
        "alpha_db": _parse_float,
        "gamma_db": _parse_float_list,
        "snr_db": _parse_float,
        "hypothesis": _parse_hypothesis,
        "seed": _parse_int,
    },
    "experiment": {
        "mode": _parse_choice(*MODES),
        "detectors": _parse_detectors,
        "pf": _parse_float,
        "snr_grid_db": _parse_float_list,
        "pf_grid": _parse_float_list,
        "n_trials": _parse_int,
        "n_cal_trials": _parse_int,
        "threshold_mode": _parse_choice(THRESHOLD_THEORETICAL, THRESHOLD_EMPIRICAL),
        "seed": _parse_int,
    },
    "output": {
        "out": _parse_string,
        "workers": _parse_int,
        "rng": _parse_choice(RNG_NAME),
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration plus enough context for good error messages."""

    source: str
    values: dict = field(repr=False)

    def _get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)

    def _require(self, section: str, key: str, why: str):
        value = self._get(section, key)
        if value is None:
            raise ConfigError(f"{self.source}: [{section}] {key} is required {why}")
        return value

    def mode(self) -> str:
        return self._require("experiment", "mode", "to choose what to run")

    def scenario(self, seed_override: int | None = None) -> Scenario:
        """Scenario for block generation; [scenario] must be complete."""
        why = "to describe the scenario"
        hypothesis = self._require("scenario", "hypothesis", why)
        seed = seed_override
        if seed is None:
            seed = self._require("scenario", "seed", why)
        kwargs = dict(
            M=self._require("scenario", "M", why),
            K=self._require("scenario", "K", why),
            q=self._require("scenario", "q", why),
            alpha_db=self._require("scenario", "alpha_db", why),
            gamma_db=self._require("scenario", "gamma_db", why),
            hypothesis=hypothesis,
            seed=seed,
        )
        if hypothesis is Hypothesis.H1:
            kwargs["snr_db"] = self._require("scenario", "snr_db", "for an H1 scenario")
        try:
            return Scenario(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"{self.source}: {exc}") from None

    def experiment_spec(self, seed_override: int | None = None) -> ExperimentSpec:
        """ExperimentSpec for mode pd_vs_snr or roc."""
        mode = self.mode()
        if mode not in (MODE_PD_VS_SNR, MODE_ROC):
            raise ConfigError(
                f"{self.source}: mode {mode} does not define a sweep experiment"
            )
        why = f"for mode {mode}"
        seed = seed_override
        if seed is None:
            seed = self._require("experiment", "seed", why)
        kwargs = dict(
            M=self._require("scenario", "M", why),
            K=self._require("scenario", "K", why),
            q=self._require("scenario", "q", why),
            alpha_db=self._require("scenario", "alpha_db", why),
            gamma_db=self._require("scenario", "gamma_db", why),
            detectors=self._require("experiment", "detectors", why),
            n_trials=self._require("experiment", "n_trials", why),
            n_cal_trials=self._get("experiment", "n_cal_trials", 0),
            master_seed=seed,
            ncc_threshold_mode=self._get(
                "experiment", "threshold_mode", THRESHOLD_THEORETICAL
            ),
        )
        if mode == MODE_PD_VS_SNR:
            kwargs.update(
                sweep_var=SWEEP_SNR,
                grid=self._require("experiment", "snr_grid_db", why),
                pf=self._require("experiment", "pf", why),
            )
        else:
            kwargs.update(
                sweep_var=SWEEP_PF,
                grid=self._require("experiment", "pf_grid", why),
                snr_db=self._require("scenario", "snr_db", why),
            )
        try:
            return ExperimentSpec(**kwargs)
        except ValueError as exc:
            raise ConfigError(f"{self.source}: {exc}") from None

    def null_check_params(self) -> dict:
        """Arguments for the null distribution check (mode null_check)."""
        mode = self.mode()
        if mode != MODE_NULL_CHECK:
            raise ConfigError(f"{self.source}: mode {mode} is not {MODE_NULL_CHECK}")
        why = f"for mode {MODE_NULL_CHECK}"
        return dict(
            M=self._require("scenario", "M", why),
            K=self._require("scenario", "K", why),
            alpha_db=self._require("scenario", "alpha_db", why),
            n_trials=self._require("experiment", "n_trials", why),
            master_seed=self._require("experiment", "seed", why),
        )

    def out_path(self) -> str | None:
        return self._get("output", "out")

    def workers(self) -> int:
        workers = self._get("output", "workers", 1)
        if workers < 1:
            raise ConfigError(f"{self.source}: [output] workers must be >= 1")
        return workers


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    """Parse configuration text; errors carry source name and line number."""
    values: dict[str, dict] = {}
    section: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _SECTION_RE.match(line)
        if match:
            section = match.group(1)
            if section not in _SCHEMA:
                known = ", ".join(sorted(_SCHEMA))
                raise ConfigError(
                    f"{source}:{lineno}: unknown section [{section}]; known: {known}"
                )
            values.setdefault(section, {})
            continue
        if "=" not in line:
            raise ConfigError(
                f"{source}:{lineno}: expected 'key = value' or '[section]', got {raw!r}"
            )
        if section is None:
            raise ConfigError(f"{source}:{lineno}: key outside any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA[section]:
            known = ", ".join(sorted(_SCHEMA[section]))
            raise ConfigError(
                f"{source}:{lineno}: unknown key {key!r} in [{section}]; known: {known}"
            )
        if key in values[section]:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} in [{section}]")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        try:
            values[section][key] = _SCHEMA[section][key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None
    return RunConfig(source=source, values=values)


def parse_config(path) -> RunConfig:
    """Read and parse a configuration file."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_config_text(text, source=str(path))
