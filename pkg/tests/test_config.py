import textwrap

import pytest

from nccsense.config import (
    MODE_NULL_CHECK,
    MODE_PD_VS_SNR,
    MODE_ROC,
    parse_config,
    parse_config_text,
)
from nccsense.detectors import DetectorKind
from nccsense.errors import ConfigError
from nccsense.harness import SWEEP_PF, SWEEP_SNR, THRESHOLD_EMPIRICAL
from nccsense.sigmodel import Hypothesis

SNR_SWEEP_TEXT = textwrap.dedent(
    """\
    # probability of detection against SNR
    [scenario]
    M = 4
    K = 100
    q = 1
    alpha_db = 1.0
    gamma_db = 0.0
    snr_db = -10.0
    hypothesis = h1
    seed = 11

    [experiment]
    mode = pd_vs_snr
    detectors = ncc, cav, hdm
    pf = 0.05
    snr_grid_db = -20, -15, -10
    n_trials = 1000
    n_cal_trials = 4000
    threshold_mode = theoretical
    seed = 123

    [output]
    out = results/run.csv
    workers = 2
    rng = philox4x64
    """
)

ROC_TEXT = textwrap.dedent(
    """\
    [scenario]
    M = 8
    K = 200
    q = 3
    alpha_db = 1.0
    gamma_db = 3.0, 1.0, 0.0
    snr_db = -11.0
    hypothesis = h1
    seed = 9

    [experiment]
    mode = roc
    detectors = ncc, nchdm
    pf_grid = 0.01, 0.1, 0.5
    n_trials = 500
    n_cal_trials = 10000
    threshold_mode = empirical
    seed = 9
    """
)

NULL_TEXT = textwrap.dedent(
    """\
    [scenario]
    M = 4
    K = 1000
    alpha_db = 1.0

    [experiment]
    mode = null_check
    n_trials = 100000
    seed = 20250815
    """
)


class TestParsing:
    def test_snr_sweep_round_trip(self):
        cfg = parse_config_text(SNR_SWEEP_TEXT, source="run.cfg")
        assert cfg.mode() == MODE_PD_VS_SNR
        spec = cfg.experiment_spec()
        assert spec.M == 4 and spec.K == 100 and spec.q == 1
        assert spec.detectors == (
            DetectorKind.NCC, DetectorKind.CAV, DetectorKind.HDM,
        )
        assert spec.sweep_var == SWEEP_SNR
        assert spec.grid == (-20.0, -15.0, -10.0)
        assert spec.pf == 0.05
        assert spec.n_trials == 1000
        assert spec.n_cal_trials == 4000
        assert spec.master_seed == 123
        assert cfg.out_path() == "results/run.csv"
        assert cfg.workers() == 2

    def test_scenario_round_trip(self):
        cfg = parse_config_text(SNR_SWEEP_TEXT)
        s = cfg.scenario()
        assert s.hypothesis is Hypothesis.H1
        assert s.snr_db == -10.0
        assert s.seed == 11
        assert cfg.scenario(seed_override=99).seed == 99

    def test_roc_round_trip(self):
        cfg = parse_config_text(ROC_TEXT)
        assert cfg.mode() == MODE_ROC
        spec = cfg.experiment_spec()
        assert spec.sweep_var == SWEEP_PF
        assert spec.grid == (0.01, 0.1, 0.5)
        assert spec.snr_db == -11.0
        assert spec.gamma_db == (3.0, 1.0, 0.0)
        assert spec.ncc_threshold_mode == THRESHOLD_EMPIRICAL
        assert cfg.out_path() is None
        assert cfg.workers() == 1  # defaults when [output] absent

    def test_null_check_round_trip(self):
        cfg = parse_config_text(NULL_TEXT)
        assert cfg.mode() == MODE_NULL_CHECK
        params = cfg.null_check_params()
        assert params == dict(
            M=4, K=1000, alpha_db=1.0, n_trials=100000, master_seed=20250815
        )

    def test_seed_override_beats_file(self):
        cfg = parse_config_text(SNR_SWEEP_TEXT)
        assert cfg.experiment_spec(seed_override=7).master_seed == 7

    def test_shipped_configs_parse(self):
        import pathlib

        here = pathlib.Path(__file__).resolve().parent.parent / "configs"
        for name in ("fig1a.cfg", "fig1b.cfg", "fig2a.cfg", "fig2b.cfg"):
            cfg = parse_config(here / name)
            assert cfg.mode() in (MODE_PD_VS_SNR, MODE_ROC)
            cfg.experiment_spec()
        cfg = parse_config(here / "null.cfg")
        assert cfg.mode() == MODE_NULL_CHECK
        cfg.null_check_params()


class TestParseErrors:
    def check(self, text, lineno, fragment):
        with pytest.raises(ConfigError) as err:
            parse_config_text(text, source="bad.cfg")
        message = str(err.value)
        assert message.startswith(f"bad.cfg:{lineno}:")
        assert fragment in message

    def test_unknown_section(self):
        self.check("[radio]\nM = 4\n", 1, "unknown section")

    def test_unknown_key(self):
        self.check("[scenario]\nantennas = 4\n", 2, "unknown key")

    def test_key_outside_section(self):
        self.check("M = 4\n", 1, "outside any [section]")

    def test_duplicate_key(self):
        self.check("[scenario]\nM = 4\nM = 8\n", 3, "duplicate")

    def test_empty_value(self):
        self.check("[scenario]\nM =\n", 2, "empty value")

    def test_bad_int(self):
        self.check("[scenario]\nM = four\n", 2, "bad value")

    def test_bad_detector(self):
        self.check("[experiment]\ndetectors = ncc, energy\n", 2, "bad value")

    def test_bad_mode(self):
        self.check("[experiment]\nmode = sweep\n", 2, "bad value")

    def test_bad_rng(self):
        self.check("[output]\nrng = mt19937\n", 2, "bad value")

    def test_malformed_line(self):
        self.check("[scenario]\nM 4\n", 2, "")

    def test_missing_file(self):
        with pytest.raises(OSError):
            parse_config("/nonexistent/path.cfg")


class TestSemanticErrors:
    def test_missing_required_key_names_it(self):
        text = SNR_SWEEP_TEXT.replace("pf = 0.05\n", "")
        cfg = parse_config_text(text, source="run.cfg")
        with pytest.raises(ConfigError, match=r"run\.cfg.*pf.*required"):
            cfg.experiment_spec()

    def test_mode_required(self):
        cfg = parse_config_text("[scenario]\nM = 4\n")
        with pytest.raises(ConfigError, match="mode"):
            cfg.mode()

    def test_wrong_mode_for_spec(self):
        cfg = parse_config_text(NULL_TEXT)
        with pytest.raises(ConfigError, match="sweep"):
            cfg.experiment_spec()

    def test_wrong_mode_for_null_params(self):
        cfg = parse_config_text(SNR_SWEEP_TEXT)
        with pytest.raises(ConfigError, match=MODE_NULL_CHECK):
            cfg.null_check_params()

    def test_h1_scenario_needs_snr(self):
        text = SNR_SWEEP_TEXT.replace("snr_db = -10.0\n", "")
        cfg = parse_config_text(text, source="run.cfg")
        with pytest.raises(ConfigError, match="snr_db"):
            cfg.scenario()

    def test_h0_scenario_ignores_snr(self):
        text = SNR_SWEEP_TEXT.replace("hypothesis = h1", "hypothesis = h0")
        text = text.replace("snr_db = -10.0\n", "")
        s = parse_config_text(text).scenario()
        assert s.hypothesis is Hypothesis.H0
        assert s.snr_db is None

    def test_invalid_scenario_value_wrapped(self):
        text = SNR_SWEEP_TEXT.replace("q = 1", "q = 5")
        cfg = parse_config_text(text, source="run.cfg")
        with pytest.raises(ConfigError, match="run\\.cfg"):
            cfg.scenario()

    def test_bad_worker_count(self):
        cfg = parse_config_text("[output]\nworkers = 0\n")
        with pytest.raises(ConfigError, match="workers"):
            cfg.workers()
