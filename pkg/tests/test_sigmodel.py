import math

import numpy as np
import pytest

from nccsense.sigmodel import (
    Hypothesis,
    SampleBlock,
    Scenario,
    assemble_block,
    draw_channel,
    draw_environment,
    draw_noise,
    draw_noise_variances,
    draw_symbols,
    generate_block,
    realized_snr_db,
    signal_scale,
)
from nccsense.streams import StreamPurpose, substream


def h1_scenario(**overrides):
    base = dict(
        M=4, K=100, q=2, alpha_db=1.0, gamma_db=(3.0, 0.0),
        hypothesis=Hypothesis.H1, snr_db=-10.0, seed=11,
    )
    base.update(overrides)
    return Scenario(**base)


class TestScenario:
    def test_accepts_valid(self):
        s = h1_scenario()
        assert s.gamma_linear == pytest.approx([10 ** 0.3, 1.0])

    def test_h1_requires_snr(self):
        with pytest.raises(ValueError, match="snr_db"):
            h1_scenario(snr_db=None)

    def test_h0_ignores_snr(self):
        s = h1_scenario(hypothesis=Hypothesis.H0, snr_db=None)
        assert s.hypothesis is Hypothesis.H0

    def test_gamma_length_must_match_q(self):
        with pytest.raises(ValueError, match="gamma"):
            h1_scenario(gamma_db=(0.0,))

    @pytest.mark.parametrize("field,value", [
        ("M", 0), ("K", 0), ("q", 0), ("alpha_db", -1.0),
        ("alpha_db", math.inf), ("seed", -1),
    ])
    def test_rejects_bad_fields(self, field, value):
        with pytest.raises(ValueError):
            h1_scenario(**{field: value})


class TestDraws:
    def test_noise_variances_bounds(self):
        rng = substream(1, StreamPurpose.GENERATE, 0)
        s2 = draw_noise_variances(1000, 1.0, rng)
        assert s2.min() >= 10.0 ** -0.1
        assert s2.max() <= 10.0 ** 0.1

    def test_zero_alpha_collapses_to_unity(self):
        rng = substream(1, StreamPurpose.GENERATE, 0)
        assert np.array_equal(draw_noise_variances(8, 0.0, rng), np.ones(8))

    def test_channel_moments(self):
        rng = substream(2, StreamPurpose.GENERATE, 0)
        h = draw_channel(200, 500, rng)
        # unit power per entry, circular: E h = 0, E|h|^2 = 1, E h^2 = 0
        assert abs(h.mean()) < 0.005
        assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.01)
        assert abs((h ** 2).mean()) < 0.005

    def test_symbols_values_and_power(self):
        rng = substream(3, StreamPurpose.GENERATE, 0)
        gamma_db = (3.0, 0.0, -2.0)
        s = draw_symbols(3, 4000, gamma_db, rng)
        assert np.all(s.imag == 0.0)
        gamma_lin = 10.0 ** (np.array(gamma_db) / 10.0)
        for i in range(3):
            amp = math.sqrt(gamma_lin[i])
            assert set(np.unique(s[i].real)) == {-amp, amp}
            assert np.all(s[i].real ** 2 == pytest.approx(gamma_lin[i], rel=1e-15))
            # zero-dB stream: amplitude 1, squared power exactly 1
        assert np.all(s[1].real ** 2 == 1.0)
        assert abs(s.real.mean()) < 0.05

    def test_noise_per_antenna_variance(self):
        rng = substream(4, StreamPurpose.GENERATE, 0)
        s2 = np.array([0.5, 2.0, 1.0])
        w = draw_noise(3, 200_000, s2, rng)
        measured = np.mean(np.abs(w) ** 2, axis=1)
        assert measured == pytest.approx(s2, rel=0.02)
        assert abs((w[1] ** 2).mean()) < 0.02  # circularity

    def test_environment_draw_order(self):
        rng = substream(5, StreamPurpose.GENERATE, 0)
        s2, h = draw_environment(4, 2, 1.0, rng)
        clone = substream(5, StreamPurpose.GENERATE, 0)
        s2_ref = draw_noise_variances(4, 1.0, clone)
        h_ref = draw_channel(4, 2, clone)
        assert np.array_equal(s2, s2_ref)
        assert np.array_equal(h, h_ref)


class TestSignalScale:
    def test_zero_db_unit_ratio(self):
        h = np.array([[1.0 + 0j], [0.0]])
        # tr(H diag(1) H^H) = 1 and noise sums to 1: c = 1 exactly
        assert signal_scale(h, [1.0], [0.5, 0.5], 0.0) == 1.0

    def test_realized_snr_matches_target(self):
        rng = substream(6, StreamPurpose.GENERATE, 0)
        for trial in range(50):
            scenario = h1_scenario(snr_db=float(rng.uniform(-20, 10)))
            block = generate_block(scenario, substream(7, StreamPurpose.GENERATE, trial))
            realized = realized_snr_db(block, scenario.gamma_linear)
            assert abs(realized - scenario.snr_db) <= 1e-9

    def test_rejects_zero_channel(self):
        with pytest.raises(ValueError, match="signal power"):
            signal_scale(np.zeros((3, 1), dtype=complex), [1.0], [1.0, 1.0, 1.0], 0.0)


class TestBlocks:
    def test_generate_block_deterministic(self):
        scenario = h1_scenario()
        a = generate_block(scenario)
        b = generate_block(scenario)
        assert np.array_equal(a.samples, b.samples)
        assert np.array_equal(a.noise_variances, b.noise_variances)
        assert a.signal_scale == b.signal_scale

    def test_draw_order_contract(self):
        # environment first (variances then channel), then symbols, then noise
        scenario = h1_scenario()
        block = generate_block(scenario)
        rng = substream(scenario.seed, StreamPurpose.GENERATE, 0)
        s2 = draw_noise_variances(scenario.M, scenario.alpha_db, rng)
        h = draw_channel(scenario.M, scenario.q, rng)
        s = draw_symbols(scenario.q, scenario.K, scenario.gamma_db, rng)
        w = draw_noise(scenario.M, scenario.K, s2, rng)
        c = signal_scale(h, scenario.gamma_linear, s2, scenario.snr_db)
        expected = math.sqrt(c) * (h @ s) + w
        assert np.array_equal(block.samples, expected)
        assert block.signal_scale == c

    def test_h0_block_is_pure_noise(self):
        scenario = h1_scenario(hypothesis=Hypothesis.H0, snr_db=None)
        block = generate_block(scenario)
        rng = substream(scenario.seed, StreamPurpose.GENERATE, 0)
        s2, h = draw_environment(scenario.M, scenario.q, scenario.alpha_db, rng)
        draw_symbols(scenario.q, scenario.K, scenario.gamma_db, rng)
        w = draw_noise(scenario.M, scenario.K, s2, rng)
        assert np.array_equal(block.samples, w)
        assert block.signal_scale == 0.0

    def test_paired_hypotheses_share_measurement_draws(self):
        # same measurement stream: the H1 block is exactly the H0 noise plus
        # the scaled signal, because symbols are drawn before noise
        h0 = h1_scenario(hypothesis=Hypothesis.H0, snr_db=None)
        h1 = h1_scenario()
        env_rng = substream(21, StreamPurpose.EVAL_ENV, 0)
        s2, h = draw_environment(h1.M, h1.q, h1.alpha_db, env_rng)
        block0 = assemble_block(h0, s2, h, substream(22, StreamPurpose.EVAL_H0_MEAS, 5))
        block1 = assemble_block(h1, s2, h, substream(22, StreamPurpose.EVAL_H0_MEAS, 5))
        meas = substream(22, StreamPurpose.EVAL_H0_MEAS, 5)
        s = draw_symbols(h1.q, h1.K, h1.gamma_db, meas)
        draw_noise(h1.M, h1.K, s2, meas)
        expected = math.sqrt(block1.signal_scale) * (h @ s) + block0.samples
        assert np.array_equal(block1.samples, expected)

    def test_block_arrays_frozen_and_contiguous(self):
        block = generate_block(h1_scenario())
        assert block.samples.flags.c_contiguous
        assert not block.samples.flags.writeable
        with pytest.raises(ValueError):
            block.samples[0, 0] = 0.0

    def test_block_validation(self):
        good = generate_block(h1_scenario())
        with pytest.raises(ValueError, match="positive"):
            SampleBlock(good.samples, np.zeros(4), good.channel, 0.0)
        with pytest.raises(ValueError, match="non-finite"):
            bad = np.array(good.samples)
            bad[0, 0] = np.nan
            SampleBlock(bad, good.noise_variances, good.channel, 0.0)
        with pytest.raises(ValueError, match="signal_scale"):
            SampleBlock(good.samples, good.noise_variances, good.channel, -1.0)

    def test_sample_covariance_approaches_noise_floor(self):
        # H0 law of large numbers: Rhat -> diag(sigma^2)
        scenario = h1_scenario(hypothesis=Hypothesis.H0, snr_db=None, K=200_000, M=3, q=1, gamma_db=(0.0,))
        block = generate_block(scenario)
        rhat = block.samples @ block.samples.conj().T / scenario.K
        assert np.allclose(rhat, np.diag(block.noise_variances), atol=0.02)
