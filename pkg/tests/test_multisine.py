"""Multi-tone power waveform: spectral occupancy, PAPR, power accounting."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swiptsim.multisine import (MultisineConfig, SUBCARRIER_SPACING_HZ,
                                generate_multisine)
from swiptsim.signals import IqBuffer, average_power, papr_db

PERIOD_SAMPLES = 64  # one multisine fundamental at 20 MHz


def test_default_config():
    cfg = MultisineConfig()
    assert cfg.n_tones == 8
    assert cfg.tone_subcarriers == (-16, -12, -8, -4, 4, 8, 12, 16)
    assert cfg.phases_rad == (0.0,) * 8


def test_spectral_span_is_10_mhz():
    assert MultisineConfig().span_hz == pytest.approx(10e6)


def test_single_tone_is_constant_envelope():
    cfg = MultisineConfig(n_tones=1, tone_subcarriers=(4,), total_power_w=1.0)
    buf = generate_multisine(cfg, 10 * PERIOD_SAMPLES / 20e6)
    assert papr_db(buf) == pytest.approx(0.0, abs=1e-9)
    assert average_power(buf) == pytest.approx(1.0, rel=1e-9)


def test_default_8_tone_papr():
    buf = generate_multisine(MultisineConfig(total_power_w=1.0),
                             PERIOD_SAMPLES / 20e6)
    assert papr_db(buf) == pytest.approx(9.030899869919435, abs=0.01)


def test_average_power_over_integer_periods():
    cfg = MultisineConfig(total_power_w=2.5)
    buf = generate_multisine(cfg, 5 * PERIOD_SAMPLES / 20e6)
    assert average_power(buf) == pytest.approx(2.5, rel=1e-6)


def test_fft_occupies_exactly_the_configured_bins():
    cfg = MultisineConfig(total_power_w=1.0)
    buf = generate_multisine(cfg, PERIOD_SAMPLES / 20e6)
    spectrum = np.fft.fft(buf.samples)
    power = np.abs(spectrum) ** 2
    occupied = np.where(power > power.max() * 1e-12)[0]  # -120 dBc floor
    expected = sorted(k % 64 for k in cfg.tone_subcarriers)
    assert sorted(occupied.tolist()) == expected
    mags = np.abs(spectrum[occupied])
    np.testing.assert_allclose(mags, mags[0], rtol=1e-9)


@given(st.lists(st.floats(-np.pi, np.pi), min_size=8, max_size=8))
def test_power_independent_of_phases(phases):
    cfg = MultisineConfig(phases_rad=tuple(phases), total_power_w=1.0)
    buf = generate_multisine(cfg, 3 * PERIOD_SAMPLES / 20e6)
    assert average_power(buf) == pytest.approx(1.0, rel=1e-9)


@given(st.permutations(list(range(-16, 0, 2)) + list(range(2, 17, 2))))
def test_tone_placement_matches_config(order):
    subs = tuple(sorted(order[:4]))
    cfg = MultisineConfig(n_tones=4, tone_subcarriers=subs, total_power_w=1.0)
    buf = generate_multisine(cfg, PERIOD_SAMPLES / 20e6)
    power = np.abs(np.fft.fft(buf.samples)) ** 2
    occupied = sorted(np.where(power > power.max() * 1e-12)[0].tolist())
    assert occupied == sorted(k % 64 for k in subs)


class TestValidation:
    def test_duplicate_tones_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            MultisineConfig(n_tones=2, tone_subcarriers=(4, 4))

    def test_count_mismatch_rejected(self):
        with pytest.raises(ValueError):
            MultisineConfig(n_tones=3, tone_subcarriers=(4, 8))

    def test_out_of_grid_rejected(self):
        with pytest.raises(ValueError):
            MultisineConfig(n_tones=1, tone_subcarriers=(40,))

    def test_beyond_nyquist_rejected(self):
        cfg = MultisineConfig(n_tones=1, tone_subcarriers=(31,))
        with pytest.raises(ValueError, match="Nyquist"):
            # 31 * 312.5 kHz = 9.6875 MHz exceeds Nyquist at 2.5 MHz fs
            generate_multisine(cfg, 1e-3, sample_rate_hz=2.5e6)

    def test_nonpositive_duration_rejected(self):
        with pytest.raises(ValueError):
            generate_multisine(MultisineConfig(), 0.0)


def test_tone_frequencies_on_grid():
    cfg = MultisineConfig()
    assert cfg.tone_frequencies_hz == tuple(
        k * SUBCARRIER_SPACING_HZ for k in cfg.tone_subcarriers)
    # evenly spaced by 4 bins = 1.25 MHz on each side of DC
    diffs = np.diff(sorted(cfg.tone_subcarriers))
    assert set(diffs.tolist()) == {4, 8}  # 8 across the DC gap
