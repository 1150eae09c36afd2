"""Propagation, received-power calibration and receiver-referenced AWGN.

The experiment this simulator mirrors pins the received RF power at the
antenna (default -20 dBm) rather than modeling path loss, so the channel
convolves with a short FIR (default a single unit tap), rescales the
result exactly to the target receive power, and then adds circular
complex Gaussian noise of the configured total in-band power
(default -95 dBm over the 20 MHz band: thermal floor plus a 6 dB noise
figure, which keeps a -80 dBm information component comfortably
decodable).  Everything is deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm import FFT_SIZE
from .signals import IqBuffer, PowerLevel, average_power

DEFAULT_TARGET_RX_DBM = -20.0
DEFAULT_NOISE_FLOOR_DBM = -95.0


@dataclass(frozen=True)
class ChannelModel:
    taps: tuple[complex, ...] = (1 + 0j,)
    target_rx_power: PowerLevel = PowerLevel(DEFAULT_TARGET_RX_DBM)
    noise_floor: PowerLevel = PowerLevel(DEFAULT_NOISE_FLOOR_DBM)
    seed: int = 1234

    def __post_init__(self):
        taps = tuple(complex(t) for t in self.taps)
        if not taps or all(t == 0 for t in taps):
            raise ValueError("channel needs at least one nonzero tap")
        object.__setattr__(self, "taps", taps)

    @property
    def antenna_snr_db(self) -> float:
        return self.target_rx_power.value_dbm - self.noise_floor.value_dbm


def noise_rng(ch: ChannelModel, trial_index: int = 0) -> np.random.Generator:
    """Independent, reproducible noise stream for one trial."""
    return np.random.default_rng(
        np.random.SeedSequence([int(ch.seed), int(trial_index), 1]))


def apply_channel(
    tx: IqBuffer,
    ch: ChannelModel,
    trial_index: int = 0,
) -> tuple[IqBuffer, np.ndarray]:
    """Convolve, calibrate to the target receive power, add AWGN.

    Returns the received buffer together with the genie per-bin channel
    gains (64-point FFT of the calibrated taps) for the demodulator.
    """
    if len(tx) == 0:
        raise ValueError("empty signal")
    taps = np.asarray(ch.taps, dtype=np.complex128)
    faded = np.convolve(tx.samples, taps)[: len(tx)]
    p = float(np.mean(np.abs(faded) ** 2))
    if p == 0.0:
        raise ValueError("channel output has zero power; cannot calibrate")
    scale = np.sqrt(ch.target_rx_power.watts / p)
    rx = faded * scale
    gains = np.fft.fft(taps, FFT_SIZE) * scale
    noise_w = ch.noise_floor.watts
    if noise_w > 0.0:
        rng = noise_rng(ch, trial_index)
        sigma = np.sqrt(noise_w / 2.0)
        rx = rx + sigma * (rng.standard_normal(len(tx))
                           + 1j * rng.standard_normal(len(tx)))
    return IqBuffer(rx, tx.sample_rate_hz), gains
