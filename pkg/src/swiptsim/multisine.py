"""Multi-tone WPT waveform generation on the OFDM subcarrier grid.

The power waveform is a sum of equal-power complex exponentials placed on
the 312.5 kHz subcarrier grid.  The default is the 8-tone set
{+-4, +-8, +-12, +-16}: tones spaced 4 bins (1.25 MHz) apart on each side
of DC, spanning 10 MHz edge to edge, and landing only on subcarriers the
information waveform reserves for them.  All-zero tone phases maximize the
peak-to-average ratio, which is what drives the rectifier's nonlinear gain.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signals import IqBuffer, DEFAULT_SAMPLE_RATE_HZ

SUBCARRIER_SPACING_HZ = 312_500.0
DEFAULT_TONE_SUBCARRIERS = (-16, -12, -8, -4, 4, 8, 12, 16)


@dataclass(frozen=True)
class MultisineConfig:
    n_tones: int = 8
    tone_subcarriers: tuple[int, ...] = DEFAULT_TONE_SUBCARRIERS
    phases_rad: tuple[float, ...] | None = None  # None means all zero
    total_power_w: float = 1.0

    def __post_init__(self):
        subs = tuple(int(k) for k in self.tone_subcarriers)
        object.__setattr__(self, "tone_subcarriers", subs)
        if self.n_tones < 1:
            raise ValueError("n_tones must be positive")
        if len(subs) != self.n_tones:
            raise ValueError(
                f"expected {self.n_tones} tone subcarriers, got {len(subs)}"
            )
        if len(set(subs)) != len(subs):
            raise ValueError("duplicate tone subcarriers")
        if any(k < -32 or k > 31 for k in subs):
            raise ValueError("tone subcarriers must lie in [-32, 31]")
        if self.phases_rad is None:
            object.__setattr__(self, "phases_rad", (0.0,) * self.n_tones)
        else:
            phases = tuple(float(p) for p in self.phases_rad)
            if len(phases) != self.n_tones:
                raise ValueError("phases length must match n_tones")
            object.__setattr__(self, "phases_rad", phases)
        if self.total_power_w < 0:
            raise ValueError("total_power_w must be non-negative")

    @property
    def tone_frequencies_hz(self) -> tuple[float, ...]:
        return tuple(k * SUBCARRIER_SPACING_HZ for k in self.tone_subcarriers)

    @property
    def span_hz(self) -> float:
        """Occupied spectral span, edge tone to edge tone."""
        return (max(self.tone_subcarriers) - min(self.tone_subcarriers)) \
            * SUBCARRIER_SPACING_HZ


def generate_multisine(
    cfg: MultisineConfig,
    duration_s: float,
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ,
) -> IqBuffer:
    """Generate sum_k sqrt(P/N) * exp(j(2*pi*f_k*t + phi_k)) at the sample rate.

    Average power equals the configured total over any integer number of
    multisine fundamental periods (64 samples at 20 MHz).
    """
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    for f in cfg.tone_frequencies_hz:
        if abs(f) >= sample_rate_hz / 2:
            raise ValueError(f"tone at {f} Hz is not below Nyquist")
    n = int(round(duration_s * sample_rate_hz))
    if n < 1:
        raise ValueError("duration shorter than one sample")
    t = np.arange(n) / sample_rate_hz
    amp = np.sqrt(cfg.total_power_w / cfg.n_tones)
    x = np.zeros(n, dtype=np.complex128)
    for f, phi in zip(cfg.tone_frequencies_hz, cfg.phases_rad):
        x += amp * np.exp(1j * (2.0 * np.pi * f * t + phi))
    return IqBuffer(x, sample_rate_hz)
