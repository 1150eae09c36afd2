"""Build the transmitted SWIPT signal from its WPT and WIT components.

Two combining methods:

* time-sharing: the power waveform occupies the first ``alpha_tx``
  fraction of the slot, the information waveform the remainder; each
  segment is independently scaled to the configured transmit power;
* superposition: sqrt(rho_tx) * WPT + sqrt(1 - rho_tx) * WIT on disjoint
  subcarriers, with both components pre-scaled to the configured power.

The cyclic prefix of the information waveform is not exactly orthogonal
to the power tones over full 80-sample windows, which leaves a random
residual cross power of order 0.1 % per slot; ``superpose`` therefore
applies one exact final rescale so the emitted average power equals the
configured transmit power, as the power-accounting contract requires.
At rho_tx 0 or 1 the pure component is returned untouched.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .ofdm import per_bin_body_power, _bin_indices, OfdmPlan
from .signals import IqBuffer, average_power, scale_to_power

# relative out-of-band power above this marks the components non-orthogonal
_ORTHOGONALITY_REL_TOL = 1e-12


class TxMode(str, enum.Enum):
    TIME_SHARING = "time_sharing"
    SUPERPOSITION = "superposition"
    WIT_ONLY = "wit_only"
    WPT_ONLY = "wpt_only"


@dataclass(frozen=True)
class TxDesign:
    mode: TxMode = TxMode.WIT_ONLY
    alpha_tx: float = 0.5
    rho_tx: float = 0.5
    slot_duration_s: float = 1.0
    total_tx_power_w: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha_tx <= 1.0:
            raise ValueError("alpha_tx must lie in [0, 1]")
        if not 0.0 <= self.rho_tx <= 1.0:
            raise ValueError("rho_tx must lie in [0, 1]")
        if self.slot_duration_s <= 0:
            raise ValueError("slot_duration_s must be positive")
        if self.total_tx_power_w < 0:
            raise ValueError("total_tx_power_w must be non-negative")


@dataclass(frozen=True)
class SegmentMap:
    """Boundary bookkeeping for a time-shared slot (WPT first, then WIT)."""

    boundary_index: int
    n_samples: int


def segment_boundary(alpha: float, n_samples: int) -> int:
    """Sample index where the WPT segment ends: round(alpha * n_samples)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("ratio must lie in [0, 1]")
    return int(round(alpha * n_samples))


def _cyclic_take(samples: np.ndarray, n: int) -> np.ndarray:
    """First n samples, cyclically extending the source if it is shorter."""
    if n == 0:
        return samples[:0]
    if samples.size == 0:
        raise ValueError("cannot extend an empty component")
    if samples.size >= n:
        return samples[:n]
    reps = -(-n // samples.size)
    return np.tile(samples, reps)[:n]


def time_share(
    x_wpt: IqBuffer,
    x_wit: IqBuffer | None,
    design: TxDesign,
) -> tuple[IqBuffer, SegmentMap]:
    """Concatenate power and information segments per the time-sharing ratio."""
    if design.mode is not TxMode.TIME_SHARING:
        raise ValueError("time_share requires mode=time_sharing")
    if x_wit is not None and x_wit.sample_rate_hz != x_wpt.sample_rate_hz:
        raise ValueError("sample-rate mismatch between components")
    fs = x_wpt.sample_rate_hz
    n_slot = int(round(design.slot_duration_s * fs))
    boundary = segment_boundary(design.alpha_tx, n_slot)
    parts = []
    if boundary > 0:
        seg = IqBuffer(_cyclic_take(x_wpt.samples, boundary), fs)
        parts.append(scale_to_power(seg, design.total_tx_power_w).samples)
    if n_slot - boundary > 0:
        if x_wit is None:
            raise ValueError("information component required for alpha_tx < 1")
        seg = IqBuffer(_cyclic_take(x_wit.samples, n_slot - boundary), fs)
        parts.append(scale_to_power(seg, design.total_tx_power_w).samples)
    out = IqBuffer(np.concatenate(parts), fs)
    return out, SegmentMap(boundary_index=boundary, n_samples=n_slot)


def _check_band_confinement(buf: IqBuffer, allowed: tuple[int, ...],
                            label: str) -> None:
    per_bin = per_bin_body_power(buf)
    total = per_bin.sum()
    if total == 0:
        return
    outside = total - per_bin[_bin_indices(allowed)].sum()
    if outside > _ORTHOGONALITY_REL_TOL * total:
        raise ValueError(
            f"components not orthogonal: {label} leaks "
            f"{outside / total:.3e} of its power outside its band"
        )


def superpose(
    x_wpt: IqBuffer,
    x_wit: IqBuffer,
    design: TxDesign,
    plan: OfdmPlan | None = None,
) -> IqBuffer:
    """Power-ratio superposition of band-disjoint WPT and WIT components.

    Both components must already occupy only their own subcarriers
    (reserved bins for WPT, data+pilot bins for WIT), validated
    spectrally against ``plan`` (the default plan when omitted).
    """
    if design.mode is not TxMode.SUPERPOSITION:
        raise ValueError("superpose requires mode=superposition")
    if x_wit.sample_rate_hz != x_wpt.sample_rate_hz:
        raise ValueError("sample-rate mismatch between components")
    if len(x_wit) != len(x_wpt):
        raise ValueError("length mismatch between components")
    plan = plan or OfdmPlan()
    target = design.total_tx_power_w
    wpt = scale_to_power(x_wpt, target)
    wit = scale_to_power(x_wit, target)
    rho = design.rho_tx
    if rho == 0.0:
        return wit
    if rho == 1.0:
        return wpt
    _check_band_confinement(wpt, plan.reserved_wpt_subcarriers, "WPT")
    _check_band_confinement(
        wit, plan.data_subcarriers + plan.pilot_subcarriers, "WIT")
    mixed = IqBuffer(
        np.sqrt(rho) * wpt.samples + np.sqrt(1.0 - rho) * wit.samples,
        x_wpt.sample_rate_hz,
    )
    return scale_to_power(mixed, target)
