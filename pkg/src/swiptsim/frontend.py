"""Receiver front-end: route the antenna signal to harvester and decoder.

Power splitting sends sqrt(rho_rx) of the signal to the energy harvester
and sqrt(1 - rho_rx) to the information decoder, continuously.  Time
switching connects the harvester for the first alpha_rx fraction of the
slot and the decoder for the rest, aligned to the transmit segment map
when one is provided.  Both splitters are ideal and lossless.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .combine import SegmentMap, segment_boundary
from .signals import IqBuffer


class RxMode(str, enum.Enum):
    POWER_SPLITTING = "power_splitting"
    TIME_SWITCHING = "time_switching"
    IDEAL_DUAL = "ideal_dual"


@dataclass(frozen=True)
class RxDesign:
    mode: RxMode = RxMode.POWER_SPLITTING
    rho_rx: float = 0.0
    alpha_rx: float = 0.5
    segment_map: SegmentMap | None = None

    def __post_init__(self):
        if not 0.0 <= self.rho_rx <= 1.0:
            raise ValueError("rho_rx must lie in [0, 1]")
        if not 0.0 <= self.alpha_rx <= 1.0:
            raise ValueError("alpha_rx must lie in [0, 1]")


def power_split(rx: IqBuffer, design: RxDesign) -> tuple[IqBuffer, IqBuffer]:
    """Split into (harvester, decoder) streams conserving total power."""
    if design.mode is not RxMode.POWER_SPLITTING:
        raise ValueError("power_split requires mode=power_splitting")
    eh = IqBuffer(np.sqrt(design.rho_rx) * rx.samples, rx.sample_rate_hz)
    idd = IqBuffer(np.sqrt(1.0 - design.rho_rx) * rx.samples,
                   rx.sample_rate_hz)
    return eh, idd


def time_switch(rx: IqBuffer, design: RxDesign) -> tuple[IqBuffer, IqBuffer]:
    """Cut the slot into (harvester, decoder) segments at the switch instant."""
    if design.mode is not RxMode.TIME_SWITCHING:
        raise ValueError("time_switch requires mode=time_switching")
    if design.segment_map is not None:
        boundary = design.segment_map.boundary_index
    else:
        boundary = segment_boundary(design.alpha_rx, len(rx))
    eh = IqBuffer(rx.samples[:boundary], rx.sample_rate_hz)
    idd = IqBuffer(rx.samples[boundary:], rx.sample_rate_hz)
    return eh, idd


def split(rx: IqBuffer, design: RxDesign) -> tuple[IqBuffer, IqBuffer]:
    """Dispatch on the receiver mode; ideal-dual feeds both sinks fully."""
    if design.mode is RxMode.POWER_SPLITTING:
        return power_split(rx, design)
    if design.mode is RxMode.TIME_SWITCHING:
        return time_switch(rx, design)
    return rx, rx
