"""Gray-coded constellation mapping and minimum-distance hard demapping.

Square constellations with unit mean energy.  Bit convention, fixed
project-wide: BPSK maps bit 0 to -1 and bit 1 to +1; for QPSK/QAM the
first half of each bit word selects the I level and the second half the
Q level, each half Gray-coded onto the PAM levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModulationScheme:
    name: str
    bits_per_symbol: int
    normalization: float


BPSK = ModulationScheme("BPSK", 1, 1.0)
QPSK = ModulationScheme("QPSK", 2, 1.0 / np.sqrt(2.0))
QAM16 = ModulationScheme("QAM16", 4, 1.0 / np.sqrt(10.0))
QAM64 = ModulationScheme("QAM64", 6, 1.0 / np.sqrt(42.0))

MODULATIONS = {
    "bpsk": BPSK,
    "qpsk": QPSK,
    "qam16": QAM16,
    "16qam": QAM16,
    "qam64": QAM64,
    "64qam": QAM64,
}

# Gray-coded PAM levels indexed by the bit word of one axis.
_GRAY_PAM = {
    1: {0: -1.0, 1: 1.0},
    2: {0b00: -3.0, 0b01: -1.0, 0b11: 1.0, 0b10: 3.0},
    3: {0b000: -7.0, 0b001: -5.0, 0b011: -3.0, 0b010: -1.0,
        0b110: 1.0, 0b111: 3.0, 0b101: 5.0, 0b100: 7.0},
}


def scheme_by_name(name: str) -> ModulationScheme:
    try:
        return MODULATIONS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown modulation scheme '{name}'") from None


def constellation_table(scheme: ModulationScheme) -> np.ndarray:
    """Constellation points indexed by the MSB-first bit word of a symbol."""
    bps = scheme.bits_per_symbol
    n = 1 << bps
    table = np.empty(n, dtype=np.complex128)
    if bps == 1:
        for w in range(n):
            table[w] = _GRAY_PAM[1][w]
    else:
        half = bps // 2
        for w in range(n):
            i_word = w >> half
            q_word = w & ((1 << half) - 1)
            table[w] = _GRAY_PAM[half][i_word] + 1j * _GRAY_PAM[half][q_word]
    return table * scheme.normalization


def map_symbols(bits: np.ndarray, scheme: ModulationScheme) -> np.ndarray:
    """Map a {0,1} bit array to constellation symbols (MSB-first words)."""
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    bps = scheme.bits_per_symbol
    if bits.size % bps != 0:
        raise ValueError(
            f"bit count {bits.size} not divisible by {bps} bits/symbol"
        )
    words = bits.reshape(-1, bps) @ (1 << np.arange(bps - 1, -1, -1))
    return constellation_table(scheme)[words]


def demap_symbols(symbols: np.ndarray, scheme: ModulationScheme) -> np.ndarray:
    """Minimum-distance hard demapping back to a {0,1} bit array."""
    symbols = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    table = constellation_table(scheme)
    # nearest constellation point per symbol; table is small (<= 64 points)
    d2 = np.abs(symbols[:, None] - table[None, :]) ** 2
    words = np.argmin(d2, axis=1)
    bps = scheme.bits_per_symbol
    shifts = np.arange(bps - 1, -1, -1)
    bits = (words[:, None] >> shifts[None, :]) & 1
    return bits.astype(np.uint8).reshape(-1)
