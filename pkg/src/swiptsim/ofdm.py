"""Modified-802.11g OFDM information waveform.

64-point FFT at 20 MHz (312.5 kHz spacing), 16-sample cyclic prefix,
4 us symbols.  Relative to stock 802.11a/g, the eight subcarriers
{+-4, +-8, +-12, +-16} carry no data: they are reserved for the power
waveform so the two can be superposed on disjoint bins.  That leaves
40 data subcarriers, so the peak data rate at coding rate 3/4 is
7.5 Mbps/bit-per-symbol: 7.5 (BPSK), 15 (QPSK), 30 (16QAM), 45 (64QAM).

Scrambler, interleaver and preamble are omitted: the simulation uses
genie frame timing and (by default) genie channel knowledge, with an
optional least-squares pilot estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import coding
from .modulation import ModulationScheme, QPSK, map_symbols, demap_symbols
from .signals import IqBuffer, scale_to_power, DEFAULT_SAMPLE_RATE_HZ

FFT_SIZE = 64
CP_LEN = 16
SYMBOL_LEN = FFT_SIZE + CP_LEN  # 80 samples = 4 us at 20 MHz
CODING_RATE = 0.75

PILOT_SUBCARRIERS = (-21, -7, 7, 21)
RESERVED_WPT_SUBCARRIERS = (-16, -12, -8, -4, 4, 8, 12, 16)
_ACTIVE = tuple(range(-26, 0)) + tuple(range(1, 27))


def _default_data_subcarriers(reserved: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(k for k in _ACTIVE
                 if k not in PILOT_SUBCARRIERS and k not in reserved)


@dataclass(frozen=True)
class OfdmPlan:
    """The 64-bin subcarrier map plus modulation and coding choices."""

    modulation: ModulationScheme = QPSK
    reserved_wpt_subcarriers: tuple[int, ...] = RESERVED_WPT_SUBCARRIERS
    pilot_subcarriers: tuple[int, ...] = PILOT_SUBCARRIERS
    coding_rate: float = CODING_RATE
    fft_size: int = FFT_SIZE
    cp_len: int = CP_LEN
    data_subcarriers: tuple[int, ...] = field(init=False)
    null_subcarriers: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.fft_size != FFT_SIZE or self.cp_len != CP_LEN:
            raise ValueError("only the 64-point/16-sample CP plan is supported")
        if self.coding_rate != CODING_RATE:
            raise ValueError("only coding rate 3/4 is supported")
        reserved = tuple(sorted(int(k) for k in self.reserved_wpt_subcarriers))
        pilots = tuple(sorted(int(k) for k in self.pilot_subcarriers))
        if pilots != tuple(sorted(PILOT_SUBCARRIERS)):
            raise ValueError("pilot subcarriers are fixed at {+-7, +-21}")
        if len(reserved) != 8 or len(set(reserved)) != 8:
            raise ValueError("exactly 8 distinct reserved subcarriers required")
        bad = [k for k in reserved if k not in _ACTIVE or k in pilots]
        if bad:
            raise ValueError(f"reserved bins must be non-pilot active bins: {bad}")
        data = _default_data_subcarriers(reserved)
        used = set(data) | set(pilots) | set(reserved)
        null = tuple(k for k in range(-32, 32) if k not in used)
        object.__setattr__(self, "reserved_wpt_subcarriers", reserved)
        object.__setattr__(self, "pilot_subcarriers", pilots)
        object.__setattr__(self, "data_subcarriers", data)
        object.__setattr__(self, "null_subcarriers", null)
        assert len(data) == 40 and len(null) == 12
        assert len(used) + len(null) == FFT_SIZE

    @property
    def bits_per_symbol(self) -> int:
        """Coded bits carried by one OFDM symbol."""
        return len(self.data_subcarriers) * self.modulation.bits_per_symbol


def max_data_rate_mbps(scheme: ModulationScheme) -> float:
    """Peak data rate: 40 data bins * bits/symbol * 3/4 per 4 us symbol."""
    return 40 * scheme.bits_per_symbol * CODING_RATE / 4.0


def symbol_capacity_bits(plan: OfdmPlan, n_symbols: int, coded: bool = True) -> int:
    """Largest payload whose (coded) stream fits in ``n_symbols`` symbols."""
    total = n_symbols * plan.bits_per_symbol
    if not coded:
        return total
    lo, hi = 0, total
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if coding.punctured_length(mid) <= total:
            lo = mid
        else:
            hi = mid - 1
    return lo


@dataclass(frozen=True)
class ModulatedFrame:
    """An emitted OFDM frame plus the bookkeeping the genie receiver needs."""

    buffer: IqBuffer
    plan: OfdmPlan
    n_payload_bits: int
    n_symbols: int
    n_pad_bits: int
    amp_scale: float  # unit-energy constellation point -> emitted bin amplitude
    coded: bool


def _bin_indices(bins: tuple[int, ...]) -> np.ndarray:
    return np.asarray(bins, dtype=np.int64) % FFT_SIZE


def ofdm_modulate(
    payload_bits: np.ndarray,
    plan: OfdmPlan,
    total_power_w: float,
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ,
    coded: bool = True,
) -> ModulatedFrame:
    """Code, map and OFDM-modulate a payload, scaled to ``total_power_w``.

    Data bins carry the Gray-mapped stream, pilot bins carry fixed +1
    BPSK pilots, reserved and null bins stay empty.  The coded stream is
    zero-padded up to a whole number of symbols (pad length recorded).
    """
    payload_bits = np.asarray(payload_bits, dtype=np.uint8).reshape(-1)
    if payload_bits.size == 0:
        raise ValueError("empty payload")
    stream = coding.conv_encode(payload_bits) if coded else payload_bits
    n_cbps = plan.bits_per_symbol
    n_symbols = -(-stream.size // n_cbps)
    n_pad = n_symbols * n_cbps - stream.size
    if n_pad:
        stream = np.concatenate([stream, np.zeros(n_pad, dtype=np.uint8)])
    points = map_symbols(stream, plan.modulation)
    grid = np.zeros((n_symbols, FFT_SIZE), dtype=np.complex128)
    grid[:, _bin_indices(plan.data_subcarriers)] = points.reshape(n_symbols, -1)
    grid[:, _bin_indices(plan.pilot_subcarriers)] = 1.0
    body = np.fft.ifft(grid, axis=1)
    with_cp = np.concatenate([body[:, -CP_LEN:], body], axis=1).reshape(-1)
    raw = IqBuffer(with_cp, sample_rate_hz)
    out = scale_to_power(raw, total_power_w)
    # fft(ifft(X)) == X, so the emitted amplitude per unit constellation
    # point is exactly the power scaling factor
    amp_scale = float(np.sqrt(total_power_w
                              / float(np.mean(np.abs(with_cp) ** 2))))
    return ModulatedFrame(out, plan, int(payload_bits.size), int(n_symbols),
                          int(n_pad), amp_scale, coded)


def equalized_data_symbols(
    rx: IqBuffer,
    plan: OfdmPlan,
    chan_est: np.ndarray,
) -> np.ndarray:
    """CP removal, per-symbol FFT and one-tap equalization of the data bins.

    ``chan_est`` holds the 64 composite per-bin gains mapping a
    unit-energy constellation point to the received bin value (channel
    response times every amplitude scale along the chain).  Genie frame
    timing: the buffer starts at the first CP sample.
    """
    chan_est = np.asarray(chan_est, dtype=np.complex128).reshape(-1)
    if chan_est.size != FFT_SIZE:
        raise ValueError(f"chan_est must have {FFT_SIZE} entries")
    n_symbols = len(rx) // SYMBOL_LEN
    if n_symbols == 0:
        raise ValueError("buffer shorter than one OFDM symbol")
    data_idx = _bin_indices(plan.data_subcarriers)
    gains = chan_est[data_idx]
    if np.any(gains == 0):
        raise ValueError("unequalizable bin")
    frames = rx.samples[: n_symbols * SYMBOL_LEN].reshape(n_symbols, SYMBOL_LEN)
    spectra = np.fft.fft(frames[:, CP_LEN:], axis=1)
    return spectra[:, data_idx] / gains[None, :]


def pilot_ls_channel_estimate(rx: IqBuffer, plan: OfdmPlan) -> np.ndarray:
    """Least-squares channel estimate from the fixed +1 pilots.

    Per-pilot-bin gains are averaged over all symbols, then linearly
    interpolated across the active band (flat extrapolation at the edges).
    Returns a 64-entry composite gain vector usable as ``chan_est``.
    """
    n_symbols = len(rx) // SYMBOL_LEN
    if n_symbols == 0:
        raise ValueError("buffer shorter than one OFDM symbol")
    frames = rx.samples[: n_symbols * SYMBOL_LEN].reshape(n_symbols, SYMBOL_LEN)
    spectra = np.fft.fft(frames[:, CP_LEN:], axis=1)
    pilot_idx = _bin_indices(plan.pilot_subcarriers)
    # pilots transmit +1, so the LS estimate is the mean received value
    pilot_gains = spectra[:, pilot_idx].mean(axis=0)
    pilot_pos = np.asarray(plan.pilot_subcarriers, dtype=np.float64)
    order = np.argsort(pilot_pos)
    bins = np.arange(-32, 32, dtype=np.float64)
    est_re = np.interp(bins, pilot_pos[order], pilot_gains.real[order])
    est_im = np.interp(bins, pilot_pos[order], pilot_gains.imag[order])
    est = est_re + 1j * est_im
    out = np.zeros(FFT_SIZE, dtype=np.complex128)
    out[(np.arange(-32, 32) % FFT_SIZE)] = est
    return out


def ofdm_demodulate(
    rx: IqBuffer,
    plan: OfdmPlan,
    chan_est: np.ndarray,
    n_payload_bits: int,
    coded: bool = True,
) -> np.ndarray:
    """Recover the payload: equalize, hard-demap, depuncture and decode."""
    if n_payload_bits <= 0:
        raise ValueError("n_payload_bits must be positive")
    eq = equalized_data_symbols(rx, plan, chan_est)
    bits = demap_symbols(eq.reshape(-1), plan.modulation)
    n_stream = (coding.punctured_length(n_payload_bits) if coded
                else n_payload_bits)
    if bits.size < n_stream:
        raise ValueError(
            f"buffer carries {bits.size} coded bits, need {n_stream}"
        )
    stream = bits[:n_stream]
    if not coded:
        return stream.copy()
    return coding.viterbi_decode(stream, n_payload_bits)


def ber(reference: np.ndarray, decoded: np.ndarray) -> float:
    """Bit error ratio: Hamming distance over length."""
    reference = np.asarray(reference, dtype=np.uint8).reshape(-1)
    decoded = np.asarray(decoded, dtype=np.uint8).reshape(-1)
    if reference.size != decoded.size:
        raise ValueError(
            f"length mismatch: {reference.size} vs {decoded.size}"
        )
    if reference.size == 0:
        raise ValueError("empty bit streams")
    return float(np.count_nonzero(reference != decoded) / reference.size)


def write_payload_bits(path: str, bits: np.ndarray) -> None:
    """Write a {0,1} payload as raw bytes, most-significant bit first."""
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    np.packbits(bits).tofile(path)


def read_payload_bits(path: str, n_bits: int | None = None) -> np.ndarray:
    """Read an MSB-first raw byte payload back into a {0,1} array.

    Without ``n_bits`` the trailing pad bits of the last byte are kept.
    """
    data = np.fromfile(path, dtype=np.uint8)
    bits = np.unpackbits(data)
    if n_bits is not None:
        if n_bits > bits.size:
            raise ValueError(f"{path}: holds {bits.size} bits, "
                             f"need {n_bits}")
        bits = bits[:n_bits]
    return bits


def per_bin_body_power(buf: IqBuffer) -> np.ndarray:
    """Mean per-sample power attributed to each of the 64 bins.

    Uses symbol-synchronous body windows (CP stripped), so the entries
    sum to the mean body-sample power and integer-bin tones land on
    exactly one entry.
    """
    n_symbols = len(buf) // SYMBOL_LEN
    if n_symbols == 0:
        raise ValueError("buffer shorter than one OFDM symbol")
    frames = buf.samples[: n_symbols * SYMBOL_LEN].reshape(n_symbols, SYMBOL_LEN)
    spectra = np.fft.fft(frames[:, CP_LEN:], axis=1)
    return np.mean(np.abs(spectra) ** 2, axis=0) / FFT_SIZE ** 2


def band_power(buf: IqBuffer, bins: tuple[int, ...]) -> float:
    """Mean per-sample power carried by the given subcarriers."""
    per_bin = per_bin_body_power(buf)
    return float(per_bin[_bin_indices(tuple(bins))].sum())
