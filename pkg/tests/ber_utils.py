"""Shared Monte-Carlo machinery for uncoded BER-vs-theory checks."""

import numpy as np

from swiptsim.channel import ChannelModel, apply_channel
from swiptsim.modulation import ModulationScheme
from swiptsim.ofdm import OfdmPlan, ofdm_demodulate, ofdm_modulate
from swiptsim.signals import PowerLevel, dbm_to_watts, watts_to_dbm

NOISE_FLOOR_DBM = -95.0
_ACTIVE_BINS = 44  # 40 data + 4 pilots share the transmit power
_FFT = 64


def ebn0_to_rx_power_w(ebn0_db: float, scheme: ModulationScheme) -> float:
    """Receive power that realizes a per-bit SNR on the data bins.

    Per-bin symbol SNR is (P/44)/(N/64); Eb/N0 divides by bits/symbol.
    """
    noise_w = dbm_to_watts(NOISE_FLOOR_DBM)
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    return ebn0 * scheme.bits_per_symbol * (_ACTIVE_BINS / _FFT) * noise_w


def measure_uncoded_ber(scheme: ModulationScheme, ebn0_db: float,
                        n_bits: int, seed: int = 9090,
                        symbols_per_chunk: int = 400) -> float:
    """Uncoded modulate -> AWGN -> demap BER over at least ``n_bits``."""
    plan = OfdmPlan(modulation=scheme)
    p_rx = ebn0_to_rx_power_w(ebn0_db, scheme)
    bits_per_chunk = symbols_per_chunk * plan.bits_per_symbol
    ch = ChannelModel(
        target_rx_power=PowerLevel(watts_to_dbm(p_rx)),
        noise_floor=PowerLevel(NOISE_FLOOR_DBM),
        seed=seed,
    )
    rng = np.random.default_rng(seed)
    errors = 0
    total = 0
    chunk = 0
    while total < n_bits:
        bits = rng.integers(0, 2, bits_per_chunk, dtype=np.uint8)
        frame = ofdm_modulate(bits, plan, p_rx, coded=False)
        rx, gains = apply_channel(frame.buffer, ch, trial_index=chunk)
        decoded = ofdm_demodulate(rx, plan, gains * frame.amp_scale,
                                  bits_per_chunk, coded=False)
        errors += int(np.count_nonzero(decoded != bits))
        total += bits_per_chunk
        chunk += 1
    return errors / total


def theoretical_gray_ber(ebn0_db: float) -> float:
    """Q(sqrt(2 Eb/N0)): exact for Gray BPSK/QPSK over AWGN."""
    from scipy.special import erfc
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    return 0.5 * erfc(np.sqrt(ebn0))


def effective_ebn0_db(ber_value: float) -> float:
    """Invert the Gray BPSK/QPSK curve: the Eb/N0 that explains a BER."""
    from scipy.special import erfcinv
    return 20.0 * np.log10(erfcinv(2.0 * ber_value)) \
        if ber_value > 0 else np.inf
