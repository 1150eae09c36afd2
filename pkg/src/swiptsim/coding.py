"""Rate-3/4 punctured convolutional coding with hard-decision Viterbi decoding.

Mother code is the classic K=7, rate-1/2 code with generators (133, 171)
octal, zero-tailed with K-1 = 6 tail bits.  The serialized output
[A0,B0,A1,B1,...] is punctured to rate 3/4 with the period-6 pattern
[1,1,1,0,0,1] (keep A0,B0,A1,B2 out of every three input bits).  The
decoder depunctures with erasures and runs maximum-likelihood
hard-decision Viterbi over the 64-state trellis, terminating in state 0.
"""

from __future__ import annotations

import numpy as np
from numba import njit

CONSTRAINT_LEN = 7
N_STATES = 1 << (CONSTRAINT_LEN - 1)
G0_OCTAL = 0o133
G1_OCTAL = 0o171
N_TAIL = CONSTRAINT_LEN - 1

# Puncture mask over the serialized stream [A0,B0,A1,B1,A2,B2], period 6.
PUNCTURE_MASK_34 = np.array([1, 1, 1, 0, 0, 1], dtype=np.uint8)

_G0_TAPS = np.array([(G0_OCTAL >> i) & 1 for i in range(CONSTRAINT_LEN)],
                    dtype=np.uint8)[::-1].copy()
_G1_TAPS = np.array([(G1_OCTAL >> i) & 1 for i in range(CONSTRAINT_LEN)],
                    dtype=np.uint8)[::-1].copy()


def _build_trellis():
    """Per (state, input) tables: output bit pair and next state.

    State is the previous 6 input bits, most recent in the MSB.
    """
    out0 = np.zeros((N_STATES, 2), dtype=np.uint8)
    out1 = np.zeros((N_STATES, 2), dtype=np.uint8)
    nxt = np.zeros((N_STATES, 2), dtype=np.uint8)
    for state in range(N_STATES):
        for bit in (0, 1):
            reg = (bit << (CONSTRAINT_LEN - 1)) | state
            o0 = bin(reg & G0_OCTAL).count("1") & 1
            o1 = bin(reg & G1_OCTAL).count("1") & 1
            out0[state, bit] = o0
            out1[state, bit] = o1
            nxt[state, bit] = reg >> 1
    return out0, out1, nxt


_OUT0, _OUT1, _NEXT = _build_trellis()


def conv_encode(bits: np.ndarray) -> np.ndarray:
    """Encode, zero-tail and puncture a {0,1} bit array to rate 3/4."""
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    tailed = np.concatenate([bits, np.zeros(N_TAIL, dtype=np.uint8)])
    # each output stream is the mod-2 convolution of the input with its taps
    a = np.convolve(tailed, _G0_TAPS)[: tailed.size] & 1
    b = np.convolve(tailed, _G1_TAPS)[: tailed.size] & 1
    serialized = np.empty(2 * tailed.size, dtype=np.uint8)
    serialized[0::2] = a
    serialized[1::2] = b
    return puncture(serialized)


def _tiled_mask(n: int) -> np.ndarray:
    reps = -(-n // PUNCTURE_MASK_34.size)
    return np.tile(PUNCTURE_MASK_34, reps)[:n].astype(bool)


def puncture(serialized: np.ndarray) -> np.ndarray:
    return serialized[_tiled_mask(serialized.size)]


def punctured_length(n_payload_bits: int) -> int:
    """Punctured codeword length for a zero-tailed payload."""
    n_mother = 2 * (n_payload_bits + N_TAIL)
    full, rem = divmod(n_mother, PUNCTURE_MASK_34.size)
    return int(full * PUNCTURE_MASK_34.sum()
               + PUNCTURE_MASK_34[:rem].sum())


def _payload_length_from_coded(n_coded: int) -> int:
    # punctured_length is strictly increasing for even mother lengths,
    # so the inverse is unique when it exists
    lo, hi = 0, max(0, n_coded)
    while lo < hi:
        mid = (lo + hi) // 2
        if punctured_length(mid) < n_coded:
            lo = mid + 1
        else:
            hi = mid
    if punctured_length(lo) != n_coded:
        raise ValueError(
            f"coded length {n_coded} inconsistent with the puncturing pattern"
        )
    return lo


def depuncture(coded: np.ndarray, n_payload_bits: int):
    """Spread punctured bits back over the mother stream with erasure flags."""
    coded = np.asarray(coded, dtype=np.uint8).reshape(-1)
    expected = punctured_length(n_payload_bits)
    if coded.size != expected:
        raise ValueError(
            f"coded length {coded.size} does not match payload "
            f"{n_payload_bits} (expected {expected})"
        )
    n_mother = 2 * (n_payload_bits + N_TAIL)
    mask = _tiled_mask(n_mother)
    mother = np.zeros(n_mother, dtype=np.uint8)
    mother[mask] = coded
    observed = mask.astype(np.uint8)
    y0, y1 = mother[0::2], mother[1::2]
    m0, m1 = observed[0::2], observed[1::2]
    return y0, y1, m0, m1


@njit(cache=True)
def _viterbi_forward(y0, y1, m0, m1, out0, out1, nxt):  # pragma: no cover
    n_steps = y0.shape[0]
    n_states = out0.shape[0]
    big = np.int64(1 << 60)
    pm = np.full(n_states, big, dtype=np.int64)
    pm[0] = 0
    new_pm = np.empty(n_states, dtype=np.int64)
    decisions = np.empty((n_steps, n_states), dtype=np.uint8)
    for t in range(n_steps):
        new_pm[:] = big
        for s in range(n_states):
            base = pm[s]
            if base >= big:
                continue
            for b in range(2):
                metric = base
                if m0[t] and y0[t] != out0[s, b]:
                    metric += 1
                if m1[t] and y1[t] != out1[s, b]:
                    metric += 1
                ns = nxt[s, b]
                if metric < new_pm[ns]:
                    new_pm[ns] = metric
                    decisions[t, ns] = (s << 1) | b
        pm[:] = new_pm
    return pm, decisions


@njit(cache=True)
def _viterbi_traceback(decisions, start_state):  # pragma: no cover
    n_steps = decisions.shape[0]
    bits = np.empty(n_steps, dtype=np.uint8)
    state = np.int64(start_state)
    for t in range(n_steps - 1, -1, -1):
        packed = np.int64(decisions[t, state])
        bits[t] = packed & 1
        state = packed >> 1
    return bits


def viterbi_decode(coded: np.ndarray, n_payload_bits: int | None = None) -> np.ndarray:
    """ML hard-decision decode of a rate-3/4 punctured, zero-tailed stream.

    ``n_payload_bits`` may be omitted when the coded length alone
    determines it (the puncturing pattern makes lengths unique).
    """
    coded = np.asarray(coded, dtype=np.uint8).reshape(-1)
    if n_payload_bits is None:
        n_payload_bits = _payload_length_from_coded(coded.size)
    y0, y1, m0, m1 = depuncture(coded, n_payload_bits)
    pm, decisions = _viterbi_forward(y0, y1, m0, m1, _OUT0, _OUT1, _NEXT)
    # zero-tailed: trace back from state 0
    bits = _viterbi_traceback(decisions, 0)
    return bits[:n_payload_bits].copy()
