"""Convolutional coding: rate arithmetic, round trips, error correction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swiptsim import coding


def test_all_zero_input_gives_all_zero_output():
    out = coding.conv_encode(np.zeros(18, dtype=np.uint8))
    assert out.size == coding.punctured_length(18)
    assert not out.any()


def test_rate_approaches_three_quarters():
    n = 30000
    out = coding.conv_encode(np.zeros(n, dtype=np.uint8))
    assert out.size / n == pytest.approx(4.0 / 3.0, rel=1e-3)


def test_punctured_length_formula():
    # keep 8 of every 12 mother bits
    assert coding.punctured_length(6) == 16
    assert coding.punctured_length(0) == 8  # 6 tail bits alone
    for n in (1, 2, 3, 7, 100, 9999):
        mask = np.tile(coding.PUNCTURE_MASK_34, n + 2)
        expect = int(mask[: 2 * (n + 6)].sum())
        assert coding.punctured_length(n) == expect


def test_noiseless_round_trip_10k_bits():
    rng = np.random.default_rng(42)
    bits = rng.integers(0, 2, 10_000, dtype=np.uint8)
    decoded = coding.viterbi_decode(coding.conv_encode(bits))
    np.testing.assert_array_equal(decoded, bits)


def test_single_flip_is_corrected():
    # free distance of the punctured code exceeds 2
    n = 200
    clean = coding.conv_encode(np.zeros(n, dtype=np.uint8))
    for pos in (0, 57, clean.size - 1):
        corrupted = clean.copy()
        corrupted[pos] ^= 1
        decoded = coding.viterbi_decode(corrupted, n)
        assert not decoded.any()


def test_empty_payload_round_trip():
    coded = coding.conv_encode(np.array([], dtype=np.uint8))
    assert coded.size == 8
    decoded = coding.viterbi_decode(coded)
    assert decoded.size == 0


def test_malformed_length_rejected():
    with pytest.raises(ValueError, match="inconsistent|does not match"):
        coding.viterbi_decode(np.zeros(9, dtype=np.uint8))


def test_length_inference_matches_explicit():
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 2, 123, dtype=np.uint8)
    coded = coding.conv_encode(bits)
    np.testing.assert_array_equal(
        coding.viterbi_decode(coded),
        coding.viterbi_decode(coded, 123))


@given(st.integers(0, 2**64 - 1), st.integers(1, 400))
@settings(max_examples=30)
def test_round_trip_property(seed, n):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n, dtype=np.uint8)
    decoded = coding.viterbi_decode(coding.conv_encode(bits), n)
    np.testing.assert_array_equal(decoded, bits)


def test_depuncture_marks_erasures():
    n = 3
    coded = coding.conv_encode(np.zeros(n, dtype=np.uint8))
    y0, y1, m0, m1 = coding.depuncture(coded, n)
    assert y0.size == y1.size == n + 6
    # pattern [1,1,1,0,0,1] over (A0,B0,A1,B1,A2,B2): B1 and A2 erased
    np.testing.assert_array_equal(m0[:3], [1, 1, 0])
    np.testing.assert_array_equal(m1[:3], [1, 0, 1])
    assert int(m0.sum() + m1.sum()) == coded.size
