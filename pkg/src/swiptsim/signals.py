"""Complex-baseband signal representation, power/PAPR arithmetic and IQ file I/O.

Conventions used throughout the simulator:

* all signals are complex baseband sampled at 20 MHz by default
  (64 subcarriers x 312.5 kHz); the RF carrier appears only as metadata
  and inside the circuit-level rectifier's passband reconstruction;
* ``mean(|x|^2)`` of a buffer is its average power in watts directly
  (the antenna reference impedance is folded into the rectifier constants).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_SAMPLE_RATE_HZ = 20e6


@dataclass(frozen=True)
class IqBuffer:
    """Immutable complex baseband sample sequence with its sample rate."""

    samples: np.ndarray
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        arr = np.ascontiguousarray(self.samples, dtype=np.complex128)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz


@dataclass(frozen=True)
class PowerLevel:
    """A power level in dBm with lossless conversion to/from watts."""

    value_dbm: float

    @property
    def watts(self) -> float:
        return dbm_to_watts(self.value_dbm)

    @classmethod
    def from_watts(cls, watts: float) -> "PowerLevel":
        return cls(watts_to_dbm(watts))


def dbm_to_watts(dbm: float) -> float:
    if dbm == -math.inf:
        return 0.0
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts < 0:
        raise ValueError("power must be non-negative")
    if watts == 0.0:
        return -math.inf
    return 10.0 * math.log10(watts) + 30.0


def average_power(buf: IqBuffer) -> float:
    """Mean of |x_n|^2 over the buffer, in watts."""
    if len(buf) == 0:
        raise ValueError("empty signal")
    s = buf.samples
    return float(np.mean(s.real * s.real + s.imag * s.imag))


def papr_db(buf: IqBuffer) -> float:
    """Peak-to-average power ratio, 10*log10(max|x|^2 / mean|x|^2)."""
    p_avg = average_power(buf)
    if p_avg == 0.0:
        raise ValueError("zero-power signal has undefined PAPR")
    s = buf.samples
    p_peak = float(np.max(s.real * s.real + s.imag * s.imag))
    return 10.0 * math.log10(p_peak / p_avg)


def scale_to_power(buf: IqBuffer, target_w: float) -> IqBuffer:
    """Return a copy of ``buf`` scaled so its average power equals ``target_w``.

    The returned samples are a single real non-negative multiple of the
    input.  Scaling a buffer that is already at the target power returns
    the identical samples (no re-quantization).
    """
    if target_w < 0:
        raise ValueError("target power must be non-negative")
    p = average_power(buf)
    if p == 0.0:
        if target_w == 0.0:
            return buf
        raise ValueError("cannot scale zero-power signal to positive power")
    # idempotence guard: a buffer already at the target (to rounding) is
    # returned untouched instead of being re-quantized by a ~1 ulp factor
    if abs(p - target_w) <= 1e-14 * target_w:
        return buf
    scale = math.sqrt(target_w / p)
    return IqBuffer(buf.samples * scale, buf.sample_rate_hz)


# ---------------------------------------------------------------------------
# IQ file format: interleaved little-endian float32 (I0,Q0,I1,Q1,...), no
# header; the sample rate and any extra fields travel in a flat key=value
# sidecar file at "<path>.meta".  Bit-exact across platforms.
# ---------------------------------------------------------------------------

def sidecar_path(path: str) -> str:
    return path + ".meta"


def write_metadata(path: str, fields: dict) -> None:
    """Write a flat key=value metadata file (sorted keys, '\\n' endings)."""
    lines = []
    for key in sorted(fields):
        lines.append(f"{key} = {_fmt_meta_value(fields[key])}\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)


def read_metadata(path: str) -> dict:
    fields = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
    return fields


def _fmt_meta_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_fmt_meta_value(v) for v in value)
    return str(value)


def write_iq(path: str, buf: IqBuffer, extra: dict | None = None) -> None:
    """Write interleaved little-endian float32 IQ plus its metadata sidecar."""
    interleaved = np.empty(2 * len(buf), dtype="<f4")
    interleaved[0::2] = buf.samples.real.astype("<f4")
    interleaved[1::2] = buf.samples.imag.astype("<f4")
    interleaved.tofile(path)
    fields = {
        "format": "cf32le",
        "sample_rate_hz": float(buf.sample_rate_hz),
        "n_samples": len(buf),
    }
    if extra:
        fields.update(extra)
    write_metadata(sidecar_path(path), fields)


def read_iq(path: str, sample_rate_hz: float | None = None) -> IqBuffer:
    """Read an IQ file; the sample rate comes from the sidecar unless given."""
    if sample_rate_hz is None:
        meta = read_metadata(sidecar_path(path))
        if "sample_rate_hz" not in meta:
            raise ValueError(f"{sidecar_path(path)}: missing sample_rate_hz")
        sample_rate_hz = float(meta["sample_rate_hz"])
    raw = np.fromfile(path, dtype="<f4")
    if raw.size % 2 != 0:
        raise ValueError(f"{path}: odd number of float32 values")
    samples = raw[0::2].astype(np.float64) + 1j * raw[1::2].astype(np.float64)
    return IqBuffer(samples, sample_rate_hz)
