"""Flat key=value run configuration and the Scenario builder.

Grammar (exact):

* one ``key = value`` pair per line; keys use dotted section prefixes
  (``tx.``, ``rx.``, ``ofdm.``, ``multisine.``, ``channel.``,
  ``rectifier.``, ``sweep.``);
* ``#`` starts a comment (whole line or trailing); blank lines ignored;
* list values are comma-separated (``multisine.subcarriers = -16,-12,...``);
* unknown keys are rejected; ratio keys must parse into [0, 1];
* every key is optional and falls back to the defaults below.

Errors carry ``path:line:`` anchors and the offending key.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass

from .channel import ChannelModel
from .combine import TxDesign, TxMode
from .frontend import RxDesign, RxMode
from .harness import Scenario
from .modulation import scheme_by_name
from .multisine import MultisineConfig, DEFAULT_TONE_SUBCARRIERS
from .ofdm import OfdmPlan
from .rectifier import RectifierModel, RectifierVariant
from .signals import PowerLevel


class ConfigError(ValueError):
    """Invalid run configuration (maps to CLI exit code 2)."""


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    return int(text, 0)


def _parse_ratio(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"ratio {value} outside [0, 1]")
    return value


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v.strip()) for v in text.split(",") if v.strip())


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v.strip()) for v in text.split(",") if v.strip())


def _parse_complex_list(text: str) -> tuple[complex, ...]:
    return tuple(complex(v.strip()) for v in text.split(",") if v.strip())


def _parse_choice(*choices: str):
    def parse(text: str) -> str:
        low = text.lower()
        if low not in choices:
            raise ValueError(f"expected one of {choices}, got {text!r}")
        return low
    return parse


def _parse_optional_int(text: str):
    if text.lower() in ("none", "auto"):
        return None
    value = int(text, 0)
    if value < 0:
        raise ValueError("expected a non-negative count or 'auto'")
    return value


def _parse_grid_step(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0 or abs(round(1.0 / value) * value - 1.0) > 1e-9:
        raise ValueError(f"grid step {value} does not divide 1.0")
    return value


def _parse_modulation(text: str) -> str:
    scheme_by_name(text)  # validates
    return text.lower()


# key -> (default, parser); defaults mirror the experiment's setup:
# 2 ms slots, -20 dBm at the antenna, -95 dBm noise over 20 MHz.
CONFIG_KEYS: dict[str, tuple] = {
    "tx.mode": ("wit_only",
                _parse_choice(*[m.value for m in TxMode])),
    "tx.alpha_tx": (0.5, _parse_ratio),
    "tx.rho_tx": (0.5, _parse_ratio),
    "tx.slot_duration_s": (0.002, _parse_float),
    "tx.total_tx_power_dbm": (35.0, _parse_float),
    "rx.mode": ("power_splitting",
                _parse_choice(*[m.value for m in RxMode])),
    "rx.rho_rx": (0.0, _parse_ratio),
    "rx.alpha_rx": (0.5, _parse_ratio),
    "rx.channel_estimate": ("genie", _parse_choice("genie", "pilot_ls")),
    "ofdm.modulation": ("qpsk", _parse_modulation),
    "multisine.n_tones": (8, _parse_int),
    "multisine.subcarriers": (DEFAULT_TONE_SUBCARRIERS, _parse_int_list),
    "multisine.phases_rad": (None, _parse_float_list),
    "channel.taps": ((1 + 0j,), _parse_complex_list),
    "channel.target_rx_power_dbm": (-20.0, _parse_float),
    "channel.noise_floor_dbm": (-95.0, _parse_float),
    "channel.seed": (1234, _parse_int),
    "rectifier.variant": ("polynomial",
                          _parse_choice(*[v.value for v in RectifierVariant])),
    "rectifier.k2": (0.0034, _parse_float),
    "rectifier.k4": (0.3829, _parse_float),
    "rectifier.saturation_current_a": (5e-6, _parse_float),
    "rectifier.ideality": (1.05, _parse_float),
    "rectifier.thermal_voltage_v": (0.02585, _parse_float),
    "rectifier.load_resistance_ohm": (10e3, _parse_float),
    "rectifier.load_capacitance_f": (1e-9, _parse_float),
    "rectifier.antenna_resistance_ohm": (50.0, _parse_float),
    "rectifier.carrier_freq_hz": (2.4e9, _parse_float),
    "rectifier.upsampling_factor": (8, _parse_int),
    "sweep.n_trials": (300, _parse_int),
    "sweep.grid_step": (0.1, _parse_grid_step),
    "sweep.base_seed": (1234, _parse_int),
    "sweep.payload_bits_per_slot": (None, _parse_optional_int),
    "sweep.allow_unpaired": (False, _parse_bool),
}


@dataclass(frozen=True)
class RunConfig:
    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    def canonical_text(self) -> str:
        lines = []
        for key in sorted(self.values):
            lines.append(f"{key} = {_canonical_value(self.values[key])}\n")
        return "".join(lines)

    def config_hash(self) -> str:
        return hashlib.sha256(
            self.canonical_text().encode("utf-8")).hexdigest()[:16]

    def with_seed(self, seed: int) -> "RunConfig":
        values = dict(self.values)
        values["channel.seed"] = int(seed)
        values["sweep.base_seed"] = int(seed)
        return RunConfig(values)

    def scenario(self) -> Scenario:
        v = self.values
        tx = TxDesign(
            mode=TxMode(v["tx.mode"]),
            alpha_tx=v["tx.alpha_tx"],
            rho_tx=v["tx.rho_tx"],
            slot_duration_s=v["tx.slot_duration_s"],
            total_tx_power_w=PowerLevel(v["tx.total_tx_power_dbm"]).watts,
        )
        rx = RxDesign(
            mode=RxMode(v["rx.mode"]),
            rho_rx=v["rx.rho_rx"],
            alpha_rx=v["rx.alpha_rx"],
        )
        plan = OfdmPlan(modulation=scheme_by_name(v["ofdm.modulation"]))
        subs = tuple(v["multisine.subcarriers"])
        if len(subs) != v["multisine.n_tones"]:
            raise ConfigError(
                f"multisine.n_tones = {v['multisine.n_tones']} but "
                f"{len(subs)} subcarriers were given"
            )
        multisine = MultisineConfig(
            n_tones=v["multisine.n_tones"],
            tone_subcarriers=subs,
            phases_rad=v["multisine.phases_rad"],
            total_power_w=tx.total_tx_power_w,
        )
        chan = ChannelModel(
            taps=v["channel.taps"],
            target_rx_power=PowerLevel(v["channel.target_rx_power_dbm"]),
            noise_floor=PowerLevel(v["channel.noise_floor_dbm"]),
            seed=v["channel.seed"],
        )
        rect = RectifierModel(
            variant=RectifierVariant(v["rectifier.variant"]),
            k2=v["rectifier.k2"],
            k4=v["rectifier.k4"],
            saturation_current_a=v["rectifier.saturation_current_a"],
            ideality=v["rectifier.ideality"],
            thermal_voltage_v=v["rectifier.thermal_voltage_v"],
            load_resistance_ohm=v["rectifier.load_resistance_ohm"],
            load_capacitance_f=v["rectifier.load_capacitance_f"],
            antenna_resistance_ohm=v["rectifier.antenna_resistance_ohm"],
            carrier_freq_hz=v["rectifier.carrier_freq_hz"],
            upsampling_factor=v["rectifier.upsampling_factor"],
        )
        try:
            return Scenario(
                tx_design=tx,
                rx_design=rx,
                ofdm_plan=plan,
                multisine=multisine,
                channel=chan,
                rectifier=rect,
                n_trials=v["sweep.n_trials"],
                payload_bits_per_slot=v["sweep.payload_bits_per_slot"],
                base_seed=v["sweep.base_seed"],
                channel_estimate=v["rx.channel_estimate"],
                allow_unpaired=v["sweep.allow_unpaired"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _canonical_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_canonical_value(x) for x in value)
    return str(value)


def default_config() -> RunConfig:
    return RunConfig({key: default for key, (default, _) in CONFIG_KEYS.items()})


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    values = {key: default for key, (default, _) in CONFIG_KEYS.items()}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value_text = line.partition("=")
        key = key.strip()
        value_text = value_text.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
        if key in seen:
            raise ConfigError(
                f"{source}:{lineno}: duplicate key '{key}' "
                f"(first set on line {seen[key]})"
            )
        seen[key] = lineno
        _, parser = CONFIG_KEYS[key]
        try:
            values[key] = parser(value_text)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from exc
    return RunConfig(values)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    return parse_config_text(text, source=path)
