"""End-to-end trial orchestration, ratio sweeps and E-T region extraction.

One trial runs the full chain for one slot: seeded payload -> OFDM
modulation -> power waveform -> combiner -> channel (trial-seeded noise)
-> receiver front-end -> harvester + decoder -> (energy, BER).  A sweep
walks the time-sharing ratio (1-D) or the two power-combining/splitting
ratios (2-D) over a 0.1-step grid, averaging each operating point over
``n_trials`` trials.

Determinism: the payload and noise streams are keyed only by
(seed, trial_index), so a sweep repeated with any worker count is
bit-identical, and matched trial indices share their randomness across
grid points and modulation schemes (common random numbers).

Throughput bookkeeping: the link-rate formula (1 - BER) * max rate is
exposed as :func:`throughput_mbps`; per-slot points additionally scale
by the information waveform's airtime fraction (1 for superposition and
WIT-only slots, about 1 - alpha for time sharing), since a slot that
carries information for only part of its duration delivers
correspondingly fewer bits.  Slots with no information component or a
dead decoder path report NaN BER and zero throughput.

Energies in ETPoint/CSV outputs are per-second equivalents (slot energy
divided by slot duration); raw slot joules are available on TrialResult.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, apply_channel
from .combine import SegmentMap, TxDesign, TxMode, superpose, time_share
from .frontend import RxDesign, RxMode, split
from .modulation import ModulationScheme
from .multisine import MultisineConfig, generate_multisine
from .ofdm import (SYMBOL_LEN, ModulatedFrame, OfdmPlan, ber,
                   max_data_rate_mbps, ofdm_demodulate, ofdm_modulate,
                   pilot_ls_channel_estimate, symbol_capacity_bits)
from .rectifier import (RectifierModel, harvest_dc, harvested_energy_for_slot)
from .signals import IqBuffer, average_power, scale_to_power

log = logging.getLogger("swiptsim.harness")


class SimulationError(RuntimeError):
    """A component failure with the (point, trial) context attached."""


@dataclass(frozen=True)
class Scenario:
    tx_design: TxDesign
    rx_design: RxDesign
    ofdm_plan: OfdmPlan = OfdmPlan()
    multisine: MultisineConfig = MultisineConfig()
    channel: ChannelModel = ChannelModel()
    rectifier: RectifierModel = RectifierModel()
    n_trials: int = 300
    payload_bits_per_slot: int | None = None  # None: fill the WIT airtime
    base_seed: int = 1234
    sample_rate_hz: float = 20e6
    channel_estimate: str = "genie"  # or "pilot_ls"
    allow_unpaired: bool = False

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be positive")
        if self.channel_estimate not in ("genie", "pilot_ls"):
            raise ValueError("channel_estimate must be 'genie' or 'pilot_ls'")
        if not self.allow_unpaired:
            pairing = {TxMode.TIME_SHARING: RxMode.TIME_SWITCHING,
                       TxMode.SUPERPOSITION: RxMode.POWER_SPLITTING}
            want = pairing.get(self.tx_design.mode)
            if want is not None and self.rx_design.mode is not want:
                raise ValueError(
                    f"{self.tx_design.mode.value} transmit signals pair with "
                    f"{want.value} receivers (set allow_unpaired to override)"
                )
        if self.tx_design.mode is TxMode.SUPERPOSITION:
            reserved = set(self.ofdm_plan.reserved_wpt_subcarriers)
            tones = set(self.multisine.tone_subcarriers)
            if not tones <= reserved:
                raise ValueError(
                    "superposition requires every multisine tone to sit on "
                    f"a reserved subcarrier; offending: {sorted(tones - reserved)}"
                )

    @property
    def slot_samples(self) -> int:
        return int(round(self.tx_design.slot_duration_s * self.sample_rate_hz))


@dataclass(frozen=True)
class TrialResult:
    energy_j: float            # raw joules over the slot
    ber: float                 # NaN when no information path existed
    throughput_mbps: float
    n_payload_bits: int
    eh_dc_metric: float = 0.0  # harvester DC figure (proxy or volts)


@dataclass(frozen=True)
class ETPoint:
    """One averaged operating point of the harvested-energy/throughput region."""

    mode: str
    alpha: float
    rho_tx: float
    rho_rx: float
    modulation: str
    mean_energy_j: float       # per-second equivalent
    stderr_energy: float
    mean_ber: float
    mean_throughput_mbps: float
    stderr_throughput: float
    n_trials: int


def throughput_mbps(ber_value: float, scheme: ModulationScheme) -> float:
    """Link throughput (1 - BER) * max rate, in Mbps."""
    if not 0.0 <= ber_value <= 1.0:
        raise ValueError("ber must lie in [0, 1]")
    return (1.0 - ber_value) * max_data_rate_mbps(scheme)


@functools.lru_cache(maxsize=16)
def _cached_multisine(cfg: MultisineConfig, n_samples: int,
                      sample_rate_hz: float) -> IqBuffer:
    return generate_multisine(cfg, n_samples / sample_rate_hz, sample_rate_hz)


def _payload_rng(base_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([int(base_seed), int(trial_index), 0]))


def _make_wit_frame(s: Scenario, n_symbols: int,
                    trial_index: int) -> ModulatedFrame | None:
    """Seeded random payload modulated to fill ``n_symbols`` OFDM symbols."""
    if n_symbols <= 0:
        return None
    capacity = symbol_capacity_bits(s.ofdm_plan, n_symbols)
    n_bits = capacity
    if s.payload_bits_per_slot is not None:
        n_bits = min(s.payload_bits_per_slot, capacity)
    if n_bits <= 0:
        return None
    bits = _payload_rng(s.base_seed, trial_index).integers(
        0, 2, n_bits, dtype=np.uint8)
    return ofdm_modulate(bits, s.ofdm_plan, s.tx_design.total_tx_power_w,
                         s.sample_rate_hz)


def _build_tx(s: Scenario, trial_index: int):
    """Transmitted slot, its segment map (TS only) and the WIT frame."""
    tx = s.tx_design
    n_slot = s.slot_samples
    mode = tx.mode
    if mode is TxMode.WIT_ONLY:
        n_sym = n_slot // SYMBOL_LEN
        frame = _make_wit_frame(s, n_sym, trial_index)
        if frame is None:
            raise ValueError("slot too short for one OFDM symbol")
        return frame.buffer, None, frame

    wpt_cfg = dataclasses.replace(s.multisine,
                                  total_power_w=tx.total_tx_power_w)
    x_wpt = _cached_multisine(wpt_cfg, n_slot, s.sample_rate_hz)

    if mode is TxMode.WPT_ONLY:
        return x_wpt, None, None

    if mode is TxMode.SUPERPOSITION:
        n_sym = n_slot // SYMBOL_LEN
        frame = _make_wit_frame(s, n_sym, trial_index)
        if frame is None or tx.rho_tx == 1.0:
            # no information component: emit the pure power waveform
            usable = (n_sym * SYMBOL_LEN) if n_sym else n_slot
            wpt = IqBuffer(x_wpt.samples[:usable], s.sample_rate_hz)
            return scale_to_power(wpt, tx.total_tx_power_w), None, None
        usable = frame.n_symbols * SYMBOL_LEN
        wpt = IqBuffer(x_wpt.samples[:usable], s.sample_rate_hz)
        out = superpose(wpt, frame.buffer, tx, s.ofdm_plan)
        return out, None, frame

    # time sharing: WPT first, WIT fills the remainder
    boundary = int(round(tx.alpha_tx * n_slot))
    n_sym = (n_slot - boundary) // SYMBOL_LEN
    frame = _make_wit_frame(s, n_sym, trial_index)
    if frame is None:
        # remainder too short to carry a symbol: hand the slot to WPT
        out = scale_to_power(x_wpt, tx.total_tx_power_w)
        return out, SegmentMap(n_slot, n_slot), None
    out, seg = time_share(x_wpt, frame.buffer, tx)
    return out, seg, frame


def run_trial(s: Scenario, trial_index: int) -> TrialResult:
    """Deterministic single-slot simulation returning (energy, BER)."""
    try:
        return _run_trial_inner(s, trial_index)
    except SimulationError:
        raise
    except Exception as exc:
        raise SimulationError(
            f"trial {trial_index} at {_point_label(s)}: {exc}") from exc


def _point_label(s: Scenario) -> str:
    tx = s.tx_design
    if tx.mode is TxMode.TIME_SHARING:
        return f"mode={tx.mode.value} alpha={tx.alpha_tx}"
    if tx.mode is TxMode.SUPERPOSITION:
        return (f"mode={tx.mode.value} rho_tx={tx.rho_tx} "
                f"rho_rx={s.rx_design.rho_rx}")
    return f"mode={tx.mode.value}"


def _run_trial_inner(s: Scenario, trial_index: int) -> TrialResult:
    x, seg_map, frame = _build_tx(s, trial_index)
    rx_buf, gains = apply_channel(x, s.channel, trial_index)

    rx_design = s.rx_design
    if (rx_design.mode is RxMode.TIME_SWITCHING
            and rx_design.segment_map is None
            and seg_map is not None
            and rx_design.alpha_rx == s.tx_design.alpha_tx):
        rx_design = dataclasses.replace(rx_design, segment_map=seg_map)
    eh_buf, id_buf = split(rx_buf, rx_design)

    # harvester path
    if len(eh_buf) == 0:
        energy = 0.0
        dc_metric = 0.0
    else:
        result = harvest_dc(eh_buf, s.rectifier)
        energy = harvested_energy_for_slot(result, rx_design)
        dc_metric = result.dc_metric

    # decoder path
    id_dead = (len(id_buf) < SYMBOL_LEN
               or (rx_design.mode is RxMode.POWER_SPLITTING
                   and rx_design.rho_rx == 1.0))
    if frame is None or id_dead:
        return TrialResult(energy, math.nan, 0.0, 0, dc_metric)

    if s.channel_estimate == "pilot_ls":
        chan_est = pilot_ls_channel_estimate(id_buf, s.ofdm_plan)
    else:
        id_amp = 1.0
        if rx_design.mode is RxMode.POWER_SPLITTING:
            id_amp = math.sqrt(1.0 - rx_design.rho_rx)
        wit_amp = 1.0
        if s.tx_design.mode is TxMode.SUPERPOSITION:
            wit_amp = math.sqrt(1.0 - s.tx_design.rho_tx)
        chan_est = gains * frame.amp_scale * wit_amp * id_amp
    decoded = ofdm_demodulate(id_buf, s.ofdm_plan, chan_est,
                              frame.n_payload_bits)
    reference = _payload_rng(s.base_seed, trial_index).integers(
        0, 2, frame.n_payload_bits, dtype=np.uint8)
    ber_value = ber(reference, decoded)
    duty = frame.n_symbols * SYMBOL_LEN / s.slot_samples
    rate = throughput_mbps(ber_value, s.ofdm_plan.modulation) * duty
    return TrialResult(energy, ber_value, rate, frame.n_payload_bits,
                       dc_metric)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def _grid(grid_step: float) -> list[float]:
    n = round(1.0 / grid_step)
    if abs(n * grid_step - 1.0) > 1e-9:
        raise ValueError("grid_step must divide 1.0")
    return [i / n for i in range(n + 1)]


def _point_scenarios(s: Scenario, grid_step: float) -> list[Scenario]:
    mode = s.tx_design.mode
    values = _grid(grid_step)
    points = []
    if mode is TxMode.TIME_SHARING:
        for a in values:
            points.append(dataclasses.replace(
                s,
                tx_design=dataclasses.replace(s.tx_design, alpha_tx=a),
                rx_design=dataclasses.replace(s.rx_design, alpha_rx=a),
            ))
    elif mode is TxMode.SUPERPOSITION:
        for rho_tx in values:
            for rho_rx in values:
                points.append(dataclasses.replace(
                    s,
                    tx_design=dataclasses.replace(s.tx_design, rho_tx=rho_tx),
                    rx_design=dataclasses.replace(s.rx_design, rho_rx=rho_rx),
                ))
    else:
        raise ValueError(
            "sweep requires tx mode time_sharing or superposition")
    return points


def _run_point(point: Scenario) -> list[TrialResult]:
    return [run_trial(point, t) for t in range(point.n_trials)]


def _collect_point(point: Scenario, trials: list[TrialResult]) -> ETPoint:
    slot = point.tx_design.slot_duration_s
    energies = np.array([t.energy_j for t in trials]) / slot
    rates = np.array([t.throughput_mbps for t in trials])
    bers = np.array([t.ber for t in trials])
    n = len(trials)

    def stderr(arr):
        if n < 2:
            return 0.0
        return float(np.std(arr, ddof=1) / math.sqrt(n))

    tx, rx = point.tx_design, point.rx_design
    is_ts = tx.mode is TxMode.TIME_SHARING
    return ETPoint(
        mode=tx.mode.value,
        alpha=tx.alpha_tx if is_ts else math.nan,
        rho_tx=math.nan if is_ts else tx.rho_tx,
        rho_rx=math.nan if is_ts else rx.rho_rx,
        modulation=point.ofdm_plan.modulation.name,
        mean_energy_j=float(np.mean(energies)),
        stderr_energy=stderr(energies),
        mean_ber=float(np.mean(bers)),
        mean_throughput_mbps=float(np.mean(rates)),
        stderr_throughput=stderr(rates),
        n_trials=n,
    )


def sweep(s: Scenario, grid_step: float = 0.1, jobs: int = 1) -> list[ETPoint]:
    """Average (energy, throughput) over the ratio grid; 11 or 121 points."""
    points = _point_scenarios(s, grid_step)
    log.info("sweep: %d points x %d trials (%d worker%s)",
             len(points), s.n_trials, jobs, "s" if jobs != 1 else "")
    if jobs <= 1:
        all_trials = [_run_point(p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            all_trials = list(pool.map(_run_point, points))
    return [_collect_point(p, t) for p, t in zip(points, all_trials)]


# ---------------------------------------------------------------------------
# region arithmetic
# ---------------------------------------------------------------------------

def _weakly_dominates(p: ETPoint, q: ETPoint) -> bool:
    return (p.mean_energy_j >= q.mean_energy_j
            and p.mean_throughput_mbps >= q.mean_throughput_mbps)


def _strictly_dominates(p: ETPoint, q: ETPoint) -> bool:
    return _weakly_dominates(p, q) and (
        p.mean_energy_j > q.mean_energy_j
        or p.mean_throughput_mbps > q.mean_throughput_mbps)


def pareto_frontier(points: list[ETPoint]) -> list[ETPoint]:
    """Maximal points under (energy, throughput) dominance; ties kept."""
    if not points:
        raise ValueError("empty point set")
    frontier = [q for q in points
                if not any(_strictly_dominates(p, q) for p in points)]
    return sorted(frontier,
                  key=lambda p: (p.mean_energy_j, p.mean_throughput_mbps))


def region_dominates(a: list[ETPoint], b: list[ETPoint]) -> bool:
    """True iff every point of b is weakly dominated by some point of a."""
    if not a or not b:
        raise ValueError("empty point set")
    return all(any(_weakly_dominates(p, q) for p in a) for q in b)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("mode", "alpha", "rho_tx", "rho_rx", "modulation",
               "mean_energy_j", "stderr_energy", "mean_ber",
               "mean_throughput_mbps", "stderr_throughput", "n_trials")


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _point_row(point: ETPoint) -> list[str]:
    return [_format_cell(getattr(point, col)) for col in CSV_COLUMNS]


def write_et_csv(path: str, points: list[ETPoint],
                 header_meta: dict | None = None) -> None:
    """One row per ETPoint; '#' comment lines carry run metadata."""
    _write_csv(path, points, header_meta, dominated_flags=None)


def write_frontier_csv(path: str, points: list[ETPoint],
                       header_meta: dict | None = None) -> None:
    """All points plus a 'dominated' flag; frontier rows carry 0."""
    flags = [1 if any(_strictly_dominates(p, q) for p in points) else 0
             for q in points]
    _write_csv(path, points, header_meta, dominated_flags=flags)


def _write_csv(path, points, header_meta, dominated_flags):
    lines = []
    meta = dict(header_meta or {})
    meta.setdefault("energy_units", "joules_per_second_equivalent")
    for key in sorted(meta):
        lines.append(f"# {key}={meta[key]}\n")
    columns = list(CSV_COLUMNS)
    if dominated_flags is not None:
        columns.append("dominated")
    lines.append(",".join(columns) + "\n")
    for i, point in enumerate(points):
        row = _point_row(point)
        if dominated_flags is not None:
            row.append(str(dominated_flags[i]))
        lines.append(",".join(row) + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
