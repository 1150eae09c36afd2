"""Command-line entry point: signal generation, single trials and sweeps.

Subcommands:

* ``gen {wit,wpt,combined}``: write a deterministic IQ file (interleaved
  little-endian float32) plus its key=value metadata sidecar;
* ``simulate``: run one trial of the configured scenario and report
  energy, BER and throughput;
* ``sweep``: run the ratio-grid sweep and emit the E-T region CSV;
  ``--pareto`` additionally writes a dominated-flag CSV next to it.

Exit codes: 0 success, 2 configuration error, 3 runtime simulation
error.  ``SWIPT_SIM_LOG`` selects the log level (debug/info/warning).
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

from . import harness
from .combine import TxMode
from .config import ConfigError, RunConfig, default_config, load_config
from .harness import SimulationError, run_trial, sweep
from .signals import average_power, watts_to_dbm, write_iq

log = logging.getLogger("swiptsim.cli")


def _setup_logging() -> None:
    level_name = os.environ.get("SWIPT_SIM_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s")


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _common_meta(cfg: RunConfig) -> dict:
    return {
        "config_hash": cfg.config_hash(),
        "base_seed": cfg["sweep.base_seed"],
        "slot_duration_s": cfg["tx.slot_duration_s"],
        "modulation": cfg["ofdm.modulation"],
        "rectifier": cfg["rectifier.variant"],
    }


def cmd_gen(args) -> int:
    cfg = _load(args)
    scenario = cfg.scenario()
    tx = scenario.tx_design
    meta = _common_meta(cfg)
    meta.update({
        "tx.mode": tx.mode.value,
        "tx.alpha_tx": tx.alpha_tx,
        "tx.rho_tx": tx.rho_tx,
    })

    if args.kind == "wpt":
        scenario = _force_mode(scenario, TxMode.WPT_ONLY)
    elif args.kind == "wit":
        scenario = _force_mode(scenario, TxMode.WIT_ONLY)
    elif tx.mode not in (TxMode.TIME_SHARING, TxMode.SUPERPOSITION):
        raise ConfigError(
            "gen combined requires tx.mode = time_sharing or superposition")

    buf, seg_map, frame = harness._build_tx(scenario, trial_index=0)
    if frame is not None:
        meta["payload_bits"] = frame.n_payload_bits
        meta["n_symbols"] = frame.n_symbols
    if seg_map is not None:
        meta["segment.boundary_index"] = seg_map.boundary_index
        meta["segment.n_samples"] = seg_map.n_samples
    meta["average_power_dbm"] = watts_to_dbm(average_power(buf))
    write_iq(args.out, buf, meta)
    print(f"wrote {len(buf)} samples to {args.out} (+.meta)")
    return 0


def _force_mode(scenario, mode: TxMode):
    import dataclasses
    return dataclasses.replace(
        scenario,
        tx_design=dataclasses.replace(scenario.tx_design, mode=mode),
        allow_unpaired=True,
    )


def cmd_simulate(args) -> int:
    cfg = _load(args)
    scenario = cfg.scenario()
    result = run_trial(scenario, trial_index=0)
    slot = scenario.tx_design.slot_duration_s
    print(f"mode = {scenario.tx_design.mode.value}")
    print(f"energy_j = {result.energy_j!r}")
    print(f"energy_per_second_j = {result.energy_j / slot!r}")
    print(f"eh_dc_metric = {result.eh_dc_metric!r}")
    print(f"ber = {result.ber!r}")
    print(f"throughput_mbps = {result.throughput_mbps!r}")
    if args.out:
        point = harness._collect_point(scenario, [result])
        harness.write_et_csv(args.out, [point], _common_meta(cfg))
        print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    scenario = cfg.scenario()
    points = sweep(scenario, grid_step=cfg["sweep.grid_step"],
                   jobs=args.jobs)
    meta = _common_meta(cfg)
    meta["grid_step"] = cfg["sweep.grid_step"]
    meta["tx.mode"] = scenario.tx_design.mode.value
    harness.write_et_csv(args.out, points, meta)
    print(f"wrote {len(points)} points to {args.out}")
    if args.pareto:
        frontier_path = _frontier_path(args.out)
        harness.write_frontier_csv(frontier_path, points, meta)
        n_frontier = len(harness.pareto_frontier(points))
        print(f"wrote {frontier_path} ({n_frontier} non-dominated points)")
    return 0


def _frontier_path(out: str) -> str:
    root, ext = os.path.splitext(out)
    return f"{root}.frontier{ext or '.csv'}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swipt-sim",
        description="Link-level SWIPT simulator: waveform generation, "
                    "single-slot trials and E-T region sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_out: bool):
        p.add_argument("--config", help="run configuration file")
        p.add_argument("--seed", type=int, metavar="U64",
                       help="override channel.seed and sweep.base_seed")
        if needs_out:
            p.add_argument("--out", required=True, help="output path")

    p_gen = sub.add_parser("gen", help="emit an IQ file + metadata sidecar")
    p_gen.add_argument("kind", choices=("wit", "wpt", "combined"))
    add_common(p_gen, needs_out=True)
    p_gen.set_defaults(func=cmd_gen)

    p_sim = sub.add_parser("simulate", help="run a single trial")
    add_common(p_sim, needs_out=False)
    p_sim.add_argument("--out", help="also write the report as CSV")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run the ratio-grid sweep")
    add_common(p_sweep, needs_out=True)
    p_sweep.add_argument("--jobs", type=int, default=1, metavar="N",
                         help="worker processes (output independent of N)")
    p_sweep.add_argument("--pareto", action="store_true",
                         help="also write the dominated-flag frontier CSV")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SimulationError, ValueError, OSError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
