#!/usr/bin/env python3
"""Compare the E-T regions across BPSK/QPSK/16QAM/64QAM.

Runs both receiver-architecture sweeps for each modulation scheme and
reports how the frontiers nest and how the maximum harvested energy
compares (it should not move with the modulation: the pure power
waveform carries no data).
"""

import argparse
import math
import os
import sys
import time

from swiptsim.config import parse_config_text
from swiptsim.harness import (pareto_frontier, region_dominates, sweep,
                              write_et_csv)

MODULATIONS = ("bpsk", "qpsk", "qam16", "qam64")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--slot-s", type=float, default=0.002)
    parser.add_argument("--seed", type=int, default=1234)
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    args = parser.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    clouds = {}
    for modulation in MODULATIONS:
        points = []
        for tx_mode, rx_mode in (("time_sharing", "time_switching"),
                                 ("superposition", "power_splitting")):
            cfg = parse_config_text(
                f"tx.mode = {tx_mode}\n"
                f"rx.mode = {rx_mode}\n"
                f"ofdm.modulation = {modulation}\n"
                f"tx.slot_duration_s = {args.slot_s}\n"
                f"sweep.n_trials = {args.trials}\n"
                f"sweep.base_seed = {args.seed}\n"
                f"channel.seed = {args.seed}\n"
            )
            t0 = time.time()
            pts = sweep(cfg.scenario(), jobs=args.jobs)
            print(f"{modulation} {tx_mode}: {len(pts)} points "
                  f"in {time.time() - t0:.0f}s")
            points.extend(pts)
            write_et_csv(
                os.path.join(args.out_dir,
                             f"et_{tx_mode}_{modulation}.csv"),
                pts, {"config_hash": cfg.config_hash(),
                      "modulation": modulation, "tx.mode": tx_mode})
        clouds[modulation] = points

    print()
    for hi, lo in zip(reversed(MODULATIONS), list(reversed(MODULATIONS))[1:]):
        verdict = region_dominates(pareto_frontier(clouds[hi]),
                                   pareto_frontier(clouds[lo]))
        print(f"{hi} region covers {lo}: {verdict}")
    print()
    for modulation in MODULATIONS:
        best = max(clouds[modulation], key=lambda p: p.mean_energy_j)
        peak_rate = max(p.mean_throughput_mbps for p in clouds[modulation])
        print(f"{modulation:6s} max energy {best.mean_energy_j:.6e} J/s "
              f"(stderr {best.stderr_energy:.1e}), "
              f"peak throughput {peak_rate:.1f} Mbps")
    return 0


if __name__ == "__main__":
    sys.exit(main())
