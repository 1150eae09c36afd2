"""Acceptance suite: one test per criterion, at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one
PASS/FAIL line per criterion (plus wall time).  The sweep-based
criteria (8, 9) share module-scoped fixtures; expect the full module
to take on the order of ten minutes on a small machine.
"""

import contextlib
import math
import os
import time

import numpy as np
import pytest

from ber_utils import effective_ebn0_db, measure_uncoded_ber
from swiptsim.channel import apply_channel
from swiptsim.combine import TxDesign, TxMode, superpose, time_share
from swiptsim.config import default_config, parse_config_text
from swiptsim.frontend import split
from swiptsim.harness import (Scenario, pareto_frontier, region_dominates,
                              run_trial, sweep, write_et_csv)
from swiptsim.modulation import BPSK, QAM16, QAM64, QPSK
from swiptsim.multisine import MultisineConfig, generate_multisine
from swiptsim.ofdm import (FFT_SIZE, OfdmPlan, band_power, ber,
                           max_data_rate_mbps, ofdm_demodulate, ofdm_modulate)
from swiptsim.rectifier import (RectifierModel, RectifierVariant,
                                harvest_dc_circuit, harvest_dc_poly)
from swiptsim.signals import average_power, dbm_to_watts, watts_to_dbm

JOBS = min(os.cpu_count() or 1, 4)
TONE_SETS = {1: (4,), 2: (-4, 4), 4: (-8, -4, 4, 8),
             8: (-16, -12, -8, -4, 4, 8, 12, 16)}


@contextlib.contextmanager
def criterion(number: int, description: str):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE C{number:02d} FAIL "
              f"({time.time() - start:.1f}s): {description}")
        raise
    print(f"\nACCEPTANCE C{number:02d} PASS "
          f"({time.time() - start:.1f}s): {description}")


def sweep_scenario(tx_mode: str, rx_mode: str, modulation: str,
                   n_trials: int = 50) -> Scenario:
    cfg = parse_config_text(
        f"tx.mode = {tx_mode}\n"
        f"rx.mode = {rx_mode}\n"
        f"ofdm.modulation = {modulation}\n"
        f"sweep.n_trials = {n_trials}\n"
    )
    return cfg.scenario()


@pytest.fixture(scope="module")
def et_sweeps():
    """TS and PS default sweeps per modulation (2 ms slots, 50 trials)."""
    cache = {}

    def get(modulation: str):
        if modulation not in cache:
            ts = sweep(sweep_scenario("time_sharing", "time_switching",
                                      modulation), jobs=JOBS)
            ps = sweep(sweep_scenario("superposition", "power_splitting",
                                      modulation), jobs=JOBS)
            cache[modulation] = (ts, ps)
        return cache[modulation]

    return get


def test_c01_rate_table_exact():
    with criterion(1, "max data rate is exactly 7.5/15/30/45 Mbps"):
        assert max_data_rate_mbps(BPSK) == 7.5
        assert max_data_rate_mbps(QPSK) == 15.0
        assert max_data_rate_mbps(QAM16) == 30.0
        assert max_data_rate_mbps(QAM64) == 45.0


def test_c02_worst_case_id_power():
    with criterion(2, "rho_tx=rho_rx=0.9 leaves -40 dBm of information "
                      "power at the decoder (+-0.1 dB)"):
        from swiptsim.harness import _build_tx
        import dataclasses
        sc = sweep_scenario("superposition", "power_splitting", "qpsk")
        sc = dataclasses.replace(
            sc,
            tx_design=dataclasses.replace(sc.tx_design, rho_tx=0.9),
            rx_design=dataclasses.replace(sc.rx_design, rho_rx=0.9))
        x, _, frame = _build_tx(sc, 0)
        rx, _ = apply_channel(x, sc.channel, 0)
        _, id_stream = split(rx, sc.rx_design)
        plan = sc.ofdm_plan
        wit_bins = plan.data_subcarriers + plan.pilot_subcarriers
        wit_dbm = watts_to_dbm(band_power(id_stream, wit_bins))
        assert wit_dbm == pytest.approx(-40.0, abs=0.1)


def test_c03_coding_round_trip_all_modulations():
    with criterion(3, "100k random bits survive the coded OFDM loopback "
                      "for all four modulations"):
        n_bits = 100_000
        for scheme in (BPSK, QPSK, QAM16, QAM64):
            rng = np.random.default_rng(404)
            bits = rng.integers(0, 2, n_bits, dtype=np.uint8)
            plan = OfdmPlan(modulation=scheme)
            frame = ofdm_modulate(bits, plan, 1e-5)
            est = np.full(FFT_SIZE, frame.amp_scale, dtype=complex)
            decoded = ofdm_demodulate(frame.buffer, plan, est, n_bits)
            assert ber(bits, decoded) == 0.0, scheme.name


def test_c04_uncoded_ber_matches_theory():
    with criterion(4, "uncoded QPSK BER tracks Q(sqrt(2 Eb/N0)) within "
                      "0.5 dB at 1e-2 and 1e-3"):
        from scipy.special import erfcinv
        for target_ber in (1e-2, 1e-3):
            ebn0_db = 20 * np.log10(erfcinv(2 * target_ber))
            measured = measure_uncoded_ber(QPSK, ebn0_db, n_bits=1_200_000)
            assert measured > 0
            offset_db = effective_ebn0_db(measured) - ebn0_db
            assert abs(offset_db) <= 0.5, (target_ber, measured)


def test_c05_multisine_papr():
    with criterion(5, "8 in-phase tones give 9.031 dB PAPR (+-0.01)"):
        from swiptsim.signals import papr_db
        buf = generate_multisine(MultisineConfig(total_power_w=1.0),
                                 64 / 20e6)
        assert papr_db(buf) == pytest.approx(9.030899869919435, abs=0.01)
        # dense-grid oracle: 256x oversampling finds no higher peak
        t = np.arange(64 * 256) / (20e6 * 256)
        x = np.zeros(t.size, complex)
        for k in TONE_SETS[8]:
            x += np.exp(2j * np.pi * k * 312.5e3 * t) / np.sqrt(8)
        dense = 10 * np.log10(np.max(np.abs(x) ** 2)
                              / np.mean(np.abs(x) ** 2))
        assert dense == pytest.approx(9.030899869919435, abs=0.01)


def test_c06_nonlinearity_gain_direction():
    with criterion(6, "multisine DC beats the equal-power single tone and "
                      "grows with tone count (both rectifier models)"):
        p = dbm_to_watts(-20.0)

        def tones(n):
            cfg = MultisineConfig(n_tones=n, tone_subcarriers=TONE_SETS[n],
                                  total_power_w=p)
            return generate_multisine(cfg, 640 / 20e6)

        poly = RectifierModel()  # k4 > 0 defaults
        z = [harvest_dc_poly(tones(n), poly).dc_metric for n in (1, 2, 4, 8)]
        assert z[-1] > z[0]
        assert all(b > a for a, b in zip(z, z[1:]))

        circuit = RectifierModel(variant=RectifierVariant.CIRCUIT)
        v = [harvest_dc_circuit(tones(n), circuit).dc_metric
             for n in (1, 2, 4, 8)]
        assert v[-1] > v[0]
        assert all(b > a for a, b in zip(v, v[1:]))


def test_c07_combiner_boundaries_and_power_conservation():
    with criterion(7, "ratio extremes reduce to pure components byte-"
                      "for-byte; superposed power exact to 1e-6"):
        from swiptsim.ofdm import symbol_capacity_bits
        power = dbm_to_watts(35.0)
        n_slot = 40_000
        wpt = generate_multisine(
            MultisineConfig(total_power_w=power), n_slot / 20e6)
        plan = OfdmPlan()
        rng = np.random.default_rng(7)
        bits = rng.integers(0, 2, symbol_capacity_bits(plan, n_slot // 80),
                            dtype=np.uint8)
        wit = ofdm_modulate(bits, plan, power).buffer

        def sp(rho):
            design = TxDesign(mode=TxMode.SUPERPOSITION, rho_tx=rho,
                              slot_duration_s=n_slot / 20e6,
                              total_tx_power_w=power)
            return superpose(wpt, wit, design)

        np.testing.assert_array_equal(sp(0.0).samples, wit.samples)
        np.testing.assert_array_equal(sp(1.0).samples, wpt.samples)

        def ts(alpha):
            design = TxDesign(mode=TxMode.TIME_SHARING, alpha_tx=alpha,
                              slot_duration_s=n_slot / 20e6,
                              total_tx_power_w=power)
            return time_share(wpt, wit, design)[0]

        np.testing.assert_array_equal(ts(0.0).samples, wit.samples)
        np.testing.assert_array_equal(ts(1.0).samples, wpt.samples)

        for tenths in range(11):
            out = sp(tenths / 10)
            assert average_power(out) == pytest.approx(power, rel=1e-6), \
                tenths


def _frontier_gaps(dominating, dominated):
    """Points of ``dominated`` no dominating point covers, with margins."""
    gaps = []
    for q in dominated:
        feasible = [p for p in dominating
                    if p.mean_throughput_mbps >= q.mean_throughput_mbps]
        best = max((p.mean_energy_j for p in feasible), default=-math.inf)
        if best < q.mean_energy_j:
            gaps.append((q, (q.mean_energy_j - best) / q.mean_energy_j))
    return gaps


def test_c08_high_snr_region_dominance(et_sweeps, tmp_path):
    with criterion(8, "power-splitting/superposition frontier dominates "
                      "time-switching/time-sharing frontier at high SNR"):
        ts_points, ps_points = et_sweeps("qpsk")
        write_et_csv(str(tmp_path / "ts.csv"), ts_points, {})
        write_et_csv(str(tmp_path / "ps.csv"), ps_points, {})

        by_alpha = {p.alpha: p for p in ts_points}
        assert by_alpha[1.0].mean_throughput_mbps == 0.0
        assert by_alpha[0.0].mean_energy_j == 0.0
        for p in ps_points:
            if p.rho_rx == 0.0:
                assert p.mean_energy_j == 0.0

        ts_front = pareto_frontier(ts_points)
        ps_front = pareto_frontier(ps_points)
        gaps = _frontier_gaps(ps_front, ts_front)
        detail = "; ".join(
            f"TS(alpha={q.alpha}) undominated by {100 * margin:.3f}% energy"
            for q, margin in gaps)
        assert region_dominates(ps_front, ts_front), detail


def test_c09_modulation_study(et_sweeps):
    with criterion(9, "frontiers ordered 64QAM >= 16QAM >= QPSK >= BPSK; "
                      "max-energy endpoints agree within 2 stderr"):
        order = ("qam64", "qam16", "qpsk", "bpsk")
        frontiers = {}
        clouds = {}
        for name in order:
            ts_points, ps_points = et_sweeps(name)
            clouds[name] = ts_points + ps_points
            frontiers[name] = pareto_frontier(clouds[name])

        failures = []
        # clause 2: the maximum harvested energy must not move with the
        # modulation (within two standard errors)
        endpoints = {}
        for name in order:
            best = max(clouds[name], key=lambda p: p.mean_energy_j)
            endpoints[name] = (best.mean_energy_j, best.stderr_energy)
        for a in order:
            for b in order:
                ea, sa = endpoints[a]
                eb, sb = endpoints[b]
                if abs(ea - eb) > 2 * math.hypot(sa, sb) + 1e-30:
                    failures.append(
                        f"max-energy endpoints differ: {a}={ea!r} vs "
                        f"{b}={eb!r}")
        # clause 1: frontier ordering by modulation order
        for hi, lo in zip(order, order[1:]):
            if not region_dominates(frontiers[hi], frontiers[lo]):
                gaps = _frontier_gaps(frontiers[hi], frontiers[lo])
                failures.append(
                    f"{hi} fails to dominate {lo}: " + "; ".join(
                        f"({q.mode} a={q.alpha} rt={q.rho_tx} rr={q.rho_rx})"
                        f" short {100 * m:.2e}%"
                        for q, m in gaps))
        assert not failures, " | ".join(failures)


def test_c10_determinism_across_worker_counts(tmp_path):
    with criterion(10, "sweep CSVs are byte-identical for any --jobs"):
        from swiptsim.cli import main
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text(
            "tx.mode = time_sharing\n"
            "rx.mode = time_switching\n"
            "sweep.n_trials = 5\n"
        )
        blobs = []
        for jobs in ("1", "2"):
            out = tmp_path / f"ts_jobs{jobs}.csv"
            assert main(["sweep", "--config", str(cfg_path),
                         "--out", str(out), "--jobs", jobs]) == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]
