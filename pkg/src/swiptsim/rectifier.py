"""Nonlinear energy-harvester models: DC output and harvested energy.

Two interchangeable rectifier descriptions:

* polynomial: a 2nd + 4th moment truncation of the diode characteristic,
  z = k2 * mean(|x|^2) + k4 * (3/2) * mean(|x|^4)
  (the baseband equivalents of the passband 2nd/4th moments).  z is a
  dimensionless DC proxy; harvested energy is reported in proxy joules.

* circuit: a single Schottky diode feeding a parallel RC load, driven
  through the antenna source resistance.  The real passband voltage is
  reconstructed from baseband at an upsampled rate and the circuit is
  time-stepped (implicit trapezoidal rule, Newton iteration on the diode
  node) until the output voltage reaches periodic steady state.

Both models are deterministic; identical inputs give identical outputs.
The buffer's |x|^2 is interpreted as the power available from the
antenna source, i.e. the EMF is sqrt(8 * R_ant) * Re{x * e^(j*w_c*t)}.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .frontend import RxDesign
from .signals import IqBuffer

log = logging.getLogger("swiptsim.rectifier")

DEFAULT_K2 = 0.0034   # 1/W
DEFAULT_K4 = 0.3829   # 1/W^2

# steady-state detection window: one multisine fundamental period
PERIOD_SAMPLES = 64
STEADY_STATE_REL_TOL = 1e-4
MAX_PERIODS = 2000
DIODE_CURRENT_TOL_A = 1e-12


class RectifierVariant(str, enum.Enum):
    POLYNOMIAL = "polynomial"
    CIRCUIT = "circuit"


@dataclass(frozen=True)
class RectifierModel:
    variant: RectifierVariant = RectifierVariant.POLYNOMIAL
    # polynomial coefficients
    k2: float = DEFAULT_K2
    k4: float = DEFAULT_K4
    # circuit parameters (single diode + parallel RC load)
    saturation_current_a: float = 5e-6
    ideality: float = 1.05
    thermal_voltage_v: float = 0.02585
    load_resistance_ohm: float = 10e3
    load_capacitance_f: float = 1e-9
    antenna_resistance_ohm: float = 50.0
    carrier_freq_hz: float = 2.4e9
    upsampling_factor: int = 8  # samples per carrier cycle

    def __post_init__(self):
        if self.k2 < 0 or self.k4 < 0:
            raise ValueError("k2 and k4 must be non-negative")
        for name in ("saturation_current_a", "ideality", "thermal_voltage_v",
                     "load_resistance_ohm", "load_capacitance_f",
                     "antenna_resistance_ohm", "carrier_freq_hz"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.upsampling_factor < 8:
            raise ValueError("need at least 8 samples per carrier cycle")


@dataclass(frozen=True)
class HarvestResult:
    """DC figure plus the energy accumulated over the harvest duration."""

    dc_metric: float          # polynomial: DC proxy z; circuit: volts
    harvested_energy_j: float
    harvest_duration_s: float


def harvest_dc_poly(eh: IqBuffer, model: RectifierModel) -> HarvestResult:
    """Moment-based DC proxy: z = k2*M2 + k4*(3/2)*mean(|x|^4)."""
    if model.variant is not RectifierVariant.POLYNOMIAL:
        raise ValueError("harvest_dc_poly requires the polynomial variant")
    if len(eh) == 0:
        raise ValueError("empty signal")
    p2 = np.abs(eh.samples) ** 2
    m2 = float(np.mean(p2))
    m4 = 1.5 * float(np.mean(p2 * p2))
    z = model.k2 * m2 + model.k4 * m4
    duration = eh.duration_s
    return HarvestResult(z, z * duration, duration)


@njit(cache=True)
def _diode_rc_transient(i_bb, q_bb, steps_per_sample, omega_dt, emf_scale,
                        is_a, n_vt, r_ant, r_load, c_load, dt,
                        period_samples, max_periods,
                        ss_tol, newton_tol):  # pragma: no cover
    """Time-step the source/diode/RC circuit over whole 64-sample periods.

    Returns (mean v_out over last period, periods run, converged flag).
    The baseband buffer is traversed cyclically when steady state needs
    more samples than the buffer holds.
    """
    n_bb = i_bb.shape[0]
    v_out = 0.0
    i_prev = 0.0
    phase = 0.0
    two_pi = 2.0 * np.pi
    prev_mean = 0.0
    mean_last = 0.0
    periods = 0
    converged = False
    bb_pos = 0
    for period in range(max_periods):
        acc = 0.0
        n_acc = 0
        for k in range(period_samples):
            ia = i_bb[bb_pos]
            qa = q_bb[bb_pos]
            nxt = bb_pos + 1
            if nxt >= n_bb:
                nxt = 0
            ib = i_bb[nxt]
            qb = q_bb[nxt]
            for m in range(steps_per_sample):
                frac = m / steps_per_sample
                i_env = ia + (ib - ia) * frac
                q_env = qa + (qb - qa) * frac
                c = np.cos(phase)
                s = np.sin(phase)
                emf = emf_scale * (i_env * c - q_env * s)
                phase += omega_dt
                if phase > two_pi:
                    phase -= two_pi
                # trapezoidal step for C*dv/dt = i_d - v/R_load;
                # Newton on v_out, nested Newton on the diode current
                # (series source resistance makes i_d implicit)
                rhs = (c_load / dt) * v_out + 0.5 * (i_prev - v_out / r_load)
                v_new = v_out
                i_d = i_prev
                for _ in range(60):
                    # inner solve: i = Is*(exp((emf - i*R_ant - v)/ (n*Vt)) - 1)
                    for _ in range(80):
                        arg = (emf - i_d * r_ant - v_new) / n_vt
                        if arg > 200.0:
                            arg = 200.0
                        ex = np.exp(arg)
                        g = i_d - is_a * (ex - 1.0)
                        dg = 1.0 + is_a * ex * r_ant / n_vt
                        step = g / dg
                        i_d -= step
                        if abs(step) < newton_tol:
                            break
                    arg = (emf - i_d * r_ant - v_new) / n_vt
                    if arg > 200.0:
                        arg = 200.0
                    gd = is_a * np.exp(arg) / n_vt
                    di_dv = -gd / (1.0 + gd * r_ant)
                    f = ((c_load / dt) * v_new
                         - 0.5 * (i_d - v_new / r_load) - rhs)
                    df = (c_load / dt) - 0.5 * (di_dv - 1.0 / r_load)
                    step = f / df
                    v_new -= step
                    if abs(step) < 1e-15:
                        break
                v_out = v_new
                i_prev = i_d
                acc += v_out
                n_acc += 1
            bb_pos = nxt
        mean_last = acc / n_acc
        periods = period + 1
        if period > 0:
            denom = abs(mean_last)
            if denom < 1e-15:
                denom = 1e-15
            if abs(mean_last - prev_mean) / denom < ss_tol:
                converged = True
                break
        prev_mean = mean_last
    return mean_last, periods, converged


def harvest_dc_circuit(eh: IqBuffer, model: RectifierModel) -> HarvestResult:
    """Transient-solve the diode rectifier to periodic steady state.

    dc_metric is the steady-state mean output voltage; harvested energy
    is V^2 / R_load over the harvest duration.
    """
    if model.variant is not RectifierVariant.CIRCUIT:
        raise ValueError("harvest_dc_circuit requires the circuit variant")
    if len(eh) == 0:
        raise ValueError("empty signal")
    duration = eh.duration_s
    if not np.any(eh.samples):
        return HarvestResult(0.0, 0.0, duration)
    fs = eh.sample_rate_hz
    cycles_per_sample = model.carrier_freq_hz / fs
    steps_per_sample = int(math.ceil(cycles_per_sample
                                     * model.upsampling_factor))
    dt = 1.0 / (fs * steps_per_sample)
    omega_dt = 2.0 * np.pi * model.carrier_freq_hz * dt
    emf_scale = math.sqrt(8.0 * model.antenna_resistance_ohm)
    v_dc, periods, converged = _diode_rc_transient(
        np.ascontiguousarray(eh.samples.real),
        np.ascontiguousarray(eh.samples.imag),
        steps_per_sample, omega_dt, emf_scale,
        model.saturation_current_a, model.ideality * model.thermal_voltage_v,
        model.antenna_resistance_ohm, model.load_resistance_ohm,
        model.load_capacitance_f, dt,
        PERIOD_SAMPLES, MAX_PERIODS,
        STEADY_STATE_REL_TOL, DIODE_CURRENT_TOL_A,
    )
    if not converged:
        raise ValueError(
            f"rectifier transient did not reach steady state within "
            f"{MAX_PERIODS} periods (last mean {v_dc:.6e} V)"
        )
    log.debug("circuit rectifier converged in %d periods: %.6e V",
              periods, v_dc)
    energy = v_dc * v_dc / model.load_resistance_ohm * duration
    return HarvestResult(float(v_dc), float(energy), duration)


def harvest_dc(eh: IqBuffer, model: RectifierModel) -> HarvestResult:
    if model.variant is RectifierVariant.POLYNOMIAL:
        return harvest_dc_poly(eh, model)
    return harvest_dc_circuit(eh, model)


def harvested_energy_for_slot(result: HarvestResult | None,
                              rx_design: RxDesign) -> float:
    """Slot energy under the receiver's accounting conventions.

    Time switching accrues energy only over the harvester segment (whose
    buffer already spans alpha_rx of the slot); power splitting accrues
    over the full slot from the sqrt(rho_rx)-scaled stream.  An absent
    or empty harvester input yields zero.
    """
    if result is None:
        return 0.0
    return result.harvested_energy_j
