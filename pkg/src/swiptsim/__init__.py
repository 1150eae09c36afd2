"""Link-level simulator for a SISO SWIPT system.

Transmit designs (time-sharing / superposition of a multi-tone power
waveform with a modified-802.11g information waveform), time-switching
and power-splitting receivers, nonlinear energy-harvester models, and a
sweep harness that maps out the harvested-energy/throughput region.
"""

from .channel import ChannelModel, apply_channel
from .combine import SegmentMap, TxDesign, TxMode, superpose, time_share
from .config import ConfigError, RunConfig, default_config, load_config, parse_config_text
from .frontend import RxDesign, RxMode, power_split, split, time_switch
from .harness import (ETPoint, Scenario, SimulationError, TrialResult,
                      pareto_frontier, region_dominates, run_trial, sweep,
                      throughput_mbps, write_et_csv, write_frontier_csv)
from .modulation import (BPSK, MODULATIONS, QAM16, QAM64, QPSK,
                         ModulationScheme, demap_symbols, map_symbols,
                         scheme_by_name)
from .multisine import MultisineConfig, generate_multisine
from .ofdm import (ModulatedFrame, OfdmPlan, band_power, ber,
                   max_data_rate_mbps, ofdm_demodulate, ofdm_modulate,
                   read_payload_bits, write_payload_bits)
from .rectifier import (HarvestResult, RectifierModel, RectifierVariant,
                        harvest_dc, harvest_dc_circuit, harvest_dc_poly,
                        harvested_energy_for_slot)
from .signals import (IqBuffer, PowerLevel, average_power, dbm_to_watts,
                      papr_db, read_iq, scale_to_power, watts_to_dbm,
                      write_iq)

__version__ = "0.1.0"
