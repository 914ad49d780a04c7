"""Cell-free massive-MIMO downlink simulator with a radio environment map (REM)
for energy-efficient serving-cluster selection."""

from .scenario import (APConfig, Area, PAClass, Scenario, UELocationPattern, bundled_scenario,
                       dbm_to_watts, default_scenario, generate_pattern, load_scenario,
                       load_scenario_file)
from .channel import ChannelRealization, draw_channel, large_scale_gain, path_loss_db
from .pa import (PAOperatingPoint, avg_output_power, bussgang_gain, distortion_power,
                 pa_consumption, soft_limiter)
from .precoding import form_clusters, sinr, spectral_efficiency, zf_precoder
from .simulator import DropResult, energy_efficiency, run_drop, schedule, throughput_cdf
from .rem import (REMStore, best_action, export_store, import_store, pattern_key,
                  select_action, update_entry)

__version__ = "0.1.0"
