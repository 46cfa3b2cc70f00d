"""chirpecho: multiplexed-repeater rate modelling and pulse-level simulation
of a chirped-pulse photon-echo quantum memory."""

__version__ = "0.1.0"

from .errors import (ChirpEchoError, ConfigError, FitError, ParameterError,
                     ScheduleError)
from .repeater import (C_KM_S, DEFAULT_VELOCITY_KM_S, LinkConfig, MemoryModel,
                       OptimalLinks, RepeaterParams, SweepSpec,
                       direct_transmission_probability, distribution_rate,
                       half_link_transmittance, memory_efficiency,
                       optimize_links, per_mode_link_success,
                       required_storage_time, success_probability,
                       sweep_distance, sweep_ratio_heatmap)
from .montecarlo import (CycleOutcome, EstimateResult, ModeAddress, RngSpec,
                         estimate_success, iter_outcomes, simulate_cycle,
                         storage_time_audit)
from .bloch import (ChirpPulse, chirp_waveform, default_peak_rabi,
                    free_evolution, inversion_profile, max_step, propagate)
from .memory import (BANDWIDTH_PRESETS, AtomEnsemble, BandwidthPreset, CpPair,
                     EmissionTrace, InputPulse, MemoryCellSpec, PulseSchedule,
                     SequenceResult, Window, echo_metrics, imprint_input,
                     input_reference_energy, noise_model, run_input_linked,
                     run_jitter_average, run_sequence,
                     sequential_recall_schedule, single_mode_schedule,
                     snr_estimate,
                     spectral_multimode_schedule, temporal_train_schedule,
                     two_pulse_echo_schedule)
from .analysis import (CountHistogram, DecayFit, bin_timestamps,
                       efficiency_from_histogram, evaluate_model,
                       fit_efficiency_decay, fit_mims, fit_t1, snr)
from . import reference
