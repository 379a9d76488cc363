"""Tunnelling-time statistics for Gaussian packets on a 1D rectangular barrier.

The package computes probability-flux time statistics (penetration,
return, tunnelling, transmission and reflection durations with their
variances, dwell times in both flux and density form, and the
stationary-phase reference time) for sub-barrier Gaussian wave packets,
in eV / angstrom / second units.
"""

from .chrono import (DurationKind, DurationReport, FluxSeries, TimeMoments,
                     duration_mean, duration_variance, dwell_time_density,
                     dwell_time_flux, phase_time, presence_N, split_flux,
                     time_moments)
from .config import ScenarioConfig, parse_config_file, parse_config_text
from .errors import (ConfigError, DomainError, NumericalError,
                     OverBarrierComponent, TunnelTimesError,
                     UnreliableStatistic, WindowTooNarrow)
from .grids import (RefinementReport, TimeGrid, build_time_grid,
                    build_x_profile, packet_time_extension, refine_until_stable)
from .packet import (FieldSample, KGrid, OverBarrierPolicy, PacketSpec,
                     amplitude_table_for_grid, build_k_grid, density,
                     density_series, evaluate_field, flux, flux_series,
                     gaussian_weight, incident_field, incident_flux_series,
                     normalization, truncated_spectral_mass)
from .scatter import (ELECTRON, BarrierSpec, PhysicalConstants,
                      ScatteringAmplitudes, inside_wavenumber,
                      scattering_amplitudes, stationary_field,
                      transmission_amplitude)
from .sweeps import (ProfileResult, SingleResult, figure_curves,
                     free_forward_means, profile_scenario, single_scenario)

__version__ = "0.1.0"

__all__ = [
    "BarrierSpec", "ConfigError", "DomainError", "DurationKind",
    "DurationReport", "ELECTRON", "FieldSample", "FluxSeries", "KGrid",
    "NumericalError", "OverBarrierComponent", "OverBarrierPolicy",
    "PacketSpec", "PhysicalConstants", "ProfileResult", "RefinementReport",
    "ScatteringAmplitudes", "ScenarioConfig", "SingleResult", "TimeGrid",
    "TimeMoments", "TunnelTimesError", "UnreliableStatistic",
    "WindowTooNarrow", "amplitude_table_for_grid", "build_k_grid",
    "build_time_grid", "build_x_profile", "density", "density_series",
    "duration_mean", "duration_variance", "dwell_time_density",
    "dwell_time_flux", "evaluate_field", "figure_curves", "flux",
    "flux_series", "free_forward_means", "gaussian_weight", "incident_field",
    "incident_flux_series", "inside_wavenumber", "normalization",
    "packet_time_extension", "parse_config_file", "parse_config_text",
    "phase_time", "presence_N", "profile_scenario", "refine_until_stable",
    "scattering_amplitudes", "single_scenario", "split_flux",
    "stationary_field", "time_moments", "transmission_amplitude",
    "truncated_spectral_mass",
]
