"""Scenario drivers: profiles, single-point summaries and the figure lattices.

Each driver wraps the packet/chrono machinery in a refinement task whose
k- and t-node counts double per level, and reports the converged values
together with the refinement record.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import chrono
from .chrono import DurationKind, FluxSeries
from .grids import (STEP_FRACTION, RefinementReport, TimeGrid, build_time_grid,
                    build_x_profile, packet_time_extension, refine_until_stable)
from .packet import (KGrid, PacketSpec, amplitude_table_for_grid, build_k_grid,
                     default_panel_count, flux_series, incident_flux_series,
                     synthesis_columns, synthesize, truncated_spectral_mass)
from .scatter import ELECTRON, BarrierSpec, PhysicalConstants

DWELL_MARGIN_A = 5.0
"""The single-scenario dwell interval is (-5, a + 5) angstrom."""


def _level_grids(packet: PacketSpec, barrier: BarrierSpec | None,
                 constants: PhysicalConstants, base_tgrid: TimeGrid,
                 base_panels: int, x_extent: float, level: int):
    tgrid = base_tgrid.refined(level)
    kgrid = build_k_grid(packet, barrier, constants,
                         x_scale=x_extent, t_scale=tgrid.t_max,
                         n_panels=base_panels * 2**level)
    return tgrid, kgrid


def _split_all(xs, times, jmat) -> list[FluxSeries]:
    return [chrono.split_flux(float(x), times, jmat[i]) for i, x in enumerate(xs)]


@dataclass(frozen=True)
class ProfilePoint:
    """One row of a penetration/return profile."""

    x: float
    tau_pen: float
    dtau_pen: float
    tau_ret: float
    dtau_ret: float
    reliable_ret: bool
    level: int


@dataclass(frozen=True)
class ProfileResult:
    barrier: BarrierSpec
    packet: PacketSpec
    points: list
    report: RefinementReport
    converged: bool

    @property
    def tau_pen(self) -> np.ndarray:
        return np.array([p.tau_pen for p in self.points])

    @property
    def tau_ret(self) -> np.ndarray:
        return np.array([p.tau_ret for p in self.points])

    @property
    def reliable_ret(self) -> np.ndarray:
        return np.array([p.reliable_ret for p in self.points])

    @property
    def xs(self) -> np.ndarray:
        return np.array([p.x for p in self.points])


def profile_scenario(barrier: BarrierSpec, packet: PacketSpec, *,
                     n_x: int = 11, tol: float = 1e-3, max_levels: int = 8,
                     window: float | None = None,
                     constants: PhysicalConstants = ELECTRON,
                     base_level: int = 0) -> ProfileResult:
    """Penetration and return durations over x in [0, a], refined until stable.

    ``base_level`` < 0 starts the refinement deliberately coarse (the level-0
    grids are scaled by 2**base_level), which is how the sign-stability of
    the refinement protocol is exercised.
    """
    xs = build_x_profile(barrier, n_x)
    base_tgrid = build_time_grid(packet, constants, window=window)
    base_panels = default_panel_count(packet, barrier, constants,
                                      x_scale=barrier.a, t_scale=base_tgrid.t_max)
    if base_level < 0:
        coarse = max(64, (base_tgrid.n - 1) >> -base_level)
        base_tgrid = TimeGrid(base_tgrid.t_min, base_tgrid.t_max, coarse + 1)
        base_panels = max(1, base_panels >> -base_level)

    state = {}

    step_rule = packet_time_extension(packet, constants) / STEP_FRACTION

    def task(level):
        tgrid, kgrid = _level_grids(packet, barrier, constants, base_tgrid,
                                    base_panels, barrier.a, level)
        provisional = tgrid.step > step_rule
        table = amplitude_table_for_grid(kgrid, barrier, constants)
        jmat = flux_series(xs, tgrid.times, kgrid, table, constants)
        series = _split_all(xs, tgrid.times, jmat)
        plus = [chrono.time_moments(s, "+", provisional=provisional) for s in series]
        minus = [chrono.time_moments(s, "-", provisional=provisional) for s in series]
        state["moments"] = (plus, minus)
        tau_pen = np.array([p.mean - plus[0].mean for p in plus])
        tau_ret = np.array([m.mean - p.mean if m.reliable else 0.0
                            for p, m in zip(plus, minus)])
        return tgrid.step, np.concatenate([tau_pen, tau_ret])

    report = refine_until_stable(task, tol=tol, max_levels=max_levels)
    plus, minus = state["moments"]
    level = report.level_count - 1
    points = []
    for i, x in enumerate(xs):
        pen = chrono.duration_mean(DurationKind.PENETRATION, 0.0, float(x),
                                   plus[0], plus[i], barrier)
        ret = chrono.duration_mean(DurationKind.RETURN, float(x), float(x),
                                   plus[i], minus[i], barrier)
        points.append(ProfilePoint(
            x=float(x), tau_pen=pen.mean, dtau_pen=pen.variance,
            tau_ret=ret.mean, dtau_ret=ret.variance,
            reliable_ret=ret.reliable, level=level,
        ))
    return ProfileResult(barrier=barrier, packet=packet, points=points,
                         report=report, converged=report.converged)


@dataclass(frozen=True)
class SingleResult:
    """Summary statistics of one scenario (the `single` CLI command)."""

    barrier: BarrierSpec
    packet: PacketSpec
    tau_tun: float
    dtau_tun: float
    tau_r00: float
    dtau_r00: float
    dwell_flux: float
    dwell_density: float
    phase_time: float
    transmission: float
    truncated_mass: float
    level: int
    converged: bool
    report: RefinementReport


def spectral_transmission(grid: KGrid, table) -> float:
    """Transmission probability 2 pi sum w |A|^2 |t|^2 over the grid."""
    return 2.0 * math.pi * float(np.dot(grid.weights,
                                        np.square(grid.spectral) * np.square(np.abs(table.t))))


def single_scenario(barrier: BarrierSpec, packet: PacketSpec, *,
                    tol: float = 1e-3, max_levels: int = 8,
                    window: float | None = None,
                    constants: PhysicalConstants = ELECTRON,
                    dwell_margin: float = DWELL_MARGIN_A,
                    density_intervals: int = 128) -> SingleResult:
    """Tunnelling/reflection durations, both dwell forms, phase time, T."""
    x_i, x_f = -dwell_margin, barrier.a + dwell_margin
    base_tgrid = build_time_grid(packet, constants, window=window)
    base_panels = default_panel_count(packet, barrier, constants,
                                      x_scale=abs(x_f), t_scale=base_tgrid.t_max)
    state = {}

    def task(level):
        tgrid, kgrid = _level_grids(packet, barrier, constants, base_tgrid,
                                    base_panels, abs(x_f), level)
        table = amplitude_table_for_grid(kgrid, barrier, constants)
        xs = np.array([x_i, 0.0, barrier.a, x_f])
        xs_d = np.linspace(x_i, x_f, density_intervals * 2**level + 1)

        # one phase-matrix pass covers the fluxes, the incident reference
        # and the density samples
        cols = np.hstack([
            synthesis_columns(xs, kgrid, table, ("psi", "dpsi_dx"), constants),
            synthesis_columns([x_i], kgrid, None, ("psi", "dpsi_dx"), constants),
            synthesis_columns(xs_d, kgrid, table, ("psi",), constants),
        ])
        out = synthesize(tgrid.times, kgrid, cols, constants)
        hom = constants.hbar_over_m
        jmat = np.empty((5, tgrid.n))
        for i in range(5):
            psi, dpsi = out[:, 2 * i], out[:, 2 * i + 1]
            jmat[i] = hom * np.imag(np.conj(psi) * dpsi)
        rho = np.square(np.abs(out[:, 10:])).T

        s_xi, s_0, s_a, s_xf = _split_all(xs, tgrid.times, jmat[:4])
        plus_0 = chrono.time_moments(s_0, "+")
        plus_a = chrono.time_moments(s_a, "+")
        minus_0 = chrono.time_moments(s_0, "-")
        tun = chrono.duration_mean(DurationKind.TUNNELLING, 0.0, barrier.a,
                                   plus_0, plus_a, barrier)
        ret = chrono.duration_mean(DurationKind.RETURN, 0.0, 0.0,
                                   plus_0, minus_0, barrier)

        incident = chrono.split_flux(x_i, tgrid.times, jmat[4])
        dwell_f = chrono.dwell_time_flux(s_xi, s_xf, incident, barrier=barrier)
        dwell_d = chrono.dwell_time_density(xs_d, tgrid.times, rho, incident,
                                            barrier=barrier)
        state["final"] = (tun, ret, dwell_f, dwell_d, kgrid, table)
        return tgrid.step, np.array([tun.mean, ret.mean, dwell_f, dwell_d])

    report = refine_until_stable(task, tol=tol, max_levels=max_levels)
    tun, ret, dwell_f, dwell_d, kgrid, table = state["final"]
    return SingleResult(
        barrier=barrier, packet=packet,
        tau_tun=tun.mean, dtau_tun=tun.variance,
        tau_r00=ret.mean, dtau_r00=ret.variance,
        dwell_flux=dwell_f, dwell_density=dwell_d,
        phase_time=chrono.phase_time(packet.k_bar, barrier, 0.0, barrier.a, constants),
        transmission=spectral_transmission(kgrid, table),
        truncated_mass=truncated_spectral_mass(packet, barrier, constants),
        level=report.level_count - 1, converged=report.converged, report=report,
    )


def free_forward_means(packet: PacketSpec, xs, *, window: float | None = None,
                       constants: PhysicalConstants = ELECTRON,
                       level: int = 0):
    """<t+(x)> of the free (incident-only) packet at each x; the kinematics oracle."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    tgrid = build_time_grid(packet, constants, window=window).refined(level)
    panels = default_panel_count(packet, None, constants,
                                 x_scale=float(np.max(np.abs(xs))), t_scale=tgrid.t_max)
    kgrid = build_k_grid(packet, None, constants, n_panels=panels * 2**level,
                         x_scale=float(np.max(np.abs(xs))), t_scale=tgrid.t_max)
    jmat = incident_flux_series(xs, tgrid.times, kgrid, constants)
    series = _split_all(xs, tgrid.times, jmat)
    return [chrono.time_moments(s, "+") for s in series]


PAPER_V0_EV = 10.0


@dataclass(frozen=True)
class CurveSpec:
    """One curve of the reproduction lattice (all with v0 = 10 eV)."""

    figure: int
    curve: int
    kind: str  # "penetration" or "return"
    a: float
    ebar: float
    dk: float


def figure_curves(figure: int) -> list:
    """Parameter lattice behind each reproduced figure."""
    if figure == 1:
        rows = [("penetration", 5.0, 5.0, 0.02), ("penetration", 5.0, 5.0, 0.01)]
    elif figure == 2:
        rows = [("penetration", 10.0, 5.0, 0.01)]
    elif figure == 3:
        rows = [("penetration", 5.0, 2.5, 0.02), ("penetration", 5.0, 5.0, 0.02),
                ("penetration", 5.0, 7.5, 0.02), ("penetration", 5.0, 5.0, 0.04)]
    elif figure == 4:
        rows = [("penetration", 5.0, 5.0, 0.02), ("penetration", 5.0, 5.0, 0.04),
                ("penetration", 10.0, 5.0, 0.02), ("penetration", 10.0, 5.0, 0.04)]
    elif figure == 5:
        rows = [("return", 5.0, 2.5, 0.02), ("return", 5.0, 5.0, 0.02),
                ("return", 5.0, 7.5, 0.02),
                ("return", 5.0, 2.5, 0.04), ("return", 5.0, 5.0, 0.04),
                ("return", 5.0, 7.5, 0.04),
                ("return", 10.0, 5.0, 0.02), ("return", 10.0, 5.0, 0.04)]
    else:
        raise ValueError(f"no such figure: {figure}")
    return [CurveSpec(figure=figure, curve=i + 1, kind=kind, a=a, ebar=ebar, dk=dk)
            for i, (kind, a, ebar, dk) in enumerate(rows)]


ALL_FIGURES = (1, 2, 3, 4, 5)
