"""Self-contained invariant suite behind the `check` CLI command.

Each check returns a CheckResult with the measured number and its bound.
Physics checks that depend on grid convergence are gated: when the
refinement did not converge (e.g. check --max-levels 1) they report
status "not-converged" instead of asserting anything.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import chrono, packet, scatter, sweeps
from .config import parse_config_text
from .errors import ConfigError
from .grids import build_time_grid, refine_until_stable, simpson_weights
from .packet import PacketSpec, amplitude_table_for_grid, build_k_grid
from .scatter import ELECTRON, BarrierSpec

PASS, FAIL, NOT_CONVERGED = "pass", "fail", "not-converged"


@dataclass
class CheckResult:
    module: str
    invariant: str
    measured: float
    bound: float
    status: str
    detail: str = ""

    def as_dict(self):
        return asdict(self)


def _verdict(module, invariant, measured, bound, ok, detail=""):
    return CheckResult(module, invariant, float(measured), float(bound),
                       PASS if ok else FAIL, detail)


def _gated(module, invariant, measured, bound, ok, converged, detail=""):
    if not converged:
        return CheckResult(module, invariant, float(measured), float(bound),
                           NOT_CONVERGED, "refinement did not converge; not asserted")
    return _verdict(module, invariant, measured, bound, ok, detail)


# --- scatter_core ---------------------------------------------------------

def check_unitarity(rng=None):
    rng = rng or np.random.default_rng(20260809)
    worst = 0.0
    for _ in range(1000):
        v0 = rng.uniform(0.5, 20.0)
        a = rng.uniform(0.5, 20.0)
        kc = BarrierSpec(v0, a).cutoff_wavenumber()
        k = rng.uniform(0.02, 0.999) * kc
        amp = scatter.scattering_amplitudes(k, BarrierSpec(v0, a))
        worst = max(worst, abs(abs(amp.r) ** 2 + abs(amp.t) ** 2 - 1.0))
    return _verdict("scatter_core", "unitarity", worst, 1e-12, worst <= 1e-12)


def check_stationary_flux_constancy(rng=None):
    # kappa*a <= 4: beyond that the pointwise net flux is an e^{-2 kappa a}
    # cancellation residue and the evaluation floor eps/|t|^2 exceeds 1e-10
    rng = rng or np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        v0 = rng.uniform(1, 15)
        k = float(rng.uniform(0.15, 0.95) * BarrierSpec(v0, 1.0).cutoff_wavenumber())
        kappa = math.sqrt((v0 - ELECTRON.energy(k)) / ELECTRON.hbar2_over_2m)
        barrier = BarrierSpec(v0, float(rng.uniform(0.5, 1.0) * min(12.0, 4.0 / kappa)))
        amp = scatter.scattering_amplitudes(k, barrier)
        x1, x2 = rng.uniform(-30, barrier.a + 30, size=2)
        js = []
        for x in (x1, x2):
            psi, dpsi = scatter.stationary_field(k, float(x), amp)
            js.append(ELECTRON.hbar_over_m * (np.conj(psi) * dpsi).imag)
        scale = max(abs(js[0]), abs(js[1]))
        worst = max(worst, abs(js[0] - js[1]) / scale)
    return _verdict("scatter_core", "stationary-flux-constancy", worst, 1e-10,
                    worst <= 1e-10)


def check_closed_form_oracle():
    worst = 0.0
    for energy in np.linspace(0.5, 9.5, 10):
        for a in np.linspace(1.0, 12.0, 5):
            barrier = BarrierSpec(10.0, float(a))
            k = float(ELECTRON.wavenumber(energy))
            amp = scatter.scattering_amplitudes(k, barrier)
            kappa = amp.kappa
            t2_closed = 1.0 / (1.0 + barrier.v0**2 * math.sinh(kappa * a) ** 2
                               / (4.0 * energy * (barrier.v0 - energy)))
            worst = max(worst, abs(abs(amp.t) ** 2 / t2_closed - 1.0))
    return _verdict("scatter_core", "closed-form-oracle", worst, 1e-12, worst <= 1e-12)


def check_kappa_symmetry():
    # exact up to the 1-ulp E(k) round trip
    barrier = BarrierSpec(10.0, 5.0)
    k = float(ELECTRON.wavenumber(5.0))
    kappa = scatter.inside_wavenumber(k, barrier)
    err = abs(kappa - k) / k
    return _verdict("scatter_core", "symmetry-E-half-V0", err, 1e-15, err <= 1e-15)


# --- packet_field ---------------------------------------------------------

def _desk_scenario():
    barrier = BarrierSpec(10.0, 5.0)
    pkt = PacketSpec(k_bar=float(ELECTRON.wavenumber(5.0)), dk=0.01)
    return barrier, pkt


def check_continuity(rng=None, n_samples=200):
    rng = rng or np.random.default_rng(11)
    barrier, pkt = _desk_scenario()
    tgrid = build_time_grid(pkt)
    kgrid = build_k_grid(pkt, barrier, x_scale=12.0, t_scale=tgrid.t_max)
    table = amplitude_table_for_grid(kgrid, barrier)
    xs = np.concatenate([rng.uniform(-10, 15, n_samples // 2),
                         rng.uniform(0.0, barrier.a, n_samples - n_samples // 2)])
    ts = rng.uniform(-4e-14, 4e-14, n_samples)
    res = packet.field_series(xs, ts, kgrid, table,
                              parts=("psi", "dpsi_dt", "d2psi_dx2"))
    # each sample pairs x_i with t_i: take the diagonal
    psi = np.diag(res["psi"])
    dpsi_dt = np.diag(res["dpsi_dt"])
    d2psi = np.diag(res["d2psi_dx2"])
    drho_dt = 2.0 * np.real(np.conj(psi) * dpsi_dt)
    dj_dx = ELECTRON.hbar_over_m * np.imag(np.conj(psi) * d2psi)
    residual = np.abs(drho_dt + dj_dx)
    scale = np.max(np.abs(drho_dt))
    worst = float(np.max(residual / np.maximum(np.abs(drho_dt), scale)))
    return _verdict("packet_field", "continuity-equation", worst, 1e-6, worst <= 1e-6)


def check_reality_and_determinism():
    barrier, pkt = _desk_scenario()
    tgrid = build_time_grid(pkt)
    kgrid = build_k_grid(pkt, barrier, x_scale=8.0, t_scale=tgrid.t_max)
    table = amplitude_table_for_grid(kgrid, barrier)
    res = packet.field_series([1.0, 4.0], tgrid.times, kgrid, table,
                              parts=("psi", "dpsi_dx"))
    psi, dpsi = res["psi"], res["dpsi_dx"]
    rho_c = np.conj(psi) * psi
    # symmetrized current (i hbar/2m)(psi dpsi* - psi* dpsi) is real-valued
    j_c = 0.5j * ELECTRON.hbar_over_m * (psi * np.conj(dpsi) - np.conj(psi) * dpsi)
    scale = max(float(np.max(np.abs(rho_c))), float(np.max(np.abs(j_c))))
    residue = max(float(np.max(np.abs(rho_c.imag))),
                  float(np.max(np.abs(j_c.imag)))) / scale
    j1 = packet.flux_series([1.0, 3.0], tgrid.times, kgrid, table)
    j2 = packet.flux_series([1.0, 3.0], tgrid.times, kgrid, table)
    identical = bool(np.array_equal(j1, j2))
    return _verdict("packet_field", "reality-and-determinism", residue, 1e-14,
                    identical and residue < 1e-14,
                    "repeat evaluation bit-identical" if identical else "repeat differs")


def check_normalization():
    _, pkt = _desk_scenario()
    kgrid = build_k_grid(pkt, None, x_scale=10.0, t_scale=1e-13)
    analytic = packet.analytic_normalization(pkt)
    err = abs(kgrid.c_norm / analytic - 1.0)
    return _verdict("packet_field", "truncated-normalization", err, 1e-6, err <= 1e-6)


# --- chronostats ----------------------------------------------------------

def _desk_profile(tol=1e-3, max_levels=6):
    barrier, pkt = _desk_scenario()
    return sweeps.profile_scenario(barrier, pkt, n_x=11, tol=tol, max_levels=max_levels)


def check_weight_normalization():
    barrier, pkt = _desk_scenario()
    tgrid = build_time_grid(pkt)
    kgrid = build_k_grid(pkt, barrier, x_scale=5.0, t_scale=tgrid.t_max)
    table = amplitude_table_for_grid(kgrid, barrier)
    j = packet.flux_series([2.0], tgrid.times, kgrid, table)[0]
    series = chrono.split_flux(2.0, tgrid.times, j)
    w = simpson_weights(series.times.size, series.step)
    worst = 0.0
    for part in (series.j_plus, series.j_minus):
        norm = float(w @ part)
        worst = max(worst, abs(float(w @ (part / norm)) - 1.0))
    return _verdict("chronostats", "weight-normalization", worst, 1e-12, worst <= 1e-12)


def check_mean_ordering(profile=None):
    profile = profile or _desk_profile()
    ret = profile.tau_ret[profile.reliable_ret]
    worst = float(np.min(ret)) if ret.size else float("nan")
    return _gated("chronostats", "mean-ordering-inside-barrier", worst, 0.0,
                  worst >= 0.0, profile.converged)


def check_penetration_monotone(profile=None):
    profile = profile or _desk_profile()
    tau = profile.tau_pen
    slack = 1e-3 * float(np.max(np.abs(tau)))
    nonneg = bool(np.all(tau >= -slack))
    mono = bool(np.all(np.diff(tau) >= -slack))
    worst = float(min(np.min(tau), np.min(np.diff(tau))))
    return _gated("chronostats", "penetration-nonneg-monotone", worst, -slack,
                  nonneg and mono, profile.converged)


def check_saturation(profile=None):
    profile = profile or _desk_profile()
    xs, tau = profile.xs, profile.tau_pen
    a = profile.barrier.a
    first = (np.interp(a / 4, xs, tau) - tau[0]) / (a / 4)
    last = (tau[-1] - np.interp(3 * a / 4, xs, tau)) / (a / 4)
    ratio = last / first if first != 0 else float("inf")
    return _gated("chronostats", "saturation-slope-ratio", ratio, 0.25,
                  ratio <= 0.25, profile.converged)


def check_return_plateau(profile=None):
    profile = profile or _desk_profile()
    xs, ret = profile.xs, profile.tau_ret
    mask = (xs <= 0.6 * profile.barrier.a) & profile.reliable_ret
    if mask.sum() < 2:
        return CheckResult("chronostats", "return-plateau", float("nan"), 0.25,
                           NOT_CONVERGED, "fewer than 2 reliable points")
    band = ret[mask]
    variation = float((band.max() - band.min()) / np.max(np.abs(band)))
    return _gated("chronostats", "return-plateau", variation, 0.25,
                  variation <= 0.25, profile.converged)


def check_dwell_equivalence(tol=1e-3, max_levels=6):
    worst = 0.0
    converged = True
    for ebar in (2.5, 5.0, 7.5):
        for dk in (0.01, 0.02, 0.04):
            barrier = BarrierSpec(10.0, 5.0)
            pkt = PacketSpec(k_bar=float(ELECTRON.wavenumber(ebar)), dk=dk)
            res = sweeps.single_scenario(barrier, pkt, tol=tol, max_levels=max_levels)
            converged = converged and res.converged
            worst = max(worst, abs(res.dwell_flux - res.dwell_density)
                        / abs(res.dwell_density))
    return _gated("chronostats", "dwell-equivalence-3x3", worst, 1e-3,
                  worst <= 1e-3, converged)


def check_quasi_monochromatic(tol=1e-3, max_levels=6):
    barrier = BarrierSpec(10.0, 5.0)
    pkt = PacketSpec(k_bar=float(ELECTRON.wavenumber(5.0)), dk=0.005)
    res = sweeps.single_scenario(barrier, pkt, tol=tol, max_levels=max_levels)
    rel = abs(res.tau_tun - res.phase_time) / res.phase_time
    return _gated("chronostats", "quasi-monochromatic-limit", rel, 0.05,
                  rel <= 0.05, res.converged)


# --- quadrature_ctl -------------------------------------------------------

def check_grid_determinism():
    barrier, pkt = _desk_scenario()
    g1 = build_k_grid(pkt, barrier, x_scale=5.0, t_scale=1e-13)
    g2 = build_k_grid(pkt, barrier, x_scale=5.0, t_scale=1e-13)
    t1 = build_time_grid(pkt)
    t2 = build_time_grid(pkt)
    same = (np.array_equal(g1.nodes, g2.nodes) and np.array_equal(g1.weights, g2.weights)
            and g1.c_norm == g2.c_norm and t1 == t2)
    return _verdict("quadrature_ctl", "grid-determinism", 0.0 if same else 1.0, 0.0, same)


def check_refinement_doubling():
    steps = []

    def task(level):
        steps.append(2.0 ** -level)
        return 2.0 ** -level, [math.pi]

    refine_until_stable(task, tol=0.0, max_levels=4)
    ratios = [steps[i] / steps[i + 1] for i in range(len(steps) - 1)]
    ok = all(r == 2.0 for r in ratios) and len(steps) == 4
    return _verdict("quadrature_ctl", "refinement-doubling",
                    float(max(ratios)), 2.0, ok)


def check_converged_stable_under_refinement(tol=1e-3, max_levels=6):
    barrier, pkt = _desk_scenario()
    res = sweeps.profile_scenario(barrier, pkt, n_x=5, tol=tol, max_levels=max_levels)
    if not res.converged:
        return CheckResult("quadrature_ctl", "converged-stable", float("nan"),
                           tol, NOT_CONVERGED, "base run did not converge")
    extra = sweeps.profile_scenario(barrier, pkt, n_x=5, tol=0.0,
                                    max_levels=res.report.level_count + 1)
    last = extra.report.levels[-1][1]
    ref = res.report.levels[-1][1]
    scale = np.maximum(np.maximum(np.abs(last), np.abs(ref)), 1e-18)
    rel = float(np.max(np.abs(last - ref) / scale))
    return _verdict("quadrature_ctl", "converged-stable", rel, tol, rel <= tol)


# --- cli_runner -----------------------------------------------------------

def check_csv_round_trip():
    from .cli import parse_rows, quantize, write_rows_text
    rows = [{"x_angstrom": quantize(1.23456789e0), "tau_pen_s": quantize(4.789123456e-15),
             "reliable_ret": True, "refinement_level": 3}]
    text = write_rows_text(rows)
    back = parse_rows(text)
    ok = back == rows
    return _verdict("cli_runner", "csv-round-trip", 0.0 if ok else 1.0, 0.0, ok)


def check_config_rejection():
    bad = ["nonsense_key = 1.0\nv0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.01",
           "v0_ev = ten\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.01",
           "v0_ev = 10\na_angstrom = 5\nebar_ev = 50\ndk_inv_angstrom = 0.01",
           "v0_ev = 10\na_angstrom = 5",
           "v0_ev = 10\nv0_ev = 10\na_angstrom = 5\nebar_ev = 5\ndk_inv_angstrom = 0.01"]
    rejected = 0
    for text in bad:
        try:
            parse_config_text(text)
        except ConfigError:
            rejected += 1
    ok = rejected == len(bad)
    return _verdict("cli_runner", "config-rejection-total", float(rejected),
                    float(len(bad)), ok)


def run_all(tol=1e-3, max_levels=6) -> list:
    """Every invariant at desk scale; shared profiles are computed once."""
    profile = _desk_profile(tol=tol, max_levels=max_levels)
    return [
        check_unitarity(),
        check_stationary_flux_constancy(),
        check_closed_form_oracle(),
        check_kappa_symmetry(),
        check_continuity(),
        check_reality_and_determinism(),
        check_normalization(),
        check_weight_normalization(),
        check_mean_ordering(profile),
        check_penetration_monotone(profile),
        check_saturation(profile),
        check_return_plateau(profile),
        check_dwell_equivalence(tol=tol, max_levels=max_levels),
        check_quasi_monochromatic(tol=tol, max_levels=max_levels),
        check_grid_determinism(),
        check_refinement_doubling(),
        check_converged_stable_under_refinement(tol=tol, max_levels=max_levels),
        check_csv_round_trip(),
        check_config_rejection(),
    ]
