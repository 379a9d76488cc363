"""Time statistics of the probability flux: moments, durations, dwell, phase time.

The flux at a fixed position is split pointwise into its positive and
negative parts, J = J+ + J-.  Normalized, these are the arrival-time
densities for forward and backward passage; their first and second time
moments give the mean passage times and variances, and differences of
means between positions give the process durations:

    transmission   <t+(x_f)> - <t+(x_i)>,  x_i < 0,  x_f > a
    tunnelling     <t+(a)>  - <t+(0)>
    penetration    <t+(x)>  - <t+(0)>,     0 <= x <= a
    return         <t-(x)>  - <t+(x)>,     0 <= x <= a
    reflection     <t-(x)>  - <t+(x)>,     x <= 0

Every duration variance is the SUM of the two endpoint variances (the
two passage records are treated as independent), so it is non-negative.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, UnreliableStatistic, WindowTooNarrow
from .grids import cumulative_trapezoid, simpson_weights
from .scatter import ELECTRON, BarrierSpec, PhysicalConstants, transmission_amplitude

NORM_FLOOR = 1e-6
"""Flux norms (crossing probabilities) below this are flagged unreliable."""

ENDPOINT_FRACTION = 1e-6
"""|J| at the window endpoints must be below this fraction of the peak."""

VARIANCE_SLACK = 1e-3
"""Negative variances within this fraction of the second-moment scale clamp to 0."""


@dataclass(frozen=True)
class FluxSeries:
    """J(x, t) sampled on a uniform time grid at fixed x, with its sign split."""

    x: float
    times: np.ndarray
    j: np.ndarray
    j_plus: np.ndarray
    j_minus: np.ndarray

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])


def split_flux(x: float, times, j) -> FluxSeries:
    """Pointwise positive/negative split of a sampled flux."""
    times = np.asarray(times, dtype=float)
    j = np.asarray(j, dtype=float)
    if times.ndim != 1 or times.size < 3 or j.shape != times.shape:
        raise DomainError("flux series needs matching 1-d time and flux samples")
    steps = np.diff(times)
    if np.any(np.abs(steps - steps[0]) > 1e-9 * abs(steps[0])):
        raise DomainError("flux series requires a uniform time grid")
    if not np.all(np.isfinite(j)):
        raise NumericalError("flux samples contain non-finite values")
    return FluxSeries(x=float(x), times=times, j=j,
                      j_plus=np.maximum(j, 0.0), j_minus=np.minimum(j, 0.0))


@dataclass(frozen=True)
class TimeMoments:
    """Zeroth/first/second time moments of J+ or J- at one position."""

    norm: float
    mean: float
    variance: float
    reliable: bool


def time_moments(series: FluxSeries, sign: str, *, norm_floor: float = NORM_FLOOR,
                 require_reliable: bool = False,
                 provisional: bool = False) -> TimeMoments:
    """Moments of the chosen flux part: norm, mean crossing time, variance.

    The window must cover the passage: |J| at both endpoints below 1e-6 of
    the peak |J|, else WindowTooNarrow.  When |norm| < norm_floor the record
    is flagged unreliable (mean/variance are still computed from the samples);
    with require_reliable=True that raises UnreliableStatistic instead.
    Small negative variances (quadrature noise) clamp to zero; ones beyond
    the noise allowance raise NumericalError.

    ``provisional`` is for the refinement driver while its grids are still
    below the baseline step rule: at such resolutions both the window edges
    and the variance consistency reflect quadrature noise rather than the
    configuration, so the two hard errors above are suspended (any negative
    variance clamps) and the record is only used to decide further
    refinement.
    """
    if sign == "+":
        part = series.j_plus
    elif sign == "-":
        part = series.j_minus
    else:
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")

    peak = float(np.max(np.abs(series.j)))
    if peak > 0.0 and not provisional:
        edge = max(abs(series.j[0]), abs(series.j[-1]))
        if edge > ENDPOINT_FRACTION * peak:
            raise WindowTooNarrow(
                f"|J| at the window edge is {edge / peak:.2e} of the peak at x={series.x}"
            )

    weights = simpson_weights(series.times.size, series.step)
    norm = float(weights @ part)
    reliable = abs(norm) >= norm_floor
    if not reliable and require_reliable:
        raise UnreliableStatistic(
            f"flux norm {norm:.3e} at x={series.x} is below the floor {norm_floor:g}"
        )

    if norm == 0.0:
        return TimeMoments(norm=0.0, mean=0.0, variance=0.0, reliable=False)

    mean = float(weights @ (series.times * part)) / norm
    second = float(weights @ (np.square(series.times) * part)) / norm
    variance = second - mean * mean
    if variance < 0.0:
        allowance = VARIANCE_SLACK * max(mean * mean, abs(second))
        if -variance > allowance and not provisional:
            raise NumericalError(
                f"variance {variance:.3e} s^2 at x={series.x} is negative beyond "
                f"the noise allowance {allowance:.3e}"
            )
        variance = 0.0
    return TimeMoments(norm=norm, mean=mean, variance=variance, reliable=reliable)


class DurationKind(enum.Enum):
    TRANSMISSION = "transmission"
    TUNNELLING = "tunnelling"
    PENETRATION = "penetration"
    RETURN = "return"
    REFLECTION = "reflection"


@dataclass(frozen=True)
class DurationReport:
    kind: DurationKind
    x_i: float
    x_f: float
    mean: float
    variance: float
    reliable: bool


_FORWARD_KINDS = (DurationKind.TRANSMISSION, DurationKind.TUNNELLING,
                  DurationKind.PENETRATION)


def _check_domain(kind: DurationKind, x_i: float, x_f: float, barrier: BarrierSpec):
    a = barrier.a
    if kind is DurationKind.TRANSMISSION:
        ok = x_i < 0.0 < a < x_f
    elif kind is DurationKind.TUNNELLING:
        ok = x_i == 0.0 and x_f == a
    elif kind is DurationKind.PENETRATION:
        ok = x_i == 0.0 and 0.0 <= x_f <= a
    elif kind is DurationKind.RETURN:
        ok = x_i == x_f and 0.0 <= x_i <= a
    elif kind is DurationKind.REFLECTION:
        ok = x_i == x_f and x_i <= 0.0
    else:  # pragma: no cover
        raise DomainError(f"unknown duration kind {kind}")
    if not ok:
        raise DomainError(f"(x_i={x_i}, x_f={x_f}) is outside the domain of {kind.value}")


def duration_mean(kind: DurationKind, x_i: float, x_f: float,
                  entry: TimeMoments, exit: TimeMoments,
                  barrier: BarrierSpec) -> DurationReport:
    """Compose endpoint moments into a duration report.

    ``entry`` is always the J+ moments at x_i.  For the forward kinds
    (transmission, tunnelling, penetration) ``exit`` is the J+ moments at
    x_f; for return and reflection it is the J- moments at the same point.
    Unreliable endpoints propagate as reliable=False, never as an error.
    """
    _check_domain(kind, x_i, x_f, barrier)
    return DurationReport(
        kind=kind, x_i=x_i, x_f=x_f,
        mean=exit.mean - entry.mean,
        variance=duration_variance(kind, x_i, x_f, entry, exit, barrier),
        reliable=entry.reliable and exit.reliable,
    )


def duration_variance(kind: DurationKind, x_i: float, x_f: float,
                      entry: TimeMoments, exit: TimeMoments,
                      barrier: BarrierSpec) -> float:
    """Sum of the endpoint variances; identical composition for every kind."""
    _check_domain(kind, x_i, x_f, barrier)
    return exit.variance + entry.variance


def incident_norm(incident: FluxSeries, *, norm_floor: float = NORM_FLOOR) -> float:
    """int J_in dt at the entry position; the dwell-time denominator."""
    weights = simpson_weights(incident.times.size, incident.step)
    den = float(weights @ incident.j)
    if abs(den) < norm_floor:
        raise UnreliableStatistic(
            f"incident flux norm {den:.3e} is below the floor {norm_floor:g}"
        )
    return den


def dwell_time_flux(series_i: FluxSeries, series_f: FluxSeries,
                    incident: FluxSeries, *, barrier: BarrierSpec | None = None,
                    norm_floor: float = NORM_FLOOR) -> float:
    """Dwell time from first time moments of the TOTAL flux at the two ends.

    [int t J(x_f) dt - int t J(x_i) dt] / int J_in(x_i) dt, with J_in the
    incident-only flux (no reflected wave).  With a barrier given, requires
    x_i < 0 < a < x_f.
    """
    if barrier is not None and not (series_i.x < 0.0 < barrier.a < series_f.x):
        raise DomainError(
            f"dwell interval ({series_i.x}, {series_f.x}) must bracket the barrier"
        )
    if series_i.x != incident.x:
        raise DomainError("incident flux must be sampled at the entry position")
    den = incident_norm(incident, norm_floor=norm_floor)
    wi = simpson_weights(series_i.times.size, series_i.step)
    wf = simpson_weights(series_f.times.size, series_f.step)
    num = float(wf @ (series_f.times * series_f.j)) - float(wi @ (series_i.times * series_i.j))
    return num / den


def dwell_time_density(xs, times, rho, incident: FluxSeries, *,
                       barrier: BarrierSpec | None = None,
                       norm_floor: float = NORM_FLOOR) -> float:
    """Dwell time from the presence probability: int dt int dx rho / int J_in dt.

    ``rho`` has shape (len(xs), len(times)) on uniform grids spanning the
    same interval (x_i, x_f) = (xs[0], xs[-1]).
    """
    xs = np.asarray(xs, dtype=float)
    times = np.asarray(times, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if rho.shape != (xs.size, times.size):
        raise DomainError("rho must be sampled as (len(xs), len(times))")
    if barrier is not None and not (xs[0] < 0.0 < barrier.a < xs[-1]):
        raise DomainError(f"dwell interval ({xs[0]}, {xs[-1]}) must bracket the barrier")
    if xs[0] != incident.x:
        raise DomainError("incident flux must be sampled at the entry position")
    den = incident_norm(incident, norm_floor=norm_floor)
    wx = simpson_weights(xs.size, float(xs[1] - xs[0]))
    wt = simpson_weights(times.size, float(times[1] - times[0]))
    return float(wt @ (rho.T @ wx)) / den


def phase_time(k_bar: float, barrier: BarrierSpec, x_i: float, x_f: float,
               constants: PhysicalConstants = ELECTRON,
               rel_step: float = 1e-5) -> float:
    """Stationary-phase transit time from x_i to x_f for a quasi-monochromatic packet.

    hbar * d/dE [arg t(E) + k(E) (x_f - x_i)] at E(k_bar), by a centered
    finite difference on the closed-form transmission amplitude.  The k(E)
    term carries the free propagation, arg t the barrier delay; with our
    t-convention the (0, a) case reduces to hbar * d(arg t + k a)/dE.
    """
    if not x_f > x_i:
        raise DomainError("phase time needs x_f > x_i")
    energy = constants.energy(k_bar)
    if energy >= barrier.v0:
        raise DomainError(f"E(k_bar)={energy:.6g} eV is not below v0={barrier.v0} eV")
    delta = rel_step * energy
    if energy + delta >= barrier.v0:
        raise DomainError(
            f"E(k_bar)={energy:.6g} eV is too close to v0={barrier.v0} eV for the "
            f"difference stencil"
        )
    e_hi, e_lo = energy + delta, energy - delta
    k_hi = float(constants.wavenumber(e_hi))
    k_lo = float(constants.wavenumber(e_lo))
    t_hi = transmission_amplitude(k_hi, barrier, constants)
    t_lo = transmission_amplitude(k_lo, barrier, constants)
    # angle of the ratio keeps the small difference free of branch jumps
    dtheta = math.atan2((t_hi * np.conj(t_lo)).imag, (t_hi * np.conj(t_lo)).real)
    dtheta += (k_hi - k_lo) * (x_f - x_i)
    return constants.hbar * dtheta / (2.0 * delta)


def presence_N(series: FluxSeries, side: str, t: float | None = None):
    """Probability at time t of being past x (side '>') or before it (side '<').

    N>(x, t) = int_{t_min}^{t} J+(x, t') dt' and N<(x, t) = -int J-; both
    start at 0 and are non-decreasing in t.  With t=None the whole running
    series is returned, aligned with ``series.times``.
    """
    if side == ">":
        running = cumulative_trapezoid(series.j_plus, series.step)
    elif side == "<":
        running = -cumulative_trapezoid(series.j_minus, series.step)
    else:
        raise DomainError(f"side must be '>' or '<', got {side!r}")
    if t is None:
        return running
    if not series.times[0] <= t <= series.times[-1]:
        raise DomainError(f"t={t} is outside the sampled window")
    return float(np.interp(t, series.times, running))
