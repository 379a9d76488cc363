"""Time, position and refinement control for the quadratures.

Time integrals use composite Simpson on a uniform grid; the k integrals
are Gauss-Legendre panels built in :mod:`tunneltimes.packet`.  The
refinement controller re-evaluates a task on grids whose node counts
double per level until the reported values are stable in size and sign.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, NumericalError
from .packet import PacketSpec
from .scatter import ELECTRON, BarrierSpec, PhysicalConstants

DEFAULT_WINDOW_S = 2e-13
"""Full default time window, -1e-13 s to +1e-13 s."""

STEP_FRACTION = 50
"""The default step is at most 1/50 of the packet temporal extension."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid with n nodes on [t_min, t_max]."""

    t_min: float
    t_max: float
    n: int

    def __post_init__(self):
        if not self.t_max > self.t_min:
            raise DomainError("time window must have positive width")
        if self.n < 3:
            raise DomainError("time grid needs at least 3 nodes")

    @property
    def step(self) -> float:
        return (self.t_max - self.t_min) / (self.n - 1)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n)

    def refined(self, level: int) -> "TimeGrid":
        """Same window with the interval count doubled ``level`` times."""
        return TimeGrid(self.t_min, self.t_max, (self.n - 1) * 2**level + 1)


def packet_time_extension(packet: PacketSpec,
                          constants: PhysicalConstants = ELECTRON) -> float:
    """Temporal extension estimate 1 / (v_bar dk) in seconds."""
    return 1.0 / (constants.velocity(packet.k_bar) * packet.dk)


def build_time_grid(packet: PacketSpec, constants: PhysicalConstants = ELECTRON, *,
                    window: float | None = None, n: int | None = None) -> TimeGrid:
    """Symmetric time grid covering the packet passage.

    The default window is the fixed +-1e-13 s whenever that is at least 10x
    the packet extension; for ultra-narrow spectra it widens to 100x the
    extension.  An explicit ``window`` (full width, seconds) below 10x the
    extension raises ConfigError.  The default node count keeps the step
    below extension/50, rounded to a power-of-two interval count so Simpson
    applies and refinement levels nest.
    """
    extension = packet_time_extension(packet, constants)
    if window is None:
        window = DEFAULT_WINDOW_S if DEFAULT_WINDOW_S >= 10.0 * extension else 100.0 * extension
    elif window < 10.0 * extension:
        raise ConfigError(
            f"time window {window:.3e} s is below 10x the packet extension "
            f"{extension:.3e} s"
        )
    if n is None:
        intervals = max(256, 2 ** math.ceil(math.log2(window / (extension / STEP_FRACTION))))
        n = intervals + 1
    return TimeGrid(-0.5 * window, 0.5 * window, n)


def build_x_profile(barrier: BarrierSpec, n_x: int) -> np.ndarray:
    """Uniform positions spanning [0, a] inclusive."""
    if n_x < 2:
        raise DomainError(f"profile needs at least 2 positions, got {n_x}")
    return np.linspace(0.0, barrier.a, n_x)


def simpson_weights(n: int, step: float) -> np.ndarray:
    """Composite Simpson weights for n uniformly spaced nodes (n odd)."""
    if n < 3 or n % 2 == 0:
        raise DomainError(f"Simpson rule needs an odd node count >= 3, got {n}")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (step / 3.0)


def cumulative_trapezoid(y: np.ndarray, step: float) -> np.ndarray:
    """Running trapezoid integral from the first node; same length as y."""
    out = np.empty_like(np.asarray(y, dtype=float))
    out[0] = 0.0
    np.cumsum((y[1:] + y[:-1]) * (0.5 * step), out=out[1:])
    return out


@dataclass
class RefinementReport:
    """Outcome of refine_until_stable: per-level (step, values) plus verdict."""

    levels: list
    converged: bool
    final_rel_change: float

    @property
    def final_values(self) -> np.ndarray:
        return self.levels[-1][1]

    @property
    def level_count(self) -> int:
        return len(self.levels)


def refine_until_stable(task, tol: float = 1e-3, max_levels: int = 8,
                        atol: float = 1e-18) -> RefinementReport:
    """Evaluate ``task(level)`` on successively doubled grids until stable.

    ``task`` must return (step, values): the time step used and the reported
    duration(s) for that level; it owns the grid construction and must double
    its k- and t-node counts with each level.  Stability means the relative
    change |new - old| / |result| is strictly below ``tol`` — for vector
    results both norms are sup norms, so every entry is certified to tol of
    the result scale — and no entry above ``atol`` changed sign.  With
    tol = 0 nothing converges and the report carries all max_levels
    evaluations.
    """
    if max_levels < 1:
        raise DomainError("max_levels must be at least 1")
    levels = []
    previous = None
    rel_change = math.inf
    converged = False
    for level in range(max_levels):
        step, values = task(level)
        values = np.atleast_1d(np.asarray(values, dtype=float))
        if not np.all(np.isfinite(values)):
            raise NumericalError(f"refinement task returned non-finite values at level {level}")
        levels.append((float(step), values))
        if previous is not None:
            scale = max(float(np.max(np.abs(values))), float(np.max(np.abs(previous))), atol)
            rel_change = float(np.max(np.abs(values - previous))) / scale
            significant = (np.abs(values) > atol) & (np.abs(previous) > atol)
            signs_stable = bool(np.all(values[significant] * previous[significant] > 0))
            if rel_change < tol and signs_stable:
                converged = True
                break
        previous = values
    return RefinementReport(levels=levels, converged=converged,
                            final_rel_change=rel_change)
