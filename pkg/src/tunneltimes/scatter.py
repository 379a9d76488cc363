"""Stationary scattering states of a 1D rectangular barrier.

The barrier occupies region II = (0, a) with height ``v0``; regions
I = (-inf, 0) and III = (a, inf) are free.  For a sub-barrier component
with wavenumber k (kinetic energy E = hbar2_over_2m * k^2 < v0) the
stationary state is

    psi_k(x) = exp(ikx) + r exp(-ikx)            x < 0
             = alpha exp(-kx*x) + beta exp(kx*x) 0 <= x <= a   (kx = kappa)
             = t exp(ikx)                        x > a

with value and derivative continuity at x = 0 and x = a.  Units are
eV, angstrom and second throughout, with hbar kept explicit.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OverBarrierComponent

HBAR_EV_S = 6.582119569e-16
"""hbar in eV s (CODATA)."""

HBAR2_OVER_2M_EV_A2 = 3.8099821
"""hbar^2 / (2 m_e) in eV angstrom^2 for the electron."""


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar and hbar^2/2m in the package unit system (eV, angstrom, s).

    The defaults are the electron values; they are physical constants,
    not tunable parameters.
    """

    hbar: float = HBAR_EV_S
    hbar2_over_2m: float = HBAR2_OVER_2M_EV_A2

    def __post_init__(self):
        if not (self.hbar > 0 and self.hbar2_over_2m > 0):
            raise DomainError("physical constants must be positive")

    @property
    def hbar_over_m(self) -> float:
        """hbar/m in angstrom^2/s; the flux prefactor."""
        return 2.0 * self.hbar2_over_2m / self.hbar

    def energy(self, k):
        """Kinetic energy E = hbar^2 k^2 / 2m in eV for k in 1/angstrom."""
        return self.hbar2_over_2m * np.square(k)

    def wavenumber(self, energy):
        """Inverse of :meth:`energy` (positive branch)."""
        return np.sqrt(np.asarray(energy) / self.hbar2_over_2m)

    def velocity(self, k):
        """Group velocity hbar k / m in angstrom/s."""
        return self.hbar_over_m * np.asarray(k)


ELECTRON = PhysicalConstants()


@dataclass(frozen=True)
class BarrierSpec:
    """Rectangular barrier: height ``v0`` (eV) on (0, a), ``a`` in angstrom."""

    v0: float
    a: float

    def __post_init__(self):
        if not self.v0 > 0:
            raise DomainError(f"barrier height must be positive, got v0={self.v0}")
        if not self.a > 0:
            raise DomainError(f"barrier width must be positive, got a={self.a}")

    def cutoff_wavenumber(self, constants: PhysicalConstants = ELECTRON) -> float:
        """k_c with E(k_c) = v0; components with k >= k_c are over-barrier."""
        return float(np.sqrt(self.v0 / constants.hbar2_over_2m))


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Coefficients of one stationary state, plus the barrier width it solves.

    ``beta`` multiplies exp(+kappa x); for opaque barriers it is tiny, so the
    region-II field is better evaluated as alpha e^{-kappa x} +
    beta_exit e^{-kappa (a - x)} with ``beta_exit = beta e^{kappa a}``.
    """

    k: float
    kappa: float
    r: complex
    alpha: complex
    beta: complex
    t: complex
    a: float

    @property
    def beta_exit(self) -> complex:
        return self.beta * complex(np.exp(self.kappa * self.a))


class AmplitudeTable:
    """Struct-of-arrays amplitudes for a whole k grid (immutable after build)."""

    __slots__ = ("k", "kappa", "r", "alpha", "beta_exit", "t", "barrier")

    def __init__(self, k, kappa, r, alpha, beta_exit, t, barrier):
        self.k = k
        self.kappa = kappa
        self.r = r
        self.alpha = alpha
        self.beta_exit = beta_exit
        self.t = t
        self.barrier = barrier

    def __len__(self):
        return self.k.size

    def single(self, i: int) -> ScatteringAmplitudes:
        """The i-th node as a scalar record (beta converted back to e^{+kx} basis)."""
        beta = complex(self.beta_exit[i] * np.exp(-self.kappa[i] * self.barrier.a))
        return ScatteringAmplitudes(
            k=float(self.k[i]),
            kappa=float(self.kappa[i]),
            r=complex(self.r[i]),
            alpha=complex(self.alpha[i]),
            beta=beta,
            t=complex(self.t[i]),
            a=self.barrier.a,
        )


def inside_wavenumber(k: float, barrier: BarrierSpec,
                      constants: PhysicalConstants = ELECTRON) -> float:
    """Evanescent decay constant kappa = sqrt((v0 - E)/ (hbar^2/2m)), E < v0 only."""
    if k <= 0:
        raise DomainError(f"wavenumber must be positive, got k={k}")
    energy = constants.energy(k)
    if energy >= barrier.v0:
        raise OverBarrierComponent(
            f"E(k)={energy:.6g} eV is not below the barrier v0={barrier.v0:.6g} eV"
        )
    return float(np.sqrt((barrier.v0 - energy) / constants.hbar2_over_2m))


def amplitude_table(ks, barrier: BarrierSpec,
                    constants: PhysicalConstants = ELECTRON) -> AmplitudeTable:
    """Solve the matching conditions for every k in ``ks`` (batched 4x4 solves).

    The linear system uses the scaled region-II basis e^{-kappa x},
    e^{-kappa (a-x)} and the region-III basis e^{ik(x-a)}, which keeps every
    matrix entry O(1) and the solve well conditioned for opaque barriers.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if np.any(ks <= 0):
        raise DomainError("all wavenumbers must be positive")
    energy = constants.energy(ks)
    if np.any(energy >= barrier.v0):
        bad = float(ks[np.argmax(energy)])
        raise OverBarrierComponent(
            f"k={bad:.6g} 1/angstrom is not a sub-barrier component of v0={barrier.v0} eV"
        )
    kappa = np.sqrt((barrier.v0 - energy) / constants.hbar2_over_2m)

    n = ks.size
    ik = 1j * ks
    decay = np.exp(-kappa * barrier.a)  # e^{-kappa a}, <= 1

    # Unknowns per node: (r, alpha, beta_exit, t_exit) with
    # psi_II = alpha e^{-kappa x} + beta_exit e^{-kappa (a-x)} and
    # psi_III = t_exit e^{ik(x-a)}.
    mat = np.zeros((n, 4, 4), dtype=complex)
    rhs = np.zeros((n, 4, 1), dtype=complex)
    # continuity of psi and psi' at x=0
    mat[:, 0, 0] = 1.0
    mat[:, 0, 1] = -1.0
    mat[:, 0, 2] = -decay
    rhs[:, 0, 0] = -1.0
    mat[:, 1, 0] = -ik
    mat[:, 1, 1] = kappa
    mat[:, 1, 2] = -kappa * decay
    rhs[:, 1, 0] = -ik
    # continuity of psi and psi' at x=a
    mat[:, 2, 1] = decay
    mat[:, 2, 2] = 1.0
    mat[:, 2, 3] = -1.0
    mat[:, 3, 1] = -kappa * decay
    mat[:, 3, 2] = kappa
    mat[:, 3, 3] = -ik

    sol = np.linalg.solve(mat, rhs)[:, :, 0]
    r = sol[:, 0]
    alpha = sol[:, 1]
    beta_exit = sol[:, 2]
    t = sol[:, 3] * np.exp(-ik * barrier.a)
    return AmplitudeTable(ks, kappa, r, alpha, beta_exit, t, barrier)


def scattering_amplitudes(k: float, barrier: BarrierSpec,
                          constants: PhysicalConstants = ELECTRON) -> ScatteringAmplitudes:
    """Matching-condition solution for a single sub-barrier wavenumber."""
    return amplitude_table([k], barrier, constants).single(0)


def transmission_amplitude(k: float, barrier: BarrierSpec,
                           constants: PhysicalConstants = ELECTRON) -> complex:
    """Closed-form transmission amplitude t(k) of the rectangular barrier.

    t = 2 k kappa e^{-ika} / (2 k kappa cosh(kappa a) + i (kappa^2 - k^2) sinh(kappa a)),
    |t|^2 = [1 + v0^2 sinh^2(kappa a) / (4 E (v0 - E))]^{-1}.
    """
    kappa = inside_wavenumber(k, barrier, constants)
    ka = kappa * barrier.a
    den = 2.0 * k * kappa * np.cosh(ka) + 1j * (kappa**2 - k**2) * np.sinh(ka)
    return complex(2.0 * k * kappa * np.exp(-1j * k * barrier.a) / den)


def stationary_field(k: float, x: float, amps: ScatteringAmplitudes):
    """(psi, dpsi/dx) of the stationary state at x; total function of x.

    x = 0 and x = a are evaluated with the region-II expressions; continuity
    of the matching makes the choice irrelevant to ~1e-15.
    """
    if amps.k != k:
        raise DomainError(f"amplitudes were solved for k={amps.k}, not k={k}")
    a = amps.a
    if x < 0:
        fwd = np.exp(1j * k * x)
        bwd = np.exp(-1j * k * x)
        psi = fwd + amps.r * bwd
        dpsi = 1j * k * fwd - 1j * k * amps.r * bwd
    elif x <= a:
        kap = amps.kappa
        e_in = np.exp(-kap * x)
        e_out = np.exp(-kap * (a - x))
        psi = amps.alpha * e_in + amps.beta_exit * e_out
        dpsi = -kap * amps.alpha * e_in + kap * amps.beta_exit * e_out
    else:
        fwd = np.exp(1j * k * (x - a))
        t_exit = amps.t * np.exp(1j * k * a)
        psi = t_exit * fwd
        dpsi = 1j * k * t_exit * fwd
    return complex(psi), complex(dpsi)


def stationary_parts(x: float, table: AmplitudeTable):
    """(psi, dpsi, d2psi) arrays over the table's k nodes at one position.

    d2psi comes from the stationary Schroedinger equation,
    psi'' = ((V(x) - E)/ (hbar^2/2m)) psi, so it is exact per region.
    """
    barrier = table.barrier
    ks, kappa = table.k, table.kappa
    if x < 0:
        fwd = np.exp(1j * ks * x)
        bwd = np.exp(-1j * ks * x)
        psi = fwd + table.r * bwd
        dpsi = 1j * ks * (fwd - table.r * bwd)
        d2psi = -np.square(ks) * psi
    elif x <= barrier.a:
        e_in = np.exp(-kappa * x)
        e_out = np.exp(-kappa * (barrier.a - x))
        psi = table.alpha * e_in + table.beta_exit * e_out
        dpsi = kappa * (table.beta_exit * e_out - table.alpha * e_in)
        d2psi = np.square(kappa) * psi
    else:
        t_exit = table.t * np.exp(1j * ks * barrier.a)
        fwd = np.exp(1j * ks * (x - barrier.a))
        psi = t_exit * fwd
        dpsi = 1j * ks * psi
        d2psi = -np.square(ks) * psi
    return psi, dpsi, d2psi
