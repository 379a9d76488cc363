import pytest

from tunneltimes import ELECTRON, BarrierSpec, PacketSpec
from tunneltimes.sweeps import profile_scenario, single_scenario

# the parameter lattice behind the reproduced figures: (a, ebar, dk)
PROFILE_LATTICE = [
    (5.0, 5.0, 0.01), (10.0, 5.0, 0.01),
    (5.0, 2.5, 0.02), (5.0, 5.0, 0.02), (5.0, 7.5, 0.02), (5.0, 5.0, 0.04),
    (10.0, 5.0, 0.02), (10.0, 5.0, 0.04),
]

DWELL_LATTICE = [(ebar, dk) for ebar in (2.5, 5.0, 7.5) for dk in (0.01, 0.02, 0.04)]

V0_EV = 10.0


def packet_for(ebar, dk):
    return PacketSpec(k_bar=float(ELECTRON.wavenumber(ebar)), dk=dk)


@pytest.fixture(scope="session")
def paper_profiles():
    """Converged penetration/return profiles for the whole figure lattice."""
    out = {}
    for a, ebar, dk in PROFILE_LATTICE:
        out[(a, ebar, dk)] = profile_scenario(
            BarrierSpec(V0_EV, a), packet_for(ebar, dk),
            n_x=11, tol=1e-3, max_levels=8,
        )
    return out


@pytest.fixture(scope="session")
def dwell_lattice():
    """Single-scenario summaries (with both dwell forms) on the 3x3 lattice."""
    out = {}
    for ebar, dk in DWELL_LATTICE:
        out[(ebar, dk)] = single_scenario(
            BarrierSpec(V0_EV, 5.0), packet_for(ebar, dk),
            tol=1e-3, max_levels=8,
        )
    return out


@pytest.fixture(scope="session")
def quasi_single():
    """The narrowest-spectrum scenario, dk = 0.005 1/angstrom."""
    return single_scenario(BarrierSpec(V0_EV, 5.0), packet_for(5.0, 0.005),
                           tol=1e-3, max_levels=8)
