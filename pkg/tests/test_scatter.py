import math

import numpy as np
import pytest

from tunneltimes import (ELECTRON, BarrierSpec, DomainError, OverBarrierComponent,
                         inside_wavenumber, scattering_amplitudes,
                         stationary_field, transmission_amplitude)
from tunneltimes.scatter import amplitude_table

# hand-evaluated oracles (calculator, not this package)
K_5EV = 1.1455750187578737          # sqrt(5 / 3.8099821)
KC_10EV = 1.6200877282431978        # sqrt(10 / 3.8099821)
T2_5_10_5 = 4.2352758501681464e-05  # [1 + 100 sinh^2(kappa*5)/(4*5*5)]^-1


def barrier(v0=10.0, a=5.0):
    return BarrierSpec(v0=v0, a=a)


class TestInsideWavenumber:
    def test_symmetric_point_kappa_equals_k(self):
        # E = V0/2 makes the decay constant equal the wavenumber exactly
        assert inside_wavenumber(K_5EV, barrier()) == pytest.approx(K_5EV, rel=1e-14)

    def test_low_energy_limit(self):
        assert inside_wavenumber(1e-5, barrier()) == pytest.approx(KC_10EV, rel=1e-9)

    def test_near_top_vanishes(self):
        k = float(ELECTRON.wavenumber(10.0 * (1 - 1e-10)))
        assert 0 < inside_wavenumber(k, barrier()) < 2e-5

    def test_over_barrier_rejected(self):
        with pytest.raises(OverBarrierComponent):
            inside_wavenumber(KC_10EV * (1 + 1e-12), barrier())
        with pytest.raises(OverBarrierComponent):
            inside_wavenumber(2.0, barrier())

    def test_nonpositive_k_rejected(self):
        with pytest.raises(DomainError):
            inside_wavenumber(0.0, barrier())


class TestBarrierSpec:
    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            BarrierSpec(v0=0.0, a=5.0)
        with pytest.raises(DomainError):
            BarrierSpec(v0=10.0, a=-1.0)

    def test_cutoff(self):
        assert barrier().cutoff_wavenumber() == pytest.approx(KC_10EV, rel=1e-14)


class TestAmplitudes:
    def test_transmission_against_hand_value(self):
        amp = scattering_amplitudes(K_5EV, barrier())
        assert abs(amp.t) ** 2 == pytest.approx(T2_5_10_5, rel=1e-10)

    def test_closed_form_oracle_lattice(self):
        # solver |t|^2 vs the sinh^2 formula written out here, 50 points
        worst = 0.0
        for energy in np.linspace(0.5, 9.5, 10):
            for a in np.linspace(1.0, 12.0, 5):
                k = float(ELECTRON.wavenumber(energy))
                amp = scattering_amplitudes(k, barrier(a=float(a)))
                t2 = 1.0 / (1.0 + 100.0 * math.sinh(amp.kappa * a) ** 2
                            / (4.0 * energy * (10.0 - energy)))
                worst = max(worst, abs(abs(amp.t) ** 2 / t2 - 1.0))
        assert worst <= 1e-12

    def test_closed_form_amplitude_matches_solver(self):
        for energy in (1.0, 5.0, 9.0):
            k = float(ELECTRON.wavenumber(energy))
            amp = scattering_amplitudes(k, barrier())
            assert transmission_amplitude(k, barrier()) == pytest.approx(amp.t, rel=1e-12)

    def test_unitarity_1000_random(self):
        rng = np.random.default_rng(20260809)
        worst = 0.0
        for _ in range(1000):
            v0 = rng.uniform(0.5, 20.0)
            a = rng.uniform(0.5, 20.0)
            spec = barrier(v0=v0, a=a)
            k = rng.uniform(0.02, 0.999) * spec.cutoff_wavenumber()
            amp = scattering_amplitudes(float(k), spec)
            worst = max(worst, abs(abs(amp.r) ** 2 + abs(amp.t) ** 2 - 1.0))
        assert worst <= 1e-12

    def test_vanishing_width_limit(self):
        # BarrierSpec requires a > 0; the a -> 0 limit gives t = 1, r = 0
        amp = scattering_amplitudes(K_5EV, barrier(a=1e-9))
        assert abs(amp.t - 1.0) < 1e-8
        assert abs(amp.r) < 1e-8

    def test_near_top_matches_kappa_series(self):
        # V0 -> E^+: |t|^2 -> [1 + V0 a^2 (V0-E) / (4 E c2) * (sinh(ka)/ka)^2]^-1
        c2 = ELECTRON.hbar2_over_2m
        energy = 10.0 * (1 - 1e-9)
        k = float(ELECTRON.wavenumber(energy))
        spec = barrier()
        amp = scattering_amplitudes(k, spec)
        kappa_a = amp.kappa * spec.a
        series = 1.0 / (1.0 + (100.0 * spec.a**2 / (4.0 * energy * c2))
                        * (1.0 + kappa_a**2 / 3.0))
        assert abs(amp.t) ** 2 == pytest.approx(series, rel=1e-6)

    def test_over_barrier_and_domain_errors(self):
        with pytest.raises(OverBarrierComponent):
            scattering_amplitudes(1.7, barrier())
        with pytest.raises(DomainError):
            scattering_amplitudes(-1.0, barrier())


class TestStationaryField:
    def test_matching_at_interfaces(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            spec = barrier(v0=rng.uniform(2, 15), a=rng.uniform(1, 10))
            k = float(rng.uniform(0.05, 0.999) * spec.cutoff_wavenumber())
            amp = scattering_amplitudes(k, spec)
            for edge in (0.0, spec.a):
                lo = stationary_field(k, edge - 1e-9, amp)
                hi = stationary_field(k, edge + 1e-9, amp)
                for a, b in zip(lo, hi):
                    assert abs(a - b) <= 1e-7 * max(abs(a), abs(b))

    def test_flux_constant_across_regions(self):
        # kappa*a capped at 4: for opaque barriers the net flux k(1-|r|^2) is
        # an e^{-2 kappa a} residue of O(1) standing waves, so the pointwise
        # evaluation floor is eps/|t|^2 and no solver can do better
        rng = np.random.default_rng(4)
        for _ in range(100):
            v0 = rng.uniform(1, 15)
            k = float(rng.uniform(0.15, 0.95) * BarrierSpec(v0, 1.0).cutoff_wavenumber())
            kappa = math.sqrt((v0 - ELECTRON.energy(k)) / ELECTRON.hbar2_over_2m)
            spec = barrier(v0=v0, a=float(rng.uniform(0.5, 1.0) * min(12.0, 4.0 / kappa)))
            amp = scattering_amplitudes(k, spec)
            x1, x2 = rng.uniform(-30.0, spec.a + 30.0, size=2)
            js = []
            for x in (x1, x2):
                psi, dpsi = stationary_field(k, float(x), amp)
                js.append(ELECTRON.hbar_over_m * (np.conj(psi) * dpsi).imag)
            assert abs(js[0] - js[1]) <= 1e-10 * max(abs(js[0]), abs(js[1]))

    def test_plane_wave_modulus_beyond_barrier(self):
        amp = scattering_amplitudes(K_5EV, barrier())
        for x in (6.0, 25.0, 300.0):
            psi, _ = stationary_field(K_5EV, x, amp)
            assert abs(psi) == pytest.approx(abs(amp.t), rel=1e-12)

    def test_vanishing_barrier_gives_plane_wave(self):
        # v0 -> 0 with E = v0/2: psi -> exp(ikx); residual |r| ~ kappa*a
        spec = barrier(v0=1e-10)
        k = float(ELECTRON.wavenumber(5e-11))
        amp = scattering_amplitudes(k, spec)
        for x in (-3.0, 2.0, 8.0):
            psi, _ = stationary_field(k, x, amp)
            assert abs(psi - np.exp(1j * k * x)) < 1e-4

    def test_wrong_k_rejected(self):
        amp = scattering_amplitudes(K_5EV, barrier())
        with pytest.raises(DomainError):
            stationary_field(0.9, 1.0, amp)


def test_amplitude_table_matches_scalar_solver():
    ks = np.linspace(0.2, 1.6, 40)
    table = amplitude_table(ks, barrier())
    for i in (0, 17, 39):
        amp = scattering_amplitudes(float(ks[i]), barrier())
        assert table.single(i).t == pytest.approx(amp.t, rel=1e-13)
        assert table.single(i).r == pytest.approx(amp.r, rel=1e-13)


def test_opaque_barrier_stays_unitary():
    # the scaled region-II basis keeps the solve conditioned at kappa*a ~ 23
    amp = scattering_amplitudes(K_5EV, barrier(a=20.0))
    assert abs(abs(amp.r) ** 2 + abs(amp.t) ** 2 - 1.0) <= 1e-12
    assert abs(amp.t) ** 2 < 1e-19
