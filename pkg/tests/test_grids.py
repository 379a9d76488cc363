import numpy as np
import pytest

from tunneltimes import (ConfigError, DomainError, NumericalError, PacketSpec,
                         BarrierSpec, build_time_grid, build_x_profile,
                         packet_time_extension, refine_until_stable)
from tunneltimes.grids import DEFAULT_WINDOW_S, TimeGrid, cumulative_trapezoid, simpson_weights

K_5EV = 1.1455750187578737


def packet(dk):
    return PacketSpec(k_bar=K_5EV, dk=dk)


class TestTimeGrid:
    def test_extension_estimates(self):
        # 1/(vbar dk) with vbar = 1.3262e16 A/s
        assert packet_time_extension(packet(0.01)) == pytest.approx(7.540311748723745e-15, rel=1e-12)
        assert packet_time_extension(packet(0.15)) == pytest.approx(5.026874499149164e-16, rel=1e-12)

    def test_default_window_and_step(self):
        grid = build_time_grid(packet(0.01))
        assert grid.t_min == -1e-13 and grid.t_max == 1e-13
        assert grid.step <= packet_time_extension(packet(0.01)) / 50
        assert (grid.n - 1) & (grid.n - 2) == 0  # power-of-two interval count

    def test_explicit_node_count(self):
        grid = build_time_grid(packet(0.01), n=4096)
        assert grid.n == 4096
        assert grid.step == pytest.approx(DEFAULT_WINDOW_S / 4095, rel=1e-14)

    def test_narrow_override_rejected(self):
        # 10x the dk=0.01 extension is 7.5e-14
        with pytest.raises(ConfigError):
            build_time_grid(packet(0.01), window=5e-14)

    def test_ultranarrow_spectrum_widens_window(self):
        # dk = 0.002: the paper window would be under 10x the extension
        ext = packet_time_extension(packet(0.002))
        assert DEFAULT_WINDOW_S < 10 * ext
        grid = build_time_grid(packet(0.002))
        assert grid.t_max - grid.t_min == pytest.approx(100 * ext, rel=1e-12)

    def test_refined_doubles_intervals(self):
        grid = build_time_grid(packet(0.01))
        fine = grid.refined(2)
        assert fine.n - 1 == 4 * (grid.n - 1)
        assert fine.t_min == grid.t_min and fine.t_max == grid.t_max

    def test_degenerate_grid_rejected(self):
        with pytest.raises(DomainError):
            TimeGrid(0.0, 0.0, 10)
        with pytest.raises(DomainError):
            TimeGrid(0.0, 1.0, 2)


class TestXProfile:
    def test_two_points(self):
        assert build_x_profile(BarrierSpec(10.0, 5.0), 2).tolist() == [0.0, 5.0]

    def test_step_half_angstrom(self):
        xs = build_x_profile(BarrierSpec(10.0, 5.0), 11)
        assert np.allclose(np.diff(xs), 0.5)

    def test_step_one_angstrom(self):
        xs = build_x_profile(BarrierSpec(10.0, 10.0), 11)
        assert np.allclose(np.diff(xs), 1.0)

    def test_too_few_rejected(self):
        with pytest.raises(DomainError):
            build_x_profile(BarrierSpec(10.0, 5.0), 1)


class TestQuadratureRules:
    def test_simpson_exact_for_cubics(self):
        xs = np.linspace(0.0, 2.0, 21)
        w = simpson_weights(xs.size, float(xs[1] - xs[0]))
        assert float(w @ xs**3) == pytest.approx(4.0, rel=1e-13)
        assert float(w @ np.ones_like(xs)) == pytest.approx(2.0, rel=1e-13)

    def test_simpson_needs_odd_count(self):
        with pytest.raises(DomainError):
            simpson_weights(10, 0.1)

    def test_cumulative_trapezoid(self):
        xs = np.linspace(0.0, 1.0, 101)
        running = cumulative_trapezoid(xs, float(xs[1] - xs[0]))
        assert running[0] == 0.0
        assert running[-1] == pytest.approx(0.5, rel=1e-4)
        assert np.all(np.diff(running) >= 0)


class TestRefinement:
    def test_constant_task_converges_at_second_level(self):
        calls = []

        def task(level):
            calls.append(level)
            return 2.0**-level, [3.14159]

        report = refine_until_stable(task, tol=1e-3, max_levels=8)
        assert report.converged
        assert report.level_count == 2
        assert calls == [0, 1]
        assert report.final_rel_change == 0.0

    def test_zero_tolerance_never_converges(self):
        report = refine_until_stable(lambda level: (2.0**-level, [1.0]),
                                     tol=0.0, max_levels=5)
        assert not report.converged
        assert report.level_count == 5

    def test_nonfinite_raises(self):
        with pytest.raises(NumericalError):
            refine_until_stable(lambda level: (1.0, [float("nan")]), tol=1e-3)

    def test_sign_flip_blocks_convergence(self):
        # values alternate sign with tiny relative change: must not converge
        def task(level):
            return 2.0**-level, [(-1.0) ** level * 1e-15]

        report = refine_until_stable(task, tol=0.5, max_levels=4)
        assert not report.converged

    def test_vector_convergence_uses_result_scale(self):
        # a zero entry and a tiny noisy entry must not block convergence
        def task(level):
            return 2.0**-level, [0.0, 1e-20 * level, 1.0]

        report = refine_until_stable(task, tol=1e-3, max_levels=4)
        assert report.converged and report.level_count == 2

    def test_steps_recorded_halve(self):
        def task(level):
            return 1e-16 * 2.0**-level, [1.0]

        report = refine_until_stable(task, tol=1e-3, max_levels=8)
        steps = [step for step, _ in report.levels]
        assert steps[0] / steps[1] == 2.0
