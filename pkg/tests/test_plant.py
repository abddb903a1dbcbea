import math

import numpy as np
from django.test import SimpleTestCase

from django_flockspc.exceptions import InvalidInputError
from django_flockspc.plant import (GRAVITY, LLCConfig, LLCFamily, PlantState, energy_fraction_time,
                                   explicit_xy_tilt, integrate_plant, llc_tilt, pid_xy_tilt,
                                   simulate_step, step_response, stopping_distance)


def coast(cfg, v0, duration, dt=0.001):
    """
    Fly family B with the setpoint pinned to the current position, so the
    position error stays zero while the agent brakes from ``v0``.
    """
    state = PlantState(position=(0, 0, 1), velocity=(v0, 0, 0))
    times, xs, vs, energies = [0.0], [0.0], [v0], [state.kinetic_energy]
    for k in range(1, int(round(duration / dt)) + 1):
        tilt = explicit_xy_tilt(state, state.position[:2], cfg)
        state = integrate_plant(state, tilt, 1.0, cfg, dt)
        times.append(k * dt)
        xs.append(state.position[0])
        vs.append(state.velocity[0])
        energies.append(state.kinetic_energy)
    return np.array(times), np.array(xs), np.array(vs), np.array(energies)


class TestPidXy(SimpleTestCase):

    def test_clamped_output(self):
        """
        Test that a large error saturates the tilt
        """
        cfg = LLCConfig(k_v=0.05, k_p=0.4, k_i=0.0, tilt_max=0.35)
        state = PlantState(position=(0, 0, 1))
        tilt = pid_xy_tilt(state, (1, 0), cfg, 0.01)
        np.testing.assert_allclose(tilt, [0.35, 0.0])

    def test_at_reference(self):
        """
        Test zero tilt at rest on the reference
        """
        state = PlantState(position=(2, 1, 1))
        np.testing.assert_array_equal(pid_xy_tilt(state, (2, 1), LLCConfig(), 0.01), [0, 0])

    def test_steady_speed_condition(self):
        """
        Test that an offset of k_v * v cancels the error term
        """
        cfg = LLCConfig(k_v=1 / 20, k_p=0.4, k_i=0.0)
        state = PlantState(position=(0, 0, 1), velocity=(1.0, 0, 0))
        np.testing.assert_allclose(pid_xy_tilt(state, (0.05, 0), cfg, 0.01), [0, 0], atol=1e-15)

    def test_integrator_frozen_while_clamped(self):
        """
        Test anti-windup: a saturated axis does not integrate
        """
        cfg = LLCConfig(k_v=0.05, k_p=0.4, k_i=0.02)
        state = PlantState(position=(0, 0, 1))
        pid_xy_tilt(state, (5, 0.01), cfg, 0.1)
        self.assertEqual(state.integrator_xy[0], 0.0)
        self.assertAlmostEqual(state.integrator_xy[1], 0.001)

    def test_invalid_dt(self):
        """
        Test that dt must be positive
        """
        with self.assertRaises(InvalidInputError):
            pid_xy_tilt(PlantState(position=(0, 0, 0)), (0, 0), LLCConfig(), 0)

    def test_steady_cruise(self):
        """
        Test that a setpoint moving at constant speed with the k_v offset is
        followed at that speed
        """
        cfg = LLCConfig(k_v=1 / 20, k_p=0.4, k_i=0.0)
        speed, dt = 0.5, 0.01
        state = PlantState(position=(0, 0, 1), velocity=(speed, 0, 0))
        for k in range(2000):
            ref = (speed * k * dt + cfg.k_v * speed, 0.0)
            state = integrate_plant(state, pid_xy_tilt(state, ref, cfg, dt), 1.0, cfg, dt)
            if k > 500:
                self.assertLess(abs(state.velocity[0] - speed), 0.05 * speed)


class TestExplicitXy(SimpleTestCase):

    def test_at_reference(self):
        """
        Test zero tilt at rest on the reference
        """
        cfg = LLCConfig(family=LLCFamily.B)
        state = PlantState(position=(1, 1, 1))
        np.testing.assert_array_equal(explicit_xy_tilt(state, (1, 1), cfg), [0, 0])

    def test_optimal_speed(self):
        """
        Test that |v| = |e| / t_delta commands no acceleration
        """
        cfg = LLCConfig(family=LLCFamily.B, t_delta=0.5)
        state = PlantState(position=(0, 0, 1), velocity=(1, 0, 0))
        np.testing.assert_allclose(explicit_xy_tilt(state, (0.5, 0), cfg), [0, 0], atol=1e-15)

    def test_braking(self):
        """
        Test the braking tilt with zero position error
        """
        cfg = LLCConfig(family=LLCFamily.B, t_delta=0.5)
        state = PlantState(position=(0, 0, 1), velocity=(1, 0, 0))
        tilt = explicit_xy_tilt(state, (0, 0), cfg)
        self.assertAlmostEqual(tilt[0], math.atan(-2 / GRAVITY))
        self.assertAlmostEqual(tilt[0], -0.2011, places=4)

    def test_tilt_limits(self):
        """
        Test that both families stay within their tilt limits
        """
        rng = np.random.default_rng(3)
        for family in LLCFamily:
            cfg = LLCConfig.defaults(family)
            for _ in range(200):
                state = PlantState(position=rng.uniform(-5, 5, 3), velocity=rng.uniform(-3, 3, 3))
                tilt = llc_tilt(state, rng.uniform(-5, 5, 2), cfg, 0.01)
                self.assertTrue(np.all(tilt >= cfg.tilt_min))
                self.assertTrue(np.all(tilt <= cfg.tilt_max))

    def test_exponential_deceleration(self):
        """
        Test that the braking speed follows v0 * exp(-t / t_delta)
        """
        cfg = LLCConfig(family=LLCFamily.B, t_delta=0.5)
        times, _, vs, _ = coast(cfg, 1.0, 1.5)
        expected = np.exp(-times / 0.5)
        self.assertLess(np.max(np.abs(vs - expected) / expected), 0.01)

    def test_stopping_distance(self):
        """
        Test the braking distance from 1 m/s and the distance at the
        99 % energy time
        """
        cfg = LLCConfig(family=LLCFamily.B, t_delta=0.5)
        times, xs, vs, energies = coast(cfg, 1.0, 6.0)
        self.assertAlmostEqual(xs[-1], 0.5, delta=0.01)

        t99 = energy_fraction_time(0.5, 0.01)
        self.assertAlmostEqual(t99, 1.151, places=3)
        at = int(np.searchsorted(times, t99))
        self.assertAlmostEqual(xs[at], 0.45, delta=0.01)
        self.assertAlmostEqual(xs[at], stopping_distance(0.5, 1.0, t99), delta=0.01)
        self.assertAlmostEqual(energies[at] / energies[0], 0.01, delta=0.0002)


class TestIntegratePlant(SimpleTestCase):

    def test_no_tilt_at_rest(self):
        """
        Test that a level agent at rest stays put
        """
        state = PlantState(position=(1, 2, 1))
        after = integrate_plant(state, (0, 0), 1.0, LLCConfig(), 0.01)
        np.testing.assert_array_equal(after.position, state.position)

    def test_tilt_acceleration(self):
        """
        Test the horizontal acceleration of a tilted agent
        """
        after = integrate_plant(PlantState(position=(0, 0, 1)), (0.35, 0), 1.0, LLCConfig(), 0.01)
        self.assertAlmostEqual(after.velocity[0], GRAVITY * math.tan(0.35) * 0.01)

    def test_deterministic(self):
        """
        Test bit-identical integration of identical inputs
        """
        state = PlantState(position=(0.1, 0.2, 0.9), velocity=(0.3, -0.1, 0.05))
        a = integrate_plant(state, (0.1, -0.2), 1.2, LLCConfig(), 0.01)
        b = integrate_plant(state, (0.1, -0.2), 1.2, LLCConfig(), 0.01)
        self.assertEqual(a.position.tobytes(), b.position.tobytes())
        self.assertEqual(a.velocity.tobytes(), b.velocity.tobytes())

    def test_altitude_converges(self):
        """
        Test that altitude settles on the reference
        """
        state = PlantState(position=(0, 0, 0.5))
        for _ in range(500):
            state = integrate_plant(state, (0, 0), 1.0, LLCConfig(), 0.01)
        self.assertAlmostEqual(state.position[2], 1.0, places=2)

    def test_input_state_untouched(self):
        """
        Test that integration returns a new state
        """
        state = PlantState(position=(0, 0, 1))
        integrate_plant(state, (0.2, 0.2), 1.0, LLCConfig(), 0.01)
        np.testing.assert_array_equal(state.velocity, np.zeros(3))


class TestStepResponse(SimpleTestCase):

    def test_family_ordering(self):
        """
        Test that family B rises in less than half the time of family A and
        overshoots more
        """
        a = step_response(LLCConfig.defaults(LLCFamily.A), 1.0)
        b = step_response(LLCConfig.defaults(LLCFamily.B), 1.0)
        self.assertLess(b.rise_time_90, 0.5 * a.rise_time_90)
        self.assertGreater(b.overshoot_pct, a.overshoot_pct)
        for metrics in (a, b):
            self.assertTrue(metrics.settled)
            self.assertLessEqual(metrics.rise_time_90, metrics.settling_time_2pct)

    def test_zero_step(self):
        """
        Test the metrics of a zero step
        """
        metrics = step_response(LLCConfig(), 0.0)
        self.assertEqual(metrics.rise_time_90, 0.0)
        self.assertEqual(metrics.overshoot_pct, 0.0)

    def test_not_settled(self):
        """
        Test the not-settled flag of a response cut short
        """
        metrics = step_response(LLCConfig.defaults(LLCFamily.A), 1.0, duration=1.0)
        self.assertFalse(metrics.settled)
        self.assertIsNone(metrics.settling_time_2pct)

    def test_series_starts_at_rest(self):
        """
        Test the sampled step trajectory
        """
        times, xs = simulate_step(LLCConfig.defaults(LLCFamily.B), 1.0, duration=2.0, dt=0.01)
        self.assertEqual(len(times), 201)
        self.assertEqual(xs[0], 0.0)
        self.assertGreater(xs[-1], 0.9)

    def test_config_validation(self):
        """
        Test LLC parameter validation
        """
        with self.assertRaises(InvalidInputError):
            LLCConfig(tilt_min=0.1)
        with self.assertRaises(InvalidInputError):
            LLCConfig(t_delta=0)
        with self.assertRaises(InvalidInputError):
            LLCConfig(k_p=-1)
