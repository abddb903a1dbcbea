# -*- coding: utf-8 -*-
"""
Positional low-level controllers and the tilt-driven point mass they fly.

Family A is the PID-XY controller (error corrected by a velocity term),
family B the explicit controller that picks the constant acceleration
cancelling the error over a time horizon ``t_delta``. Both output tilt
angles; the plant turns a tilt into ``9.81 * tan(tilt)`` of horizontal
acceleration. Altitude follows a critically damped response.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from django_flockspc.exceptions import InvalidInputError
from django_flockspc.model import as_vec3

log = logging.getLogger(__name__)

GRAVITY = 9.81
CRAZYFLIE_MASS = 0.031


class LLCFamily(str, Enum):
    A = 'A'
    B = 'B'


@dataclass(frozen=True)
class LLCConfig:
    family: LLCFamily = LLCFamily.A
    k_v: float = 1.35
    k_p: float = 0.08
    k_i: float = 0.0
    tilt_min: float = -0.35
    tilt_max: float = 0.35
    t_delta: float = 0.5
    z_time_constant: float = 0.4
    z_accel_limit: float = 3.5

    def __post_init__(self):
        object.__setattr__(self, 'family', LLCFamily(self.family))
        if not self.tilt_min < 0 < self.tilt_max:
            raise InvalidInputError('tilt limits must satisfy tilt_min < 0 < tilt_max')
        if not self.t_delta > 0:
            raise InvalidInputError('t_delta must be > 0, got %r' % self.t_delta)
        for name in ('k_v', 'k_p', 'k_i'):
            if not getattr(self, name) >= 0:
                raise InvalidInputError('%s must be >= 0, got %r' % (name, getattr(self, name)))
        if not self.z_time_constant > 0:
            raise InvalidInputError('z_time_constant must be > 0')
        if not self.z_accel_limit > 0:
            raise InvalidInputError('z_accel_limit must be > 0')

    @classmethod
    def defaults(cls, family, **overrides):
        return cls(family=family, **overrides)


@dataclass(eq=False)
class PlantState:
    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    integrator_xy: np.ndarray = field(default_factory=lambda: np.zeros(2))
    mass: float = CRAZYFLIE_MASS

    def __post_init__(self):
        self.position = as_vec3(self.position, 'position')
        self.velocity = as_vec3(self.velocity, 'velocity')
        self.integrator_xy = np.asarray(self.integrator_xy, dtype=float).copy()
        if not self.mass > 0:
            raise InvalidInputError('mass must be > 0, got %r' % self.mass)

    @property
    def kinetic_energy(self):
        return 0.5 * self.mass * float(self.velocity @ self.velocity)


@dataclass(frozen=True)
class StepResponseMetrics:
    rise_time_90: Optional[float]
    overshoot_pct: float
    settling_time_2pct: Optional[float]
    settled: bool = True

    def as_dict(self):
        return {'rise_time_90': self.rise_time_90,
                'overshoot_pct': self.overshoot_pct,
                'settling_time_2pct': self.settling_time_2pct,
                'settled': self.settled}


def pid_xy_tilt(state, ref_xy, cfg, dt):
    """
    PID-XY tilt command. The velocity-corrected error vanishes when the
    agent cruises at ``(ref - p) / k_v``.

    The integrator in ``state`` advances by ``error * dt`` except on axes
    whose output is clamped.
    """
    if not dt > 0:
        raise InvalidInputError('dt must be > 0, got %r' % dt)
    error = (np.asarray(ref_xy, dtype=float) - state.position[:2]) - cfg.k_v * state.velocity[:2]
    integrator = state.integrator_xy + error * dt
    raw = cfg.k_p * error + cfg.k_i * integrator
    tilt = np.clip(raw, cfg.tilt_min, cfg.tilt_max)
    state.integrator_xy = np.where(tilt == raw, integrator, state.integrator_xy)
    return tilt


def explicit_xy_tilt(state, ref_xy, cfg):
    """
    Explicit tilt command: the constant acceleration that would cancel the
    position error within ``t_delta``, with the current velocity carried
    over the same horizon.
    """
    error = np.asarray(ref_xy, dtype=float) - state.position[:2]
    accel = (error - state.velocity[:2] * cfg.t_delta) / cfg.t_delta ** 2
    return np.clip(np.arctan(accel / GRAVITY), cfg.tilt_min, cfg.tilt_max)


def llc_tilt(state, ref_xy, cfg, dt):
    if cfg.family is LLCFamily.A:
        return pid_xy_tilt(state, ref_xy, cfg, dt)
    return explicit_xy_tilt(state, ref_xy, cfg)


def integrate_plant(state, tilt_xy, z_ref, cfg, dt):
    """
    Advance the point mass by ``dt`` with semi-implicit Euler. Returns a
    new state; ``state`` itself is left untouched.
    """
    if not dt > 0:
        raise InvalidInputError('dt must be > 0, got %r' % dt)
    tau = cfg.z_time_constant
    accel_z = (z_ref - state.position[2]) / (tau * tau) - 2.0 * state.velocity[2] / tau
    accel_z = min(max(accel_z, -cfg.z_accel_limit), cfg.z_accel_limit)
    accel_xy = GRAVITY * np.tan(np.asarray(tilt_xy, dtype=float))
    accel = np.array([accel_xy[0], accel_xy[1], accel_z])
    velocity = state.velocity + accel * dt
    position = state.position + velocity * dt
    return replace(state, position=position, velocity=velocity, integrator_xy=state.integrator_xy)


def simulate_step(cfg, step, duration=10.0, dt=0.001, altitude=1.0):
    """
    Closed-loop x-axis response to a setpoint ``step`` metres away from an
    agent hovering at rest. Returns ``(times, x_positions)``, both starting
    at ``t = 0``.
    """
    if not dt > 0 or not duration > 0:
        raise InvalidInputError('duration and dt must be > 0')
    steps = int(round(duration / dt))
    state = PlantState(position=(0.0, 0.0, altitude))
    ref_xy = (step, 0.0)
    times = np.arange(steps + 1) * dt
    xs = np.empty(steps + 1)
    xs[0] = 0.0
    for k in range(1, steps + 1):
        tilt = llc_tilt(state, ref_xy, cfg, dt)
        state = integrate_plant(state, tilt, altitude, cfg, dt)
        xs[k] = state.position[0]
    return times, xs


def step_response(cfg, step, duration=10.0, dt=0.001):
    """
    90 % rise time, peak overshoot and 2 % settling time of a single-axis
    setpoint step.
    """
    if step < 0:
        raise InvalidInputError('step must be >= 0, got %r' % step)
    if step == 0:
        return StepResponseMetrics(rise_time_90=0.0, overshoot_pct=0.0, settling_time_2pct=0.0)
    times, xs = simulate_step(cfg, step, duration, dt)
    return response_metrics(times, xs, step)


def response_metrics(times, xs, step):
    reached = np.flatnonzero(xs >= 0.9 * step)
    rise = float(times[reached[0]]) if len(reached) else None
    overshoot = max(0.0, (float(np.max(xs)) - step) / step * 100.0)
    outside = np.flatnonzero(np.abs(xs - step) > 0.02 * step)
    if not len(outside):
        return StepResponseMetrics(rise_time_90=rise, overshoot_pct=overshoot, settling_time_2pct=0.0)
    last = outside[-1]
    if last == len(xs) - 1:
        log.warning("step response of %.3f m did not settle within %.2f s", step, times[-1])
        return StepResponseMetrics(rise_time_90=rise, overshoot_pct=overshoot,
                                   settling_time_2pct=None, settled=False)
    return StepResponseMetrics(rise_time_90=rise, overshoot_pct=overshoot,
                               settling_time_2pct=float(times[last + 1]))


def stopping_distance(t_delta, v0, elapsed=math.inf):
    """ Distance covered while decelerating from ``v0`` with zero position error. """
    return t_delta * v0 * (1.0 - math.exp(-elapsed / t_delta))


def energy_fraction_time(t_delta, alpha):
    """ Time after which only ``alpha`` of the initial kinetic energy remains. """
    return -t_delta * math.log(math.sqrt(alpha))
