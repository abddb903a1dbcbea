# -*- coding: utf-8 -*-
"""
Scenario configuration: the dataclass the engine runs, its JSON schema and
the lookup of named scenarios.

Scenario files mirror :class:`ScenarioConfig` field for field. Unknown keys
are rejected at every nesting level and every problem is reported against
the dotted name of the field it concerns (``cost.w_sep``, ``spawn.low``).
"""
from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from django.core.exceptions import NON_FIELD_ERRORS, ValidationError

from django_flockspc.controller import ControllerConfig, ControllerKind
from django_flockspc.exceptions import FlockError
from django_flockspc.model import CostParams, Obstacle
from django_flockspc.plant import LLCConfig, LLCFamily
from django_flockspc.settings import (FLOCKSPC_COMP_THR, FLOCKSPC_CONTROL_PERIOD,
                                      FLOCKSPC_FORMATION_TIME, FLOCKSPC_PHYSICS_DT,
                                      FLOCKSPC_R_SAFETY, FLOCKSPC_SCENARIO_DIRS,
                                      FLOCKSPC_SPAWN_MIN_SPACING)

log = logging.getLogger(__name__)

SCENARIO_DIR = Path(__file__).resolve().parent / 'scenarios'

MAX_SEED = 2 ** 64

# relative tolerance for "control_period is a multiple of physics_dt"
_CADENCE_TOL = 1e-9


@dataclass(frozen=True)
class Waypoint:
    time: float
    target: Tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class Spawn:
    """
    Either an axis-aligned box sampled with a minimum pairwise spacing, or
    explicit start positions.
    """
    low: Tuple[float, float, float] = (-1.0, -1.0, 1.0)
    high: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    positions: Optional[np.ndarray] = None
    min_spacing: float = FLOCKSPC_SPAWN_MIN_SPACING

    @property
    def explicit(self):
        return self.positions is not None


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    name: str = 'scenario'
    agent_count: int = 9
    spawn: Spawn = field(default_factory=Spawn)
    obstacles: Tuple[Obstacle, ...] = ()
    waypoints: Tuple[Waypoint, ...] = ()
    cost: CostParams = field(default_factory=CostParams)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    llc: LLCConfig = field(default_factory=LLCConfig)
    r_h: float = math.inf
    noise_sigma: float = 0.1
    physics_dt: float = FLOCKSPC_PHYSICS_DT
    control_period: float = FLOCKSPC_CONTROL_PERIOD
    duration: float = 60.0
    seed: int = 0
    observation_delay: int = 0
    formation_time: float = FLOCKSPC_FORMATION_TIME
    r_safety: float = FLOCKSPC_R_SAFETY
    comp_thr: float = FLOCKSPC_COMP_THR

    def __post_init__(self):
        object.__setattr__(self, 'obstacles', tuple(self.obstacles))
        object.__setattr__(self, 'waypoints', tuple(self.waypoints))
        object.__setattr__(self, 'cost', replace(self.cost, obstacles=self.obstacles, target=None))
        self.clean()

    def clean(self):
        errors = {}

        def add(name, message):
            errors.setdefault(name, []).append(message)

        if int(self.agent_count) != self.agent_count or self.agent_count < 1:
            add('agent_count', 'must be an integer >= 1')
        if not self.physics_dt > 0:
            add('physics_dt', 'must be > 0')
        elif not self.control_period >= self.physics_dt:
            add('control_period', 'must be >= physics_dt')
        else:
            ratio = self.control_period / self.physics_dt
            if abs(ratio - round(ratio)) > _CADENCE_TOL * ratio:
                add('control_period', 'must be an integer multiple of physics_dt')
        if not self.duration > 0:
            add('duration', 'must be > 0')
        if not self.noise_sigma >= 0:
            add('noise_sigma', 'must be >= 0')
        if not self.r_h > 0:
            add('r_h', 'must be > 0 (null for an unlimited neighbourhood)')
        if int(self.seed) != self.seed or not 0 <= self.seed < MAX_SEED:
            add('seed', 'must be an integer in [0, 2**64)')
        if int(self.observation_delay) != self.observation_delay or self.observation_delay < 0:
            add('observation_delay', 'must be an integer >= 0')
        if not self.formation_time >= 0:
            add('formation_time', 'must be >= 0')
        if not self.r_safety >= 0:
            add('r_safety', 'must be >= 0')
        if not self.comp_thr >= 0:
            add('comp_thr', 'must be >= 0')
        times = [w.time for w in self.waypoints]
        if any(b < a for a, b in zip(times, times[1:])):
            add('waypoints', 'times must be non-decreasing')
        if any(t < 0 for t in times):
            add('waypoints', 'times must be >= 0')
        if self.spawn.explicit and len(self.spawn.positions) != self.agent_count:
            add('spawn.positions', 'expected %d positions, got %d'
                % (self.agent_count, len(self.spawn.positions)))
        if not self.spawn.explicit:
            if any(h < lo for lo, h in zip(self.spawn.low, self.spawn.high)):
                add('spawn.high', 'must be >= spawn.low on every axis')
            if not self.spawn.min_spacing >= 0:
                add('spawn.min_spacing', 'must be >= 0')
        if errors:
            raise ValidationError(errors)

    @property
    def steps_per_control(self):
        return int(round(self.control_period / self.physics_dt))

    @property
    def control_ticks(self):
        return int(round(self.duration / self.control_period))

    @property
    def r_drone(self):
        return self.cost.r_drone

    def active_target(self, time):
        """ Target of the last waypoint whose time is not after ``time``. """
        target = None
        for waypoint in self.waypoints:
            if waypoint.time <= time + 1e-9:
                target = waypoint.target
            else:
                break
        return target

    def with_overrides(self, **changes):
        return replace(self, **changes)


_TOP_LEVEL_KEYS = {
    'name', 'agent_count', 'spawn', 'obstacles', 'waypoints', 'cost', 'controller',
    'llc', 'r_h', 'noise_sigma', 'physics_dt', 'control_period', 'duration', 'seed',
    'observation_delay', 'formation_time', 'r_safety', 'comp_thr',
}
_SPAWN_KEYS = {'low', 'high', 'positions', 'min_spacing'}
_OBSTACLE_KEYS = {'center_xy', 'radius'}
_WAYPOINT_KEYS = {'time', 'target'}
_COST_KEYS = {'w_coh', 'w_sep', 'w_tar', 'w_obs', 'r_drone', 'zero_hat'}
_CONTROLLER_KEYS = {'kind', 'epsilon', 'n_star', 'pfc_gain', 'dynamic_n'}
_LLC_KEYS = {'family', 'k_v', 'k_p', 'k_i', 'tilt_min', 'tilt_max', 't_delta',
             'z_time_constant', 'z_accel_limit'}


class _Collector(object):
    """ Gathers field-level messages while a scenario document is decoded. """

    def __init__(self):
        self.errors = {}

    def add(self, name, message):
        self.errors.setdefault(name, []).append(str(message))

    def mapping(self, value, name, allowed):
        if not isinstance(value, dict):
            self.add(name or NON_FIELD_ERRORS, 'must be an object')
            return {}
        for key in sorted(set(value) - allowed):
            self.add('%s.%s' % (name, key) if name else key, 'unknown key')
        return {k: v for k, v in value.items() if k in allowed}

    def sequence(self, value, name):
        if not isinstance(value, list):
            self.add(name, 'must be a list')
            return []
        return value

    def build(self, name, factory, *args, **kwargs):
        try:
            return factory(*args, **kwargs)
        except (FlockError, ValueError, TypeError) as exc:
            self.add(name, exc)
        return None


def scenario_from_dict(data):
    """
    Build a :class:`ScenarioConfig` from a decoded scenario document.

    Controller values absent from the document come from the preset of the
    scenario's LLC family.
    """
    collector = _Collector()
    data = collector.mapping(data, '', _TOP_LEVEL_KEYS)
    kwargs = {k: data[k] for k in ('name', 'agent_count', 'noise_sigma', 'physics_dt',
                                   'control_period', 'duration', 'seed', 'observation_delay',
                                   'formation_time', 'r_safety', 'comp_thr') if k in data}
    for key, value in list(kwargs.items()):
        if key != 'name' and (isinstance(value, bool) or not isinstance(value, (int, float))):
            collector.add(key, 'must be a number')
            del kwargs[key]
    if 'r_h' in data:
        r_h = data['r_h']
        # null stands for an unlimited neighbourhood
        if r_h is None:
            kwargs['r_h'] = math.inf
        elif isinstance(r_h, bool) or not isinstance(r_h, (int, float)):
            collector.add('r_h', 'must be a number or null')
        else:
            kwargs['r_h'] = r_h

    if 'spawn' in data:
        spawn = collector.build('spawn', _spawn_from_dict, data['spawn'], collector)
        if spawn is not None:
            kwargs['spawn'] = spawn

    obstacles = []
    for index, item in enumerate(collector.sequence(data.get('obstacles', []), 'obstacles')):
        name = 'obstacles.%d' % index
        item = collector.mapping(item, name, _OBSTACLE_KEYS)
        obstacle = collector.build(name, Obstacle, **item)
        if obstacle is not None:
            obstacles.append(obstacle)
    kwargs['obstacles'] = obstacles

    waypoints = []
    for index, item in enumerate(collector.sequence(data.get('waypoints', []), 'waypoints')):
        name = 'waypoints.%d' % index
        item = collector.mapping(item, name, _WAYPOINT_KEYS)
        if set(item) != _WAYPOINT_KEYS:
            collector.add(name, 'requires time and target')
            continue
        waypoint = collector.build(name, _waypoint_from_dict, item)
        if waypoint is not None:
            waypoints.append(waypoint)
    kwargs['waypoints'] = waypoints

    cost = collector.build('cost', CostParams,
                           **collector.mapping(data.get('cost', {}), 'cost', _COST_KEYS))
    if cost is not None:
        kwargs['cost'] = cost

    llc_values = collector.mapping(data.get('llc', {}), 'llc', _LLC_KEYS)
    llc = collector.build('llc', LLCConfig.defaults, llc_values.pop('family', LLCFamily.A),
                          **llc_values)
    if llc is not None:
        kwargs['llc'] = llc

    controller_values = collector.mapping(data.get('controller', {}), 'controller', _CONTROLLER_KEYS)
    family = llc.family if llc is not None else LLCFamily.A
    controller = collector.build('controller', ControllerConfig.preset,
                                 controller_values.pop('kind', ControllerKind.SPC), family,
                                 **controller_values)
    if controller is not None:
        kwargs['controller'] = controller

    if collector.errors:
        raise ValidationError(collector.errors)
    return ScenarioConfig(**kwargs)


def _vec3_tuple(value):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError('must be a finite 3D point')
    return tuple(arr.tolist())


def _waypoint_from_dict(item):
    if isinstance(item['time'], bool) or not isinstance(item['time'], (int, float)):
        raise ValueError('time must be a number')
    return Waypoint(time=float(item['time']), target=_vec3_tuple(item['target']))


def _spawn_from_dict(value, collector):
    value = collector.mapping(value, 'spawn', _SPAWN_KEYS)
    kwargs = {}
    if 'positions' in value:
        positions = np.asarray(value['positions'], dtype=float)
        if positions.ndim != 2 or positions.shape[1] != 3 or not np.all(np.isfinite(positions)):
            raise ValueError('positions must be a list of finite 3D points')
        kwargs['positions'] = positions
    for key in ('low', 'high'):
        if key in value:
            kwargs[key] = _vec3_tuple(value[key])
    if 'min_spacing' in value:
        kwargs['min_spacing'] = float(value['min_spacing'])
    return Spawn(**kwargs)


def scenario_to_dict(cfg):
    """ JSON-ready echo of a scenario, the inverse of :func:`scenario_from_dict`. """
    if cfg.spawn.explicit:
        spawn = {'positions': cfg.spawn.positions.tolist()}
    else:
        spawn = {'low': list(cfg.spawn.low), 'high': list(cfg.spawn.high),
                 'min_spacing': cfg.spawn.min_spacing}
    return {
        'name': cfg.name,
        'agent_count': cfg.agent_count,
        'spawn': spawn,
        'obstacles': [{'center_xy': list(o.center_xy), 'radius': o.radius} for o in cfg.obstacles],
        'waypoints': [{'time': w.time, 'target': list(w.target)} for w in cfg.waypoints],
        'cost': {k: getattr(cfg.cost, k) for k in sorted(_COST_KEYS)},
        'controller': {
            'kind': cfg.controller.kind.value,
            'epsilon': cfg.controller.epsilon,
            'n_star': cfg.controller.n_star,
            'pfc_gain': cfg.controller.pfc_gain,
            'dynamic_n': cfg.controller.dynamic_n,
        },
        'llc': dict({k: getattr(cfg.llc, k) for k in sorted(_LLC_KEYS - {'family'})},
                    family=cfg.llc.family.value),
        'r_h': None if math.isinf(cfg.r_h) else cfg.r_h,
        'noise_sigma': cfg.noise_sigma,
        'physics_dt': cfg.physics_dt,
        'control_period': cfg.control_period,
        'duration': cfg.duration,
        'seed': cfg.seed,
        'observation_delay': cfg.observation_delay,
        'formation_time': cfg.formation_time,
        'r_safety': cfg.r_safety,
        'comp_thr': cfg.comp_thr,
    }


def scenario_search_path():
    return [SCENARIO_DIR] + [Path(d) for d in FLOCKSPC_SCENARIO_DIRS]


def resolve_scenario(name):
    """
    Path of a scenario given either a file path or the bare name of a
    shipped (or ``FLOCKSPC_SCENARIO_DIRS``) scenario.
    """
    candidate = Path(name)
    if candidate.is_file():
        return candidate
    filename = name if name.endswith('.json') else name + '.json'
    for directory in scenario_search_path():
        path = directory / filename
        if path.is_file():
            return path
    raise FileNotFoundError('scenario %r not found in %s'
                            % (name, os.pathsep.join(str(d) for d in scenario_search_path())))


def read_json(path):
    with open(path, encoding='utf-8') as fh:
        return json.load(fh)


def load_scenario(name):
    path = resolve_scenario(name)
    log.debug("loading scenario %s", path)
    data = read_json(path)
    if isinstance(data, dict):
        data.setdefault('name', path.stem)
    return scenario_from_dict(data)


def two_agent_scenario(w_coh, w_sep, r_drone=0.0, duration=30.0, family=LLCFamily.A,
                       separation=2.0):
    """
    Two agents spawned ``separation`` apart on the x axis with noise off,
    no target and no obstacles, flown by SPC.
    """
    half = separation / 2.0
    return ScenarioConfig(
        name='two_agents',
        agent_count=2,
        spawn=Spawn(positions=np.array([[-half, 0.0, 1.0], [half, 0.0, 1.0]])),
        cost=CostParams(w_coh=w_coh, w_sep=w_sep, r_drone=r_drone),
        controller=ControllerConfig.preset(ControllerKind.SPC, family),
        llc=LLCConfig.defaults(family),
        noise_sigma=0.0,
        duration=duration,
        formation_time=0.0,
    )
