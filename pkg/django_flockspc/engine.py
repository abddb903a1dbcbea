# -*- coding: utf-8 -*-
"""
Fixed-timestep flock world.

The world advances in physics steps of ``physics_dt``. Every
``control_period`` each agent receives a noisy, neighbourhood-filtered
snapshot of the flock and turns it into a setpoint; on every physics step
each agent's low-level controller flies towards its latest setpoint.

Noise comes from counter-based Philox streams keyed by ``(seed, tick,
agent)``, so a rollout is bit-identical whatever the number of worker
threads evaluating the agents of a tick.
"""
from __future__ import annotations

import csv
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from django.core.exceptions import ValidationError

from django_flockspc.controller import compute_setpoint
from django_flockspc.exceptions import InvalidInputError
from django_flockspc.model import CostBreakdown, cost_terms, gradient_terms
from django_flockspc.plant import PlantState, integrate_plant, llc_tilt
from django_flockspc.settings import FLOCKSPC_SPAWN_MAX_ATTEMPTS, FLOCKSPC_THREADS

log = logging.getLogger(__name__)

# second SeedSequence word of the spawn stream; tick streams use three words
SPAWN_STREAM = 0x5BA3

TRACE_COLUMNS = (
    'time_s', 'agent', 'px', 'py', 'pz', 'vx', 'vy', 'vz', 'ox', 'oy', 'oz',
    'spx', 'spy', 'spz', 'cost_total', 'cost_coh', 'cost_sep', 'cost_tar', 'cost_obs',
    'grad_norm',
)


def noise_stream(seed, tick, agent):
    """ The observation noise generator of ``agent`` at control tick ``tick``. """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, tick, agent])))


@dataclass(frozen=True, eq=False)
class Observation:
    """
    What one agent knows at a control tick: a noisy reading of itself and
    of the agents strictly inside its neighbourhood radius.
    """
    agent: int
    position: np.ndarray
    neighbor_ids: Tuple[int, ...]
    neighbors: np.ndarray

    def entries(self):
        """ ``(id, position)`` pairs, self first. """
        return [(self.agent, self.position)] + list(zip(self.neighbor_ids, self.neighbors))


def observe(true_positions, agent, sigma, rng, r_h=math.inf):
    """
    Noisy observation of the flock from ``agent``'s point of view.

    The neighbourhood is selected on true positions with a strict ``< r_h``;
    noise is then added independently per axis. One draw is made for every
    agent whatever the radius, so the stream position never depends on the
    geometry.
    """
    if not sigma >= 0:
        raise InvalidInputError('sigma must be >= 0, got %r' % sigma)
    positions = np.asarray(true_positions, dtype=float)
    noisy = positions
    if sigma > 0:
        noisy = positions + rng.normal(0.0, sigma, size=positions.shape)
    dist = np.linalg.norm(positions - positions[agent], axis=1)
    mask = dist < r_h
    mask[agent] = False
    ids = tuple(int(j) for j in np.flatnonzero(mask))
    return Observation(agent=agent, position=noisy[agent].copy(), neighbor_ids=ids,
                       neighbors=noisy[mask].copy())


@dataclass(frozen=True, eq=False)
class Decision:
    setpoint: object
    cost: CostBreakdown
    grad_norm: float


def decide(observation, params, controller):
    """
    Setpoint, cost and gradient norm of one agent. Reads nothing but the
    agent's own observation.
    """
    setpoint = compute_setpoint(observation.position, observation.neighbors, params, controller)
    cost = cost_terms(observation.position, observation.neighbors, params)
    gradient = gradient_terms(observation.position, observation.neighbors, params).total
    return Decision(setpoint=setpoint, cost=cost, grad_norm=float(np.linalg.norm(gradient)))


@dataclass(frozen=True, eq=False)
class TraceRecord:
    time: float
    positions: np.ndarray
    velocities: np.ndarray
    observed: np.ndarray
    setpoints: np.ndarray
    decisions: Tuple[object, ...]
    costs: Tuple[CostBreakdown, ...]
    grad_norms: np.ndarray
    neighbor_counts: Tuple[int, ...]
    target: Optional[Tuple[float, float, float]]


@dataclass(eq=False)
class Trace:
    cfg: object
    records: List[TraceRecord] = field(default_factory=list)

    @property
    def seed(self):
        return self.cfg.seed

    @property
    def times(self):
        return np.array([r.time for r in self.records])

    @property
    def positions(self):
        """ True positions, shape ``(ticks, agents, 3)``. """
        return np.stack([r.positions for r in self.records])

    @property
    def duration(self):
        return self.records[-1].time if self.records else 0.0

    def rows(self):
        for record in self.records:
            for agent in range(len(record.positions)):
                cost = record.costs[agent]
                yield [record.time, agent, *record.positions[agent], *record.velocities[agent],
                       *record.observed[agent], *record.setpoints[agent], cost.total,
                       cost.coh, cost.sep, cost.tar, cost.obs, record.grad_norms[agent]]


def write_trace_csv(trace, path):
    with open(path, 'w', newline='', encoding='utf-8') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(TRACE_COLUMNS)
        for row in trace.rows():
            writer.writerow([_fmt(row[0]), row[1]] + [_fmt(v) for v in row[2:]])


def _fmt(value):
    return repr(float(value))


def spawn_positions(cfg):
    """
    Start positions: the explicit list of the scenario, or uniform samples
    in the spawn box kept at least ``min_spacing`` apart.
    """
    spawn = cfg.spawn
    if spawn.explicit:
        return np.array(spawn.positions, dtype=float)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, SPAWN_STREAM])))
    low, high = np.array(spawn.low), np.array(spawn.high)
    positions = []
    attempts = 0
    while len(positions) < cfg.agent_count:
        if attempts >= FLOCKSPC_SPAWN_MAX_ATTEMPTS:
            raise ValidationError({'spawn': [
                'could not place %d agents %.3f m apart in the spawn box after %d attempts'
                % (cfg.agent_count, spawn.min_spacing, attempts)]})
        attempts += 1
        candidate = rng.uniform(low, high)
        if all(np.linalg.norm(candidate - p) >= spawn.min_spacing for p in positions):
            positions.append(candidate)
    if attempts > 10 * cfg.agent_count:
        log.warning("spawn box of %s needed %d attempts for %d agents",
                    cfg.name, attempts, cfg.agent_count)
    return np.array(positions)


@dataclass(eq=False)
class World:
    cfg: object
    plants: List[PlantState]
    setpoints: np.ndarray
    step: int = 0
    tick_index: int = 0
    history: deque = field(default_factory=deque)
    trace: Optional[Trace] = None
    executor: Optional[ThreadPoolExecutor] = None
    _params: dict = field(default_factory=dict)

    @classmethod
    def create(cls, cfg, executor=None):
        start = spawn_positions(cfg)
        plants = [PlantState(position=p) for p in start]
        return cls(cfg=cfg, plants=plants, setpoints=start.copy(),
                   history=deque(maxlen=cfg.observation_delay + 1),
                   trace=Trace(cfg=cfg), executor=executor)

    @property
    def time(self):
        return self.step * self.cfg.physics_dt

    @property
    def positions(self):
        return np.array([plant.position for plant in self.plants])

    @property
    def velocities(self):
        return np.array([plant.velocity for plant in self.plants])

    def cost_params(self, target):
        if target not in self._params:
            self._params[target] = self.cfg.cost.with_target(target)
        return self._params[target]

    def control_update(self):
        cfg = self.cfg
        positions = self.positions
        self.history.append(positions)
        # oldest kept snapshot; shorter than the delay during the first ticks
        snapshot = self.history[0]
        target = cfg.active_target(self.time)
        params = self.cost_params(target)
        observations = [
            observe(snapshot, agent, cfg.noise_sigma,
                    noise_stream(cfg.seed, self.tick_index, agent), cfg.r_h)
            for agent in range(cfg.agent_count)
        ]

        def run(observation):
            return decide(observation, params, cfg.controller)

        if self.executor is not None:
            decisions = list(self.executor.map(run, observations))
        else:
            decisions = [run(observation) for observation in observations]

        for agent, decision in enumerate(decisions):
            if not decision.setpoint.holding:
                self.setpoints[agent] = decision.setpoint.position
        log.debug("tick %d t=%.2f target=%s", self.tick_index, self.time, target)

        self.trace.records.append(TraceRecord(
            time=self.time,
            positions=positions,
            velocities=self.velocities,
            observed=np.array([o.position for o in observations]),
            setpoints=self.setpoints.copy(),
            decisions=tuple(d.setpoint for d in decisions),
            costs=tuple(d.cost for d in decisions),
            grad_norms=np.array([d.grad_norm for d in decisions]),
            neighbor_counts=tuple(len(o.neighbor_ids) for o in observations),
            target=target,
        ))
        self.tick_index += 1

    def physics_step(self):
        cfg = self.cfg
        dt = cfg.physics_dt
        for agent, plant in enumerate(self.plants):
            setpoint = self.setpoints[agent]
            tilt = llc_tilt(plant, setpoint[:2], cfg.llc, dt)
            self.plants[agent] = integrate_plant(plant, tilt, setpoint[2], cfg.llc, dt)
        self.step += 1


def tick(world):
    """
    Advance ``world`` by one physics step, preceded by a control update when
    the step falls on the control cadence.
    """
    if world.step % world.cfg.steps_per_control == 0:
        world.control_update()
    world.physics_step()
    return world


def run_scenario(cfg, workers=None):
    """ Full rollout of ``cfg``; one trace record per control tick. """
    workers = FLOCKSPC_THREADS if workers is None else workers
    total_steps = cfg.control_ticks * cfg.steps_per_control
    log.info("running %s: %d agents, %s/%s, seed %d, %d steps",
             cfg.name, cfg.agent_count, cfg.controller.kind.value, cfg.llc.family.value,
             cfg.seed, total_steps)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            world = _roll_out(World.create(cfg, executor=executor), total_steps)
    else:
        world = _roll_out(World.create(cfg), total_steps)
    log.info("finished %s after %.2f simulated seconds", cfg.name, world.time)
    return world.trace


def _roll_out(world, total_steps):
    while world.step < total_steps:
        tick(world)
    return world


def audit_decisions(trace):
    """
    Setpoints that are not the lowest-cost member of their candidate set.
    Returns a list of ``(time, agent)`` pairs; empty for a clean rollout.
    """
    violations = []
    for record in trace.records:
        for agent, setpoint in enumerate(record.decisions):
            if not len(setpoint.candidates):
                continue
            costs = np.asarray(setpoint.candidate_costs)
            chosen = np.all(setpoint.candidates == setpoint.position, axis=1)
            if not np.any(chosen) or np.any(costs < costs[chosen].min()):
                violations.append((record.time, agent))
    return violations
