# -*- coding: utf-8 -*-
"""
Flock quality metrics and run verdicts.

All metrics are taken on true positions. ``clear_obj`` is the xy distance
from a drone to an obstacle centre; the obstacle and drone radii live in
``clear_thr`` rather than in the metric.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from statistics import median
from typing import Optional

import numpy as np
from django.template.loader import render_to_string

from django_flockspc.exceptions import EmptyWindowError, InvalidInputError

log = logging.getLogger(__name__)

# slack when comparing sample times with the formation time
_TIME_TOL = 1e-9


@dataclass(frozen=True)
class MetricsSample:
    time: float
    dist_min: Optional[float]
    comp_max: float
    clear_obj: Optional[float]


@dataclass(frozen=True)
class Thresholds:
    dist_thr: float
    comp_thr: float
    clear_thr: float

    def __post_init__(self):
        for name in ('dist_thr', 'comp_thr', 'clear_thr'):
            if not getattr(self, name) >= 0:
                raise InvalidInputError('%s must be >= 0, got %r' % (name, getattr(self, name)))


def thresholds_from_geometry(r_drone, r_safety, r_k, comp_thr):
    for name, value in (('r_drone', r_drone), ('r_safety', r_safety), ('r_k', r_k)):
        if not value >= 0:
            raise InvalidInputError('%s must be >= 0, got %r' % (name, value))
    return Thresholds(dist_thr=2.0 * r_drone + r_safety,
                      comp_thr=comp_thr,
                      clear_thr=r_drone + r_k + r_safety)


def thresholds_for(cfg):
    """ Thresholds of a scenario; ``clear_thr`` uses its largest obstacle. """
    r_k = max((o.radius for o in cfg.obstacles), default=0.0)
    return thresholds_from_geometry(cfg.r_drone, cfg.r_safety, r_k, cfg.comp_thr)


def compute_metrics(true_positions, obstacles, time=0.0):
    """
    ``dist_min`` over all agent pairs, ``comp_max`` against the flock
    centroid and ``clear_obj`` against every obstacle centre.
    ``dist_min`` is None below two agents, ``clear_obj`` without obstacles.
    """
    positions = np.asarray(true_positions, dtype=float).reshape(-1, 3)
    count = len(positions)
    if not count:
        raise InvalidInputError('metrics need at least one agent')
    x, y, z = positions[:, 0], positions[:, 1], positions[:, 2]

    dist_min = None
    if count > 1:
        i, j = np.triu_indices(count, k=1)
        dx, dy, dz = x[i] - x[j], y[i] - y[j], z[i] - z[j]
        dist_min = float(np.min(np.sqrt(dx * dx + dy * dy + dz * dz)))

    if np.all(positions == positions[0]):
        comp_max = 0.0
    else:
        cx, cy, cz = positions.sum(axis=0) / count
        dx, dy, dz = x - cx, y - cy, z - cz
        comp_max = float(np.max(np.sqrt(dx * dx + dy * dy + dz * dz)))

    clear_obj = None
    if len(obstacles):
        centers = np.array([o.center_xy for o in obstacles])
        dx = x[:, None] - centers[None, :, 0]
        dy = y[:, None] - centers[None, :, 1]
        clear_obj = float(np.min(np.sqrt(dx * dx + dy * dy)))
    return MetricsSample(time=time, dist_min=dist_min, comp_max=comp_max, clear_obj=clear_obj)


def metrics_series(trace):
    """ One :class:`MetricsSample` per control tick of ``trace``. """
    obstacles = trace.cfg.obstacles
    return [compute_metrics(record.positions, obstacles, record.time) for record in trace.records]


@dataclass(frozen=True)
class RunSummary:
    dist_min: Optional[float]
    comp_max: float
    clear_obj: Optional[float]
    dist_ok: Optional[bool]
    comp_ok: bool
    clear_ok: Optional[bool]
    thresholds: Thresholds
    samples: int
    agent_count: int = 0
    obstacle_count: int = 0
    controller: str = ''
    llc_family: str = ''
    seed: int = 0
    scenario: str = ''
    r_h: float = math.inf

    @property
    def passed(self):
        return all(v is not False for v in (self.dist_ok, self.comp_ok, self.clear_ok))

    @property
    def cell(self):
        return (self.agent_count, self.obstacle_count, self.r_h, self.controller, self.llc_family)

    def to_dict(self):
        data = asdict(self)
        data['r_h'] = None if math.isinf(self.r_h) else self.r_h
        data['passed'] = self.passed
        return data


def summarize_samples(samples, thresholds, formation_time, **identifiers):
    """
    Aggregate the samples taken at or after ``formation_time``. Every
    verdict is a strict inequality; a metric exactly on its threshold fails.
    """
    window = [s for s in samples if s.time >= formation_time - _TIME_TOL]
    if not window:
        raise EmptyWindowError('no metric samples at or after t=%.3f s' % formation_time)
    dists = [s.dist_min for s in window if s.dist_min is not None]
    clears = [s.clear_obj for s in window if s.clear_obj is not None]
    dist_min = min(dists) if dists else None
    comp_max = max(s.comp_max for s in window)
    clear_obj = min(clears) if clears else None
    return RunSummary(
        dist_min=dist_min,
        comp_max=comp_max,
        clear_obj=clear_obj,
        dist_ok=None if dist_min is None else dist_min > thresholds.dist_thr,
        comp_ok=comp_max < thresholds.comp_thr,
        clear_ok=None if clear_obj is None else clear_obj > thresholds.clear_thr,
        thresholds=thresholds,
        samples=len(window),
        **identifiers
    )


def aggregate(trace, thresholds, formation_time):
    cfg = trace.cfg
    if not trace.duration > formation_time:
        raise EmptyWindowError('trace ends at %.3f s, before the formation time %.3f s'
                               % (trace.duration, formation_time))
    summary = summarize_samples(
        metrics_series(trace), thresholds, formation_time,
        agent_count=cfg.agent_count,
        obstacle_count=len(cfg.obstacles),
        controller=cfg.controller.kind.value,
        llc_family=cfg.llc.family.value,
        seed=cfg.seed,
        scenario=cfg.name,
        r_h=cfg.r_h,
    )
    if not summary.passed:
        log.warning("%s seed %d violates a threshold: dist_min=%s comp_max=%.3f clear_obj=%s",
                    cfg.name, cfg.seed, summary.dist_min, summary.comp_max, summary.clear_obj)
    return summary


def summarize_run(trace):
    """ :func:`aggregate` with the thresholds and formation time of the trace's scenario. """
    return aggregate(trace, thresholds_for(trace.cfg), trace.cfg.formation_time)


@dataclass(frozen=True)
class SeedStatistics:
    """ Worst case, minimum and median of each metric across the seeds of one cell. """
    summaries: tuple

    def _values(self, name):
        return [getattr(s, name) for s in self.summaries if getattr(s, name) is not None]

    def _verdicts(self, name):
        verdicts = [getattr(s, name) for s in self.summaries]
        if all(v is None for v in verdicts):
            return None
        return all(v is not False for v in verdicts)

    def worst(self):
        dists, comps, clears = (self._values(n) for n in ('dist_min', 'comp_max', 'clear_obj'))
        return {
            'dist_min': min(dists) if dists else None,
            'comp_max': max(comps) if comps else None,
            'clear_obj': min(clears) if clears else None,
            'dist_ok': self._verdicts('dist_ok'),
            'comp_ok': self._verdicts('comp_ok'),
            'clear_ok': self._verdicts('clear_ok'),
        }

    def to_dict(self):
        first = self.summaries[0]
        data = {
            'agent_count': first.agent_count,
            'obstacle_count': first.obstacle_count,
            'r_h': None if math.isinf(first.r_h) else first.r_h,
            'controller': first.controller,
            'llc_family': first.llc_family,
            'seeds': [s.seed for s in self.summaries],
            'worst': self.worst(),
        }
        for name in ('dist_min', 'comp_max', 'clear_obj'):
            values = self._values(name)
            data[name] = {'min': min(values), 'median': median(values)} if values else None
        return data


def seed_statistics(summaries):
    """ :class:`SeedStatistics` per table cell, in first-seen order. """
    cells = {}
    for summary in summaries:
        cells.setdefault(summary.cell, []).append(summary)
    return {key: SeedStatistics(summaries=tuple(group)) for key, group in cells.items()}


def render_markdown_table(summaries):
    """
    Markdown table with one row per flock size and obstacle count and a
    dist_min / comp_max / clear_obj column triple per controller and LLC.
    Cells show the worst case over seeds.
    """
    stats = seed_statistics(summaries)
    rows_keys = sorted({key[:3] for key in stats})
    columns = sorted({key[3:] for key in stats})
    rows = []
    for row_key in rows_keys:
        cells = []
        for column in columns:
            cell = stats.get(row_key + column)
            cells.append(cell.worst() if cell is not None else None)
        rows.append({'agent_count': row_key[0], 'obstacle_count': row_key[1],
                     'r_h': row_key[2], 'cells': cells})
    context = {
        'columns': [{'controller': c, 'llc_family': f} for c, f in columns],
        'rows': rows,
        'show_radius': len({key[2] for key in rows_keys}) > 1,
    }
    return render_to_string('flockspc/metrics_table.md', context)
