# -*- coding: utf-8 -*-
"""
Experiment grids: every combination of flock size, obstacle layout,
controller, LLC family, seed and (optionally) neighbourhood radius.
"""
from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

from django.core.exceptions import ValidationError

from django_flockspc.config import load_scenario
from django_flockspc.controller import ControllerConfig, ControllerKind
from django_flockspc.engine import run_scenario
from django_flockspc.metrics import summarize_run
from django_flockspc.plant import LLCConfig, LLCFamily
from django_flockspc.settings import FLOCKSPC_THREADS

log = logging.getLogger(__name__)

_LIST_KEYS = ('flock_sizes', 'obstacle_scenarios', 'controllers', 'llc_families', 'seeds')
_OPTIONAL_KEYS = ('neighborhood_radii', 'duration', 'noise_sigma')


@dataclass(frozen=True)
class SweepSpec:
    flock_sizes: Tuple[int, ...]
    obstacle_scenarios: Tuple[str, ...]
    controllers: Tuple[ControllerKind, ...]
    llc_families: Tuple[LLCFamily, ...]
    seeds: Tuple[int, ...]
    neighborhood_radii: Optional[Tuple[float, ...]] = None
    duration: Optional[float] = None
    noise_sigma: Optional[float] = None

    @property
    def size(self):
        radii = len(self.neighborhood_radii) if self.neighborhood_radii else 1
        return (len(self.flock_sizes) * len(self.obstacle_scenarios) * len(self.controllers)
                * len(self.llc_families) * len(self.seeds) * radii)


def sweep_from_dict(data):
    if not isinstance(data, dict):
        raise ValidationError('a sweep spec must be a JSON object')
    errors = {}
    for key in sorted(set(data) - set(_LIST_KEYS) - set(_OPTIONAL_KEYS)):
        errors[key] = ['unknown key']
    values = {}
    for key in _LIST_KEYS + ('neighborhood_radii',):
        if key not in data:
            if key in _LIST_KEYS:
                errors[key] = ['is required']
            continue
        if not isinstance(data[key], list) or not data[key]:
            errors[key] = ['must be a non-empty list']
            continue
        values[key] = tuple(data[key])

    converters = {
        'flock_sizes': _positive_int,
        'controllers': ControllerKind,
        'llc_families': LLCFamily,
        'seeds': _seed,
        'obstacle_scenarios': str,
        # null stands for an unlimited neighbourhood
        'neighborhood_radii': lambda r: math.inf if r is None else float(r),
    }
    for key, items in list(values.items()):
        try:
            values[key] = tuple(converters[key](item) for item in items)
        except (TypeError, ValueError) as exc:
            errors[key] = [str(exc)]
    for key in ('duration', 'noise_sigma'):
        if data.get(key) is not None:
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0:
                errors[key] = ['must be a number >= 0']
            else:
                values[key] = float(value)
    if errors:
        raise ValidationError(errors)
    return SweepSpec(**values)


def _positive_int(value):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValueError('flock sizes must be integers >= 1, got %r' % (value,))
    return value


def _seed(value):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError('seeds must be integers >= 0, got %r' % (value,))
    return value


def build_runs(spec):
    """
    Scenario configs of the grid. Each obstacle scenario is the base of its
    runs; the per-LLC controller preset replaces the base controller values.
    """
    radii = spec.neighborhood_radii or (None,)
    runs = []
    for name in spec.obstacle_scenarios:
        base = load_scenario(name)
        grid = itertools.product(spec.flock_sizes, spec.controllers, spec.llc_families,
                                 radii, spec.seeds)
        for size, kind, family, r_h, seed in grid:
            changes = {
                'name': run_name(base.name, size, kind, family, seed, r_h),
                'agent_count': size,
                'controller': ControllerConfig.preset(kind, family,
                                                      dynamic_n=base.controller.dynamic_n),
                'llc': base.llc if base.llc.family is family else LLCConfig.defaults(family),
                'seed': seed,
            }
            if r_h is not None:
                changes['r_h'] = r_h
            if spec.duration is not None:
                changes['duration'] = spec.duration
            if spec.noise_sigma is not None:
                changes['noise_sigma'] = spec.noise_sigma
            runs.append(base.with_overrides(**changes))
    return runs


def run_name(scenario, size, kind, family, seed, r_h=None):
    name = '%s_n%d_%s_%s_s%d' % (scenario, size, ControllerKind(kind).value,
                                 LLCFamily(family).value, seed)
    if r_h is not None:
        name += '_rhinf' if math.isinf(r_h) else '_rh%g' % r_h
    return name


def _run_one(cfg):
    return cfg, summarize_run(run_scenario(cfg, workers=1))


def run_sweep(spec, workers=None):
    """
    Roll out and summarize every run of ``spec``. Results keep the order of
    :func:`build_runs` whatever the number of workers.
    """
    runs = build_runs(spec)
    workers = FLOCKSPC_THREADS if workers is None else workers
    log.info("sweep of %d runs on %d worker(s)", len(runs), workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(_run_one, runs))
    return [_run_one(cfg) for cfg in runs]
