# -*- coding: utf-8 -*-
"""
Per-agent high-level controllers.

Both controllers turn one agent's frozen observation snapshot into the
next positional setpoint for its low-level controller: SPC by evaluating
the cost at equally spaced points along the negative gradient, PFC by a
plain gradient step.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from django_flockspc.exceptions import DegenerateGradientError, InvalidInputError
from django_flockspc.model import as_points, as_vec3, cost_terms, gradient_terms

log = logging.getLogger(__name__)

HOLD_THRESHOLD = 1e-9


class ControllerKind(str, Enum):
    SPC = 'SPC'
    PFC = 'PFC'


# per-LLC columns of the simulation parameter table
LLC_PRESETS = {
    'A': {'n_star': 5, 'epsilon': 0.06, 'pfc_gain': 0.007},
    'B': {'n_star': 3, 'epsilon': 0.06, 'pfc_gain': 0.005},
}


@dataclass(frozen=True)
class ControllerConfig:
    kind: ControllerKind = ControllerKind.SPC
    epsilon: float = 0.06
    n_star: int = 5
    pfc_gain: float = 0.007
    dynamic_n: bool = True

    def __post_init__(self):
        object.__setattr__(self, 'kind', ControllerKind(self.kind))
        if not self.epsilon > 0:
            raise InvalidInputError('epsilon must be > 0, got %r' % self.epsilon)
        if int(self.n_star) != self.n_star or self.n_star < 1:
            raise InvalidInputError('n_star must be an integer >= 1, got %r' % self.n_star)
        object.__setattr__(self, 'n_star', int(self.n_star))
        if self.kind is ControllerKind.PFC and not self.pfc_gain > 0:
            raise InvalidInputError('pfc_gain must be > 0 for PFC, got %r' % self.pfc_gain)

    @classmethod
    def preset(cls, kind, llc_family, **overrides):
        values = dict(LLC_PRESETS[getattr(llc_family, 'value', llc_family)])
        values.update(overrides)
        return cls(kind=kind, **values)


@dataclass(frozen=True, eq=False)
class Setpoint:
    """
    Position handed to the low-level controller.

    ``candidates`` and ``candidate_costs`` hold the lookahead set an SPC
    setpoint was chosen from; they are empty for PFC and for holds.
    """
    position: np.ndarray
    holding: bool = False
    candidates: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))
    candidate_costs: tuple = ()


def dynamic_lookahead_count(n_star, dist_to_target):
    """
    Number of lookahead candidates, growing with the distance to the
    target from ``n_star`` up to ``3 * n_star``.
    """
    if n_star < 1:
        raise InvalidInputError('n_star must be >= 1, got %r' % n_star)
    if not dist_to_target >= 0:
        raise InvalidInputError('dist_to_target must be >= 0, got %r' % dist_to_target)
    factor = max(1.0, min(1.5 * (dist_to_target + 0.5), 3.0))
    # rounding keeps 5 * 1.2000000000000002 from landing on 7
    return int(math.ceil(round(n_star * factor, 9)))


def lookahead_count(p_i, params, cfg):
    if not cfg.dynamic_n or params.target is None:
        return cfg.n_star
    return dynamic_lookahead_count(cfg.n_star, float(np.linalg.norm(p_i - params.target_vec)))


def build_candidate_set(p_i, gradient, epsilon, n):
    """
    ``n`` points spaced ``epsilon`` apart along the negative gradient,
    starting one ``epsilon`` away from ``p_i``.
    """
    p_i = as_vec3(p_i)
    gradient = np.asarray(gradient, dtype=float)
    norm = float(np.linalg.norm(gradient))
    if not norm > 0:
        raise DegenerateGradientError('cannot build a lookahead set along a zero gradient')
    if n < 1:
        raise InvalidInputError('candidate count must be >= 1, got %r' % n)
    direction = -gradient / norm
    steps = epsilon * np.arange(1, n + 1, dtype=float)
    return p_i + steps[:, None] * direction


def spc_setpoint(p_i, neighbors, params, cfg):
    """
    Spatial predictive setpoint: the lowest-cost candidate of the lookahead
    set, nearest candidate first on ties. Holds position on a vanishing
    gradient.
    """
    p_i = as_vec3(p_i)
    others = as_points(neighbors)
    gradient = gradient_terms(p_i, others, params).total
    if np.linalg.norm(gradient) < HOLD_THRESHOLD:
        return Setpoint(position=p_i.copy(), holding=True)

    candidates = build_candidate_set(p_i, gradient, cfg.epsilon, lookahead_count(p_i, params, cfg))
    costs = tuple(cost_terms(candidate, others, params).total for candidate in candidates)
    best = int(np.argmin(costs))
    return Setpoint(position=candidates[best].copy(), candidates=candidates, candidate_costs=costs)


def pfc_setpoint(p_i, neighbors, params, cfg):
    """ Potential-field setpoint: one gain-scaled step down the raw gradient. """
    p_i = as_vec3(p_i)
    gradient = gradient_terms(p_i, as_points(neighbors), params).total
    if np.linalg.norm(gradient) < HOLD_THRESHOLD:
        return Setpoint(position=p_i.copy(), holding=True)
    return Setpoint(position=p_i - cfg.pfc_gain * gradient)


SETPOINT_FUNCTIONS = {
    ControllerKind.SPC: spc_setpoint,
    ControllerKind.PFC: pfc_setpoint,
}


def compute_setpoint(p_i, neighbors, params, cfg):
    return SETPOINT_FUNCTIONS[cfg.kind](p_i, neighbors, params, cfg)
