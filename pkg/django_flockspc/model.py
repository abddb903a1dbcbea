# -*- coding: utf-8 -*-
"""
Positional flocking cost for a single agent, its closed-form gradient,
a central-difference oracle for that gradient, and the two-agent
equilibrium distance.

Positions are numpy arrays of shape ``(3,)``; neighbour sets are arrays
of shape ``(k, 3)``. Obstacles are infinitely tall cylinders, so only the
xy-projection of a position takes part in the obstacle term.
"""
from __future__ import annotations

import logging
import numbers
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import bisect

from django_flockspc.exceptions import InvalidInputError, NoEquilibriumError

log = logging.getLogger(__name__)

ZERO_HAT = 1e-6

# (p_j - p_i) / |p_j - p_i| when the two points coincide
_COINCIDENT_DIRECTION = np.array([-1.0, 0.0, 0.0])
_COINCIDENT_DIRECTION_XY = _COINCIDENT_DIRECTION[:2]


def as_vec3(value, name='position'):
    """ Return ``value`` as a finite float array of shape (3,). """
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise InvalidInputError(
            '%s must have three components, got shape %s' % (name, arr.shape))
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError('%s must be finite, got %r' % (name, arr.tolist()))
    return arr


def as_points(values, name='neighbors'):
    """ Return ``values`` as a finite float array of shape (k, 3). """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return np.empty((0, 3))
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise InvalidInputError(
            '%s must be a list of 3D points, got shape %s' % (name, arr.shape))
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError('%s must be finite' % name)
    return arr


@dataclass(frozen=True)
class Obstacle:
    center_xy: Tuple[float, float]
    radius: float

    def __post_init__(self):
        center = tuple(float(c) for c in self.center_xy)
        if len(center) != 2 or not all(np.isfinite(center)):
            raise InvalidInputError('obstacle center_xy must be a finite 2D point')
        if not self.radius > 0:
            raise InvalidInputError('obstacle radius must be > 0, got %r' % self.radius)
        object.__setattr__(self, 'center_xy', center)
        object.__setattr__(self, 'radius', float(self.radius))


@dataclass(frozen=True)
class CostParams:
    w_coh: float = 20.0
    w_sep: float = 9.0
    w_tar: float = 150.0
    w_obs: float = 12.0
    r_drone: float = 0.07
    target: Optional[Tuple[float, float, float]] = None
    obstacles: Tuple[Obstacle, ...] = field(default=())
    zero_hat: float = ZERO_HAT

    def __post_init__(self):
        for name in ('w_coh', 'w_sep', 'w_tar', 'w_obs', 'r_drone'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise InvalidInputError('%s must be a number, got %r' % (name, value))
        for name in ('w_coh', 'w_sep', 'w_tar', 'w_obs'):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise InvalidInputError('%s must be >= 0, got %r' % (name, value))
        # r_drone = 0 recovers the unshifted separation term
        if not (np.isfinite(self.r_drone) and self.r_drone >= 0):
            raise InvalidInputError('r_drone must be >= 0, got %r' % self.r_drone)
        if not self.zero_hat > 0:
            raise InvalidInputError('zero_hat must be > 0, got %r' % self.zero_hat)
        if self.target is not None:
            object.__setattr__(self, 'target', tuple(as_vec3(self.target, 'target').tolist()))
        object.__setattr__(self, 'obstacles', tuple(self.obstacles))

    def with_target(self, target):
        return replace(self, target=target)

    @cached_property
    def target_vec(self):
        return None if self.target is None else np.array(self.target)

    @cached_property
    def obstacle_centers(self):
        return np.array([o.center_xy for o in self.obstacles]).reshape(-1, 2)

    @cached_property
    def obstacle_radii(self):
        return np.array([o.radius for o in self.obstacles])


@dataclass(frozen=True)
class CostBreakdown:
    coh: float
    sep: float
    tar: float
    obs: float

    @property
    def total(self):
        return self.coh + self.sep + self.tar + self.obs


@dataclass(frozen=True, eq=False)
class GradientBreakdown:
    coh: np.ndarray
    sep: np.ndarray
    tar: np.ndarray
    obs: np.ndarray

    @property
    def total(self):
        return self.coh + self.sep + self.tar + self.obs


def evaluate_cost(p_i, neighbors, params):
    """
    Cost of agent position ``p_i`` given the observed ``neighbors``.

    Cohesion and separation are averaged over the neighbourhood and vanish
    for an empty one; the target term then uses ``p_i`` alone as the
    centroid.
    """
    return cost_terms(as_vec3(p_i), as_points(neighbors), params)


def cost_terms(p_i, others, params):
    """ Unchecked variant of :func:`evaluate_cost` for validated arrays. """
    coh = sep = tar = obs = 0.0
    count = len(others)
    if count:
        diff = others - p_i
        sq = np.sum(diff * diff, axis=1)
        if params.w_coh:
            coh = params.w_coh * float(np.sum(sq)) / count
        if params.w_sep:
            gap = np.maximum(np.sqrt(sq) - 2.0 * params.r_drone, params.zero_hat)
            sep = params.w_sep * float(np.sum(1.0 / (gap * gap))) / count
    if params.w_tar and params.target is not None:
        centroid = (p_i + np.sum(others, axis=0)) / (count + 1)
        offset = params.target_vec - centroid
        tar = params.w_tar * float(offset @ offset)
    if params.w_obs and params.obstacles:
        diff_xy = p_i[:2] - params.obstacle_centers
        dist = np.sqrt(np.sum(diff_xy * diff_xy, axis=1))
        gap = np.maximum(dist - params.obstacle_radii - params.r_drone, params.zero_hat)
        obs = params.w_obs * float(np.sum(1.0 / (gap * gap))) / len(params.obstacles)
    return CostBreakdown(coh=coh, sep=sep, tar=tar, obs=obs)


def evaluate_gradient(p_i, neighbors, params):
    """
    Closed-form gradient of :func:`evaluate_cost` with respect to ``p_i``.

    Inside the clearance radius of a neighbour or obstacle the clamped gap
    ``zero_hat`` replaces the true gap, so the term stays finite and
    repulsive. At exact coincidence the repulsion points along +x.
    """
    return gradient_terms(as_vec3(p_i), as_points(neighbors), params)


def gradient_terms(p_i, others, params):
    zero = np.zeros(3)
    coh = sep = tar = obs = zero
    count = len(others)
    if count:
        if params.w_coh:
            coh = 2.0 * params.w_coh * (p_i - np.sum(others, axis=0) / count)
        if params.w_sep:
            diff = others - p_i
            dist = np.sqrt(np.sum(diff * diff, axis=1))
            gap = np.maximum(dist - 2.0 * params.r_drone, params.zero_hat)
            unit = _unit_rows(diff, dist, _COINCIDENT_DIRECTION)
            sep = 2.0 * params.w_sep / count * np.sum(unit / (gap ** 3)[:, None], axis=0)
    if params.w_tar and params.target is not None:
        centroid = (p_i + np.sum(others, axis=0)) / (count + 1)
        tar = 2.0 * params.w_tar / (count + 1) * (centroid - params.target_vec)
    if params.w_obs and params.obstacles:
        diff_xy = params.obstacle_centers - p_i[:2]
        dist = np.sqrt(np.sum(diff_xy * diff_xy, axis=1))
        gap = np.maximum(dist - params.obstacle_radii - params.r_drone, params.zero_hat)
        unit = _unit_rows(diff_xy, dist, _COINCIDENT_DIRECTION_XY)
        planar = 2.0 * params.w_obs / len(params.obstacles) * np.sum(unit / (gap ** 3)[:, None], axis=0)
        obs = np.array([planar[0], planar[1], 0.0])
    return GradientBreakdown(coh=coh, sep=sep, tar=tar, obs=obs)


def _unit_rows(diff, dist, fallback):
    safe = np.where(dist > 0, dist, 1.0)
    unit = diff / safe[:, None]
    if np.any(dist == 0):
        unit[dist == 0] = fallback
    return unit


def finite_difference_gradient(p_i, neighbors, params, h=1e-6):
    """
    Central-difference gradient of the total cost, one axis at a time.
    """
    if not h > 0:
        raise InvalidInputError('finite difference step must be > 0, got %r' % h)
    p_i = as_vec3(p_i)
    others = as_points(neighbors)
    grad = np.zeros(3)
    for axis in range(3):
        step = np.zeros(3)
        step[axis] = h
        plus = cost_terms(p_i + step, others, params).total
        minus = cost_terms(p_i - step, others, params).total
        grad[axis] = (plus - minus) / (2.0 * h)
    return grad


def equilibrium_distance(w_coh, w_sep, r_drone=0.0):
    """
    Separation at which the cohesion and separation gradients of two
    agents cancel.

    For ``r_drone == 0`` this is the fourth root of ``w_sep / w_coh``;
    otherwise the root of ``w_coh * d * (d - 2 r_drone)**3 = w_sep`` above
    ``2 r_drone``.
    """
    if not w_coh > 0:
        raise NoEquilibriumError('cohesion weight must be > 0 for an equilibrium, got %r' % w_coh)
    if not w_sep > 0:
        raise NoEquilibriumError('separation weight must be > 0 for an equilibrium, got %r' % w_sep)
    if not r_drone >= 0:
        raise InvalidInputError('r_drone must be >= 0, got %r' % r_drone)
    unshifted = (w_sep / w_coh) ** 0.25
    if r_drone == 0:
        return unshifted

    low = 2.0 * r_drone
    high = low + unshifted

    def balance(d):
        return w_coh * d * (d - low) ** 3 - w_sep

    return bisect(balance, low, high, xtol=1e-13)
