# -*- coding: utf-8 -*-


class FlockError(Exception):
    """Base class for every error raised by django-flockspc."""


class InvalidInputError(FlockError, ValueError):
    """A position, weight or controller parameter is out of range."""


class DegenerateGradientError(FlockError):
    """A lookahead direction was requested for a zero gradient."""


class NoEquilibriumError(FlockError):
    """Cohesion and separation weights admit no two-agent equilibrium."""


class EmptyWindowError(FlockError):
    """No metric samples remain after the formation window."""
