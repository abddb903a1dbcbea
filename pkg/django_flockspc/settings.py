import logging
import os

from django.conf import settings

log = logging.getLogger(__name__)


def threads_from_env(value):
    """
    Worker count from the ``FLOCKSPC_THREADS`` environment variable. Anything
    but a positive integer falls back to one thread.
    """
    try:
        threads = int(value or 1)
    except ValueError:
        log.warning('Ignoring FLOCKSPC_THREADS=%r, not an integer', value)
        return 1
    if threads < 1:
        log.warning('Ignoring FLOCKSPC_THREADS=%r, must be >= 1', value)
        return 1
    return threads


FLOCKSPC_THREADS = getattr(settings, 'FLOCKSPC_THREADS',
                           threads_from_env(os.environ.get('FLOCKSPC_THREADS')))
FLOCKSPC_PHYSICS_DT = getattr(settings, 'FLOCKSPC_PHYSICS_DT', 0.01)
FLOCKSPC_CONTROL_PERIOD = getattr(settings, 'FLOCKSPC_CONTROL_PERIOD', 0.1)
FLOCKSPC_FORMATION_TIME = getattr(settings, 'FLOCKSPC_FORMATION_TIME', 10.0)
FLOCKSPC_COMP_THR = getattr(settings, 'FLOCKSPC_COMP_THR', 10.0)
FLOCKSPC_R_SAFETY = getattr(settings, 'FLOCKSPC_R_SAFETY', 0.06)
FLOCKSPC_SPAWN_MIN_SPACING = getattr(settings, 'FLOCKSPC_SPAWN_MIN_SPACING', 0.4)
FLOCKSPC_SPAWN_MAX_ATTEMPTS = getattr(settings, 'FLOCKSPC_SPAWN_MAX_ATTEMPTS', 10000)
FLOCKSPC_PASS_MARKER = getattr(settings, 'FLOCKSPC_PASS_MARKER', '✓')
FLOCKSPC_FAIL_MARKER = getattr(settings, 'FLOCKSPC_FAIL_MARKER', '✗')
FLOCKSPC_SCENARIO_DIRS = getattr(settings, 'FLOCKSPC_SCENARIO_DIRS', [])
