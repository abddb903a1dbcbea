# -*- coding: utf-8 -*-
import numpy as np
from django.core.management.base import CommandError

from django_flockspc.config import two_agent_scenario
from django_flockspc.engine import run_scenario
from django_flockspc.management.base import QUALITY_VIOLATION, FlockCommand
from django_flockspc.model import equilibrium_distance

VERIFY_TOLERANCE = 0.05


def rollout_separation(trace, window=5.0):
    """ Mean distance of the two agents over the last ``window`` seconds. """
    times = trace.times
    positions = trace.positions[times >= times[-1] - window]
    return float(np.mean(np.linalg.norm(positions[:, 0] - positions[:, 1], axis=1)))


class Command(FlockCommand):
    help = 'Print the two-agent equilibrium distance of a cohesion/separation weight pair.'

    def add_arguments(self, parser):
        parser.add_argument('w_coh', type=float)
        parser.add_argument('w_sep', type=float)
        parser.add_argument('r_drone', type=float, nargs='?', default=0.0)
        parser.add_argument('--verify', action='store_true',
                            help='check the distance with a noise-free two-agent SPC rollout')
        parser.add_argument('--duration', type=float, default=30.0)

    def handle(self, *args, **options):
        distance = equilibrium_distance(options['w_coh'], options['w_sep'], options['r_drone'])
        self.stdout.write('%.5f' % distance)
        if not options['verify']:
            return

        cfg = two_agent_scenario(options['w_coh'], options['w_sep'], options['r_drone'],
                                 duration=options['duration'])
        measured = rollout_separation(run_scenario(cfg, workers=1))
        error = abs(measured - distance) / distance
        self.stdout.write('rollout %.5f (%.2f %% off)' % (measured, 100.0 * error))
        if error > VERIFY_TOLERANCE:
            raise CommandError('rollout separation %.5f is more than %d %% from %.5f'
                               % (measured, int(VERIFY_TOLERANCE * 100), distance),
                               returncode=QUALITY_VIOLATION)
