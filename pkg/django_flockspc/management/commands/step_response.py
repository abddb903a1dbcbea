# -*- coding: utf-8 -*-
import csv
import json
from pathlib import Path

from django_flockspc.exceptions import InvalidInputError
from django_flockspc.management.base import FlockCommand, write_json
from django_flockspc.plant import LLCConfig, LLCFamily, response_metrics, simulate_step, step_response


class Command(FlockCommand):
    help = ('Fly a single-axis setpoint step with the default gains of an LLC family, '
            'writing the time series CSV and a metrics JSON next to it.')

    def add_arguments(self, parser):
        parser.add_argument('family', help='LLC family, A or B')
        parser.add_argument('--step', type=float, default=1.0, help='step size in metres')
        parser.add_argument('--duration', type=float, default=10.0)
        parser.add_argument('--dt', type=float, default=0.001)
        parser.add_argument('--out', default=None,
                            help='CSV path (default step_<family>.csv); the JSON uses .json')
        self.add_format_argument(parser)

    def handle(self, *args, **options):
        family = LLCFamily(options['family'].upper())
        cfg = LLCConfig.defaults(family)
        step = options['step']
        out = Path(options['out'] or 'step_%s.csv' % family.value)
        out.parent.mkdir(parents=True, exist_ok=True)

        if step < 0:
            raise InvalidInputError('step must be >= 0, got %r' % step)
        times, xs = simulate_step(cfg, step, options['duration'], options['dt'])
        metrics = response_metrics(times, xs, step) if step > 0 else step_response(cfg, step)

        with open(out, 'w', newline='', encoding='utf-8') as fh:
            writer = csv.writer(fh, lineterminator='\n')
            writer.writerow(('time_s', 'x'))
            writer.writerows((repr(float(t)), repr(float(x))) for t, x in zip(times, xs))
        data = dict(metrics.as_dict(), family=family.value, step=step)
        write_json(out.with_suffix('.json'), data)

        if options['format'] == 'json':
            self.stdout.write(json.dumps(data, indent=2, sort_keys=True))
        else:
            self.stdout.write('family %s step %.3f m: rise %s s, overshoot %.2f %%, settle %s s'
                              % (family.value, step, _seconds(metrics.rise_time_90),
                                 metrics.overshoot_pct, _seconds(metrics.settling_time_2pct)))


def _seconds(value):
    return '-' if value is None else '%.3f' % value
