# -*- coding: utf-8 -*-
import csv
import io
import json

from django.core.management.base import CommandError

from django_flockspc.config import load_scenario, scenario_to_dict
from django_flockspc.engine import run_scenario, write_trace_csv
from django_flockspc.management.base import QUALITY_VIOLATION, FlockCommand, write_json
from django_flockspc.metrics import render_markdown_table, summarize_run


def summary_report(summaries, fmt):
    """ ``summaries`` rendered as json, md or csv text. """
    if fmt == 'md':
        return render_markdown_table(summaries)
    rows = [s.to_dict() for s in summaries]
    if fmt == 'json':
        return json.dumps(rows if len(rows) > 1 else rows[0], indent=2, sort_keys=True)
    buffer = io.StringIO()
    fields = [k for k in rows[0] if k != 'thresholds']
    writer = csv.DictWriter(buffer, fieldnames=fields, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue().rstrip('\n')


class Command(FlockCommand):
    help = 'Run one scenario, writing trace.csv and summary.json to the output directory.'

    def add_arguments(self, parser):
        parser.add_argument('--scenario', required=True,
                            help='scenario JSON file, or the name of a shipped scenario')
        parser.add_argument('--out', default='.', help='output directory')
        parser.add_argument('--seed', type=int, default=None, help='override the scenario seed')
        parser.add_argument('--strict', action='store_true',
                            help='exit with status 3 when a metric misses its threshold')
        self.add_format_argument(parser)
        self.add_threads_argument(parser)

    def handle(self, *args, **options):
        cfg = load_scenario(options['scenario'])
        if options['seed'] is not None:
            cfg = cfg.with_overrides(seed=options['seed'])
        out = self.output_dir(options['out'])

        trace = run_scenario(cfg, workers=options['threads'])
        summary = summarize_run(trace)
        write_trace_csv(trace, out / 'trace.csv')
        write_json(out / 'summary.json', {'scenario': scenario_to_dict(cfg),
                                          'summary': summary.to_dict()})
        self.stdout.write(summary_report([summary], options['format']))

        if options['strict'] and not summary.passed:
            raise CommandError('%s seed %d misses a quality threshold' % (cfg.name, cfg.seed),
                               returncode=QUALITY_VIOLATION)
