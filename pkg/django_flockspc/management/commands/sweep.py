# -*- coding: utf-8 -*-
from django.core.management.base import CommandError

from django_flockspc.config import read_json, resolve_scenario
from django_flockspc.management.base import QUALITY_VIOLATION, FlockCommand, write_json
from django_flockspc.management.commands.simulate import summary_report
from django_flockspc.metrics import render_markdown_table, seed_statistics
from django_flockspc.sweep import run_sweep, sweep_from_dict


class Command(FlockCommand):
    help = ('Run every combination of a sweep spec, writing one summary per run, '
            'table.md and sweep.json to the output directory.')

    def add_arguments(self, parser):
        parser.add_argument('sweep', help='sweep spec JSON file, or the name of a shipped sweep')
        parser.add_argument('--out', default='.', help='output directory')
        parser.add_argument('--strict', action='store_true',
                            help='exit with status 3 when any run misses a threshold')
        self.add_format_argument(parser, default='md')
        self.add_threads_argument(parser)

    def handle(self, *args, **options):
        spec = sweep_from_dict(read_json(resolve_scenario(options['sweep'])))
        out = self.output_dir(options['out'])
        runs_dir = self.output_dir(out / 'runs')

        results = run_sweep(spec, workers=options['threads'])
        summaries = [summary for _, summary in results]
        for cfg, summary in results:
            write_json(runs_dir / ('%s.json' % cfg.name), summary.to_dict())
        table = render_markdown_table(summaries)
        with open(out / 'table.md', 'w', encoding='utf-8') as fh:
            fh.write(table)
        write_json(out / 'sweep.json',
                   {'runs': len(results),
                    'cells': [stats.to_dict() for stats in seed_statistics(summaries).values()]})
        self.stdout.write(table if options['format'] == 'md'
                          else summary_report(summaries, options['format']))

        failed = [s for s in summaries if not s.passed]
        if options['strict'] and failed:
            raise CommandError('%d of %d runs miss a quality threshold' % (len(failed), len(summaries)),
                               returncode=QUALITY_VIOLATION)
