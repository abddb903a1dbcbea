# -*- coding: utf-8 -*-
import json
import logging
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from django_flockspc.exceptions import FlockError
from django_flockspc.settings import FLOCKSPC_THREADS

log = logging.getLogger(__name__)

CONFIG_ERROR = 2
QUALITY_VIOLATION = 3

VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG, 3: logging.DEBUG}


def format_validation_error(exc):
    if hasattr(exc, 'error_dict'):
        return '; '.join('%s: %s' % (name, ' '.join(messages))
                         for name, messages in sorted(exc.message_dict.items()))
    return '; '.join(exc.messages)


def write_json(path, data):
    """ Indented, key-sorted JSON so identical runs give identical files. """
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(data, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write('\n')


class FlockCommand(BaseCommand):
    """
    Base for the flockspc commands. Configuration problems of any kind end
    the command with exit status 2.
    """

    def add_threads_argument(self, parser):
        parser.add_argument('--threads', type=int, default=None,
                            help='worker threads (default FLOCKSPC_THREADS=%d)' % FLOCKSPC_THREADS)

    def add_format_argument(self, parser, default='json'):
        parser.add_argument('--format', choices=('csv', 'json', 'md'), default=default,
                            help='format of the report printed on stdout')

    def execute(self, *args, **options):
        logging.getLogger('django_flockspc').setLevel(
            VERBOSITY_LEVELS.get(options.get('verbosity', 1), logging.INFO))
        try:
            return super().execute(*args, **options)
        except ValidationError as exc:
            raise CommandError(format_validation_error(exc), returncode=CONFIG_ERROR)
        except (FlockError, OSError, ValueError) as exc:
            raise CommandError(str(exc), returncode=CONFIG_ERROR)

    def output_dir(self, value):
        path = Path(value)
        path.mkdir(parents=True, exist_ok=True)
        return path
