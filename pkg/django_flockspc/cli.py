# -*- coding: utf-8 -*-
"""
``flockspc`` console script: the app's management commands without a host
Django project.
"""
import os
import sys

import django
from django.conf import settings
from django.core.management import execute_from_command_line

DEFAULT_SETTINGS = {
    'INSTALLED_APPS': ['django_flockspc'],
    'TEMPLATES': [{
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'APP_DIRS': True,
    }],
    'LOGGING': {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'plain': {'format': '%(asctime)s %(levelname)s %(name)s: %(message)s'},
        },
        'handlers': {
            'console': {'class': 'logging.StreamHandler', 'formatter': 'plain'},
        },
        'loggers': {
            'django_flockspc': {'handlers': ['console'], 'level': 'INFO'},
        },
    },
}


def main(argv=None):
    if not settings.configured and not os.environ.get('DJANGO_SETTINGS_MODULE'):
        settings.configure(**DEFAULT_SETTINGS)
    django.setup()
    argv = sys.argv[1:] if argv is None else argv
    execute_from_command_line(['flockspc'] + list(argv))


if __name__ == '__main__':
    main()
