#!/usr/bin/env python
import os
import sys

import django
from django.conf import settings
from django.test.utils import get_runner

if __name__ == "__main__":
    os.environ['DJANGO_SETTINGS_MODULE'] = 'tests.test_settings'
    django.setup()
    args = sys.argv[1:]
    # full-length rollouts are tagged "slow" and only run on request
    exclude_tags = [] if '--slow' in args else ['slow']
    labels = [arg for arg in args if arg != '--slow'] or ["tests"]
    TestRunner = get_runner(settings)
    test_runner = TestRunner(exclude_tags=exclude_tags)
    failures = test_runner.run_tests(labels)
    sys.exit(bool(failures))
