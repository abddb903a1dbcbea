import os

import django


def pytest_configure(config):
    # mirror runtests.py: configure Django before test modules are imported
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tests.test_settings')
    django.setup()
