# -*- coding: utf-8 -*-
import os
import codecs
from setuptools import setup


def read(fname):
    return codecs.open(os.path.join(os.path.dirname(__file__), fname), 'rb', 'utf-8').read()


def get_packages(package):
    """
    Return root package and all sub-packages.
    """
    return [dirpath
            for dirpath, dirnames, filenames in os.walk(package)
            if os.path.exists(os.path.join(dirpath, '__init__.py'))]


def get_package_data(package):
    """
    Return all files under the root package, that are not in a
    package themselves: templates and the shipped scenario files.
    """
    walk = [(dirpath.replace(package + os.sep, '', 1), filenames)
            for dirpath, dirnames, filenames in os.walk(package)
            if not os.path.exists(os.path.join(dirpath, '__init__.py'))]

    filepaths = []
    for base, filenames in walk:
        filepaths.extend([os.path.join(base, filename)
                          for filename in filenames])
    return {package: filepaths}

README = read('README.rst')
PACKAGE = "django_flockspc"
VERSION = "0.2.0"


setup(
    name='django-flockspc',
    version=VERSION,
    description='Django app simulating drone flocks flown by spatial predictive control',
    classifiers=[
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Framework :: Django',
        'Framework :: Django :: 4.2',
        'Intended Audience :: Science/Research',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering',
    ],
    package_data=get_package_data(PACKAGE),
    packages=get_packages(PACKAGE),
    long_description=README,
    python_requires='>=3.9',
    install_requires=[
        'Django >= 4.2',
        'numpy >= 1.22',
        'scipy >= 1.8',
    ],
    setup_requires=[
        'versiontools >= 1.8.2',
    ],
    entry_points={
        'console_scripts': [
            'flockspc = django_flockspc.cli:main',
        ],
    },
)
