#!/usr/bin/env python
# -*- coding: utf-8 -*-

from setuptools import setup, find_packages

PROJECT_NAME = 'LiveSim'
PROJECT_PACKAGE_NAME = 'livesim'
PROJECT_LICENSE = 'Apache License 2.0'

PROJECT_DESCRIPTION = 'Trace-driven simulator and hybrid controllers for adaptive live streaming'

# get the packages
PACKAGES = find_packages(exclude=['tests', 'tests.*'])
PACKAGE_DATA = {'livesim': ['data/traces/*.csv', 'data/params/*.conf']}

# requirements
REQUIRES = [
    'click>=7.0',
    'click_log>=0.3.2',
    'dask>=2021.03',
    'pandas>=1.0',
    'scipy>=1.4',
    'numpy>=1.17'
]

setup(
    name=PROJECT_PACKAGE_NAME,
    version='0.1',
    license=PROJECT_LICENSE,
    description=PROJECT_DESCRIPTION,
    packages=PACKAGES,
    package_data=PACKAGE_DATA,
    include_package_data=True,
    zip_safe=False,
    platforms='any',
    install_requires=REQUIRES,
    python_requires='>={}'.format(3.7),
    test_suite='tests',
    keywords=['adaptive bitrate', 'live streaming', 'simulation', 'qoe'],
    entry_points={
        'console_scripts': [
            'livesim = livesim.cli.script:script'
        ],
    },
)
