#!/usr/bin/env python3

import setuptools
import os

with open("README.md", "r") as fh:
    long_description = fh.read()

__version__ = '0.1.0'

on_rtd = os.environ.get('READTHEDOCS') == 'True'
if on_rtd:
    install_requires = []
else:
    install_requires = ['numpy',
                        'pandas',
                        'joblib',
                        'scipy',
                        'tqdm',
                        'cloudpickle'
                        ]

setuptools.setup(
    name='medsync',
    version=__version__,

    description='Last-mile delivery planning for pharmacies with synchronized medication orders',
    long_description=long_description,
    long_description_content_type="text/markdown",

    license='Apache License 2.0',

    python_requires='>=3.6',
    packages=['medsync', 'medsync.instance', 'medsync.modelgen', 'medsync.solver', 'medsync.export',
              'medsync.analysis'],
    package_data={'medsync.instance': ['resources/*.json', 'resources/base/*.csv']},

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',

        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering',
        'Topic :: Scientific/Engineering :: Mathematics',

        'License :: OSI Approved :: Apache Software License',

        'Programming Language :: Python :: 3 :: Only',
    ],

    keywords='mixed-integer-programming branch-and-bound pharmacy delivery',

    install_requires=install_requires,

    # $ pip install -e .[test]
    extras_require={
          'test': ['nose2']
    },

    scripts=['scripts/medsync_cli.py'],

    zip_safe=False
)
