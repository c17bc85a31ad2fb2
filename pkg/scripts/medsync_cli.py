#!/usr/bin/env python3
"""
Command line launcher for medsync.  Examples:

    medsync_cli.py validate --data ./data
    medsync_cli.py solve --variant base --reference-lfo -v
    medsync_cli.py solve --sync 100 --patients 10000 --months 6 --output-dir out/ideal_10k
    medsync_cli.py sweep --jobs 4 --output-dir out/sweep
    medsync_cli.py export-mps --fixed --output-dir out/mps
"""
import sys

from medsync.cli import main

if __name__ == '__main__':
    sys.exit(main())
