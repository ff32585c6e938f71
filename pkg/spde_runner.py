"""
SPDE Runner: Command-Line Entry Point

Runs the graded-mesh stochastic heat equation toolkit from a source checkout
without installing the ``spde-sdk`` console script:

    python spde_runner.py converge-time --spectrum white --samples 200 --out e2.csv

Author: graded-spde-sdk developers
"""

import sys

from spde_sdk.cli import main


if __name__ == "__main__":
    sys.exit(main())
