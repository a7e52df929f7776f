#!/bin/python3

#
# main_cellFree.py
#
# cellfreetools developers
#
# Sweeps, convergence traces and the oracle suite from the command line, e.g.
#
#   python3 main_cellFree.py sweep --axis power_dbm --values 10,20,30,40 --trials 10 --out results/power.csv
#   python3 main_cellFree.py trace --config scenario.yaml --out results/trace.csv
#   python3 main_cellFree.py verify --seeds 20
#

import sys
from cellfreetools.wireless.cli import main


if __name__ == '__main__':
    sys.exit(main())
