#!/bin/python3

#
# main_powerSweep.py
#
# cellfreetools developers
#
# Rate of the hybrid and fully digital designs and of the ZF/MRT baselines against the per-AP power budget, on
# single-antenna users so that all four solvers apply. A log file goes to log/main_powerSweep.log.
#

import argparse
import cellfreetools.base.logger as logger
from cellfreetools.base.initialize import initialize, finalize, DEFAULTSEED
from cellfreetools.base.utilities import getArgs
from cellfreetools.base.readWrite import readCSV
from cellfreetools.base.fileSystem import stem
from cellfreetools.wireless.model import SystemConfig
from cellfreetools.wireless.experiment import ExperimentSpec, SOLVERS, runExperiment

parser = argparse.ArgumentParser(description='Sweep the per-AP power budget.')
parser.add_argument('--trials', dest='trials', default=10, type=int, help='channel drops per power value')
parser.add_argument('--seed', dest='seed', default=DEFAULTSEED, type=int, help='master seed')
parser.add_argument('--workers', dest='workers', default=1, type=int, help='processes running trials')
parser.add_argument('--out', dest='out', default='results/powerSweep.csv', help='result CSV')

args = getArgs(parser)

initialize()

base = SystemConfig(num_aps=2, num_users=4, tx_grid=(4,4), rx_grid=(1,1), num_rf_chains=4, num_streams=1, seed=args.seed)
spec = ExperimentSpec(base=base, axis='power_dbm', values=(0.,10.,20.,30.,40.), solvers=SOLVERS, trials=args.trials,
                      seed=args.seed, output=args.out, workers=args.workers)

runExperiment(spec)

header, table = readCSV(stem(spec.output)+'_aggregate.csv')
logger.info(' '.join(header))
for row in table:
    logger.info(' '.join(row))

finalize()
