#
# initialize.py
#
# cellfreetools developers
#
# Seeds, random number streams, and the bookkeeping done at the start and end of a run.
#

import os, sys
import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType
from cellfreetools.base.fileSystem import createFilePath


INITIALIZED = False
DEFAULTSEED = 7271978
VERSION     = '0.9.0'

# numpy's recommended generator (PCG64 at the time of writing).
TBRNG = np.random.default_rng

# Tags separating the independent random streams drawn from one seed.
STREAM_CHANNEL = 0
STREAM_ANALOG  = 1
STREAM_VERIFY  = 2


def subStream(seed, *counters) -> np.random.Generator:
    """
    Counter-based sub-stream: the generator is seeded with the entropy tuple (seed, *counters), so any (trial, b, u)
    stream can be recreated in isolation and in any order.

    Args:
        seed (int): non-negative master seed
        *counters (int): non-negative stream coordinates

    Returns:
        np.random.Generator
    """
    checkType('int',seed=seed)
    for c in counters:
        checkType('int',counter=c)
    if seed < 0 or any(c < 0 for c in counters):
        logger.TBRaise('Seeds and stream counters must be non-negative, got',(seed,)+tuple(counters))
    return TBRNG([int(seed)]+[int(c) for c in counters])


def trialSeed(masterSeed, trial) -> int:
    """
    Seed of Monte-Carlo trial number trial: masterSeed XOR trial.
    """
    checkType('int',masterSeed=masterSeed)
    checkType('int',trial=trial)
    return int(masterSeed) ^ int(trial)


def introduceYourself():
    logger.info()
    logger.info('cellfreetools',VERSION,'- weighted sum-rate precoding for cell-free MIMO')
    logger.info()


def initialize(logFile=None):
    """
    Some common tasks to do at the start of a run where you want to keep track of things.
    """
    global INITIALIZED
    introduceYourself()
    if logFile is None:
        logFile = 'log/' + os.path.splitext(os.path.basename(sys.argv[0]))[0] + '.log'
    createFilePath(logFile)
    logger.createLogFile(logFile)
    logger.info('numpy',np.__version__)
    INITIALIZED = True


def finalize():
    """
    Some common tasks to do when you're done.
    """
    global INITIALIZED
    if not INITIALIZED:
        logger.warn('Called without having initialized first!')
    else:
        logger.info("Finished.")
        INITIALIZED = False
