# 
# test_Utilities.py
# 
# cellfreetools developers
# 
# Test some of the methods in the utilities and initialize modules.
# 

import argparse
import numpy as np
import pytest
import cellfreetools.base.logger as logger
from cellfreetools.testing import print_results, print_check, concludeTest
from cellfreetools.base.utilities import envector, unvector, perEntity, getArgs, isIntType, isScalar, timer
from cellfreetools.base.initialize import subStream, trialSeed, DEFAULTSEED, STREAM_CHANNEL


def testUtilities():

    lpass = True

    lpass *= print_results( unvector(np.array([2.])), 2., text='unvector' )
    lpass *= print_check( len(envector(3.)) == 1, 'envector' )
    lpass *= print_check( isIntType(np.int32(1)) and not isIntType(True), 'isIntType' )
    lpass *= print_check( isScalar(1+2j) and not isScalar('1'), 'isScalar' )

    lpass *= print_results( perEntity(2.,3,'weights'), [2.,2.,2.], text='perEntity broadcast' )
    lpass *= print_results( perEntity([1,2],2,'weights'), [1.,2.], text='perEntity sequence' )
    with pytest.raises(logger.CellFreeException):
        perEntity([1,2,3],2,'weights')

    parser = argparse.ArgumentParser()
    parser.add_argument('--trials',type=int)
    lpass *= print_check( getArgs(parser,['--trials','3']).trials == 3, 'getArgs' )
    with pytest.raises(logger.CellFreeException):
        getArgs(parser,['--trails','3'])

    clock = timer()
    lpass *= print_check( clock.lap() >= 0, 'timer lap' )

    # Sub-streams depend only on their coordinates.
    a = subStream(DEFAULTSEED,STREAM_CHANNEL,1,0).standard_normal(4)
    subStream(DEFAULTSEED,STREAM_CHANNEL,0,0).standard_normal(100)
    b = subStream(DEFAULTSEED,STREAM_CHANNEL,1,0).standard_normal(4)
    c = subStream(DEFAULTSEED,STREAM_CHANNEL,0,1).standard_normal(4)
    lpass *= print_results( a, b, text='sub-stream reproducible' )
    lpass *= print_check( not np.allclose(a,c), 'different coordinates differ' )
    with pytest.raises(logger.CellFreeException):
        subStream(-1,0)

    lpass *= print_check( trialSeed(12,0) == 12 and trialSeed(12,5) == 9, 'trial seed is XOR' )

    concludeTest(lpass)


if __name__ == '__main__':
    testUtilities()
