# 
# test_Stats.py
# 
# cellfreetools developers
# 
# Tests of the basic statistics used to summarize Monte-Carlo trials.
#

import numpy as np
import scipy as sp
from cellfreetools.statistics.statistics import std_mean, std_dev, std_err, meanAndError, KSTest_1side
from cellfreetools.base.initialize import DEFAULTSEED
from cellfreetools.testing import print_results, print_check, concludeTest


def testStats():

    lpass = True

    data = np.array([1.,2.,3.,4.])
    lpass *= print_results( std_mean(data), 2.5, text='mean' )
    lpass *= print_results( std_dev(data), np.sqrt(5/3), text='unbiased standard deviation' )
    lpass *= print_results( std_err(data), np.sqrt(5/3)/2, text='standard error' )

    mean, err = meanAndError([1.,2.,3.,4.])
    lpass *= print_results( [mean,err], [2.5,np.sqrt(5/3)/2], text='meanAndError' )
    mean, err = meanAndError([7.])
    lpass *= print_check( mean == 7. and np.isnan(err), 'single measurement has no error bar' )

    rng    = np.random.default_rng(DEFAULTSEED)
    normal = rng.normal(size=2000)
    lpass *= print_check( KSTest_1side(normal,sp.stats.norm.cdf) < 0.99, 'normal sample passes KS' )
    lpass *= print_check( KSTest_1side(normal+1,sp.stats.norm.cdf) > 0.99, 'shifted sample fails KS' )

    concludeTest(lpass)


if __name__ == '__main__':
    testStats()
