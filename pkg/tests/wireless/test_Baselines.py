# 
# test_Baselines.py
# 
# cellfreetools developers
# 
# Zero forcing and maximum ratio transmission with a common power scale.
# 

import numpy as np
import pytest
import cellfreetools.base.logger as logger
from cellfreetools.wireless.model import SystemConfig, RankError
from cellfreetools.wireless.channel import sampleChannel
from cellfreetools.wireless.metrics import apPowers, wsr
from cellfreetools.wireless.baselines import stackedChannel, mrtPrecoder, zfPrecoder, baselinePrecoder
from cellfreetools.statistics.statistics import std_mean
from cellfreetools.testing import print_results, print_check, concludeTest


CFG = SystemConfig(num_aps=2, num_users=3, tx_grid=(2,2), rx_grid=(1,1), num_rf_chains=2, num_streams=1,
                   num_paths=4, max_power_dbm=[20.,23.])


def testBaselines():

    lpass = True

    channel = sampleChannel(CFG,9)
    Hs      = stackedChannel(channel)
    lpass *= print_check( Hs.shape == (3,8), 'stacked channel shape' )
    lpass *= print_results( Hs[2,4:], channel.H[1,2,0], text='stacked row layout' )

    zf    = zfPrecoder(Hs,CFG.maxPower)
    cross = Hs @ zf.F[:,:,0].T
    lpass *= print_results( cross - np.diag(np.diag(cross)), 0., abs_prec=1e-10*np.max(np.abs(cross)),
                            text='zero forcing nulls' )
    lpass *= print_results( np.max(apPowers(zf)/CFG.maxPower), 1., text='most loaded AP at its budget' )
    lpass *= print_check( np.all(apPowers(zf) <= CFG.maxPower*(1+1e-12)), 'ZF within budgets' )

    mrt = mrtPrecoder(Hs,CFG.maxPower)
    lpass *= print_results( np.max(apPowers(mrt)/CFG.maxPower), 1., text='MRT scale' )
    # every MRT column points along h_u^H
    for u in range(CFG.U):
        f = mrt.F[u,:,0]
        lpass *= print_results( abs(Hs[u] @ f), np.linalg.norm(Hs[u])*np.linalg.norm(f), text=f'MRT direction {u}' )

    # single user, single AP: MRT rate log(1 + P ||h||^2 / sigma^2)
    single = SystemConfig(num_aps=1, num_users=1, tx_grid=(2,2), rx_grid=(1,1), num_rf_chains=1, num_streams=1,
                          num_paths=2, max_power_dbm=10.)
    chan = sampleChannel(single,1)
    h    = stackedChannel(chan)[0]
    lpass *= print_results( wsr(baselinePrecoder('mrt',chan,single.maxPower),chan,1.,1.),
                            np.log(1 + 10*np.linalg.norm(h)**2), text='single-user MRT rate' )
    lpass *= print_results( wsr(baselinePrecoder('zf',chan,single.maxPower),chan,1.,1.),
                            np.log(1 + 10*np.linalg.norm(h)**2), text='single-user ZF equals MRT' )

    with pytest.raises(RankError):
        zfPrecoder(np.ones((9,8)),CFG.maxPower)
    with pytest.raises(RankError):
        zfPrecoder(np.vstack([Hs[:2],Hs[0]]),CFG.maxPower)
    with pytest.raises(RankError):
        mrtPrecoder(np.vstack([Hs[:2],np.zeros(8)]),CFG.maxPower)
    with pytest.raises(ValueError):
        stackedChannel(sampleChannel(CFG.replace(rx_grid=(2,1)),9))
    with pytest.raises(logger.CellFreeException):
        baselinePrecoder('mmse',channel,CFG.maxPower)

    # high SNR: nulling interference pays off
    loud = CFG.replace(max_power_dbm=40.,num_users=2)
    zfRates, mrtRates = [], []
    for seed in range(5):
        chan = sampleChannel(loud,seed)
        zfRates.append(wsr(baselinePrecoder('zf',chan,loud.maxPower),chan,1.,1.))
        mrtRates.append(wsr(baselinePrecoder('mrt',chan,loud.maxPower),chan,1.,1.))
    lpass *= print_check( std_mean(zfRates) > std_mean(mrtRates), 'ZF beats MRT at 40 dBm' )

    concludeTest(lpass)


if __name__ == '__main__':
    testBaselines()
