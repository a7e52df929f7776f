# 
# test_Metrics.py
# 
# cellfreetools developers
# 
# Rates, MSE matrices and powers on hand-checkable instances.
# 

import numpy as np
import pytest
import cellfreetools.base.logger as logger
from cellfreetools.wireless.model import SystemConfig
from cellfreetools.wireless.channel import sampleChannel
from cellfreetools.wireless.metrics import PrecoderStack, MseState, userRates, wsr, mseMatrix, mseMatrices, \
    interferencePlusNoise, apPowers, perAPPower, penaltyTerm, wmmseObjective
from cellfreetools.wireless.hybridBCD import updateCombiners, updateWeights
from cellfreetools.wireless.validation import checkWsrWmmseEquivalence
from cellfreetools.math.math import dagger, logDet
from cellfreetools.testing import print_results, print_check, concludeTest


rng = np.random.default_rng(3)


def randomStack(U, B, Nt, Ns):
    return PrecoderStack(rng.standard_normal((U,B*Nt,Ns)) + 1j*rng.standard_normal((U,B*Nt,Ns)),Nt)


def testMetrics():

    lpass = True

    # single antenna, single user
    h, f, sigma2 = 0.6-0.8j, 2.+1j, 0.5
    H     = np.array([[[h]]])
    stack = PrecoderStack(np.array([[[f]]]),1)
    gain  = abs(h*f)**2
    lpass *= print_results( wsr(stack,H,sigma2,1.), np.log(1+gain/sigma2), text='scalar rate' )
    lpass *= print_results( wsr(stack,H,sigma2,3.), 3*np.log(1+gain/sigma2), text='weighted scalar rate' )
    G = updateCombiners(stack,H,sigma2)
    W = updateWeights(G,stack,H,sigma2)
    lpass *= print_results( G[0,0,0], h*f/(gain+sigma2), text='MMSE combiner' )
    lpass *= print_results( mseMatrix(0,G[0],stack,H,sigma2)[0,0], sigma2/(gain+sigma2), text='MMSE' )
    lpass *= print_results( W[0,0,0], 1+gain/sigma2, text='MSE weight' )
    lpass *= print_results( perAPPower(0,stack), abs(f)**2, text='scalar power' )

    cfg     = SystemConfig(num_aps=2, num_users=3, tx_grid=(2,2), rx_grid=(2,2), num_rf_chains=4, num_streams=2,
                           num_paths=4, noise_power=0.7)
    channel = sampleChannel(cfg,17)
    H       = channel.aggregated()
    stack   = randomStack(cfg.U,cfg.B,cfg.Nt,cfg.Ns)
    weights = [1.,2.,0.5]

    rates = userRates(stack,channel,cfg.noise_power)
    lpass *= print_check( np.all(rates >= 0), 'non-negative rates' )
    lpass *= print_results( wsr(stack,H,cfg.noise_power,weights), np.dot(weights,rates), text='aggregated channel input' )

    # rate of user u = -log|E_u| at the MMSE combiner
    G = updateCombiners(stack,H,cfg.noise_power)
    E = mseMatrices(G,stack,H,cfg.noise_power)
    lpass *= print_results( [ -logDet(E[u]) for u in range(cfg.U) ], rates, text='rate from MMSE matrix', prec=1e-9 )

    J = interferencePlusNoise(1,stack,H,cfg.noise_power)
    lpass *= print_results( J, dagger(J), text='J Hermitian', abs_prec=1e-12 )
    lpass *= print_check( np.min(np.linalg.eigvalsh(J)) >= cfg.noise_power*(1-1e-12), 'J above the noise floor' )

    # rotating the streams of a user changes nothing
    Q, _    = np.linalg.qr(rng.standard_normal((2,2)) + 1j*rng.standard_normal((2,2)))
    rotated = PrecoderStack(stack.F @ Q,cfg.Nt)
    lpass *= print_results( userRates(rotated,H,cfg.noise_power), rates, text='stream rotation invariance', prec=1e-9 )

    lpass *= print_check( checkWsrWmmseEquivalence(stack,H,cfg.noise_power,weights) < 1e-10, 'WSR-WMMSE equivalence' )
    W = updateWeights(G,stack,H,cfg.noise_power)
    lpass *= print_results( wmmseObjective(G,W,stack,None,H,cfg.noise_power,cfg.rho,weights),
                            wsr(stack,H,cfg.noise_power,weights) - cfg.Ns*sum(weights), text='objective at MMSE point',
                            prec=1e-9 )
    lpass *= print_results( wmmseObjective(G,W,stack,stack,H,cfg.noise_power,cfg.rho,weights),
                            wmmseObjective(G,W,stack,None,H,cfg.noise_power,cfg.rho,weights), text='zero penalty' )

    # power bookkeeping
    powers = apPowers(stack)
    lpass *= print_results( np.sum(powers), np.sum(np.abs(stack.F)**2), text='powers add up' )
    lpass *= print_results( apPowers(stack.scaled([2.,0.5])), [4*powers[0],powers[1]/4], text='scaled stack' )
    blocks = stack.toAPBlocks()
    lpass *= print_results( PrecoderStack.fromAPBlocks(blocks).F, stack.F, text='AP block layout' )
    zeroed = stack.withAPBlocks(1,np.zeros((cfg.U,cfg.Nt,cfg.Ns)))
    lpass *= print_results( apPowers(zeroed), [powers[0],0.], text='replaced AP blocks', abs_prec=1e-14 )
    lpass *= print_results( penaltyTerm(stack,zeroed,[1.,0.25]), 2*powers[1], text='penalty term' )
    lpass *= print_results( penaltyTerm(stack,None,1.), 0., text='no penalty', abs_prec=1e-14 )
    with pytest.raises(ValueError):
        stack.F[0,0,0] = 1.

    with pytest.raises(ValueError):
        wsr(stack,H[:,:,:4],cfg.noise_power,1.)
    with pytest.raises(logger.CellFreeException):
        wsr(stack,H,0.,1.)
    with pytest.raises(IndexError):
        stack.block(2,0)
    with pytest.raises(logger.CellFreeException):
        MseState(G,-W)

    concludeTest(lpass)


if __name__ == '__main__':
    testMetrics()
