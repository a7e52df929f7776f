# 
# test_FullyDigital.py
# 
# cellfreetools developers
# 
# Multiplier search, rank structure and the fully digital solver.
# 

import numpy as np
import pytest
import cellfreetools.base.logger as logger
from cellfreetools.wireless.model import SystemConfig
from cellfreetools.wireless.channel import sampleChannel
from cellfreetools.wireless.metrics import PrecoderStack, apPowers, wsr
from cellfreetools.wireless.hybridBCD import SubproblemData, buildSubproblem, updateCombiners, updateWeights, \
    initAuxiliary
from cellfreetools.wireless.fullyDigital import fdPowerProfile, solveMu, updateFDBlock, checkSubproblemRank, \
    updateFullyDigital, enforceBudget, initFullyDigital, runFullyDigital, MU_LB
from cellfreetools.wireless.validation import lagrangian, blockStationarity
from cellfreetools.wireless.baselines import baselinePrecoder
from cellfreetools.statistics.statistics import std_mean
from cellfreetools.math.math import frob2, id
from cellfreetools.testing import print_results, print_check, concludeTest


SMALL = SystemConfig(num_aps=2, num_users=2, tx_grid=(2,2), rx_grid=(2,1), num_rf_chains=2, num_streams=2,
                     num_paths=4, max_power_dbm=20., max_iters=30)


def handmadeData(C):
    """
    One AP, one user, N_t = 2, Q = diag(1, 0).
    """
    A = np.diag([1.,0.]).astype(complex)[None]
    return SubproblemData(A,A.copy(),np.asarray(C,dtype=complex)[None],np.array([1.]),
                          PrecoderStack.zeros(1,1,2,1),interferenceAware=False)


def scalarData():
    H     = np.ones((1,1,1),dtype=complex)
    stack = PrecoderStack(np.ones((1,1,1)),1)
    G     = updateCombiners(stack,H,1.)
    W     = updateWeights(G,stack,H,1.)
    return buildSubproblem(G,W,stack,H,1.)


def testMultiplier():

    lpass = True

    # Q = 1/2, M = 1: power (1/2 + mu)^-2
    data = scalarData()
    lpass *= print_results( fdPowerProfile(0,data,0.5), 1., text='scalar profile' )
    lpass *= print_results( solveMu(0,data,0.25,1e-10), 1.5, prec=1e-12, text='scalar multiplier' )
    lpass *= print_results( updateFDBlock(0,0,data,1.5)[0,0], 0.5, prec=1e-12, text='scalar block' )
    lpass *= print_check( solveMu(0,data,10.,1e-10) == MU_LB, 'slack budget sits on the floor' )
    lpass *= print_results( fdPowerProfile(0,data,0.,diagnostic=True), 4., text='pseudo-inverse power' )
    with pytest.raises(logger.CellFreeException):
        fdPowerProfile(0,data,0.)

    # M in the range of Q keeps the mu = 0 power finite, a null-space component does not
    lpass *= print_results( fdPowerProfile(0,handmadeData([[2.],[0.]]),0.,diagnostic=True), 4., text='range only' )
    lpass *= print_check( np.isinf(fdPowerProfile(0,handmadeData([[0.],[1.]]),0.,diagnostic=True)), 'null space' )
    lpass *= print_results( fdPowerProfile(0,handmadeData([[0.],[1.]]),0.5), 4., text='null-space term 1/mu^2' )
    lpass *= print_results( frob2(updateFDBlock(0,0,handmadeData([[2.],[1.]]),0.5)), 4/2.25 + 4,
                            text='null-space block' )
    lpass *= print_results( updateFDBlock(0,0,handmadeData([[2.],[0.]]),0.,diagnostic=True), [[2.],[0.]],
                            text='pseudo-inverse block', abs_prec=1e-14 )
    with pytest.raises(logger.CellFreeException):
        updateFDBlock(0,0,handmadeData([[2.],[0.]]),0.)

    # Q = diag(1e8, 0), M = (1e2, 1e-3), mu = 1e-3: the null direction carries all the power
    sqrtA = np.diag([1e4,0.]).astype(complex)[None]
    wide  = SubproblemData(sqrtA @ sqrtA,sqrtA,np.array([[[1e2],[1e-3]]],dtype=complex),np.array([1.]),
                           PrecoderStack.zeros(1,1,2,1),interferenceAware=False)
    block = updateFDBlock(0,0,wide,1e-3)
    lpass *= print_results( fdPowerProfile(0,wide,1e-3), 1., prec=1e-10, text='profile of a badly scaled block' )
    lpass *= print_results( frob2(block), fdPowerProfile(0,wide,1e-3), prec=1e-12, text='block power equals the profile' )
    lpass *= print_results( (wide.solverQ(0,0) + 1e-3*id(2)) @ block, wide.solverM(0,0), prec=1e-10,
                            text='block solves the regularized system' )

    channel = sampleChannel(SMALL,4)
    H       = channel.aggregated()
    stack   = initAuxiliary(SMALL,channel)
    G       = updateCombiners(stack,H,SMALL.noise_power)
    W       = updateWeights(G,stack,H,SMALL.noise_power)
    data    = buildSubproblem(G,W,stack,H,SMALL.weights)

    for mu in [1e-3,0.1,3.]:
        direct = sum( frob2(updateFDBlock(1,u,data,mu)) for u in range(SMALL.U) )
        lpass *= print_results( fdPowerProfile(1,data,mu), direct, prec=1e-8, text=f'profile at {mu}' )

    Pmax = 0.05*fdPowerProfile(0,data,1e-3)
    mu   = solveMu(0,data,Pmax,1e-10)
    lpass *= print_results( fdPowerProfile(0,data,mu), Pmax, prec=1e-8, text='budget met with equality' )

    ranks = checkSubproblemRank(data)
    lpass *= print_check( ranks.shape == (SMALL.B,SMALL.U), 'one rank per block' )
    lpass *= print_check( np.all(ranks == SMALL.Ns), 'solver matrices have rank N_s' )
    full = SMALL.replace(tx_grid=(2,1))
    chan = sampleChannel(full,4)
    st   = initAuxiliary(full,chan)
    Gf   = updateCombiners(st,chan,full.noise_power)
    Wf   = updateWeights(Gf,st,chan,full.noise_power)
    lpass *= print_check( np.all(checkSubproblemRank(buildSubproblem(Gf,Wf,st,chan,full.weights)) == 2), 'N_s = N_t gives full rank' )

    concludeTest(lpass)


def testRunFullyDigital():

    lpass = True

    channel = sampleChannel(SMALL,12)
    stack, trace = runFullyDigital(SMALL,channel)

    objectives = trace.objectives()
    slack      = 1e-8*np.maximum(1,np.abs(objectives[:-1]))
    lpass *= print_check( np.all(np.diff(objectives) >= -slack), 'objective never decreases' )
    lpass *= print_check( np.all(apPowers(stack) <= SMALL.maxPower*(1+1e-9)), 'per-AP budgets hold' )
    lpass *= print_check( trace.solver == 'fully_digital' and trace.records[0].iteration == 0, 'trace layout' )

    H    = channel.aggregated()
    G    = updateCombiners(stack,H,SMALL.noise_power)
    W    = updateWeights(G,stack,H,SMALL.noise_power)
    step = updateFullyDigital(G,W,stack,H,SMALL.weights,SMALL.bisection_tol,SMALL.maxPower)
    lpass *= print_check( step.F.shape == stack.F.shape, 'one more pass keeps the layout' )

    powers = apPowers(stack)
    loud   = stack.scaled([np.sqrt(2*SMALL.maxPower[0]/powers[0]),0.5])
    capped = enforceBudget(loud,SMALL.maxPower)
    lpass *= print_results( apPowers(capped)[0], SMALL.maxPower[0], text='loud AP scaled onto budget' )
    lpass *= print_results( capped.apBlocks(1), loud.apBlocks(1), text='quiet AP untouched' )

    # single-antenna users: WMMSE beats matched filtering on average
    cfg = SystemConfig(num_aps=2, num_users=2, tx_grid=(2,2), rx_grid=(1,1), num_rf_chains=2, num_streams=1,
                       num_paths=4, max_power_dbm=20., max_iters=30)
    fd, mrt = [], []
    for seed in range(4):
        chan = sampleChannel(cfg,seed)
        fd.append(wsr(runFullyDigital(cfg,chan)[0],chan,cfg.noise_power,cfg.weights))
        mrt.append(wsr(baselinePrecoder('mrt',chan,cfg.maxPower),chan,cfg.noise_power,cfg.weights))
    lpass *= print_check( std_mean(fd) > std_mean(mrt), f'fully digital {std_mean(fd):.3f} vs MRT {std_mean(mrt):.3f}' )

    concludeTest(lpass)


def testBaselineDominance():

    lpass = True

    # single-antenna users on 4x4 arrays, seed-paired over 20 channels
    cfg = SystemConfig(num_aps=2, num_users=4, tx_grid=(4,4), rx_grid=(1,1), num_rf_chains=8, num_streams=1)
    fd, zf, mrt = [], [], []
    for seed in range(20):
        chan = sampleChannel(cfg,seed)
        start = initFullyDigital(cfg,chan)
        fd.append(wsr(runFullyDigital(cfg,chan)[0],chan,cfg.noise_power,cfg.weights))
        zf.append(wsr(baselinePrecoder('zf',chan,cfg.maxPower),chan,cfg.noise_power,cfg.weights))
        mrt.append(wsr(baselinePrecoder('mrt',chan,cfg.maxPower),chan,cfg.noise_power,cfg.weights))
        lpass *= print_check( wsr(start,chan,cfg.noise_power,cfg.weights) >= zf[-1]*(1-1e-12), f'seed {seed}: start at least ZF' )
        lpass *= print_check( fd[-1] >= zf[-1]*(1-1e-8), f'seed {seed}: fully digital {fd[-1]:.4f} vs ZF {zf[-1]:.4f}' )
    lpass *= print_check( std_mean(fd) >= std_mean(zf), f'mean fully digital {std_mean(fd):.3f} >= ZF {std_mean(zf):.3f}' )
    lpass *= print_check( std_mean(fd) >= std_mean(mrt), f'mean fully digital {std_mean(fd):.3f} >= MRT {std_mean(mrt):.3f}' )

    # multi-antenna users keep the SVD start
    chan = sampleChannel(SMALL,3)
    lpass *= print_results( initFullyDigital(SMALL,chan).F, initAuxiliary(SMALL,chan).F, text='SVD start for N_r > 1' )

    concludeTest(lpass)


def testStationarity():

    lpass = True

    for seed in range(10):
        channel = sampleChannel(SMALL,200+seed)
        H       = channel.aggregated()
        stack, _ = runFullyDigital(SMALL,channel)
        G = updateCombiners(stack,H,SMALL.noise_power)
        W = updateWeights(G,stack,H,SMALL.noise_power)
        updated, mus, _ = updateFullyDigital(G,W,stack,H,SMALL.weights,SMALL.bisection_tol,SMALL.maxPower,
                                             returnMultipliers=True,network=True)
        objective = lambda s: lagrangian(G,W,s,None,H,SMALL.noise_power,SMALL.rho,SMALL.weights,mus,SMALL.maxPower)
        worst = max( blockStationarity(objective,updated,SMALL.B-1,u) for u in range(SMALL.U) )
        lpass *= print_check( worst < 1e-6, f'seed {seed}: relative gradient {worst:.2e} at the last AP' )
        lpass *= print_check( np.all(mus > 0), f'seed {seed}: positive multipliers' )

    concludeTest(lpass)


if __name__ == '__main__':
    testMultiplier()
    testRunFullyDigital()
    testBaselineDominance()
    testStationarity()
