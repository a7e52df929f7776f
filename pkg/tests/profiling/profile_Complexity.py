# 
# profile_Complexity.py
# 
# cellfreetools developers
# 
# How the auxiliary precoder update scales with the number of transmit antennas. The leading cost is one
# eigendecomposition of an N_t x N_t matrix per AP and user, so the log-log slope should approach 3 for large arrays.
# 
import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.utilities import timer
from cellfreetools.wireless.model import SystemConfig
from cellfreetools.wireless.channel import sampleChannel
from cellfreetools.wireless.hybridBCD import HybridPrecoder, initAuxiliary, initAnalog, initDigital, \
    updateCombiners, updateWeights, updateAuxiliary, complexityOrder

REPEATS = 5

sides   = [4, 6, 8]
timings = []
halvings = []

for side in sides:
    cfg     = SystemConfig(tx_grid=(side,side))
    channel = sampleChannel(cfg)
    H       = channel.aggregated()
    stack   = initAuxiliary(cfg,channel)
    analog  = initAnalog(cfg)
    hybrid  = HybridPrecoder(analog,initDigital(cfg,analog,stack))
    G       = updateCombiners(stack,H,cfg.noise_power)
    W       = updateWeights(G,stack,H,cfg.noise_power)

    timey = timer()
    for _ in range(REPEATS):
        _, _, steps = updateAuxiliary(G,W,stack,hybrid,H,cfg.rho,cfg.weights,cfg.bisection_tol,cfg.maxPower,
                                      returnMultipliers=True)
    elapsed = timey.lap()/REPEATS
    timings.append(elapsed)
    halvings.append(np.mean(steps))
    logger.info(f'N_t = {cfg.Nt:3d}: {1e3*elapsed:9.3f} ms per pass, {np.mean(steps):5.1f} halvings, '
                f'operation count {complexityOrder(cfg,np.mean(steps)):.3e}')

Nts   = np.array(sides)**2
slope = np.polyfit(np.log(Nts),np.log(timings),1)[0]
logger.info(f'log-log slope of the pass time: {slope:.2f}')
