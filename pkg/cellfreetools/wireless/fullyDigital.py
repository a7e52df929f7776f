#
# fullyDigital.py
#
# cellfreetools developers
#
# Weighted sum-rate precoding when every AP has one RF chain per antenna. The BCD loop is the hybrid one without
# the analog/digital split: G and W as before, then per AP the closed form
#
#   F_{b,u} = (Q_{b,u} + mu_b I)^{-1} M_{b,u}
#
# with the multiplier mu_b > 0 of the per-AP budget found by bisection. The solver matrices have low rank (N_s per
# user without coupling), so the power profile has terms P(n,n)/mu^2 from their null space.
#

import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType
from cellfreetools.base.utilities import perEntity, timer
from cellfreetools.math.math import dagger, hermitianEig, RANKRTOL
from cellfreetools.math.optimize import bisectDecreasing, polishRoot
from cellfreetools.wireless.model import TraceRecord, IterationTrace, SolverError, RankError, validateConfig
from cellfreetools.wireless.metrics import PrecoderStack, wmmseObjective, wsr, apPowers
from cellfreetools.wireless.hybridBCD import SubproblemData, buildSubproblem, updateCombiners, updateWeights, \
    initAuxiliary, networkStart, _checkChannel
from cellfreetools.wireless.baselines import baselinePrecoder


# Fully digital precoders are plain precoder stacks.
FdPrecoder = PrecoderStack

# Floor of the multiplier search.
MU_LB = 1e-12

# Null-space energy below this fraction of the total counts as round-off in the mu = 0 branch.
NULLRTOL = 1e-12


def _eigenvalues(b, data) -> np.ndarray:
    """
    Clamped eigenvalues of the solver matrices of AP b, shape (U, N_t).
    """
    eigs, _, _ = data.spectralTerms(b)
    return np.stack([ eig.values for eig in eigs ])


def _rankAwareTerms(b, data) -> tuple:
    """
    Eigenvalues with everything beyond the numerical rank set to exactly zero, and the P diagonals.
    """
    eigs, _, P = data.spectralTerms(b)
    values = np.zeros_like(P)
    ranks  = np.zeros(len(eigs),dtype=int)
    for u, eig in enumerate(eigs):
        ranks[u] = eig.rank(RANKRTOL)
        values[u,:ranks[u]] = eig.values[:ranks[u]]
    return values, P, ranks


def fdPowerProfile(b, data, mu, diagnostic=False) -> float:
    """
    Power of AP b at multiplier mu,

        sum_u [ sum_{n <= r_u} P(n,n)/(Sigma(n,n) + mu)^2 + sum_{n > r_u} P(n,n)/mu^2 ]

    with r_u the numerical rank of the solver matrix. For mu > 0 the eigenvalues beyond r_u enter as computed, so the
    profile is exactly ||(Q + mu I)^{-1} M||^2 summed over users. mu = 0 is only allowed with diagnostic=True: the
    pseudo-inverse solution then has finite power unless M has a component outside the range of Q, in which case inf
    is returned.
    """
    checkType(SubproblemData,data=data)
    if mu > 0:
        _, _, P = data.spectralTerms(b)
        return float(np.sum(P/(_eigenvalues(b,data)+mu)**2))
    if not diagnostic:
        logger.TBRaise('Multiplier must be > 0 outside diagnostics, got',mu)
    values, P, ranks = _rankAwareTerms(b,data)
    total = np.sum(P)
    power = 0.
    for u in range(len(ranks)):
        r = ranks[u]
        if np.sum(P[u,r:]) > NULLRTOL*total:
            return np.inf
        power += np.sum(P[u,:r]/values[u,:r]**2)
    return float(power)


def _fdProfile(mu, b, data) -> float:
    return fdPowerProfile(b,data,mu)


def solveMu(b, data, Pmax, eps, returnSteps=False):
    """
    Multiplier of the power budget of AP b, searched on (MU_LB, sqrt(sum P / Pmax)). If the budget already holds at
    MU_LB the floor is returned.

    Returns:
        float, or (float, int) with the number of halvings if returnSteps
    """
    if fdPowerProfile(b,data,MU_LB) <= Pmax:
        logger.debug(f'AP {b}: budget slack at the multiplier floor')
        mu, steps = MU_LB, 0
    else:
        _, P, _ = _rankAwareTerms(b,data)
        ub = np.sqrt(np.sum(P)/Pmax)
        mu, history = bisectDecreasing(_fdProfile,Pmax,MU_LB,ub,eps,args=(b,data),returnHistory=True)
        lo, hi = history[-1] if len(history) > 0 else (MU_LB,ub)
        mu     = polishRoot(_fdProfile,Pmax,lo,hi,args=(b,data))
        steps  = len(history)
    if returnSteps:
        return mu, steps
    return mu


def updateFDBlock(b, u, data, mu, diagnostic=False) -> np.ndarray:
    """
    F_{b,u} = (Q_{b,u} + mu I)^{-1} M_{b,u} from the eigendecomposition of Q_{b,u} that fdPowerProfile uses, so the
    block power equals the profile at mu. mu = 0 is only allowed with diagnostic=True and gives the pseudo-inverse
    solution Q^+ M, with eigenvalues beyond the numerical rank dropped.
    """
    if not mu > 0 and not (diagnostic and mu == 0):
        logger.TBRaise('Multiplier must be > 0 outside diagnostics, got',mu)
    eigs, rhss, _ = data.spectralTerms(b)
    if mu > 0:
        scale = 1/(_eigenvalues(b,data)[u] + mu)
    else:
        values = _rankAwareTerms(b,data)[0][u]
        scale  = np.zeros_like(values)
        scale[values > 0] = 1/values[values > 0]
    vectors = eigs[u].vectors
    return (vectors*scale) @ (dagger(vectors) @ rhss[u])


def checkSubproblemRank(data) -> np.ndarray:
    """
    Numerical rank (eigenvalues above RANKRTOL times the largest) of every Q_{b,u}, shape (B, U). On generic
    instances each equals N_s, or N_t when N_s = N_t.
    """
    checkType(SubproblemData,data=data)
    ranks = np.zeros((data.B,data.U),dtype=int)
    for b in range(data.B):
        for u in range(data.U):
            ranks[b,u] = hermitianEig(data.Q(b,u)).rank(RANKRTOL)
    return ranks


def updateFullyDigital(G, W, stack, H, weights, eps, Pmax, interferenceAware=True, returnMultipliers=False,
                       network=False):
    """
    One Gauss-Seidel pass over the APs of the fully digital block update. With network=True (interference-aware
    only) the pass starts from the joint solution over all APs when that lowers the subproblem objective.
    """
    Pmax  = perEntity(Pmax,stack.B,'Pmax')
    data  = buildSubproblem(G,W,stack,H,weights,interferenceAware=interferenceAware)
    if network and interferenceAware:
        stack = networkStart(data,None,Pmax)
    mus   = np.zeros(stack.B)
    steps = np.zeros(stack.B,dtype=int)
    for b in range(stack.B):
        data = data.withStack(stack)
        mus[b], steps[b] = solveMu(b,data,Pmax[b],eps,returnSteps=True)
        blocks = np.stack([ updateFDBlock(b,u,data,mus[b]) for u in range(stack.U) ])
        stack  = stack.withAPBlocks(b,blocks)
    if returnMultipliers:
        return stack, mus, steps
    return stack


def enforceBudget(stack, Pmax) -> PrecoderStack:
    """
    Scale every AP above its budget back onto it.
    """
    Pmax    = perEntity(Pmax,stack.B,'Pmax')
    powers  = apPowers(stack)
    factors = np.ones(stack.B)
    above   = powers > Pmax
    factors[above] = np.sqrt(Pmax[above]/powers[above])
    return stack.scaled(factors)


def _record(iteration, objective, stack, Hagg, cfg, mus=(), steps=()) -> TraceRecord:
    if not np.isfinite(objective):
        logger.TBRaise(f'Non-finite objective {objective} at iteration {iteration}',frame=3,
                       exception=SolverError(f'non-finite objective at iteration {iteration}'))
    return TraceRecord(iteration=iteration, objective=objective, wsr=wsr(stack,Hagg,cfg.noise_power,cfg.weights),
                       apPower=tuple(apPowers(stack)), multipliers=tuple(mus), bisectionSteps=tuple(int(s) for s in steps))


def initFullyDigital(cfg, channel) -> PrecoderStack:
    """
    The SVD start of the hybrid solver. For single-antenna users with one stream the zero-forcing precoder competes
    with it, and the start with the higher weighted sum rate is kept.
    """
    stack = initAuxiliary(cfg,channel)
    if cfg.Nr != 1 or cfg.Ns != 1:
        return stack
    try:
        zf = baselinePrecoder('zf',channel,cfg.maxPower)
    except RankError:
        logger.debug('zero forcing unavailable, starting from the SVD precoders')
        return stack
    Hagg = channel.aggregated()
    if wsr(zf,Hagg,cfg.noise_power,cfg.weights) > wsr(stack,Hagg,cfg.noise_power,cfg.weights):
        logger.debug('fully digital: starting from zero forcing')
        return zf
    return stack


def runFullyDigital(cfg, channel) -> tuple:
    """
    Fully digital precoder design by block coordinate descent, started from initFullyDigital.

    Args:
        cfg (SystemConfig)
        channel (ChannelRealization)

    Returns:
        tuple: (PrecoderStack, IterationTrace)
    """
    validateConfig(cfg)
    _checkChannel(cfg,channel)
    Hagg, sigma2, weights, Pmax = channel.aggregated(), cfg.noise_power, cfg.weights, cfg.maxPower

    clock   = timer()
    stack   = initFullyDigital(cfg,channel)
    G       = updateCombiners(stack,Hagg,sigma2)
    W       = updateWeights(G,stack,Hagg,sigma2)
    current = wmmseObjective(G,W,stack,None,Hagg,sigma2,cfg.rho,weights)
    records = [ _record(0,current,stack,Hagg,cfg) ]

    converged = False
    for n in range(1,cfg.max_iters+1):
        G = updateCombiners(stack,Hagg,sigma2)
        W = updateWeights(G,stack,Hagg,sigma2)
        stack, mus, steps = updateFullyDigital(G,W,stack,Hagg,weights,cfg.bisection_tol,Pmax,
                                               interferenceAware=cfg.interference_aware,returnMultipliers=True,
                                               network=cfg.network_solve)
        previous, current = current, wmmseObjective(G,W,stack,None,Hagg,sigma2,cfg.rho,weights)
        records.append(_record(n,current,stack,Hagg,cfg,mus,steps))
        logger.details(f'fully digital iteration {n}: objective = {current:.10g}, wsr = {records[-1].wsr:.10g}')
        if abs(current-previous) < cfg.convergence_tol:
            converged = True
            break

    stack = enforceBudget(stack,Pmax)
    trace = IterationTrace(solver='fully_digital',records=tuple(records),converged=converged)
    logger.info(f'fully digital: {trace.iterations} iterations, converged = {converged}, '
                f'wsr = {wsr(stack,Hagg,sigma2,weights):.6g} nats, {clock.lap():.3f} s')
    return stack, trace
