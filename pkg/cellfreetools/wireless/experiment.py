#
# experiment.py
#
# cellfreetools developers
#
# Seeded Monte-Carlo sweeps over one scenario parameter, convergence traces and the oracle suite. Trial t of every
# sweep point draws its channel with seed master XOR t, so all points of a sweep see the same drops wherever the
# dimensions agree.
#

import math
from dataclasses import dataclass, field
import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType, DivideByZeroError, InvalidValueError
from cellfreetools.base.initialize import DEFAULTSEED, subStream, trialSeed, STREAM_VERIFY
from cellfreetools.base.fileSystem import stem
from cellfreetools.base.readWrite import writeCSV
from cellfreetools.base.speedify import parallel_function_eval
from cellfreetools.base.utilities import timer
from cellfreetools.math.optimize import BracketError
from cellfreetools.statistics.statistics import meanAndError
from cellfreetools.wireless.model import SystemConfig, ConfigError, SolverError, RankError, validateConfig, \
    configFromDict, splitDocument
from cellfreetools.wireless.channel import sampleChannel
from cellfreetools.wireless.metrics import PrecoderStack, wsr, apPowers
from cellfreetools.wireless.hybridBCD import HybridPrecoder, runHybrid, buildSubproblem, updateCombiners, \
    updateWeights, updateAuxiliary
from cellfreetools.wireless.fullyDigital import runFullyDigital, fdPowerProfile, updateFDBlock, checkSubproblemRank
from cellfreetools.wireless.baselines import baselinePrecoder
from cellfreetools.wireless.validation import checkBlockDecomposition, checkWsrWmmseEquivalence, lagrangian, \
    blockStationarity


AXES = { 'power_dbm'       : 'max_power_dbm',
         'num_rf_chains'   : 'num_rf_chains',
         'num_aps'         : 'num_aps',
         'num_users'       : 'num_users',
         'num_tx_antennas' : 'tx_grid' }

SOLVERS   = ('hybrid', 'fully_digital', 'zf', 'mrt')
BASELINES = ('zf', 'mrt')

RESULTCOLUMNS    = ['axis','value','trial','solver','wsr_nats','wsr_bits','iters','max_ap_power_mw','wall_ms','status']
AGGREGATECOLUMNS = ['axis','value','solver','trials','wsr_nats_mean','wsr_nats_stderr','wsr_bits_mean','wsr_bits_stderr']
TRACECOLUMNS     = ['iteration','solver','objective','wsr','max_ap_power']

# Sweeps default to 4x4 transmit arrays.
DESKGRID = (4, 4)

EXPERIMENTKEYS = ('axis','values','solvers','trials','seed','output','workers')


def _configError(*args):
    message = ' '.join(str(s) for s in args)
    logger.TBRaise(message, frame=3, exception=ConfigError(message))


@dataclass(frozen=True)
class ExperimentSpec:
    """
    One sweep: base configuration, swept axis with its values, solvers, trials per point, master seed and output
    path. workers > 1 runs trials in a process pool.
    """
    base    : SystemConfig = field(default_factory=lambda: SystemConfig(tx_grid=DESKGRID))
    axis    : str   = 'power_dbm'
    values  : tuple = (10., 20., 30., 40.)
    solvers : tuple = ('hybrid', 'fully_digital')
    trials  : int   = 10
    seed    : int   = DEFAULTSEED
    output  : str   = 'results/sweep.csv'
    workers : int   = 1

    def __post_init__(self):
        for name in ('values','solvers'):
            value = getattr(self,name)
            if isinstance(value,(list,np.ndarray)):
                object.__setattr__(self,name,tuple(np.asarray(value).tolist()))
            elif not isinstance(value,tuple):
                object.__setattr__(self,name,(value,))

    def __repr__(self) -> str:
        return "ExperimentSpec"


def configAt(spec, value) -> SystemConfig:
    """
    Base configuration with the swept parameter set to value. N_t values must be perfect squares and become
    square grids.
    """
    key = AXES[spec.axis]
    if spec.axis == 'num_tx_antennas':
        side = math.isqrt(int(value))
        if side*side != value:
            _configError(f'num_tx_antennas = {value} is not a perfect square')
        return spec.base.replace(tx_grid=(side,side))
    if spec.axis == 'power_dbm':
        return spec.base.replace(**{key: float(value)})
    if float(value) != int(value):
        _configError(f'{spec.axis} needs integer values, got {value}')
    return spec.base.replace(**{key: int(value)})


def validateSpec(spec) -> ExperimentSpec:
    """
    Check the sweep definition and every configuration it produces.
    """
    checkType(ExperimentSpec,spec=spec)
    if spec.axis not in AXES:
        _configError(f'Unknown axis {spec.axis}; choose from {list(AXES)}')
    if len(spec.values) == 0:
        _configError('Sweep needs at least one value')
    unknown = [ s for s in spec.solvers if s not in SOLVERS ]
    if len(unknown) > 0 or len(spec.solvers) == 0:
        _configError(f'Solvers must be a non-empty subset of {SOLVERS}, got {spec.solvers}')
    if not isinstance(spec.trials,int) or spec.trials < 1:
        _configError(f'trials must be a positive integer, got {spec.trials}')
    if not isinstance(spec.workers,int) or spec.workers < 1:
        _configError(f'workers must be a positive integer, got {spec.workers}')
    if not isinstance(spec.seed,int) or not (0 <= spec.seed < 2**64):
        _configError(f'seed must be an integer in [0, 2^64), got {spec.seed}')
    for value in spec.values:
        try:
            cfg = configAt(spec,value)
        except (TypeError, ValueError) as e:
            _configError(f'Bad {spec.axis} value {value}: {e}')
        validateConfig(cfg)
    return spec


def specFromDict(data) -> ExperimentSpec:
    """
    ExperimentSpec from a flat mapping of SystemConfig keys plus axis, values, solvers, trials, seed, output and
    workers. Transmit grids default to 4x4.
    """
    config, rest = splitDocument(data)
    unknown = [ key for key in rest if key not in EXPERIMENTKEYS ]
    if len(unknown) > 0:
        _configError('Unknown experiment keys',unknown)
    if 'seed' in config:
        rest['seed'] = config['seed']
    base = configFromDict(config,base=SystemConfig(tx_grid=DESKGRID))
    return ExperimentSpec(base=base,**rest)


# ------------------------------------------------------------------------------------------------------- SWEEPS


def _errorKind(exc) -> str:
    if isinstance(exc,ConfigError):
        return 'config'
    if isinstance(exc,RankError):
        return 'rank'
    if isinstance(exc,(SolverError,BracketError)):
        return 'solver'
    return 'numeric'


def runSolver(solver, cfg, channel) -> tuple:
    """
    Run one solver on one channel.

    Returns:
        tuple: (PrecoderStack actually transmitted, iterations)
    """
    if solver == 'hybrid':
        hybrid, _, trace = runHybrid(cfg,channel)
        return hybrid.product(), trace.iterations
    if solver == 'fully_digital':
        stack, trace = runFullyDigital(cfg,channel)
        return stack, trace.iterations
    return baselinePrecoder(solver,channel,cfg.maxPower), 0


def _trialRows(job, spec) -> list:
    """
    All result rows of one (sweep value, trial) pair, one per solver in the order of spec.solvers.
    """
    value, trial = job
    cfg     = configAt(spec,value)
    channel = sampleChannel(cfg,trialSeed(spec.seed,trial))
    rows    = []
    for solver in spec.solvers:
        nan = float('nan')
        if solver in BASELINES and (cfg.Nr != 1 or cfg.Ns != 1):
            rows.append([spec.axis,value,trial,solver,nan,nan,0,nan,0.,'skipped'])
            continue
        clock = timer()
        try:
            stack, iters = runSolver(solver,cfg,channel)
            rate = wsr(stack,channel,cfg.noise_power,cfg.weights)
            rows.append([spec.axis,value,trial,solver,rate,rate/np.log(2),iters,float(np.max(apPowers(stack))),
                         1e3*clock.lap(),'ok'])
        except (logger.CellFreeException, ArithmeticError, DivideByZeroError, InvalidValueError,
                np.linalg.LinAlgError, ValueError) as e:
            logger.warn(f'{solver} failed at {spec.axis} = {value}, trial {trial}: {e}')
            rows.append([spec.axis,value,trial,solver,nan,nan,0,nan,1e3*clock.lap(),'error:'+_errorKind(e)])
    return rows


def aggregate(rows, axis=None) -> list:
    """
    Mean and standard error of the rate per (value, solver) over the rows with status ok, in order of first
    appearance.
    """
    groups = {}
    for row in rows:
        key = (row[1],row[3])
        groups.setdefault(key,[])
        if row[9] == 'ok':
            groups[key].append(row[4])
    table = []
    for (value, solver), rates in groups.items():
        axisName = rows[0][0] if axis is None else axis
        if len(rates) == 0:
            table.append([axisName,value,solver,0,np.nan,np.nan,np.nan,np.nan])
            continue
        mean, err = meanAndError(rates)
        table.append([axisName,value,solver,len(rates),mean,err,mean/np.log(2),err/np.log(2)])
    return table


def runExperiment(spec, write=True) -> list:
    """
    Run a sweep. Writes spec.output with one row per (value, trial, solver) and <stem>_aggregate.csv next to it.
    Rows are ordered by value, trial and solver no matter how many workers run.

    Returns:
        list: result rows in RESULTCOLUMNS order
    """
    validateSpec(spec)
    jobs = [ (value,trial) for value in spec.values for trial in range(spec.trials) ]
    logger.info(f'Sweep over {spec.axis}: {len(spec.values)} points x {spec.trials} trials, solvers {spec.solvers}')
    clock   = timer()
    results = parallel_function_eval(_trialRows,jobs,args=(spec,),nproc=spec.workers)
    rows    = [ row for block in results for row in block ]
    if write:
        writeCSV(spec.output,RESULTCOLUMNS,rows)
        writeCSV(stem(spec.output)+'_aggregate.csv',AGGREGATECOLUMNS,aggregate(rows,spec.axis))
        logger.info('Wrote',spec.output)
    failures = sum( 1 for row in rows if row[9].startswith('error') )
    if failures > 0:
        logger.warn(f'{failures} of {len(rows)} runs failed')
    clock.printTiming('sweep')
    return rows


def runConvergenceTrace(cfg, seed=None, output=None) -> list:
    """
    Per-iteration objective, rate and largest AP power of the hybrid and fully digital solvers on one channel.

    Returns:
        list: rows in TRACECOLUMNS order, hybrid first
    """
    validateConfig(cfg)
    if seed is None:
        seed = cfg.seed
    channel = sampleChannel(cfg,seed)
    _, _, hybridTrace = runHybrid(cfg,channel)
    _, digitalTrace   = runFullyDigital(cfg,channel)
    rows = []
    for trace in (hybridTrace, digitalTrace):
        for record in trace.records:
            rows.append([record.iteration,trace.solver,record.objective,record.wsr,max(record.apPower)])
    if output is not None:
        writeCSV(output,TRACECOLUMNS,rows)
        logger.info('Wrote',output)
    return rows


# ------------------------------------------------------------------------------------------------------- VERIFY


VERIFYCONFIG = SystemConfig(num_aps=2, num_users=2, tx_grid=(2,2), rx_grid=(2,1), num_rf_chains=2, num_streams=2,
                            num_paths=4, max_power_dbm=20.)

VERIFYTOL = { 'block_decomposition'  : 1e-8,
              'wsr_wmmse_equivalence': 1e-8,
              'fd_power_profile'     : 1e-8,
              'stationarity'         : 1e-6,
              'subproblem_rank'      : 0 }


def randomInstance(cfg, seed) -> tuple:
    """
    A channel, random feasible auxiliary precoders, a random hybrid precoder and random multipliers for the
    oracle checks, all drawn from (seed, STREAM_VERIFY).

    Returns:
        tuple: (channel, PrecoderStack, HybridPrecoder, multipliers)
    """
    channel = sampleChannel(cfg,seed)
    rng     = subStream(seed,STREAM_VERIFY)
    shape   = (cfg.U,cfg.B*cfg.Nt,cfg.Ns)
    F       = rng.standard_normal(shape) + 1j*rng.standard_normal(shape)
    stack   = PrecoderStack(F,cfg.Nt)
    stack   = stack.scaled(np.sqrt(cfg.maxPower/apPowers(stack)))
    analog  = np.exp(1j*rng.uniform(-np.pi,np.pi,size=(cfg.B,cfg.Nt,cfg.NRF)))
    dshape  = (cfg.B,cfg.U,cfg.NRF,cfg.Ns)
    digital = rng.standard_normal(dshape) + 1j*rng.standard_normal(dshape)
    return channel, stack, HybridPrecoder(analog,digital), rng.uniform(0,1,size=cfg.B)


def verifySeed(seed, cfg=VERIFYCONFIG) -> dict:
    """
    Discrepancies of all oracles on one random instance.
    """
    channel, stack, hybrid, lams = randomInstance(cfg,seed)
    H, sigma2, weights, rho = channel.aggregated(), cfg.noise_power, cfg.weights, cfg.rho
    G = updateCombiners(stack,H,sigma2)
    W = updateWeights(G,stack,H,sigma2)
    result = {}
    result['block_decomposition'] = checkBlockDecomposition(G,W,stack,hybrid,H,rho,weights,lams,sigma2=sigma2,Pmax=cfg.maxPower)
    result['wsr_wmmse_equivalence'] = checkWsrWmmseEquivalence(stack,H,sigma2,weights)

    data  = buildSubproblem(G,W,stack,H,weights)
    worst = 0.
    for b in range(cfg.B):
        mu     = 0.1*max( np.max(np.linalg.eigvalsh(data.solverQ(b,u))) for u in range(cfg.U) ) + 1e-3
        direct = sum( np.sum(np.abs(updateFDBlock(b,u,data,mu))**2) for u in range(cfg.U) )
        worst  = max(worst,abs(fdPowerProfile(b,data,mu)-direct)/direct)
    result['fd_power_profile'] = worst
    result['subproblem_rank'] = int(np.max(np.abs(checkSubproblemRank(data) - min(cfg.Ns,cfg.Nt))))

    updated, mults, _ = updateAuxiliary(G,W,stack,hybrid,H,rho,weights,cfg.bisection_tol,cfg.maxPower,
                                        returnMultipliers=True)
    objective = lambda s: lagrangian(G,W,s,hybrid,H,sigma2,rho,weights,mults,cfg.maxPower)
    result['stationarity'] = max( blockStationarity(objective,updated,cfg.B-1,u) for u in range(cfg.U) )
    return result


def verify(seeds=20, cfg=VERIFYCONFIG, firstSeed=DEFAULTSEED) -> tuple:
    """
    Run the oracle suite on seeds consecutive seeds.

    Returns:
        tuple: (rows [seed, check, value, tolerance, passed], all passed)
    """
    checkType('int',seeds=seeds)
    rows = []
    for i in range(seeds):
        seed = firstSeed + i
        for check, value in verifySeed(seed,cfg).items():
            passed = value <= VERIFYTOL[check]
            rows.append([seed,check,value,VERIFYTOL[check],passed])
            if passed:
                logger.details(f'seed {seed}: {check} = {value:.3e}')
            else:
                logger.TBFail(f'seed {seed}: {check} = {value:.3e} > {VERIFYTOL[check]:.1e}')
    allPassed = all( row[4] for row in rows )
    if allPassed:
        logger.TBPass(f'All {len(rows)} checks passed on {seeds} seeds.')
    return rows, allPassed
