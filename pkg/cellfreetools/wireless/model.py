#
# model.py
#
# cellfreetools developers
#
# Scenario configuration, unit conventions and the result types shared by all solvers.
#
# Units: the noise power sigma^2 is in mW and transmit powers are given in dBm relative to 1 mW, so 30 dBm is a
# linear budget of 1000 against sigma^2 = 1.
#

import dataclasses
from dataclasses import dataclass, field
import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType, checkDomain
from cellfreetools.base.utilities import isArrayLike, isIntType, isScalar, perEntity
from cellfreetools.base.initialize import DEFAULTSEED
from cellfreetools.interfaces.interfaces import readDocument


class ConfigError(logger.CellFreeException): pass
class SolverError(logger.CellFreeException): pass
class RankError(SolverError): pass


PENALTY_RULES = ('simulation', 'algorithm')


def _configError(*args):
    message = ' '.join(str(s) for s in args)
    logger.TBRaise(message, frame=3, exception=ConfigError(message))


@dataclass(frozen=True)
class SystemConfig:
    """
    All dimensions, powers and algorithm constants of one cell-free downlink scenario. Defaults are the reference
    scenario: 2 APs with 8x8 arrays, 4 users with 2x2 arrays, 8 RF chains, 2 streams per user, 8 paths, 30 dBm.

    max_power_dbm, user_weights and penalty take either one value for everybody or one value per AP/user.
    penalty=None picks rho_b from penalty_rule: 'simulation' gives 100/N_t, 'algorithm' gives N_t/100.
    interference_aware=True lets the precoder subproblem see the quadratic coupling to the other users' weighted
    MSE terms; False solves the per-user subproblem exactly as stated without it. network_solve=True starts every
    precoder pass from the joint solution over all APs (interference-aware only); analog_sweeps caps the number of
    F_BB/F_RF alternations per hybrid iteration.
    """
    num_aps               : int   = 2
    num_users             : int   = 4
    tx_grid               : tuple = (8, 8)
    rx_grid               : tuple = (2, 2)
    num_rf_chains         : int   = 8
    num_streams           : int   = 2
    num_paths             : int   = 8
    noise_power           : float = 1.0
    max_power_dbm         : object = 30.0
    user_weights          : object = 1.0
    penalty               : object = None
    penalty_rule          : str   = 'simulation'
    bisection_tol         : float = 1e-6
    convergence_tol       : float = 1e-4
    max_iters             : int   = 100
    antenna_spacing_ratio : float = 0.5
    seed                  : int   = DEFAULTSEED
    interference_aware    : bool  = True
    network_solve         : bool  = True
    analog_sweeps         : int   = 10

    def __post_init__(self):
        # Freeze sequence-valued fields so that configs hash and compare by value.
        for name in ('tx_grid','rx_grid','max_power_dbm','user_weights','penalty'):
            value = getattr(self,name)
            if isinstance(value,(list,np.ndarray)):
                object.__setattr__(self,name,tuple(np.asarray(value).tolist()))

    def __repr__(self) -> str:
        return "SystemConfig"

    @property
    def B(self) -> int:
        return self.num_aps

    @property
    def U(self) -> int:
        return self.num_users

    @property
    def Nt(self) -> int:
        return int(self.tx_grid[0]*self.tx_grid[1])

    @property
    def Nr(self) -> int:
        return int(self.rx_grid[0]*self.rx_grid[1])

    @property
    def NRF(self) -> int:
        return self.num_rf_chains

    @property
    def Ns(self) -> int:
        return self.num_streams

    @property
    def L(self) -> int:
        return self.num_paths

    @property
    def maxPower(self) -> np.ndarray:
        """
        Per-AP power budgets in mW.
        """
        return np.array([ float(dbmToLinear(p)) for p in perEntity(self.max_power_dbm,self.B,'max_power_dbm') ])

    @property
    def weights(self) -> np.ndarray:
        return perEntity(self.user_weights,self.U,'user_weights')

    @property
    def rho(self) -> np.ndarray:
        """
        Per-AP penalty parameters.
        """
        if self.penalty is None:
            if self.penalty_rule == 'algorithm':
                return np.full(self.B,self.Nt/100)
            return np.full(self.B,100/self.Nt)
        return perEntity(self.penalty,self.B,'penalty')

    def replace(self, **changes):
        """
        Copy of this config with some fields changed.
        """
        return dataclasses.replace(self, **changes)


class LinearPower(float):
    """
    A non-negative power in mW.
    """

    def __new__(cls, value):
        value = float(value)
        if not value >= 0:
            logger.TBRaise('Power must be non-negative, got',value,exception=ValueError(f'negative power {value}'))
        return super().__new__(cls, value)

    def __repr__(self) -> str:
        return f"LinearPower({float(self)} mW)"


def dbmToLinear(p) -> LinearPower:
    """
    Convert dBm to mW: 10^(p/10).
    """
    checkType("real",p=p)
    if not np.isfinite(p):
        logger.TBRaise('Power in dBm must be finite, got',p)
    return LinearPower(10.0**(float(p)/10))


def _checkCount(name, value, count, positive=True):
    if isArrayLike(value):
        if len(value) != count:
            _configError(f'{name} needs 1 or {count} entries, got {len(value)}')
        values = value
    else:
        values = [value]
    for v in values:
        if not isScalar(v) or not np.isfinite(v):
            _configError(f'{name} entries must be finite numbers, got {v}')
        if positive and not v > 0:
            _configError(f'{name} must be > 0, got {v}')


def validateConfig(cfg) -> SystemConfig:
    """
    Check every invariant of a SystemConfig. Returns cfg unchanged if all hold, raises ConfigError naming the first
    violated condition otherwise. Idempotent.
    """
    checkType(SystemConfig,cfg=cfg)

    for name in ('num_aps','num_users','num_rf_chains','num_streams','num_paths','max_iters','analog_sweeps'):
        value = getattr(cfg,name)
        if not isIntType(value) or value < 1:
            _configError(f'{name} must be a positive integer, got {value}')
    for name in ('tx_grid','rx_grid'):
        grid = getattr(cfg,name)
        if (not isArrayLike(grid)) or len(grid) != 2 or not all( isIntType(g) and g >= 1 for g in grid ):
            _configError(f'{name} must be two positive integers (W, H), got {grid}')

    if cfg.NRF > cfg.Nt:
        _configError(f'N_RF <= N_t violated: N_RF = {cfg.NRF} > N_t = {cfg.Nt}')
    if cfg.Ns > cfg.Nr:
        _configError(f'N_s <= N_r violated: N_s = {cfg.Ns} > N_r = {cfg.Nr}')
    if cfg.Ns > cfg.Nt:
        _configError(f'N_s <= N_t violated: N_s = {cfg.Ns} > N_t = {cfg.Nt}')
    if cfg.U*cfg.Ns > cfg.B*cfg.NRF:
        _configError(f'U*N_s <= B*N_RF violated: U*N_s = {cfg.U*cfg.Ns} > B*N_RF = {cfg.B*cfg.NRF}')

    _checkCount('noise_power',cfg.noise_power,1)
    _checkCount('bisection_tol',cfg.bisection_tol,1)
    _checkCount('convergence_tol',cfg.convergence_tol,1)
    _checkCount('antenna_spacing_ratio',cfg.antenna_spacing_ratio,1)
    _checkCount('max_power_dbm',cfg.max_power_dbm,cfg.B,positive=False)
    _checkCount('user_weights',cfg.user_weights,cfg.U)
    if cfg.penalty is not None:
        _checkCount('penalty',cfg.penalty,cfg.B)
    if cfg.penalty_rule not in PENALTY_RULES:
        _configError(f'penalty_rule must be one of {PENALTY_RULES}, got {cfg.penalty_rule}')
    if not isinstance(cfg.interference_aware,(bool,np.bool_)):
        _configError(f'interference_aware must be a bool, got {cfg.interference_aware}')
    if not isinstance(cfg.network_solve,(bool,np.bool_)):
        _configError(f'network_solve must be a bool, got {cfg.network_solve}')
    if not isIntType(cfg.seed) or not (0 <= cfg.seed < 2**64):
        _configError(f'seed must be an integer in [0, 2^64), got {cfg.seed}')
    return cfg


# ----------------------------------------------------------------------------------------------- CONFIG DOCUMENTS


CONFIGKEYS = tuple(f.name for f in dataclasses.fields(SystemConfig))


def configFromDict(data, base=None) -> SystemConfig:
    """
    Build a SystemConfig from a flat mapping of field names. Unknown keys are rejected. Missing keys are taken from
    base, or from the defaults.
    """
    checkType(dict,data=data)
    unknown = [ key for key in data if key not in CONFIGKEYS ]
    if len(unknown) > 0:
        _configError('Unknown configuration keys',unknown)
    if base is None:
        base = SystemConfig()
    try:
        return base.replace(**data)
    except TypeError as e:
        _configError('Malformed configuration:',e)


def configToDict(cfg) -> dict:
    """
    Flat, JSON-serializable mapping of a SystemConfig.
    """
    checkType(SystemConfig,cfg=cfg)
    result = {}
    for key in CONFIGKEYS:
        value = getattr(cfg,key)
        result[key] = list(value) if isinstance(value,tuple) else value
    return result


def splitDocument(data) -> tuple:
    """
    Separate SystemConfig keys from everything else in a flat document.

    Returns:
        tuple: (config keys dict, remaining keys dict)
    """
    checkType(dict,data=data)
    config = { key: value for key, value in data.items() if key in CONFIGKEYS }
    rest   = { key: value for key, value in data.items() if key not in CONFIGKEYS }
    return config, rest


def loadConfig(filename) -> SystemConfig:
    """
    Read and validate a SystemConfig from a JSON or YAML file.
    """
    try:
        data = readDocument(filename)
    except (OSError, ValueError, logger.CellFreeException) as e:
        _configError('Could not read configuration',filename,':',e)
    return validateConfig(configFromDict(data))


# ----------------------------------------------------------------------------------------------------------- TRACES


@dataclass(frozen=True)
class TraceRecord:
    """
    State of a solver after one iteration. Iteration 0 is the initial point.
    """
    iteration      : int
    objective      : float
    wsr            : float
    apPower        : tuple
    multipliers    : tuple = ()
    bisectionSteps : tuple = ()

    def __repr__(self) -> str:
        return "TraceRecord"


@dataclass(frozen=True)
class IterationTrace:
    """
    Per-iteration history of a solver run. Holds at most max_iters + 1 records.
    """
    solver    : str
    records   : tuple = field(default_factory=tuple)
    converged : bool  = False

    def __repr__(self) -> str:
        return "IterationTrace"

    def __len__(self) -> int:
        return len(self.records)

    @property
    def iterations(self) -> int:
        """
        Number of completed BCD iterations.
        """
        if len(self.records) == 0:
            return 0
        return self.records[-1].iteration

    def objectives(self) -> np.ndarray:
        return np.array([ r.objective for r in self.records ])

    def wsrs(self) -> np.ndarray:
        return np.array([ r.wsr for r in self.records ])

    def maxAPPower(self) -> np.ndarray:
        return np.array([ max(r.apPower) for r in self.records ])

    def bisectionSteps(self) -> np.ndarray:
        """
        Total number of bisection halvings per iteration, summed over APs.
        """
        return np.array([ sum(r.bisectionSteps) for r in self.records ])
