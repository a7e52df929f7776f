#
# channel.py
#
# cellfreetools developers
#
# Narrow-band multipath mmWave channels between every AP b and user u, with uniform planar arrays at both ends.
#
#   H_{b,u} = sqrt(N_t N_r / L) sum_l alpha_l a_r(phi_r, theta_r) a_t(phi_t, theta_t)^H,   alpha_l ~ CN(0,1)
#
# Azimuths are uniform on (-pi, pi], elevations uniform on (-pi/2, pi/2], every path drawing its own angles. Each
# (b,u) link uses its own random stream (seed, STREAM_CHANNEL, b, u), so a realization does not depend on the order
# in which links or trials are generated.
#

from dataclasses import dataclass
import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType, checkShape
from cellfreetools.base.initialize import subStream, STREAM_CHANNEL
from cellfreetools.base.utilities import isIntType
from cellfreetools.interfaces.interfaces import readJSON, writeJSON, complexToPairs, pairsToComplex
from cellfreetools.math.math import dagger
from cellfreetools.wireless.model import SystemConfig, validateConfig


def wrapAngle(angle) -> float:
    """
    Map an angle into (-pi, pi].
    """
    wrapped = np.pi - np.mod(np.pi - angle, 2*np.pi)
    return wrapped


@dataclass(frozen=True)
class SteeringVector:
    """
    Unit-norm response of a W x H planar array. Entry m*H + n belongs to grid position (m, n).
    """
    entries : np.ndarray
    phi     : float
    theta   : float

    def __repr__(self) -> str:
        return "SteeringVector"


def steeringVector(phi, theta, grid, spacingRatio=0.5) -> SteeringVector:
    """
    Array response (1/sqrt(WH)) exp(j 2 pi (d/lambda) (m sin(phi) sin(theta) + n cos(theta))), flattened m-major.

    Args:
        phi (float): azimuth in rad
        theta (float): elevation in rad
        grid (tuple): (W, H)
        spacingRatio (float, optional): antenna spacing over wavelength. Defaults to 0.5.

    Returns:
        SteeringVector
    """
    W, H = grid
    checkType('int',W=W)
    checkType('int',H=H)
    if W < 1 or H < 1:
        logger.TBRaise('Array grid needs W, H >= 1, got',grid)
    return SteeringVector(entries=_response(phi,theta,W,H,spacingRatio), phi=wrapAngle(phi), theta=wrapAngle(theta))


def _response(phi, theta, W, H, spacingRatio) -> np.ndarray:
    """
    Array responses for a vector of angle pairs, one column per pair: shape (W*H, len(phi)).
    """
    phi   = np.atleast_1d(np.asarray(phi,dtype=float))
    theta = np.atleast_1d(np.asarray(theta,dtype=float))
    m     = np.arange(W)[:,None,None]
    n     = np.arange(H)[None,:,None]
    phase = 2*np.pi*spacingRatio*( m*np.sin(phi)*np.sin(theta) + n*np.cos(theta) )
    vec   = np.exp(1j*phase).reshape(W*H,len(phi))/np.sqrt(W*H)
    if vec.shape[1] == 1:
        return vec[:,0]
    return vec


@dataclass(frozen=True)
class PathParams:
    """
    Per-path gains and angles, every array of shape (B, U, L).
    """
    gains        : np.ndarray
    aodAzimuth   : np.ndarray
    aodElevation : np.ndarray
    aoaAzimuth   : np.ndarray
    aoaElevation : np.ndarray

    def __repr__(self) -> str:
        return "PathParams"

    def toDict(self) -> dict:
        return { 'gains'         : complexToPairs(self.gains),
                 'aod_azimuth'   : np.ravel(self.aodAzimuth).tolist(),
                 'aod_elevation' : np.ravel(self.aodElevation).tolist(),
                 'aoa_azimuth'   : np.ravel(self.aoaAzimuth).tolist(),
                 'aoa_elevation' : np.ravel(self.aoaElevation).tolist() }

    @classmethod
    def fromDict(cls, data, shape):
        return cls( gains        = pairsToComplex(data['gains'],shape),
                    aodAzimuth   = np.reshape(data['aod_azimuth'],shape),
                    aodElevation = np.reshape(data['aod_elevation'],shape),
                    aoaAzimuth   = np.reshape(data['aoa_azimuth'],shape),
                    aoaElevation = np.reshape(data['aoa_elevation'],shape) )


@dataclass(frozen=True)
class ChannelRealization:
    """
    All AP-user channels of one drop. H has shape (B, U, N_r, N_t); H[b,u] is H_{b,u}.
    """
    H            : np.ndarray
    paths        : PathParams = None
    seed         : int        = None
    txGrid       : tuple      = None
    rxGrid       : tuple      = None
    spacingRatio : float      = 0.5

    def __post_init__(self):
        H = np.array(self.H,dtype=complex)
        if H.ndim != 4:
            logger.TBRaise('Channel array must have shape (B, U, N_r, N_t), got',H.shape)
        H.setflags(write=False)
        object.__setattr__(self,'H',H)

    def __repr__(self) -> str:
        return "ChannelRealization"

    @property
    def B(self) -> int:
        return self.H.shape[0]

    @property
    def U(self) -> int:
        return self.H.shape[1]

    @property
    def Nr(self) -> int:
        return self.H.shape[2]

    @property
    def Nt(self) -> int:
        return self.H.shape[3]

    def block(self, b, u) -> np.ndarray:
        _checkIndex(b,self.B,'AP')
        _checkIndex(u,self.U,'user')
        return self.H[b,u]

    def aggregated(self) -> np.ndarray:
        """
        All aggregated user channels, shape (U, N_r, B*N_t).
        """
        return np.concatenate([ self.H[b] for b in range(self.B) ],axis=-1)

    def toDict(self) -> dict:
        data = { 'dims'    : list(self.H.shape),
                 'entries' : complexToPairs(self.H),
                 'seed'    : self.seed,
                 'tx_grid' : None if self.txGrid is None else list(self.txGrid),
                 'rx_grid' : None if self.rxGrid is None else list(self.rxGrid),
                 'antenna_spacing_ratio' : self.spacingRatio }
        if self.paths is not None:
            data['paths'] = self.paths.toDict()
        return data

    @classmethod
    def fromDict(cls, data):
        dims  = tuple(data['dims'])
        paths = None
        if data.get('paths') is not None:
            L     = len(data['paths']['aod_azimuth'])//(dims[0]*dims[1])
            paths = PathParams.fromDict(data['paths'],dims[:2]+(L,))
        return cls( H            = pairsToComplex(data['entries'],dims),
                    paths        = paths,
                    seed         = data.get('seed'),
                    txGrid       = None if data.get('tx_grid') is None else tuple(data['tx_grid']),
                    rxGrid       = None if data.get('rx_grid') is None else tuple(data['rx_grid']),
                    spacingRatio = data.get('antenna_spacing_ratio',0.5) )


def _checkIndex(i, n, what):
    if not isIntType(i) or not (0 <= i < n):
        logger.TBRaise(f'{what} index {i} out of range 0..{n-1}',frame=3,exception=IndexError(f'{what} index {i} out of range'))


def aggregateUserChannel(realization, u) -> np.ndarray:
    """
    H_u = [H_{0,u} | H_{1,u} | ... | H_{B-1,u}], shape N_r x B*N_t.
    """
    checkType(ChannelRealization,realization=realization)
    _checkIndex(u,realization.U,'user')
    return np.concatenate([ realization.H[b,u] for b in range(realization.B) ],axis=1)


def _drawPaths(rng, L) -> tuple:
    gains = (rng.standard_normal(L) + 1j*rng.standard_normal(L))/np.sqrt(2)
    # 1 - U with U on [0,1) lands on (0,1], giving the half-open intervals (-pi,pi] and (-pi/2,pi/2].
    aodAz = np.pi*(1 - 2*rng.random(L))
    aodEl = 0.5*np.pi*(1 - 2*rng.random(L))
    aoaAz = np.pi*(1 - 2*rng.random(L))
    aoaEl = 0.5*np.pi*(1 - 2*rng.random(L))
    return gains, aodAz, aodEl, aoaAz, aoaEl


def channelFromPaths(cfg, paths, seed=None) -> ChannelRealization:
    """
    Assemble all H_{b,u} from given path parameters.
    """
    checkType(SystemConfig,cfg=cfg)
    checkType(PathParams,paths=paths)
    for name in ('gains','aodAzimuth','aodElevation','aoaAzimuth','aoaElevation'):
        checkShape(getattr(paths,name),(cfg.B,cfg.U,None),name)
    L     = paths.gains.shape[2]
    scale = np.sqrt(cfg.Nt*cfg.Nr/L)
    H     = np.zeros((cfg.B,cfg.U,cfg.Nr,cfg.Nt),dtype=complex)
    for b in range(cfg.B):
        for u in range(cfg.U):
            At = _response(paths.aodAzimuth[b,u],paths.aodElevation[b,u],*cfg.tx_grid,cfg.antenna_spacing_ratio)
            Ar = _response(paths.aoaAzimuth[b,u],paths.aoaElevation[b,u],*cfg.rx_grid,cfg.antenna_spacing_ratio)
            At = At.reshape(cfg.Nt,L)
            Ar = Ar.reshape(cfg.Nr,L)
            H[b,u] = scale*(Ar*paths.gains[b,u]) @ dagger(At)
    return ChannelRealization(H=H, paths=paths, seed=seed, txGrid=tuple(cfg.tx_grid), rxGrid=tuple(cfg.rx_grid),
                              spacingRatio=cfg.antenna_spacing_ratio)


def sampleChannel(cfg, seed=None) -> ChannelRealization:
    """
    Draw one channel realization. The result is a pure function of (cfg, seed); link (b,u) only depends on
    (seed, b, u).

    Args:
        cfg (SystemConfig): validated configuration
        seed (int, optional): drop seed. Defaults to cfg.seed.

    Returns:
        ChannelRealization
    """
    validateConfig(cfg)
    if seed is None:
        seed = cfg.seed
    shape = (cfg.B,cfg.U,cfg.L)
    draws = [ np.zeros(shape,dtype=complex) ] + [ np.zeros(shape) for _ in range(4) ]
    for b in range(cfg.B):
        for u in range(cfg.U):
            rng = subStream(seed,STREAM_CHANNEL,b,u)
            for arr, values in zip(draws,_drawPaths(rng,cfg.L)):
                arr[b,u] = values
    paths = PathParams(*draws)
    logger.debug('Sampled channel with seed',seed)
    return channelFromPaths(cfg,paths,seed=seed)


def saveRealization(realization, filename):
    """
    Dump a realization to JSON: a 'dims' header [B, U, N_r, N_t], row-major 'entries' as [re, im] pairs, plus path
    parameters and seed.
    """
    checkType(ChannelRealization,realization=realization)
    writeJSON(realization.toDict(),filename)


def loadRealization(filename) -> ChannelRealization:
    return ChannelRealization.fromDict(readJSON(filename))
