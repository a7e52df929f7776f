#
# baselines.py
#
# cellfreetools developers
#
# Centralized maximum-ratio and zero-forcing precoders for single-antenna users with one stream each. Both scale
# all APs by one common factor, chosen so that the most loaded AP meets its budget with equality. A common factor
# keeps the zero-forcing nulls intact.
#

import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.utilities import perEntity
from cellfreetools.wireless.model import SolverError, RankError
from cellfreetools.wireless.channel import ChannelRealization
from cellfreetools.wireless.metrics import PrecoderStack


def stackedChannel(channel) -> np.ndarray:
    """
    U x (B*N_t) matrix whose row u is the channel of single-antenna user u.
    """
    if not isinstance(channel,ChannelRealization):
        logger.TBRaise('Expected a ChannelRealization, got',type(channel))
    if channel.Nr != 1:
        logger.TBRaise(f'Stacked channels need N_r = 1, got N_r = {channel.Nr}',exception=ValueError('N_r != 1'))
    return channel.aggregated()[:,0,:]


def _checkRows(stacked):
    stacked = np.asarray(stacked,dtype=complex)
    if stacked.ndim != 2:
        logger.TBRaise('Expected a U x (B*N_t) matrix, got shape',stacked.shape,frame=3)
    if not np.all(np.isfinite(stacked)):
        logger.TBRaise('Stacked channel has non-finite entries',frame=3,exception=SolverError('non-finite channel'))
    norms = np.linalg.norm(stacked,axis=1)
    if np.any(norms == 0):
        logger.TBRaise(f'Users {np.flatnonzero(norms == 0).tolist()} have a zero channel',frame=3,
                       exception=RankError('zero channel row'))
    return stacked


def _commonScale(directions, Pmax) -> PrecoderStack:
    """
    directions has shape (B*N_t, U) with unit-norm columns.
    """
    U   = directions.shape[1]
    B   = len(Pmax)
    Nt  = directions.shape[0]//B
    if Nt*B != directions.shape[0]:
        logger.TBRaise(f'{directions.shape[0]} antennas cannot be split over {B} APs',frame=3)
    load   = np.array([ np.sum(np.abs(directions[b*Nt:(b+1)*Nt,:])**2) for b in range(B) ])
    active = load > 0
    scale  = np.min(np.sqrt(Pmax[active]/load[active]))
    F      = (scale*directions).T.reshape(U,B*Nt,1)
    return PrecoderStack(F,Nt)


def mrtPrecoder(stacked, Pmax) -> PrecoderStack:
    """
    f_u proportional to h_u^H (matched filter), one common power scale.

    Args:
        stacked (np.ndarray): U x (B*N_t) channel matrix
        Pmax: per-AP budgets in mW; its length fixes B

    Returns:
        PrecoderStack with N_s = 1
    """
    stacked    = _checkRows(stacked)
    Pmax       = np.atleast_1d(np.asarray(Pmax,dtype=float))
    directions = np.conj(stacked).T/np.linalg.norm(stacked,axis=1)
    return _commonScale(directions,Pmax)


def zfPrecoder(stacked, Pmax, rtol=1e-10) -> PrecoderStack:
    """
    Columns of H^H (H H^H)^{-1}, normalized, then one common power scale. Needs U <= B*N_t and full row rank.

    Args:
        stacked (np.ndarray): U x (B*N_t) channel matrix
        Pmax: per-AP budgets in mW
        rtol (float, optional): singular values below rtol*sigma_max mean rank deficiency. Defaults to 1e-10.

    Returns:
        PrecoderStack with N_s = 1
    """
    stacked = _checkRows(stacked)
    Pmax    = np.atleast_1d(np.asarray(Pmax,dtype=float))
    U, N    = stacked.shape
    if U > N:
        logger.TBRaise(f'Zero forcing needs U <= B*N_t, got U = {U} > {N}',exception=RankError('too many users'))
    s = np.linalg.svd(stacked,compute_uv=False)
    if not s[-1] > rtol*s[0]:
        logger.TBRaise(f'Stacked channel is rank deficient (sigma_min/sigma_max = {s[-1]/s[0]:.3e})',
                       exception=RankError('rank-deficient stacked channel'))
    Hh         = np.conj(stacked).T
    directions = Hh @ np.linalg.inv(stacked @ Hh)
    directions = directions/np.linalg.norm(directions,axis=0)
    return _commonScale(directions,Pmax)


def baselinePrecoder(name, channel, Pmax) -> PrecoderStack:
    """
    Dispatch 'zf' or 'mrt' on a ChannelRealization.
    """
    Pmax = perEntity(Pmax,channel.B,'Pmax')
    if name == 'zf':
        return zfPrecoder(stackedChannel(channel),Pmax)
    if name == 'mrt':
        return mrtPrecoder(stackedChannel(channel),Pmax)
    logger.TBRaise('Unknown baseline',name)
