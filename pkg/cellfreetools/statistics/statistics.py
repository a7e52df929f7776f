#
# statistics.py
#
# cellfreetools developers
#
# Basic statistics for Monte-Carlo summaries and distribution checks. The numpy default axis=None (flatten) is
# never what we want, so every reduction here defaults to axis=0.
#

import numpy as np
import scipy as sp
import scipy.stats
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType


def std_mean(data, axis = 0):
    """
    Compute the mean.
    """
    data = np.asarray(data)
    if data.shape[axis] == 0:
        logger.TBRaise('Mean of an empty sample')
    return np.mean(data, axis)


def std_dev(data, axis = 0):
    """
    Unbiased (ddof = 1) estimator for the standard deviation. Needs at least two measurements.
    """
    data = np.asarray(data)
    if data.shape[axis] < 2:
        logger.TBRaise('Standard deviation needs at least two measurements, got',data.shape[axis])
    return np.std(data, axis = axis, ddof = 1)


def std_err(data, axis = 0):
    """
    Standard deviation of the sample mean according to the CLT.
    """
    data = np.asarray(data)
    return std_dev(data, axis) / np.sqrt(data.shape[axis])


def meanAndError(data) -> tuple:
    """
    (mean, standard error) of a 1-d sample; the error is nan when there are fewer than two measurements.
    """
    data = np.asarray(data,dtype=float)
    mean = float(std_mean(data))
    if len(data) < 2:
        return mean, np.nan
    return mean, float(std_err(data))


def KSTest_1side(data,cdf) -> float:
    """
    1-sided Kolmogorov test. Gives back the likelihood that the observed difference between
    data and cdf are at least as extreme as suggested by the Kolmogorov statistic.

    Args:
        data (np.ndarray)
        cdf (function)

    Returns:
        float: 1-p
    """
    checkType(np.ndarray,data=data)
    return 1 - sp.stats.kstest(data, cdf).pvalue
