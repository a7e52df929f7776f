#
# optimize.py
#
# cellfreetools developers
#
# Root finding for monotone maps, as used to find the Lagrange multipliers of the per-AP power constraints, and a
# thin wrapper around scipy's bounded minimizer for the joint multiplier problem.
#

import numpy as np
import scipy.optimize as opt
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkPositive, checkType


class BracketError(logger.CellFreeException): pass


def bisectDecreasing(func, target, lb, ub, eps, args=(), returnHistory=False):
    """
    Find x with func(x) = target for a monotonically decreasing func by bisection. Each step evaluates the midpoint,
    moves lb up to it if func(mid) >= target and ub down to it otherwise. The search stops once ub - lb < eps and
    returns the last midpoint. This takes at most ceil(log2((ub-lb)/eps)) + 1 evaluations.

    Args:
        func (func): decreasing scalar map, called as func(x, *args)
        target (float)
        lb (float): lower end of the bracket, func(lb) >= target
        ub (float): upper end of the bracket, func(ub) <= target
        eps (float): bracket width at exit
        args (tuple, optional): extra arguments for func
        returnHistory (bool, optional): Also return the list of brackets (lb, ub) after each step.

    Returns:
        float, or (float, list) if returnHistory
    """
    checkPositive(eps=eps)
    if not ub > lb:
        logger.TBRaise(f'Empty bracket [{lb}, {ub}]',exception=BracketError(f'empty bracket [{lb}, {ub}]'))
    flb = func(lb,*args)
    fub = func(ub,*args)
    if flb < target:
        logger.TBRaise(f'Bracket violation: f(lb={lb}) = {flb} < target {target}',
                       exception=BracketError(f'f(lb) = {flb} < target = {target}'))
    if fub > target:
        logger.TBRaise(f'Bracket violation: f(ub={ub}) = {fub} > target {target}',
                       exception=BracketError(f'f(ub) = {fub} > target = {target}'))
    history = []
    mid     = 0.5*(lb+ub)
    while ub - lb >= eps:
        mid = 0.5*(lb+ub)
        if mid <= lb or mid >= ub:
            # bracket narrower than the float spacing
            break
        if func(mid,*args) >= target:
            lb = mid
        else:
            ub = mid
        history.append((lb,ub))
    logger.debug(f'bisection: {len(history)} steps, bracket [{lb:.6e}, {ub:.6e}]')
    if returnHistory:
        return mid, history
    return mid


def maxBisectionSteps(lb, ub, eps) -> int:
    """
    Upper bound on the number of halvings bisectDecreasing needs for the bracket [lb, ub].
    """
    return int(np.ceil(np.log2((ub-lb)/eps))) + 1


def polishRoot(func, target, lb, ub, args=()) -> float:
    """
    Refine a root of func(x) = target inside a bracket left by bisection with Brent's method. The bracket must
    straddle the root; if round-off puts both ends on one side, the midpoint is returned unchanged.

    Args:
        func (func): called as func(x, *args)
        target (float)
        lb (float)
        ub (float)
        args (tuple, optional)

    Returns:
        float
    """
    flb = func(lb,*args) - target
    fub = func(ub,*args) - target
    if flb == 0:
        return lb
    if fub == 0:
        return ub
    if np.sign(flb) == np.sign(fub):
        logger.debug(f'polishRoot: no sign change on [{lb:.6e}, {ub:.6e}], keeping the midpoint')
        return 0.5*(lb+ub)
    return opt.brentq(lambda x: func(x,*args) - target, lb, ub, xtol=1e-300, rtol=4*np.finfo(float).eps)


def minimizeBounded(func, start, bounds, tol=1e-12, maxiter=500) -> tuple:
    """
    Wrapper for scipy.optimize.minimize with L-BFGS-B on a box. func returns the value and the gradient together.
    A line search that stalls at machine precision leaves a usable iterate, so the last iterate is returned together
    with scipy's convergence flag instead of raising.

    Args:
        func (func): x -> (float, np.ndarray)
        start (array-like): starting point inside the box
        bounds (list): (lower, upper) per coordinate, None for no bound
        tol (float, optional): projected-gradient and relative-decrease tolerance. Defaults to 1e-12.
        maxiter (int, optional): Defaults to 500.

    Returns:
        tuple: (np.ndarray, bool)
    """
    checkType("real",tol=tol)
    checkType('int',maxiter=maxiter)
    logger.details('Trying L-BFGS-B with maxiter=',maxiter)
    res = opt.minimize(func, np.asarray(start,dtype=float), jac=True, method='L-BFGS-B', bounds=bounds,
                       options={'maxiter': maxiter, 'ftol': tol, 'gtol': tol})
    if not res.success:
        logger.debug('L-BFGS-B stopped early:',res.message)
    return np.asarray(res.x,dtype=float), bool(res.success)
