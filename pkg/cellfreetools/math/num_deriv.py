#
# num_deriv.py
#
# cellfreetools developers
#
# Central-difference gradients, with O(h^2) corrections. Complex arguments are handled by treating real and
# imaginary parts as independent coordinates.
#

import numpy as np
import cellfreetools.base.logger as logger


def _best_h(x):
    """
    Step size ~ x eps^(1/3), which balances the h^2 truncation error of central differences against round-off in
    the function values. Stays meaningful at x = 0.
    """
    eps   = 1.1e-16
    small = pow(eps,1/3)
    return small*(abs(x) + small)


def diff_grad(params, func, args = (), h = None, floatT=np.float64) -> np.ndarray:
    """
    Gradient of a real function of a real parameter vector using central differences.
    """
    params = np.array(params, dtype = floatT)
    ret    = np.zeros(len(params), dtype = floatT)
    up     = params.copy()
    down   = params.copy()
    for i in range(len(params)):
        hi = _best_h(params[i]) if h is None else h
        up[i]   += hi
        down[i] -= hi
        ret[i]   = (func(up, *args) - func(down, *args)) / (2*hi)
        up[i]    = params[i]
        down[i]  = params[i]
    return ret


def diff_complex_grad(point, func, args = (), h = None) -> np.ndarray:
    """
    Gradient of a real function of a complex array. Returns dF/dRe(X) + 1j dF/dIm(X), shaped like X, which is
    2 dF/dX^* in Wirtinger language. For F = Tr(X^H X) this gives 2X.

    Args:
        point (np.ndarray): complex array X
        func (func): real scalar function func(X, *args)
        h (float, optional): step; defaults to 1e-5*(1 + ||X||)

    Returns:
        np.ndarray: complex gradient, same shape as point
    """
    point = np.asarray(point, dtype=complex)
    shape = point.shape
    if h is None:
        h = 1e-5*(1 + np.linalg.norm(point))
    if not h > 0:
        logger.TBRaise('Finite difference step must be positive, got',h)

    def realFunc(v):
        value = func((v[:v.size//2] + 1j*v[v.size//2:]).reshape(shape), *args)
        if not np.isfinite(value):
            logger.TBRaise('Objective is not finite at a sample point')
        return value

    flat = np.concatenate([point.real.ravel(), point.imag.ravel()])
    grad = diff_grad(flat, realFunc, h=h)
    n    = point.size
    return (grad[:n] + 1j*grad[n:]).reshape(shape)
