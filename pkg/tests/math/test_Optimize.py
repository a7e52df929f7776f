# 
# test_Optimize.py
# 
# cellfreetools developers
# 

import numpy as np
import pytest
from cellfreetools.math.optimize import bisectDecreasing, maxBisectionSteps, polishRoot, minimizeBounded, BracketError
from cellfreetools.testing import print_results, print_check, concludeTest


def profile(lam):
    return 1/(1+lam)**2


def decay(x):
    return np.exp(-x)


def shiftedBowl(x):
    target = np.array([2.,-1.])
    return float(np.sum((x-target)**2)), 2*(x-target)


def testOptimize():

    lpass = True

    lam, history = bisectDecreasing(profile,0.25,0.,3.,1e-6,returnHistory=True)
    lpass *= print_results( lam, 1., prec=1e-6, text='1/(1+lam)^2 = 1/4' )
    lpass *= print_check( len(history) <= maxBisectionSteps(0.,3.,1e-6), 'halving bound' )
    widths = [ ub-lb for lb, ub in history ]
    lpass *= print_results( widths, [ 3./2**(i+1) for i in range(len(widths)) ], text='bracket halves each step' )
    lpass *= print_check( widths[-1] < 1e-6, 'final bracket below eps' )

    lpass *= print_results( bisectDecreasing(decay,np.exp(-2.),0.,5.,1e-8), 2., prec=1e-8, text='exp(-x) = exp(-2)' )

    lo, hi = history[-1]
    polished = polishRoot(profile,0.25,lo,hi)
    lpass *= print_results( polished, 1., prec=1e-13, text='Brent polish' )
    lpass *= print_check( lo <= polished <= hi, 'polish stays in the bracket' )
    lpass *= print_results( polishRoot(decay,np.exp(-2.),1.5,2.5), 2., prec=1e-13, text='polish of exp(-x)' )
    lpass *= print_check( polishRoot(profile,0.25,1.,2.) == 1., 'root on the bracket end' )
    lpass *= print_results( polishRoot(profile,0.25,2.,3.), 2.5, text='no sign change keeps the midpoint' )

    with pytest.raises(BracketError):
        bisectDecreasing(profile,2.,0.,3.,1e-6)
    with pytest.raises(BracketError):
        bisectDecreasing(profile,0.25,0.,0.5,1e-6)
    with pytest.raises(BracketError):
        bisectDecreasing(profile,0.25,1.,1.,1e-6)

    concludeTest(lpass) 


def testMinimizeBounded():

    lpass = True

    # the unconstrained minimum (2, -1) violates y >= 0
    x, converged = minimizeBounded(shiftedBowl,[5.,5.],[(0.,None),(0.,None)])
    lpass *= print_results( x, [2.,0.], text='minimum on the face y = 0', abs_prec=1e-8 )
    lpass *= print_check( converged, 'L-BFGS-B converged' )
    lpass *= print_check( np.all(x >= 0), 'iterate inside the box' )

    x, _ = minimizeBounded(shiftedBowl,[0.,0.],[(None,None),(None,None)])
    lpass *= print_results( x, [2.,-1.], text='interior minimum', abs_prec=1e-8 )

    concludeTest(lpass)


if __name__ == '__main__':
    testOptimize()
    testMinimizeBounded()
