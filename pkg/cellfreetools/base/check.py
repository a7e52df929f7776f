#
# check.py
#
# cellfreetools developers
#
# Floating-point error control and argument guards used at the public entry points of the package.
#

import warnings
import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.utilities import envector, isArrayLike, isIntType, isScalar


# Complex arithmetic is the normal case here, so numpy's complex-to-real warning is only noise.
try:
    warnings.filterwarnings("ignore", category=np.ComplexWarning)
except AttributeError:
    pass


# A RuntimeWarning in a solver means a silently wrong number; make it loud.
warnings.filterwarnings("error", category=RuntimeWarning)


class DivideByZeroError(Exception): pass
class UnderflowError(Exception): pass
class InvalidValueError(Exception): pass


# Bisection tails flush tiny powers to zero all the time, so underflow is let through by default.
CATCHUNDERFLOW    = False
CATCHOVERFLOW     = True
CATCHDIVIDEBYZERO = True
CATCHINVALIDVALUE = True


# numpy passes the error type as a bit flag: 1 divide, 2 over, 4 under, 8 invalid. Several can be set at once.
_FLAGBITS = [ (1, 'CATCHDIVIDEBYZERO', DivideByZeroError),
              (2, 'CATCHOVERFLOW'    , OverflowError),
              (4, 'CATCHUNDERFLOW'   , UnderflowError),
              (8, 'CATCHINVALIDVALUE', InvalidValueError) ]


def err_handler(err, flag):
    """
    Called by numpy on floating point trouble. Raises the matching exception unless that kind of error has been
    switched off.
    """
    known = False
    for bit, switch, exception in _FLAGBITS:
        if flag & bit:
            known = True
            if globals()[switch]:
                raise exception(err)
    if not known:
        logger.TBRaise('Encountered unknown floating point error',err,'with flag',flag)


np.seterrcall(err_handler)
np.seterr(all='call')


def _setSwitch(switch, value, message):
    globals()[switch] = value
    logger.debug(message)


def ignoreUnderflow():
    _setSwitch('CATCHUNDERFLOW', False, 'Underflow behavior set to pass.')


def catchUnderflow():
    _setSwitch('CATCHUNDERFLOW', True, 'Underflow now raises.')


def ignoreOverflow():
    _setSwitch('CATCHOVERFLOW', False, 'Overflow behavior set to pass.')


def ignoreDivideByZero():
    _setSwitch('CATCHDIVIDEBYZERO', False, 'Zero division behavior set to pass.')


def ignoreInvalidValue():
    _setSwitch('CATCHINVALIDVALUE', False, 'Invalid value behavior set to pass.')


def checkType(expectedType,**kwargs):
    """
    Check the type of an object, called like checkType(int, N=N). On failure the message names the variable as it
    is called at the call site.

    Args:
        expectedType (type or str): A type, or one of the pseudo-types "array", "real", "int", "scalar".
    """
    if len(kwargs)!=1:
        logger.TBRaise('Call like checkType(expectedtype, var=value)')
    objName, obj = list(kwargs.items())[0]
    if expectedType=="array":
        if not isArrayLike(obj):
            logger.TBRaise('Expected non-empty array-like object for',objName,'but received',type(obj),frame=3)
    elif expectedType=="scalar":
        if not isScalar(obj):
            logger.TBRaise('Expected scalar object for',objName,'but received',type(obj),frame=3)
    elif expectedType=="real":
        if not isScalar(obj):
            logger.TBRaise('Expected real scalar object for',objName,'but received',type(obj),frame=3)
        elif obj.imag!=0:
            logger.TBRaise('Expected real scalar object',objName,'has nonzero imaginary part',frame=3)
    elif expectedType=="int":
        if not isIntType(obj):
            logger.TBRaise('Expected int object for',objName,'but received',type(obj),frame=3)
    else:
        if not isinstance(obj,expectedType):
            logger.TBRaise('Expected type',expectedType,'for',objName,'but received',type(obj),frame=3)


def checkDomain(obj, expectedDomain):
    """
    Check that obj is one of the values in expectedDomain.
    """
    checkType("array",expectedDomain=expectedDomain)
    if obj not in expectedDomain:
        logger.TBRaise('Expected value to be one of',expectedDomain,'but got',obj,frame=3)


def checkPositive(**kwargs):
    """
    Check that every passed real scalar is strictly positive, e.g. checkPositive(noise=sigma2, tol=eps).
    """
    for name, value in kwargs.items():
        if not isScalar(value) or not np.isfinite(value) or np.real(value) <= 0:
            logger.TBRaise(f'Expected finite positive value for {name}, got {value}',frame=3)


def checkShape(arr, shape, name='array'):
    """
    Check that arr has exactly the given shape. Entries of shape equal to None match any length.
    """
    actual = np.shape(arr)
    if len(actual) != len(shape) or any( (s is not None) and (s != a) for s, a in zip(shape, actual) ):
        logger.TBRaise(f'Dimension mismatch for {name}: expected {tuple(shape)}, got {actual}',frame=3)


def checkEqualLengths(*args):
    """
    Check that all array-like objects passed have the same length.
    """
    length = len(envector(args[0]))
    for i in range(len(args)):
        if args[i] is not None:
            len_i = len(envector(args[i]))
            if len_i != length:
                logger.TBRaise(f'Array length mismatch detected on array {i}. len, len[i] = {length}, {len_i}',frame=3)


def checkExtension(filename,extension):
    """
    Check the extension of a file.
    """
    if not filename.endswith(extension):
        logger.TBRaise(f'Expected a {extension} file. Got {filename}.')
