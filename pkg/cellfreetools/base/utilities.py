#
# utilities.py
#
# cellfreetools developers
#
# Small helpers shared by the whole package: type predicates, vectorizing scalars, argument parsing and a
# stopwatch.
#

import time
import numpy as np
import cellfreetools.base.logger as logger


# ---------------------------------------------------------------------------------- MAKE INTERNAL FUNCTIONS MORE SMOOTH


def isArrayLike(obj) -> bool:
    """
    Figure out whether obj is indexable.

    Args:
        obj (python object)

    Returns:
        bool: True if there is at least one index, false otherwise.
    """
    if isinstance(obj,str):
        return False
    try:
        obj[0]
        return True
    except (TypeError,IndexError,KeyError):
        return False


def isIntType(obj) -> bool:
    if isinstance(obj,(bool,np.bool_)):
        return False
    return isinstance(obj,(int,np.integer))


def isFloatType(obj) -> bool:
    return isinstance(obj,(float,np.floating))


def isComplexType(obj) -> bool:
    return isinstance(obj,(complex,np.complexfloating))


def isScalar(obj) -> bool:
    return isIntType(obj) or isFloatType(obj) or isComplexType(obj)


def unvector(obj):
    """
    Remove outermost brackets of an array-like object with a single element, if possible. numpy is not consistent
    about returning a scalar, a zero-dimensional array or a length-1 array.
    """
    if isinstance(obj,np.ndarray):
        if obj.ndim==0:
            return obj.item()
    if not isArrayLike(obj):
        return obj
    if len(obj) > 1:
        return obj
    return obj[0]


def envector(*args):
    """
    Change obj to a numpy array if it's a scalar.
    """
    result = ()
    for obj in args:
        if not isArrayLike(obj):
            obj = np.array([obj])
        result += (obj,)
    return unvector(result)


def perEntity(value, count, name) -> np.ndarray:
    """
    Broadcast a scalar to count copies, or check that a sequence has exactly count entries. Used for per-AP and
    per-user settings that may be given once for everybody.

    Args:
        value (scalar or array-like)
        count (int)
        name (str): used in the error message

    Returns:
        np.ndarray: float array of length count
    """
    if isArrayLike(value):
        arr = np.asarray(value,dtype=float)
        if arr.ndim != 1 or len(arr) != count:
            logger.TBRaise(f'{name} needs {count} entries, got {len(arr)}')
        return arr
    return np.full(count,float(value))


# ------------------------------------------------------------------------------------------------- CONVENIENCE FOR USER


def getArgs(parser,argv=None):
    """
    Get arguments from the ArgumentParser. Complain if you don't get exactly the correct arguments.
    """
    args, invalid_args = parser.parse_known_args(argv)
    if len(invalid_args)>0:
        logger.TBRaise("Received unrecognized arguments",invalid_args,".")
    return args


class timer:

    """
    Rudimentary stopwatch. Each call to printTiming or lap measures the time since the previous one.
    """

    def __init__(self):
        self._tstart = time.perf_counter()
        self._tend   = self._tstart

    def __repr__(self) -> str:
        return "timer"

    def lap(self) -> float:
        """
        Seconds since the last lap (or since construction).
        """
        self._tstart = self._tend
        self._tend   = time.perf_counter()
        return self._tend - self._tstart

    def printTiming(self, message=None):
        timing = self.lap()
        if message is None:
            logger.info("Time to finish: %12.8f [s]." % timing)
        else:
            logger.info("Time to finish "+message+": %12.8f [s]." % timing)
