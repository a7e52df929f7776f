#
# logger.py
#
# cellfreetools developers
#
# Leveled, colored console output for the solvers and the experiment runner. Everything printed by the package
# goes through here, so that a run can be mirrored into a log file and silenced or made chatty in one place.
#

import sys, inspect, datetime, logging
from colorama import Fore


_PASS         = Fore.GREEN
_WARNING      = Fore.YELLOW
_FAIL         = Fore.RED
_ENDC         = '\033[0m'
RECORDLOG     = False
CURRENT_LEVEL = 4


class CellFreeException(Exception): pass


_log_levels = {
    'ALL'      : 0,
    'DEBUG'    : 1,
    'DETAILS'  : 2,
    'PROGRESS' : 3,
    'INFO'     : 4,
    'WARN'     : 5,
    'NONE'     : 6
    }


def createLogFile(filename="cellfree.log"):
    """
    Mirror all output into filename, which is overwritten. The stdlib logging module takes care of several worker
    processes appending to the same file.
    """
    global RECORDLOG
    RECORDLOG = True
    logging.basicConfig(filename=filename, encoding='utf-8', level=logging.INFO, format='%(message)s', filemode='w',
                        force=True)
    info('Created log file',filename)


def set_log_level(level):
    global CURRENT_LEVEL
    if level not in _log_levels:
        TBRaise('Unknown log level',level,'; expected one of',list(_log_levels.keys()))
    CURRENT_LEVEL = _log_levels[level]


def _record(line):
    if RECORDLOG:
        logging.info(line)


def _callerName(frame) -> str:
    """
    Name of the function frame levels up the stack, prefixed by the class of its instance if it has one.
    """
    stack = inspect.stack(0)
    if frame >= len(stack):
        return ''
    caller = stack[frame]
    name   = caller.function
    if name == '<module>':
        return ''
    owner = caller.frame.f_locals.get('self')
    del stack
    if owner is None:
        return name+': '
    return str(owner)+'.'+name+': '


def _stamp() -> str:
    return '['+datetime.datetime.now().strftime("%H:%M:%S")+']'


def _emit(label, args, color=None, caller='', threshold=None):
    """
    Format and print one line. Lines below the current level are dropped; threshold=None always prints.
    """
    if (threshold is not None) and (CURRENT_LEVEL > threshold):
        return
    message = caller+' '.join(str(s) for s in args)
    plain   = f'{_stamp()} {label}: {message}'
    if color is None:
        print(plain)
    else:
        print(f'{_stamp()} {color}{label}: {message}{_ENDC}')
    _record(plain)


# ----------------------------------------------------------------------------------------------- DEPENDENT ON LOG LEVEL


def debug(*args,frame=2):
    _emit('DEBUG', args, caller=_callerName(frame) if CURRENT_LEVEL <= 1 else '', threshold=1)


def details(*args):
    _emit('DETAILS', args, threshold=2)


def progress(*args):
    _emit('PROGRESS', args, threshold=3)


def info(*args):
    _emit('INFO', args, threshold=4)


def warn(*args,frame=2):
    _emit('WARNING', args, color=_WARNING, caller=_callerName(frame) if CURRENT_LEVEL <= 5 else '', threshold=5)


# --------------------------------------------------------------------------------------------- INDEPENDENT OF LOG LEVEL


def TBFail(*args):
    _emit('FAIL', args, color=_FAIL)


def TBPass(*args):
    _emit('SUCCESS', args, color=_PASS)


def TBError(*args,frame=2):
    """
    Print error message and exit with -1.

    Args:
        frame (int, optional): How far up the stack to look for the caller name. Defaults to the caller of TBError.
    """
    _emit('ERROR', args, color=_FAIL, caller=_callerName(frame))
    sys.exit(-1)


def TBRaise(*args,frame=2,exception=None):
    """
    Raise an exception whose message names the calling function. The message is also recorded in the log file.

    Args:
        frame (int, optional): How far up the stack to look for the caller name. Defaults to the caller of TBRaise.
        exception (Exception, optional): Raised instead of a generic CellFreeException if given.
    """
    message = _callerName(frame)+' '.join(str(s) for s in args)
    _record(message)
    if exception is None:
        raise CellFreeException(message)
    print(_WARNING+message+_ENDC)
    raise exception
