#
# cli.py
#
# cellfreetools developers
#
# Command line front end: sweep, trace, verify and show-config. Configuration files are flat JSON or YAML mappings
# of SystemConfig keys plus the experiment keys axis, values, solvers, trials, seed, output and workers; flags
# override file values.
#
# Exit codes: 0 success, 1 failed verification, 2 configuration error.
#

import argparse, json, sys
import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.initialize import DEFAULTSEED, introduceYourself
from cellfreetools.base.utilities import getArgs
from cellfreetools.interfaces.interfaces import readDocument
from cellfreetools.wireless.model import ConfigError, configToDict
from cellfreetools.wireless.experiment import AXES, SOLVERS, ExperimentSpec, specFromDict, validateSpec, \
    runExperiment, runConvergenceTrace, verify


EXIT_OK     = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def _commaList(text) -> list:
    return [ item.strip() for item in text.split(',') if item.strip() != '' ]


def _number(text):
    try:
        value = float(text)
    except ValueError:
        value = np.nan
    if not np.isfinite(value):
        message = f'Axis value {text!r} is not a finite number'
        logger.TBRaise(message,exception=ConfigError(message))
    return int(value) if value.is_integer() and '.' not in text and 'e' not in text.lower() else value


def buildParser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='cellfree', description='Weighted sum-rate precoding for cell-free mmWave MIMO.')
    parser.add_argument('--log-level', dest='logLevel', default='INFO', choices=list(logger._log_levels),
                        help='verbosity of the console output')
    parser.add_argument('--log-file', dest='logFile', default=None, help='also write all output to this file')
    sub = parser.add_subparsers(dest='command', required=True)

    sweep = sub.add_parser('sweep', help='Monte-Carlo sweep over one scenario parameter')
    sweep.add_argument('--config', default=None, help='JSON or YAML scenario/experiment file')
    sweep.add_argument('--axis', default=None, choices=list(AXES), help='swept parameter')
    sweep.add_argument('--values', default=None, help='comma-separated axis values')
    sweep.add_argument('--solvers', default=None, help=f'comma-separated subset of {",".join(SOLVERS)}')
    sweep.add_argument('--trials', type=int, default=None, help='channel drops per axis value')
    sweep.add_argument('--seed', type=int, default=None, help='master seed; trial t uses seed XOR t')
    sweep.add_argument('--out', default=None, help='result CSV; the aggregate goes to <stem>_aggregate.csv')
    sweep.add_argument('--workers', type=int, default=None, help='processes running trials')

    trace = sub.add_parser('trace', help='per-iteration objective of both solvers on one channel')
    trace.add_argument('--config', default=None, help='JSON or YAML scenario file')
    trace.add_argument('--seed', type=int, default=None, help='channel seed')
    trace.add_argument('--out', default='results/trace.csv', help='trace CSV')

    check = sub.add_parser('verify', help='run the numerical oracle suite')
    check.add_argument('--seeds', type=int, default=20, help='number of random instances')
    check.add_argument('--seed', type=int, default=DEFAULTSEED, help='first seed')

    show = sub.add_parser('show-config', help='print the resolved configuration')
    show.add_argument('--config', default=None, help='JSON or YAML scenario/experiment file')
    return parser


def _document(filename) -> dict:
    if filename is None:
        return {}
    try:
        return readDocument(filename)
    except (OSError, ValueError, logger.CellFreeException) as e:
        message = f'Could not read {filename}: {e}'
        logger.TBRaise(message,exception=ConfigError(message))


def resolveSpec(args) -> ExperimentSpec:
    """
    Experiment from the optional file with command line overrides applied.
    """
    data = _document(getattr(args,'config',None))
    overrides = { 'axis'    : getattr(args,'axis',None),
                  'values'  : None if getattr(args,'values',None) is None else [ _number(v) for v in _commaList(args.values) ],
                  'solvers' : None if getattr(args,'solvers',None) is None else _commaList(args.solvers),
                  'trials'  : getattr(args,'trials',None),
                  'seed'    : getattr(args,'seed',None),
                  'output'  : getattr(args,'out',None),
                  'workers' : getattr(args,'workers',None) }
    data.update({ key: value for key, value in overrides.items() if value is not None })
    return specFromDict(data)


def _sweep(args) -> int:
    runExperiment(validateSpec(resolveSpec(args)))
    return EXIT_OK


def _trace(args) -> int:
    spec = specFromDict(_document(args.config))
    seed = args.seed if args.seed is not None else spec.seed
    runConvergenceTrace(spec.base,seed,args.out)
    return EXIT_OK


def _verify(args) -> int:
    _, passed = verify(args.seeds,firstSeed=args.seed)
    return EXIT_OK if passed else EXIT_FAILED


def _showConfig(args) -> int:
    spec = validateSpec(resolveSpec(args))
    data = configToDict(spec.base)
    data.update({ 'axis': spec.axis, 'values': list(spec.values), 'solvers': list(spec.solvers),
                  'trials': spec.trials, 'seed': spec.seed, 'output': spec.output, 'workers': spec.workers })
    print(json.dumps(data,indent=4))
    return EXIT_OK


COMMANDS = { 'sweep': _sweep, 'trace': _trace, 'verify': _verify, 'show-config': _showConfig }


def main(argv=None) -> int:
    """
    Entry point. Returns the exit code.
    """
    parser = buildParser()
    try:
        args = getArgs(parser,argv)
    except logger.CellFreeException:
        return EXIT_CONFIG
    logger.set_log_level(args.logLevel)
    if args.logFile is not None:
        logger.createLogFile(args.logFile)
    if args.command != 'show-config':
        introduceYourself()
    try:
        return COMMANDS[args.command](args)
    except ConfigError:
        return EXIT_CONFIG


def run():
    sys.exit(main())
