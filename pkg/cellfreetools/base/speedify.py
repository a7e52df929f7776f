#
# speedify.py
#
# cellfreetools developers
#
# Run independent Monte-Carlo trials in parallel. Results always come back in input order, so a parallel run
# writes the same table as a serial one.
#

import os
import concurrent.futures
from cellfreetools.base.check import checkType
import cellfreetools.base.logger as logger


DEFAULTPARALLELIZER = 'pathos.pools'
try:
    import pathos.pools
except ImportError:
    DEFAULTPARALLELIZER = 'concurrent.futures'


MAXTHREADS     = os.cpu_count()
DEFAULTTHREADS = max(1, MAXTHREADS - 2)


class ComputationClass:

    def __init__(self, function, input_array, args, nproc, parallelizer):
        """
        Everything needed to map a function over an input array with a process pool.

        Args:
            function (func): to-be-parallelized function
            input_array (array-like): run function over this array
            args (tuple): additional parameters passed to function after each element
            nproc (int): number of processes
            parallelizer (str): 'pathos.pools' or 'concurrent.futures'
        """
        checkType('int',nproc=nproc)
        checkType("array",input_array=input_array)
        checkType(str,parallelizer=parallelizer)
        self._input_array  = input_array
        self._function     = function
        self._parallelizer = parallelizer
        self._args         = args
        self._nproc        = nproc
        if nproc < 1:
            logger.TBRaise('Need at least one process, got nproc =',nproc)
        if nproc > MAXTHREADS:
            logger.warn('We recommend using fewer processes than',MAXTHREADS)
        self._result = self.parallelization_wrapper()

    def __repr__(self) -> str:
        return "ComputationClass"

    def parallelization_wrapper(self) -> list:
        if self._nproc==1:
            return [ self.pass_argument_wrapper(item) for item in self._input_array ]
        if self._parallelizer=='concurrent.futures':
            with concurrent.futures.ProcessPoolExecutor(max_workers=self._nproc) as executor:
                results = executor.map(self.pass_argument_wrapper, self._input_array)
                return list(results)
        elif self._parallelizer=='pathos.pools':
            pool = pathos.pools.ProcessPool(nodes=self._nproc)
            try:
                results = pool.map(self.pass_argument_wrapper, self._input_array)
            finally:
                pool.close()
                pool.join()
                pool.clear()
            return list(results)
        logger.TBRaise('Unknown parallelizer',self._parallelizer)

    def pass_argument_wrapper(self, single_input):
        return self._function(single_input, *self._args)

    def getResult(self) -> list:
        return self._result


def parallel_function_eval(function, input_array, args=(), nproc=DEFAULTTHREADS, parallelizer=DEFAULTPARALLELIZER) -> list:
    """
    Map function over input_array with nproc processes. The result list has the same order as input_array.

    Args:
        function (func): to-be-parallelized function
        input_array (array-like): array over which it should run
        args (tuple, optional): extra arguments for function
        nproc (int): number of processes; 1 means a plain loop

    Returns:
        list: [function(x, *args) for x in input_array]
    """
    if nproc==1:
        logger.details('Using for-loop instead of',parallelizer)
    computer = ComputationClass(function, input_array, args=args, nproc=nproc, parallelizer=parallelizer)
    return computer.getResult()
