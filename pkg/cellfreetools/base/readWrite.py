#
# readWrite.py
#
# cellfreetools developers
#
# Comma-separated result tables. Numbers are written with a fixed number of significant digits so that two runs
# with the same seeds produce byte-identical files.
#

import numpy as np
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType
from cellfreetools.base.utilities import isFloatType, isIntType
from cellfreetools.base.fileSystem import createFilePath


def formatEntry(value, digits=12) -> str:
    """
    Render one table cell. Floats get digits significant digits, everything else is str().
    """
    if isIntType(value) or isinstance(value,bool):
        return str(value)
    if isFloatType(value):
        if np.isnan(value):
            return 'nan'
        return f'{float(value):.{digits}g}'
    return str(value)


def writeCSV(filename, header, rows, digits=12):
    """
    Wrapper for np.savetxt writing a table whose columns may mix strings and numbers.

    Args:
        filename (str): output file name
        header (list): column names
        rows (list): one list or tuple per row, in header order
        digits (int, optional): significant digits for floats. Defaults to 12.
    """
    checkType(str,filename=filename)
    checkType(list,header=header)
    for i, row in enumerate(rows):
        if len(row) != len(header):
            logger.TBRaise(f'Row {i} has {len(row)} entries but header has {len(header)}')
    table = np.array([ [formatEntry(x,digits) for x in row] for row in rows ],dtype=str)
    if table.size == 0:
        table = table.reshape((0,len(header)))
    createFilePath(filename)
    np.savetxt(filename, table, fmt='%s', delimiter=',', header=','.join(header), comments='')


def readCSV(filename) -> tuple:
    """
    Read a table written by writeCSV.

    Args:
        filename (str)

    Returns:
        tuple: (header list, list of rows as lists of strings)
    """
    checkType(str,filename=filename)
    with open(filename,'r') as f:
        header = f.readline().strip().split(',')
    data = np.loadtxt(filename, dtype=str, delimiter=',', skiprows=1, ndmin=2)
    return header, [ list(row) for row in data ]
