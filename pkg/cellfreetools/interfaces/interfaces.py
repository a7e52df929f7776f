#
# interfaces.py
#
# cellfreetools developers
#
# Structured text in and out: JSON and YAML documents for configurations, experiment descriptions and dumped
# channel realizations.
#

import yaml, json
import numpy as np
from cellfreetools.base.check import checkType, checkExtension
from cellfreetools.base.fileSystem import createFilePath
import cellfreetools.base.logger as logger


def readYAML(filename,ignoreExtension=False) -> dict:
    """
    Load a YAML file. Returns a dict, where each key level corresponds to an organizational level of the YAML.
    """
    checkType(str,filename=filename)
    if not ignoreExtension:
        if not (filename.endswith('yaml') or filename.endswith('yml')):
            checkExtension(filename,'yaml')
    with open(filename, 'r') as file:
        return yaml.safe_load(file)


def readJSON(filename,ignoreExtension=False) -> dict:
    """
    Load a JSON file. Returns a dict, where each key level corresponds to an organizational level of the JSON.
    """
    checkType(str,filename=filename)
    if not ignoreExtension:
        checkExtension(filename,'json')
    with open(filename, 'r') as file:
        return json.load(file)


def readDocument(filename) -> dict:
    """
    Load a JSON or YAML document, chosen by extension.
    """
    checkType(str,filename=filename)
    if filename.endswith('.json'):
        data = readJSON(filename)
    elif filename.endswith('.yaml') or filename.endswith('.yml'):
        data = readYAML(filename)
    else:
        logger.TBRaise('Expected a .json, .yaml or .yml file, got',filename)
    if data is None:
        data = {}
    if not isinstance(data,dict):
        logger.TBRaise('Top level of',filename,'must be a mapping, got',type(data))
    return data


def writeYAML(data,filename):
    """
    Write dictionary to YAML file.
    """
    checkType(dict,data=data)
    checkType(str,filename=filename)
    createFilePath(filename)
    with open(filename, 'w') as file:
        yaml.safe_dump(data, file)


def writeJSON(data,filename):
    """
    Write dictionary to JSON file.
    """
    checkType(dict,data=data)
    checkType(str,filename=filename)
    createFilePath(filename)
    with open(filename, 'w') as file:
        json.dump(data, file, indent=4)


def complexToPairs(arr) -> list:
    """
    Flatten a complex array in row-major order into [[re, im], ...], the encoding used by the JSON containers.
    """
    flat = np.asarray(arr,dtype=complex).ravel(order='C')
    return [ [float(z.real), float(z.imag)] for z in flat ]


def pairsToComplex(pairs, shape) -> np.ndarray:
    """
    Inverse of complexToPairs.
    """
    data = np.asarray(pairs,dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        logger.TBRaise('Expected a list of [re, im] pairs')
    if data.shape[0] != int(np.prod(shape)):
        logger.TBRaise(f'{data.shape[0]} entries cannot fill shape {tuple(shape)}')
    return (data[:,0] + 1j*data[:,1]).reshape(shape,order='C')
