#
# fileSystem.py
#
# cellfreetools developers
#
# Bash-like file operations used when writing results and logs.
#

import os, shutil
import cellfreetools.base.logger as logger
from cellfreetools.base.check import checkType


def createFilePath(filePath):
    """
    Create the directory that will hold filePath, if it does not exist yet.

    Args:
        filePath (str)
    """
    checkType(str,filePath=filePath)
    directory = os.path.dirname(filePath)
    if directory != '' and not os.path.isdir(directory):
        os.makedirs(directory,exist_ok=True)
        logger.debug('Created directory',directory)


def rm(target):
    """
    Delete a regular file or a folder. Equivalent to rm -rf in Bash.

    Args:
        target (str)
    """
    checkType(str,target=target)
    if os.path.isfile(target):
        os.remove(target)
        logger.debug(f"Deleted regular file {target}")
    elif os.path.isdir(target):
        shutil.rmtree(target)
        logger.debug(f"Deleted folder {target} and its subdirectories.")
    else:
        logger.warn(f"Unable to remove {target}")


def stem(filePath) -> str:
    """
    filePath without its extension, e.g. results/sweep.csv -> results/sweep.
    """
    checkType(str,filePath=filePath)
    return os.path.splitext(filePath)[0]
