"""Context manager that holds the lock of a run directory"""

import logging
import os
from pathlib import Path

from .exceptions import RunDirectoryException

logger = logging.getLogger(__name__) # type: ignore

LOCK_NAME = ".lock"

class RunLock:
    """Context manager that lets one command at a time work in a run directory"""
    def __init__(self, run_dir):
        self.path = Path(os.path.expanduser(str(run_dir))) / LOCK_NAME

    def __enter__(self):
        try:
            fd = os.open(str(self.path), os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise RunDirectoryException(
                "{} exists: another command is using this run directory. Remove"
                " the file if no command is running.".format(self.path))
        with os.fdopen(fd, "w") as f:
            print(os.getpid(), file=f)
        logger.debug("Acquired %s", self.path)
        return self

    def __exit__(self, etype, value, traceback):
        try:
            self.path.unlink()
        except FileNotFoundError:
            logger.warning("Lock file %s vanished while held", self.path)
