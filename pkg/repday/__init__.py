""" Representative days for transmission and wind expansion planning. """

__version__ = "0.1.0"

import sys
import logging

def handle_unhandled_exception(exc_type, exc_value, exc_traceback):
    """Logs exceptions that escape to the interpreter. Errors raised by
    repday itself describe the input at fault, so they are logged without
    the traceback."""
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return
    from repday.exceptions import RepdayException
    logger = logging.getLogger(__name__) # type: ignore
    if issubclass(exc_type, RepdayException):
        logger.error("repday %s: %s: %s", __version__, exc_type.__name__, exc_value)
    else:
        logger.critical("Unhandled exception in repday %s", __version__,
                        exc_info=(exc_type, exc_value, exc_traceback))

sys.excepthook = handle_unhandled_exception
