import logging
import os
import sys
from datetime import datetime

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(fname='invsim', log_dir=None, level=logging.WARNING):
    """
    This creates the logger for a run. Messages go to stderr, and also to a timestamped file in log_dir if one is given.
    Returns the path of the log file, or None.
    """
    logger = logging.getLogger()
    formatter = logging.Formatter(LOG_FORMAT)

    # drop handlers left over from a previous call in the same process
    for handler in list(logger.handlers):
        if getattr(handler, '_invsim', False):
            logger.removeHandler(handler)
            handler.close()

    shandler = logging.StreamHandler(sys.stderr)
    shandler.setFormatter(formatter)
    shandler._invsim = True
    logger.addHandler(shandler)

    log_str = None
    if log_dir is not None:
        if not os.path.exists(log_dir):
            os.makedirs(log_dir)
        log_str = os.path.join(log_dir, fname + '_' + datetime.now().strftime('%H_%M_%d_%m_%Y.log'))
        fhandler = logging.FileHandler(filename=log_str)
        fhandler.setFormatter(formatter)
        fhandler._invsim = True
        logger.addHandler(fhandler)

    logger.setLevel(level)
    return log_str
