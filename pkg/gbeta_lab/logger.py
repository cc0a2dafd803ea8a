import logging


logging.basicConfig(level=logging.INFO, format="%(message)s")
_logger = logging.getLogger("GBetaLab")
_logger.setLevel(logging.INFO)


def get_logger(name: str):
    return _logger.getChild(name)


def set_verbosity(verbose: bool = False, quiet: bool = False):
    if verbose:
        _logger.setLevel(logging.DEBUG)
    elif quiet:
        _logger.setLevel(logging.WARNING)
    else:
        _logger.setLevel(logging.INFO)
