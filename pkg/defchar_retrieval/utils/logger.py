import logging
import os
import sys
from logging.handlers import RotatingFileHandler

from defchar_retrieval.config import get_config

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
PACKAGE_LOGGER = 'defchar_retrieval'


def _package_handlers(config) -> list:
    formatter = logging.Formatter(LOG_FORMAT)
    handlers = []

    if config.LOG_FILE:
        os.makedirs(os.path.dirname(config.LOG_FILE) or '.', exist_ok=True)
        rotating = RotatingFileHandler(config.LOG_FILE, maxBytes=10 * 1024 * 1024, backupCount=5, encoding='utf-8')
        rotating.setLevel(logging.DEBUG)
        handlers.append(rotating)

    # stdout carries command output (ranked lists, tables, slot dumps)
    console = logging.StreamHandler(sys.stderr)
    verbose = config.LOG_LEVEL.upper() == 'DEBUG' or os.environ.get('DEFCHAR_ENV') == 'development'
    console.setLevel(logging.DEBUG if verbose else logging.INFO)
    handlers.append(console)

    for handler in handlers:
        handler.setFormatter(formatter)
    return handlers


def setup_logger(name: str = __name__) -> logging.Logger:
    """Module logger under the package logger; handlers are attached once, to the package logger."""
    package = logging.getLogger(PACKAGE_LOGGER)
    if not package.handlers:
        config = get_config()
        package.setLevel(getattr(logging, config.LOG_LEVEL.upper(), logging.INFO))
        for handler in _package_handlers(config):
            package.addHandler(handler)
    if name != PACKAGE_LOGGER and not name.startswith(PACKAGE_LOGGER + '.'):
        name = f'{PACKAGE_LOGGER}.{name}'
    return logging.getLogger(name)
