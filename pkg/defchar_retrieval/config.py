import os
from dotenv import load_dotenv

load_dotenv()


def _int_list(raw: str):
    return tuple(int(part) for part in raw.split(',') if part.strip())


class Config:
    """Base configuration."""

    # Logging
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FILE = os.environ.get('LOG_FILE', '')

    # Parallelism
    DEFAULT_THREADS = int(os.environ.get('DEFAULT_THREADS', os.cpu_count() or 1))
    RETRIEVAL_CHUNK_SIZE = int(os.environ.get('RETRIEVAL_CHUNK_SIZE', 512))

    # Benchmark defaults
    DEFAULT_K_VALUES = _int_list(os.environ.get('DEFAULT_K_VALUES', '1,5,10,15,20'))
    DEFAULT_IMAGE_SIZES = _int_list(os.environ.get('DEFAULT_IMAGE_SIZES', '8,20,50,100'))

    # DefChars extraction
    BACKGROUND_PADDING_RATIO = float(os.environ.get('BACKGROUND_PADDING_RATIO', 0.10))
    NEIGHBOUR_DISTANCE_PX = float(os.environ.get('NEIGHBOUR_DISTANCE_PX', 100))
    RDP_MIN_EPSILON = float(os.environ.get('RDP_MIN_EPSILON', 1.0))
    RDP_RELATIVE_EPSILON = float(os.environ.get('RDP_RELATIVE_EPSILON', 0.01))

    # Benchmark history database (empty disables recording)
    RESULTS_DB_URL = os.environ.get('RESULTS_DB_URL', '')


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True
    TESTING = False


class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False
    TESTING = False


class TestingConfig(Config):
    """Testing configuration."""
    DEBUG = True
    TESTING = True
    LOG_FILE = ''
    DEFAULT_THREADS = 1
    RESULTS_DB_URL = ''


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': ProductionConfig
}


def get_config(name: str = None):
    """Resolve the active configuration class from DEFCHAR_ENV."""
    if name is None:
        name = os.environ.get('DEFCHAR_ENV', 'default')
    return config.get(name, config['default'])
