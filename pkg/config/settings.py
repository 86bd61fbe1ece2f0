"""
Configuration settings for the photon-gbd toolkit
"""
import os
from typing import Optional


class Config:
    """Base configuration class"""

    DEBUG = False
    TESTING = False

    # HTTP surface
    HOST = os.environ.get('HOST') or '127.0.0.1'
    PORT = int(os.environ.get('PORT') or 5000)

    # Logging configuration
    LOG_LEVEL = os.environ.get('LOG_LEVEL') or 'INFO'
    LOG_FILE = os.environ.get('LOG_FILE')  # stderr only when unset

    # Physical constants (CODATA 2018, exact in SI)
    PLANCK_CONSTANT = 6.62607015e-34  # J s
    BOLTZMANN_CONSTANT = 1.380649e-23  # J / K
    DEGENERACY_OVERFLOW_EXPONENT = 700.0

    # Tolerances
    SPLIT_SUM_TOLERANCE = 1e-12
    PMF_TABLE_TOLERANCE = 1e-9
    GBD_NORMALIZATION_TOLERANCE = 1e-10

    # Truncation and floors
    TAIL_BOUND_TARGET = 1e-12
    JOINT_TAIL_TARGET = 1e-10
    PMF_K_LIMIT = 10 ** 6
    LINEAR_FLOOR = 1e-300
    GBD_LOG_DENOMINATOR_FLOOR = -1.0e5
    RISING_FACTORIAL_DIRECT_LIMIT = 64

    # Power series
    SERIES_ORDER = 64
    SERIES_CLAMP_TOLERANCE = 1e-12

    # Monte Carlo
    RNG_ALGORITHM = "Philox-4x64-10"
    DEFAULT_SEED = 42
    SEED_ENV_VAR = "PHOTON_GBD_SEED"
    MC_DRAW_BUDGET = 10 ** 8
    MC_TARGET_ACCEPTED = 10 ** 5
    MC_BATCH_SIZE = 2 ** 20
    MC_SHARDS = 4
    MC_WORKERS = int(os.environ.get('MC_WORKERS') or 4)
    MIN_SAMPLE_DRAWS = 1000
    SAMPLE_PVALUE_THRESHOLD = 1e-3

    # Output formats
    SCHEMA_VERSION = "1.0"
    CSV_SIGNIFICANT_DIGITS = 12


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True
    LOG_LEVEL = 'DEBUG'


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False
    LOG_LEVEL = 'WARNING'


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    DEBUG = True
    LOG_LEVEL = 'DEBUG'
    MC_WORKERS = 2


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(config_name: Optional[str] = None) -> Config:
    """Get configuration based on environment"""
    if config_name is None:
        config_name = os.environ.get('PHOTON_GBD_ENV', 'default')
    return config.get(config_name, config['default'])
