"""Configuration classes for the photon-gbd toolkit"""
from config.settings import Config, get_config

__all__ = ['Config', 'get_config']
