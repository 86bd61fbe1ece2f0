"""
Photon-number statistics under flux splitting
"""
__version__ = "1.0.0"
