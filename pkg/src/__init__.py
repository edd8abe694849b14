"""WESPAD personal health mention classifier"""

__version__ = "0.1.0"
