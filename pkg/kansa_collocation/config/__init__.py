"""Configuration module for Kansa collocation runs"""
from .configuration import Configuration, KansaSettings
from .run_config import RunConfig

__all__ = ["Configuration", "KansaSettings", "RunConfig"]
