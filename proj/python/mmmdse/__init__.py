"""Design-space exploration and schedule simulation for tiled matrix multiplication."""

from ._core import *  # noqa: F401,F403
from ._core import Error, ConfigError, InfeasibleError, DimensionError, ParseError  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
