"""Equilibrium laboratory for the dynamic trust game with complexity-penalized beliefs."""

from mleqlab._core import *  # noqa: F401,F403
from mleqlab._core import __doc__  # noqa: F401

__version__ = "0.1.0"
