"""Multiplication-free (ef-operator) neural networks."""

from ._addnet import *  # noqa: F401,F403
from ._addnet import __doc__  # noqa: F401

__version__ = "0.1.0"
