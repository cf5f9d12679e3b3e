"""Hypernym classification of financial terms over knowledge-graph features."""

from ._finmatcher import *  # noqa: F401,F403
from ._finmatcher import __doc__  # noqa: F401

__version__ = "0.1.0"
