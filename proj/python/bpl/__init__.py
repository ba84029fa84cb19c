"""Permanents, Bethe permanents and saddle-point asymptotics for block-constant matrices.

Every permanent-like quantity is returned as its natural logarithm.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__, __version__  # noqa: F401
