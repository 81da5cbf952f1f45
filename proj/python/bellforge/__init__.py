"""Exact laboratory for Bell-type experiments on finite hidden-variable models.

The heavy lifting lives in the compiled extension `_bellforge`; this package
re-exports its public surface.
"""

from _bellforge import *  # noqa: F401,F403
from _bellforge import __version__  # noqa: F401
