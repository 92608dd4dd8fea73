"""Security-first logic synthesis bindings."""

from ._secsyn import *  # noqa: F401,F403
from ._secsyn import __doc__  # noqa: F401
