"""Surface Maryland model laboratory."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
