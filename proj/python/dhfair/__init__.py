"""Producer assignment and fairness KPIs for district heating networks."""

from ._core import *  # noqa: F401,F403
from ._core import Error, InvalidArgument, ParseError, CapacityExceeded, __version__

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
