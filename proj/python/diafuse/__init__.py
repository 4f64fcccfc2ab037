from ._diafuse import *  # noqa: F401,F403
from ._diafuse import __version__  # noqa: F401
