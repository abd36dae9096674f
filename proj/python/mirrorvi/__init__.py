from ._mirrorvi import *  # noqa: F401,F403
from ._mirrorvi import __doc__  # noqa: F401
