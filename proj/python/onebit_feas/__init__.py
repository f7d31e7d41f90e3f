"""One-bit quadratic compressed sensing via randomized Kaczmarz feasibility solvers."""

from ._core import *  # noqa: F401,F403
from ._core import Error, __doc__  # noqa: F401
