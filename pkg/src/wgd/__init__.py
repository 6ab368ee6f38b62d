"""Wishart generator distributions.

Densities, zonal-polynomial series for moments and transforms, eigenvalue
laws, exact sampling, and maximum likelihood and Bayesian estimation for the
family of matrix-variate laws whose density depends on ``X`` through
``det X`` and ``tr Σ^{-1} X``.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .matrix import *  # noqa: F401,F403
from .series import *  # noqa: F401,F403
from .zonal import *  # noqa: F401,F403
from .generators import *  # noqa: F401,F403
from .distributions import *  # noqa: F401,F403
from .moments import *  # noqa: F401,F403
from .sampling import *  # noqa: F401,F403
from .inference import *  # noqa: F401,F403
from . import errors, matrix, series, zonal, generators, distributions, moments, sampling, inference  # noqa: F401
