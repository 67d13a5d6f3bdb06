"""Finite-scale harmonic analysis on measured groupoids.

Builds finite measured groupoids, their regular representation and modular
data, computes beta-Fourier transforms and non-commutative L^q norms, and
verifies the Hausdorff-Young inequality together with the numeric steps of
its interpolation proof.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    convalg,
    fixtures,
    groupoid,
    harness,
    interp,
    measure,
    nclp,
    numkit,
    repmod,
)
from .convalg import GFunction, convolve, involution  # noqa: F401
from .measure import MeasuredGroupoid, build, mixed_norm, lp_norm  # noqa: F401
from .nclp import fourier, fourier_p, hy_check, lq_norm, plancherel_check  # noqa: F401
from .repmod import RepContext  # noqa: F401
