"""This package provides numerical tools for elliptic Garnier systems and
the elliptic Painlevé equation.

The linear system is built from theta functions of a fixed elliptic curve.
Its isomonodromic deformations (left and right multiplications, the
symmetric group action and a reflection) act on the parameters and on a
finite set of projective points. Every map can be checked against the
defining conditions of the linear system through structured reports, and
the elliptic Painlevé equation is available both in closed form and through
the general construction.
"""
import logging

__version__ = "0.1.0"

from . import component
from . import constants
from . import deformations
from . import errors
from . import garnier
from . import netcdf
from . import painleve
from . import projective
from . import report
from . import statefile
from . import theta
from . import utils
from .core import Orbit


def enable_logging(level=logging.INFO):
    """Enable a basic logging configuration.

    The process name is included for more verbose logs in multiprocessing.

    See also:
        :func:``logging.basicConfig``
    """
    logging.basicConfig(
        level=level,
        datefmt="%Y-%m-%d %H:%M:%S",
        style="{",  # Allows to use format string syntax in the next line.
        format="{asctime} {processName}:{levelname}:{name}:{message}",
    )
