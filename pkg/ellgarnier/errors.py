"""Exceptions raised by the ellgarnier modules.

All mathematical failures derive from :class:`EllGarnierError`, which is a
``ValueError`` so that callers treating bad input generically keep working.
"""

__all__ = [
    "EllGarnierError",
    "NotSingular",
    "ZeroMatrix",
    "DegenerateTriple",
    "CollidingParameters",
    "SingularAtPoint",
    "ProportionalKernels",
    "DegenerateImages",
    "BothColumnsVanish",
    "PoleInFormula",
    "BasePointCollision",
    "IndexOutOfRange",
]


class EllGarnierError(ValueError):
    """Base class of all mathematical failures."""


class NotSingular(EllGarnierError):
    """A matrix expected to have rank one fails the determinant test."""


class ZeroMatrix(EllGarnierError):
    """A matrix vanishes, so neither kernel nor image is defined."""


class DegenerateTriple(EllGarnierError):
    """Two points of a normalization triple coincide."""


class CollidingParameters(EllGarnierError):
    """Singular points or normalization points collide modulo p^Z."""


class SingularAtPoint(EllGarnierError):
    """A matrix that has to be inverted is singular at the requested point."""


class ProportionalKernels(EllGarnierError):
    """The kernels used by a right-type deformation are proportional."""


class DegenerateImages(EllGarnierError):
    """The images used by a left-type deformation are proportional."""


class BothColumnsVanish(EllGarnierError):
    """Both columns of B(u_k) vanish, so no image point exists."""


class PoleInFormula(EllGarnierError):
    """A closed-form expression is evaluated on its polar locus."""


class BasePointCollision(EllGarnierError):
    """A birational map is evaluated too close to one of its base points."""


class IndexOutOfRange(EllGarnierError, IndexError):
    """A generator or deformation index lies outside its admissible range."""
