"""Common utility functions. """
import logging

import numpy as np

from ellgarnier import constants
from ellgarnier.theta import lattice_distance


__all__ = [
    "return_if_type",
    "complex_to_pair",
    "pair_to_complex",
    "complex_array_to_pairs",
    "pairs_to_complex_array",
    "split_complex",
    "affine_display",
    "is_away_from",
    "sample_unit_circle",
    "sample_generic",
]

logger = logging.getLogger(__name__)


def return_if_type(variable, variablename, expect, default):
    """Return a variable if it matches an expected type.

    Parameters:
          variable: Variable to check.
          variablename (str): Variable name for error message.
          expect (type): Expected variable type.
          default: Default value, if variable is ``None``.

    Raises:
          TypeError: If variable does not match expected type.
    """
    if variable is None:
        variable = default
    elif not isinstance(variable, expect):
        raise TypeError(
            "Argument `{name}` has to be of type `{type}`.".format(
                name=variablename, type=expect.__name__
            )
        )

    return variable


def complex_to_pair(value):
    """Return ``[re, im]`` of a complex number."""
    value = complex(value)
    return [value.real, value.imag]


def pair_to_complex(pair):
    """Inverse of :func:`complex_to_pair`; plain numbers are accepted too."""
    if isinstance(pair, (int, float, complex)):
        return complex(pair)

    if len(pair) != 2:
        raise ValueError(f"Complex numbers are stored as [re, im], got {pair}.")
    return complex(float(pair[0]), float(pair[1]))


def complex_array_to_pairs(values):
    return [complex_to_pair(v) for v in np.ravel(values)]


def pairs_to_complex_array(pairs):
    return np.array([pair_to_complex(p) for p in pairs], dtype=complex)


def split_complex(values):
    """Stack real and imaginary part along a new trailing axis."""
    values = np.asarray(values, dtype=complex)
    return np.stack([values.real, values.imag], axis=-1)


def affine_display(point):
    """Return the affine chart of a point as ``[re, im]`` or ``"inf"``."""
    value = point.affine()
    if np.isinf(value):
        return "inf"
    return complex_to_pair(value)


def is_away_from(z, forbidden, p, distance=constants.forbidden_distance):
    """Check that ``z`` keeps a distance from all forbidden points modulo p^Z."""
    if len(forbidden) == 0:
        return True
    ratios = z / np.asarray(forbidden, dtype=complex)
    return lattice_distance(ratios, p) >= distance


def sample_unit_circle(rng, forbidden, p, max_tries=1000):
    """Draw a point on the unit circle away from ``forbidden`` modulo p^Z.

    Parameters:
        rng (numpy.random.Generator): Random number generator.
        forbidden (array-like): Points to avoid.
        p (complex): Nome of the lattice.

    Returns:
        complex: Accepted sample.
    """
    for _ in range(max_tries):
        z = np.exp(2j * np.pi * rng.uniform())
        if is_away_from(z, forbidden, p):
            return complex(z)

        logger.debug(f"Rejected normalization point {z:.6f}.")

    raise RuntimeError(f"No admissible point found after {max_tries} draws.")


def sample_generic(
    rng,
    n,
    forbidden,
    p,
    radius=(0.85, 1.15),
    max_tries=1000,
    distance=constants.forbidden_distance,
):
    """Draw ``n`` generic evaluation points on an annulus.

    Points closer than ``distance`` to a forbidden point (modulo p^Z) are
    rejected.
    """
    samples = []
    tries = 0
    while len(samples) < n:
        if tries == max_tries:
            raise RuntimeError(f"Only {len(samples)} of {n} samples found.")
        tries += 1

        z = rng.uniform(*radius) * np.exp(2j * np.pi * rng.uniform())
        if is_away_from(z, forbidden, p, distance):
            samples.append(complex(z))

    return np.array(samples)
