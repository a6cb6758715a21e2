"""Points of the projective line and rank-one 2x2 linear algebra.

Kernels and images of the singular values ``B(u_k)`` are points of P^1.
They are stored as normalized homogeneous pairs, which makes every printed
or serialized state reproducible.

**Example**

>>> import numpy as np
>>> from ellgarnier.projective import ProjPoint, kernel_of, proj_eq
>>> M = np.array([[1, -1], [1, -1]], dtype=complex)
>>> proj_eq(kernel_of(M), ProjPoint(1, 1))
True
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from ellgarnier import constants
from ellgarnier.errors import DegenerateTriple, NotSingular, ZeroMatrix


__all__ = [
    "Mat2",
    "ProjPoint",
    "as_mat2",
    "adjugate",
    "cross",
    "proj_eq",
    "proj_distance",
    "kernel_of",
    "image_of",
    "n_ijk",
    "match_point_sets",
]

logger = logging.getLogger(__name__)

#: 2x2 complex matrices are plain numpy arrays of shape (2, 2).
Mat2 = np.ndarray


@dataclass(frozen=True)
class ProjPoint:
    """A point ``(x : y)`` of the projective line.

    The representative is normalized on construction: both coordinates are
    divided by the one of larger modulus (``x`` on ties), which therefore
    becomes exactly ``1``.

    The affine chart is ``y / x``. This is the chart of the Painlevé
    coordinates, ``f = y_3 / x_3`` and ``g = B_21(u_3) / B_11(u_3)``.
    """

    x: complex
    y: complex

    def __post_init__(self):
        x, y = complex(self.x), complex(self.y)
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ValueError(f"Homogeneous coordinates must be finite, got ({x}, {y}).")
        if x == 0 and y == 0:
            raise ValueError("(0 : 0) is not a point of the projective line.")

        if abs(x) >= abs(y):
            x, y = 1 + 0j, y / x
        else:
            x, y = x / y, 1 + 0j

        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_affine(cls, value):
        """Create ``(1 : value)``; ``inf`` gives ``(0 : 1)``."""
        if isinstance(value, str) and value == "inf" or np.isinf(value):
            return cls(0, 1)
        return cls(1, value)

    @classmethod
    def from_vector(cls, vector):
        return cls(vector[0], vector[1])

    @classmethod
    def from_logs(cls, log_x, log_y):
        """Create a point from the complex logarithms of its coordinates."""
        shift = max(
            (v.real for v in (complex(log_x), complex(log_y)) if np.isfinite(v.real)),
            default=0.0,
        )
        with np.errstate(under="ignore"):
            return cls(np.exp(complex(log_x) - shift), np.exp(complex(log_y) - shift))

    @classmethod
    def from_list(cls, values):
        """Create a point from ``[x_re, x_im, y_re, y_im]``."""
        x_re, x_im, y_re, y_im = values
        return cls(complex(x_re, x_im), complex(y_re, y_im))

    def to_list(self):
        return [self.x.real, self.x.imag, self.y.real, self.y.imag]

    def affine(self):
        """Return ``y / x`` or ``inf`` for the point at infinity."""
        if self.x == 0:
            return complex("inf")
        return self.y / self.x

    def vector(self):
        return np.array([self.x, self.y])

    def __str__(self):
        return f"({self.x:.6g} : {self.y:.6g})"


def as_mat2(matrix):
    """Validate and return a 2x2 complex matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (2, 2):
        raise ValueError(f"Expected a 2x2 matrix, got shape {matrix.shape}.")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix entries have to be finite.")
    return matrix


def adjugate(matrix):
    """Return the adjugate, the inverse up to the factor ``det``."""
    return np.array(
        [[matrix[1, 1], -matrix[0, 1]], [-matrix[1, 0], matrix[0, 0]]],
        dtype=complex,
    )


def _coordinates(point):
    if isinstance(point, ProjPoint):
        return point.x, point.y
    return complex(point[0]), complex(point[1])


def cross(a, b):
    """Return the bracket ``a_x b_y - a_y b_x``."""
    ax, ay = _coordinates(a)
    bx, by = _coordinates(b)
    return ax * by - ay * bx


def proj_distance(a, b):
    """Return ``|a_x b_y - a_y b_x| / (|a| |b|)``, zero iff ``a = b`` in P^1."""
    ax, ay = _coordinates(a)
    bx, by = _coordinates(b)
    norm = math.hypot(abs(ax), abs(ay)) * math.hypot(abs(bx), abs(by))
    return abs(ax * by - ay * bx) / norm


def proj_eq(a, b, tol=constants.tolerance_state):
    """Return whether two points of P^1 agree to a relative tolerance."""
    ax, ay = _coordinates(a)
    bx, by = _coordinates(b)
    scale = max(abs(ax * by), abs(ay * bx), np.finfo(float).tiny)
    return abs(ax * by - ay * bx) <= tol * scale


def _check_rank_one(matrix, tol):
    matrix = np.asarray(matrix, dtype=complex)
    norm = np.linalg.norm(matrix)
    if norm <= np.finfo(float).tiny:
        raise ZeroMatrix("Kernel and image of the zero matrix are undefined.")

    m = matrix / norm
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) > tol:
        raise NotSingular(f"Matrix is not of rank one: |det| / |M|^2 = {abs(det):.3e}.")
    return m


def kernel_of(matrix, tol=constants.rank_tolerance):
    """Return the kernel of a rank-one matrix as a point of P^1.

    The kernel is read off the row of larger norm.

    Raises:
        NotSingular: If ``|det M| > tol |M|^2``.
        ZeroMatrix: If ``M`` vanishes.
    """
    m = _check_rank_one(matrix, tol)
    row = m[np.argmax(np.linalg.norm(m, axis=1))]
    return ProjPoint(-row[1], row[0])


def image_of(matrix, tol=constants.rank_tolerance):
    """Return the image of a rank-one matrix, its column of larger norm."""
    m = _check_rank_one(matrix, tol)
    column = m[:, np.argmax(np.linalg.norm(m, axis=0))]
    return ProjPoint(column[0], column[1])


def n_ijk(p_i, p_j, p_k):
    """Return the matrix mapping the standard frame onto three points.

    The columns are multiples of ``p_i`` and ``p_j`` chosen such that

    .. math::
        N (1, 0)^T \\propto p_i, \\quad N (0, 1)^T \\propto p_j,
        \\quad N (1, 1)^T \\propto p_k.

    Raises:
        DegenerateTriple: If two of the points coincide.
    """
    xi, yi = _coordinates(p_i)
    xj, yj = _coordinates(p_j)
    xk, yk = _coordinates(p_k)

    for a, b in ((p_i, p_j), (p_j, p_k), (p_i, p_k)):
        if proj_eq(a, b, constants.tolerance_frame):
            raise DegenerateTriple(f"Points {a} and {b} coincide.")

    c_i = xj * yk - xk * yj
    c_j = xk * yi - xi * yk
    return np.array([[xi * c_i, xj * c_j], [yi * c_i, yj * c_j]], dtype=complex)


def match_point_sets(first, second, tol=constants.tolerance_base_point):
    """Match two lists of points of (P^1)^2 as sets.

    Parameters:
        first, second (list): Lists of ``(ProjPoint, ProjPoint)`` pairs.
        tol (float): Tolerance of the cross-product metric.

    Returns:
        list or None: ``permutation`` with ``first[i] ~ second[permutation[i]]``,
        or ``None`` if the sets differ.
    """
    if len(first) != len(second):
        return None

    unused = list(range(len(second)))
    permutation = []
    for f1, g1 in first:
        distances = [
            max(proj_distance(f1, second[j][0]), proj_distance(g1, second[j][1]))
            for j in unused
        ]
        best = int(np.argmin(distances))
        if distances[best] > tol:
            return None
        permutation.append(unused.pop(best))

    return permutation
