r"""q-series special functions.

This module evaluates the q-Pochhammer symbol, the theta function

.. math::
    \theta_p(z) = (z; p)_\infty (p/z; p)_\infty

and the elliptic Gamma function with a certified truncation. Every theta
argument is first reduced into the fundamental annulus
:math:`|p| < |z_0| \leq 1` and the quasi-periodicity

.. math::
    \theta_p(p^n z_0) = (-1)^n p^{-n(n-1)/2} z_0^{-n} \theta_p(z_0)

is applied analytically. The same reduction gives :func:`log_theta`, which is
used wherever long products of theta values would overflow.

**Example**

>>> from ellgarnier import theta
>>> abs(theta.theta(1.0, 0.3))
0.0
>>> z = 0.5 + 0.2j
>>> abs(theta.theta(z, 0.3) - theta.theta_series(z, 0.3)) < 1e-12
True
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from ellgarnier import constants
from ellgarnier.errors import PoleInFormula


__all__ = [
    "EllipticBase",
    "pochhammer_inf",
    "pochhammer_k",
    "theta",
    "theta_multi",
    "log_theta",
    "theta_series",
    "elliptic_gamma",
    "theta_addition",
    "log_sum",
    "lattice_distance",
]

logger = logging.getLogger(__name__)


def _truncation(nome_abs, eps, magnitude=1.0):
    """Number of factors until |nome^k| * magnitude < eps * safety."""
    target = eps * constants.truncation_safety / max(magnitude, 1.0)
    return max(1, int(math.ceil(math.log(target) / math.log(nome_abs))) + 1)


def _check_nome(nome, name="p"):
    if not 0 < abs(nome) < 1:
        raise ValueError(f"Nome `{name}` has to satisfy 0 < |{name}| < 1, got {nome}.")


@dataclass(frozen=True)
class EllipticBase:
    """Nomes, symmetry parameter and numerical policy of a linear system.

    Parameters:
        p (complex): Theta nome (period of the elliptic curve).
        q (complex): Shift base of the difference equation.
        eta (complex): Symmetry parameter, ``Y(z) = Y(eta / z)``.
        eps (float): Relative truncation target.
        max_terms (int): Truncation cap. Defaults to the smallest admissible
            value for ``eps``.
    """

    p: complex
    q: complex
    eta: complex = 1.0
    eps: float = constants.default_eps
    max_terms: int = None

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        object.__setattr__(self, "q", complex(self.q))
        object.__setattr__(self, "eta", complex(self.eta))

        _check_nome(self.p, "p")
        _check_nome(self.q, "q")

        if self.eta == 0:
            raise ValueError("The symmetry parameter `eta` has to be nonzero.")

        if not self.eps > np.finfo(float).eps:
            raise ValueError(
                f"Tolerance `eps` has to exceed machine epsilon, got {self.eps}."
            )

        largest = max(abs(self.p), abs(self.q))
        required = int(math.ceil(math.log(self.eps) / math.log(largest)))
        if self.max_terms is None:
            object.__setattr__(self, "max_terms", _truncation(largest, self.eps))
        elif self.max_terms < required:
            raise ValueError(
                f"`max_terms` has to be at least {required} for eps={self.eps}."
            )

        window = range(-constants.resonance_window, constants.resonance_window + 1)
        for a in window:
            for b in window:
                if (a, b) == (0, 0):
                    continue
                if abs(self.p**a * self.q**b - 1) < constants.resonance_tolerance:
                    raise ValueError(
                        f"Resonant nomes: p^{a} q^{b} = 1 for p={self.p}, q={self.q}."
                    )

    def replace(self, **changes):
        """Return a copy with some fields replaced."""
        fields = dict(p=self.p, q=self.q, eta=self.eta, eps=self.eps)
        fields.update(changes)
        return EllipticBase(**fields)

    def to_dict(self):
        return {
            "p": [self.p.real, self.p.imag],
            "q": [self.q.real, self.q.imag],
            "eta": [self.eta.real, self.eta.imag],
            "eps": self.eps,
            "max_terms": self.max_terms,
        }


def _as_array(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("Theta functions are not defined at z = 0.")
    return z


def _unwrap(value, like):
    return value[()] if np.ndim(like) == 0 else value


def pochhammer_inf(z, q, eps=constants.default_eps):
    r"""Return the infinite q-Pochhammer symbol :math:`(z; q)_\infty`.

    Parameters:
        z (complex): Argument.
        q (complex): Base with :math:`|q| < 1`.
        eps (float): Relative truncation target.

    Returns:
        complex: :math:`\prod_{k \geq 0} (1 - q^k z)`.

    Raises:
        ValueError: If :math:`|q| \geq 1` (the product diverges).
    """
    if not abs(q) < 1:
        raise ValueError(f"The q-Pochhammer symbol diverges for |q| >= 1, got {q}.")
    z = complex(z)
    if z == 0:
        return 1 + 0j

    k = np.arange(_truncation(abs(q), eps, abs(z)))
    return np.prod(1 - np.power(complex(q), k) * z)


def pochhammer_k(z, q, k, eps=constants.default_eps):
    r"""Return the finite q-Pochhammer symbol :math:`(z; q)_k` for integer k.

    For negative ``k`` the symbol is the ratio
    :math:`(z; q)_\infty / (q^k z; q)_\infty = 1 / \prod_{j=1}^{|k|}(1 - q^{-j} z)`.

    Raises:
        PoleInFormula: If a factor of the denominator vanishes.
    """
    if not abs(q) < 1:
        raise ValueError(f"The q-Pochhammer symbol diverges for |q| >= 1, got {q}.")
    z, q = complex(z), complex(q)

    if k >= 0:
        return np.prod(1 - np.power(q, np.arange(k)) * z) if k > 0 else 1 + 0j

    shifted = np.power(q, -np.arange(1, -k + 1)) * z
    denominator = 1 - shifted
    if np.any(np.abs(denominator) <= 10 * eps * np.maximum(1, np.abs(shifted))):
        raise PoleInFormula(f"(z; q)_{k} has a pole at z={z} for q={q}.")

    return 1 / np.prod(denominator)


def _reduce(z, p):
    """Split ``z = p**n * z0`` with ``|p| < |z0| <= 1``."""
    n = np.floor(np.log(np.abs(z)) / np.log(abs(p)))
    return n, z / np.power(p, n)


def _theta_annulus(z0, p, eps):
    k = np.arange(_truncation(abs(p), eps)).reshape((-1,) + (1,) * np.ndim(z0))
    pk = np.power(p, k)
    return np.prod((1 - pk * z0) * (1 - p * pk / z0), axis=0)


def theta(z, p, eps=constants.default_eps):
    r"""Return the theta function :math:`\theta_p(z) = (z, p/z; p)_\infty`.

    Parameters:
        z (complex or ndarray): Argument(s), nonzero.
        p (complex): Nome with :math:`0 < |p| < 1`.
        eps (float): Relative truncation target.

    Returns:
        complex or ndarray: Theta values (``inf`` once the multiplier
        overflows; use :func:`log_theta` for such arguments).
    """
    _check_nome(p)
    p = complex(p)
    zz = _as_array(z)
    n, z0 = _reduce(np.atleast_1d(zz), p)

    value = (
        _theta_annulus(z0, p, eps)
        * np.power(-1.0, n)
        * np.power(p, -n * (n - 1) / 2)
        * np.power(z0, -n)
    )
    return _unwrap(value.reshape(zz.shape), zz)


def log_theta(z, p, eps=constants.default_eps):
    """Return the complex logarithm of :math:`\\theta_p(z)`.

    Zeros of theta map to ``-inf``. Only ``exp`` of the result is meaningful,
    the branch of the imaginary part is arbitrary.
    """
    _check_nome(p)
    p = complex(p)
    zz = _as_array(z)
    n, z0 = _reduce(np.atleast_1d(zz), p)

    with np.errstate(divide="ignore"):
        log0 = np.log(_theta_annulus(z0, p, eps))

    value = log0 + 1j * np.pi * n - n * (n - 1) / 2 * np.log(p) - n * np.log(z0)
    return _unwrap(value.reshape(zz.shape), zz)


def theta_multi(*args, p, eps=constants.default_eps):
    r"""Return :math:`\theta_p(z_1, \ldots, z_n) = \prod_i \theta_p(z_i)`."""
    return np.prod(theta(np.asarray(args, dtype=complex), p, eps=eps))


def theta_series(z, p, eps=constants.default_eps, max_terms=500):
    r"""Evaluate theta through the Jacobi triple product series.

    .. math::
        \theta_p(z) = \frac{1}{(p; p)_\infty}
            \sum_{n \in \mathbb{Z}} (-1)^n p^{n(n-1)/2} z^n

    The symmetric partial sums stop once two consecutive pairs of terms fall
    below ``eps`` relative to the largest term. This is an independent
    oracle for :func:`theta`.
    """
    _check_nome(p)
    z, p = complex(z), complex(p)
    if z == 0:
        raise ValueError("Theta functions are not defined at z = 0.")

    terms = [1 + 0j]
    positive, negative = 1 + 0j, 1 + 0j
    small = 0
    for k in range(1, max_terms):
        positive *= -(p ** (k - 1)) * z
        negative *= -(p**k) / z
        terms.extend((positive, negative))

        scale = max(abs(t) for t in terms)
        if max(abs(positive), abs(negative)) < eps * scale:
            small += 1
            if small == 2:
                break
        else:
            small = 0
    else:
        logger.warning(f"theta_series reached max_terms={max_terms} at z={z}.")

    total = complex(
        math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms)
    )
    return total / pochhammer_inf(p, p, eps)


def elliptic_gamma(z, p, q, eps=constants.default_eps):
    r"""Return the elliptic Gamma function.

    .. math::
        \Gamma_{p,q}(z) = \prod_{i,j \geq 0}
            \frac{1 - p^{i+1} q^{j+1} / z}{1 - p^i q^j z}

    Raises:
        PoleInFormula: If :math:`1 - p^i q^j z` vanishes to tolerance.
    """
    _check_nome(p, "p")
    _check_nome(q, "q")
    z, p, q = complex(z), complex(p), complex(q)
    if z == 0:
        raise ValueError("The elliptic Gamma function is not defined at z = 0.")

    magnitude = max(abs(z), abs(p * q / z))
    i = np.arange(_truncation(abs(p), eps, magnitude))[:, np.newaxis]
    j = np.arange(_truncation(abs(q), eps, magnitude))[np.newaxis, :]
    lattice = np.power(p, i) * np.power(q, j)

    denominator = 1 - lattice * z
    if np.min(np.abs(denominator)) < constants.tolerance_frame:
        raise PoleInFormula(f"Elliptic Gamma function has a pole at z={z}.")

    return np.prod((1 - p * q * lattice / z) / denominator)


def theta_addition(a, b, c, z, p, eps=constants.default_eps):
    r"""Return the three terms of the theta addition law.

    .. math::
        a \theta_p(z/a, az, b/c, bc) - b \theta_p(a/c, ac, z/b, bz)
        + b \theta_p(a/b, ab, z/c, cz) = 0

    Returns:
        ndarray: The three terms; their sum vanishes.
    """
    return np.array(
        [
            a * theta_multi(z / a, a * z, b / c, b * c, p=p, eps=eps),
            -b * theta_multi(a / c, a * c, z / b, b * z, p=p, eps=eps),
            b * theta_multi(a / b, a * b, z / c, c * z, p=p, eps=eps),
        ]
    )


def log_sum(logs):
    """Sum exponentials of complex logarithms without overflow.

    Parameters:
        logs (array-like): Complex logarithms of the summands (``-inf`` for
            vanishing summands).

    Returns:
        complex, float: ``(s, shift)`` with ``sum(exp(logs)) = s * exp(shift)``.
    """
    logs = np.asarray(logs, dtype=complex).ravel()
    finite = np.isfinite(logs.real)
    if not finite.any():
        return 0j, 0.0

    shift = float(logs.real[finite].max())
    with np.errstate(under="ignore"):
        return np.sum(np.exp(logs - shift)), shift


def lattice_distance(ratio, p):
    """Return the distance of ``ratio`` from the lattice ``p**Z``.

    The ratio is reduced into the fundamental annulus first, so the result
    measures how close ``a / b`` is to making ``a`` and ``b`` coincide on the
    elliptic curve.
    """
    ratio = np.atleast_1d(np.asarray(ratio, dtype=complex))
    _, r0 = _reduce(ratio, complex(p))
    distance = np.minimum(np.abs(r0 - 1), np.abs(r0 / p - 1))
    return distance.min()
