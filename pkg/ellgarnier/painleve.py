r"""The elliptic Painlevé equation as the ``m = 1`` Garnier system.

For ``m = 1`` the system is rigidified by right multiplication with
:math:`N_{012}`: the kernels at :math:`u_0, u_1, u_2` become
:math:`(1:0), (0:1), (1:1)` and the images at :math:`u_7, u_6, u_5` are
:math:`(1:0), (0:1), (1:1)`. What remains is the point
:math:`(f, g) \in \mathbb{P}^1 \times \mathbb{P}^1`, the kernel and image of
:math:`B(u_3)`, together with the parameters :math:`u_0, \ldots, u_7, \eta`.

The translation ``step`` sending :math:`u_3, u_4 \to q u_3, q u_4` is the
elliptic Painlevé equation. All normalized maps are available in closed form
(``method="closed"``) and through the general construction followed by
:func:`normalize` (``method="pipeline"``); the two paths are independent.

**Example**

>>> from ellgarnier import garnier, painleve
>>> X = painleve.normalize(garnier.fixture())
>>> Y = painleve.step(X)
>>> bool(abs(Y.u[3] - X.base.q * X.u[3]) < 1e-14)
True
"""
import logging

import numpy as np

from ellgarnier import constants, utils
from ellgarnier.component import Component
from ellgarnier.deformations import (
    apply_E,
    apply_F,
    certificate_samples,
    gauge_residual,
    r_right_scaled,
)
from ellgarnier.errors import (
    BasePointCollision,
    IndexOutOfRange,
    PoleInFormula,
)
from ellgarnier.garnier import (
    GarnierState,
    build_B_scaled,
    check_distinct,
    forbidden_points,
    image_residual,
    normalization_points,
    sym_action,
)
from ellgarnier.projective import (
    ProjPoint,
    adjugate,
    cross,
    image_of,
    n_ijk,
    proj_distance,
)
from ellgarnier.report import Report
from ellgarnier.theta import EllipticBase, log_sum, log_theta


__all__ = [
    "PainleveState",
    "normalize",
    "to_garnier",
    "build_B_e8_scaled",
    "build_B_e8",
    "kernel_u4",
    "image_u4",
    "g_from_kernel_u4",
    "bar_E34",
    "bar_F34",
    "step",
    "step_inverse",
    "gen",
    "chi",
    "base_points",
    "check_base_points",
    "iota_X",
    "fourier_laplace",
    "bar_E01",
    "bar_F67",
    "lax_certificate",
    "verify_painleve",
    "painleve_distance",
    "sample_points",
]

logger = logging.getLogger(__name__)

METHODS = ("closed", "pipeline")


class PainleveState(Component):
    """Normalized state ``X = (u_0 .. u_7; eta, f, g)``."""

    def __init__(self, base, u, f, g, L=None, v=None, w=None, seed=0):
        """
        Parameters:
            base (:class:`ellgarnier.theta.EllipticBase`): Nomes and ``eta``.
            u (array-like): Eight singular points.
            f, g (ProjPoint, complex or "inf"): Kernel and image coordinate
                at ``u_3``. Numbers are read in the affine chart ``y / x``.
            L (complex): Square root of ``prod(u)``, principal by default.
            v, w (complex): Normalization points used by the pipeline path.
            seed (int): Seed of the normalization point sampling.
        """
        if not isinstance(base, EllipticBase):
            raise TypeError("Argument `base` has to be of type `EllipticBase`.")

        u = np.array(u, dtype=complex)
        if u.shape != (8,):
            raise ValueError(f"Expected 8 singular points, got {u.size}.")
        if np.any(u == 0):
            raise ValueError("Singular points have to be nonzero.")
        check_distinct(u, base.p)

        product = np.prod(u)
        L = complex(np.sqrt(product) if L is None else L)
        if abs(L**2 - product) > constants.tolerance_identity * abs(product):
            raise ValueError(f"L={L} does not satisfy L^2 = prod(u) = {product}.")

        f, g = (
            point if isinstance(point, ProjPoint) else ProjPoint.from_affine(point)
            for point in (f, g)
        )

        self.base = base
        self.L = L
        self.seed = int(seed)
        self.v, self.w = normalization_points(u, base, self.seed, v, w)

        self.create_variable("u", u)
        self.create_variable("f", f.vector())
        self.create_variable("g", g.vector())

    @property
    def u(self):
        return self["u"]

    @property
    def f(self):
        return ProjPoint.from_vector(self["f"])

    @property
    def g(self):
        return ProjPoint.from_vector(self["g"])

    def replace(self, **changes):
        """Return a new state with some fields replaced."""
        fields = dict(
            base=self.base,
            u=self.u,
            f=self.f,
            g=self.g,
            L=self.L,
            v=self.v,
            w=self.w,
            seed=self.seed,
        )
        fields.update(changes)
        return PainleveState(**fields)

    def to_dict(self):
        """Return a JSON-ready dictionary (complex numbers as ``[re, im]``)."""
        return {
            "kind": "painleve",
            **self.base.to_dict(),
            "u": utils.complex_array_to_pairs(self.u),
            "L": utils.complex_to_pair(self.L),
            "f": self.f.to_list(),
            "g": self.g.to_list(),
            "v": utils.complex_to_pair(self.v),
            "w": utils.complex_to_pair(self.w),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data):
        base = EllipticBase(
            p=utils.pair_to_complex(data["p"]),
            q=utils.pair_to_complex(data["q"]),
            eta=utils.pair_to_complex(data["eta"]),
            eps=data.get("eps", constants.default_eps),
        )
        return cls(
            base,
            utils.pairs_to_complex_array(data["u"]),
            ProjPoint.from_list(data["f"]),
            ProjPoint.from_list(data["g"]),
            L=utils.pair_to_complex(data["L"]),
            v=utils.pair_to_complex(data["v"]) if "v" in data else None,
            w=utils.pair_to_complex(data["w"]) if "w" in data else None,
            seed=data.get("seed", 0),
        )


def _log(value):
    with np.errstate(divide="ignore"):
        return np.log(complex(value))


def _lt(base, *args):
    """Sum of log theta over all arguments."""
    return np.sum(log_theta(np.array(args, dtype=complex), base.p, base.eps))


def _log_combination(*terms):
    """Logarithm of ``sum(coefficient * exp(log))`` over ``(coefficient, log)``."""
    total, shift = log_sum([_log(c) + log for c, log in terms])
    return _log(total) + shift


def _point(log_x, log_y, what):
    if not (np.isfinite(log_x.real) or np.isfinite(log_y.real)):
        raise PoleInFormula(f"Both coordinates of {what} vanish.")
    return ProjPoint.from_logs(log_x, log_y)


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"`method` has to be one of {METHODS}, got {method!r}.")


# Normalization
def normalize(state):
    """Rigidify an ``m = 1`` state by right multiplication with ``N_012``.

    Raises:
        DegenerateTriple: If two of the kernels at ``u_0, u_1, u_2`` agree.
    """
    if state.m != 1:
        raise ValueError(f"Only states with m = 1 can be normalized, got m={state.m}.")

    kernels = state.kernels
    frame = n_ijk(kernels[0], kernels[1], kernels[2])
    f = ProjPoint.from_vector(adjugate(frame) @ kernels[3].vector())
    g = image_of(build_B_scaled(state, state.u[3])[0])

    return PainleveState(
        state.base, state.u, f, g, L=state.L, v=state.v, w=state.w, seed=state.seed
    )


def to_garnier(X, v=None, w=None):
    """Rebuild the ``m = 1`` Garnier state of a normalized state.

    The kernel at ``u_4`` is found numerically: :math:`B` is linear in
    :math:`(x_4, y_4)`, and the image condition at ``u_3`` is one linear
    equation for it.
    """
    frame = [ProjPoint(1, 0), ProjPoint(0, 1), ProjPoint(1, 1), X.f]
    trials = [
        GarnierState(
            X.base,
            1,
            X.u,
            frame + [unit],
            L=X.L,
            v=X.v if v is None else v,
            w=X.w if w is None else w,
            seed=X.seed,
        )
        for unit in (ProjPoint(1, 0), ProjPoint(0, 1))
    ]

    f = X.f
    test = np.array([0, 1]) if abs(f.x) >= abs(f.y) else np.array([1, 0])
    columns = [build_B_scaled(trial, X.u[3]) for trial in trials]
    (first, log_first), (second, log_second) = columns

    kernel = _point(
        _log(cross(second @ test, X.g)) + log_second,
        _log(-cross(first @ test, X.g)) + log_first,
        "the kernel at u_4",
    )
    return trials[0].replace(kernels=frame + [kernel])


# Closed forms
def _kernel_u4_logs(base, u, L):
    u0, u1, u2, u3, u4, u5, u6, u7 = u

    def term(ua, ub, first, second):
        return np.log(ub) + _lt(
            base, u3 / ua, u5 / ub, first * u3 * ua / L, second * u3 * ua / L
        )

    la = term(u6, u7, u1 * u2, u0 * u4)
    lb = term(u7, u6, u1 * u2, u0 * u4)
    lc = term(u6, u7, u0 * u2, u1 * u4)
    ld = term(u7, u6, u0 * u2, u1 * u4)
    alpha = _lt(base, u1 / u2, u0 / u4)
    beta = _lt(base, u0 / u2, u1 / u4)
    return la, lb, lc, ld, alpha, beta


def kernel_u4(X):
    r"""Return the kernel of :math:`B(u_4)` as a function of ``g``.

    .. math::
        (x_4 : y_4) = \bigl(\beta (g_y c - g_x d) : \alpha (g_y a - g_x b)\bigr)

    with theta products :math:`a, b, c, d, \alpha, \beta` of the parameters.

    Raises:
        PoleInFormula: If both coordinates vanish.
    """
    la, lb, lc, ld, alpha, beta = _kernel_u4_logs(X.base, X.u, X.L)
    g = X.g
    return _point(
        beta + _log_combination((g.y, lc), (-g.x, ld)),
        alpha + _log_combination((g.y, la), (-g.x, lb)),
        "the kernel at u_4",
    )


def g_from_kernel_u4(base, u, L, kernel):
    """Invert :func:`kernel_u4`: return ``g`` for a given kernel at ``u_4``."""
    la, lb, lc, ld, alpha, beta = _kernel_u4_logs(base, u, L)
    return _point(
        _log_combination((kernel.y, beta + lc), (-kernel.x, alpha + la)),
        _log_combination((kernel.y, beta + ld), (-kernel.x, alpha + lb)),
        "g",
    )


def _image_u4_factor(X, f, ua):
    u0, u1, u2, u3, u4 = X.u[:5]
    scale = u4 * ua / X.L
    return _log_combination(
        (f.x, _lt(X.base, u1 / u2, u0 / u3, u1 * u2 * scale, u0 * u3 * scale)),
        (-f.y, _lt(X.base, u0 / u2, u1 / u3, u0 * u2 * scale, u1 * u3 * scale)),
    )


def image_u4(X):
    r"""Return the image :math:`(B_{11}(u_4) : B_{21}(u_4))` as a function of ``f``.

    Raises:
        PoleInFormula: If both coordinates vanish.
    """
    u4, u5, u6, u7 = X.u[4:]
    return _point(
        np.log(u7) + _lt(X.base, u4 / u6, u5 / u7) + _image_u4_factor(X, X.f, u6),
        np.log(u6) + _lt(X.base, u5 / u6, u4 / u7) + _image_u4_factor(X, X.f, u7),
        "the image at u_4",
    )


def _e8_row(X, z, a, x3, y3, x4, y4):
    """Logarithms of the two entries of the row using ``u_a``."""
    u0, u1, u2, u3, u4, u5 = X.u[:6]
    ua, L = X.u[a], X.L

    first = [
        (
            x4 * y3,
            _lt(X.base, u0 * u4 * ua * z / L, u1 * u2 * u3 * ua / L, z / u0, z / u4)
            - _lt(X.base, u0 / u1, u0 / u2, u0 / u3, u4 / u1, u4 / u2, u4 / u3)
            - np.log(ua * (u1 * u2 * u3) ** 3),
        ),
        (
            x3 * y4,
            _lt(X.base, u0 * u3 * ua * z / L, u1 * u2 * u4 * ua / L, z / u0, z / u3)
            - _lt(X.base, u0 / u1, u0 / u2, u0 / u4, u3 / u1, u3 / u2, u3 / u4)
            - np.log(ua * (u1 * u2 * u4) ** 3),
        ),
        (
            y3 * y4,
            _lt(X.base, u0 * u2 * ua * z / L, u1 * u3 * u4 * ua / L, z / u0, z / u2)
            - _lt(X.base, u0 / u1, u0 / u3, u0 / u4, u2 / u1, u2 / u3, u2 / u4)
            - np.log(ua * (u1 * u3 * u4) ** 3),
        ),
    ]
    second = [
        (
            -x3 * y4,
            _lt(X.base, u0 * u2 * u3 * ua / L, u1 * u4 * ua * z / L, z / u1, z / u4)
            - _lt(X.base, u0 / u1, u0 / u4, u2 / u1, u2 / u4, u3 / u1, u3 / u4)
            - np.log(u0 * u2 * u3 * ua * (u1 * u4) ** 3),
        ),
        (
            -x4 * y3,
            _lt(X.base, u0 * u2 * u4 * ua / L, u1 * u3 * ua * z / L, z / u1, z / u3)
            - _lt(X.base, u0 / u1, u0 / u3, u2 / u1, u2 / u3, u4 / u1, u4 / u3)
            - np.log(u0 * u2 * u4 * ua * (u1 * u3) ** 3),
        ),
        (
            -x3 * x4,
            _lt(X.base, u0 * u3 * u4 * ua / L, u1 * u2 * ua * z / L, z / u1, z / u2)
            - _lt(X.base, u0 / u1, u0 / u2, u3 / u1, u3 / u2, u4 / u1, u4 / u2)
            - np.log(u0 * u3 * u4 * ua * (u1 * u2) ** 3),
        ),
    ]

    common = _lt(X.base, z / ua) - _lt(X.base, u5 / ua)
    return [common + _log_combination(*first), common + _log_combination(*second)]


def build_B_e8_scaled(X, z):
    """Evaluate the normalized matrix :math:`B(z)` from its twelve-term form.

    Returns:
        ndarray, float: ``(M, log_scale)`` as in
        :func:`ellgarnier.garnier.build_B_scaled`.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("B(z) is not defined at z = 0.")

    f, kernel = X.f, kernel_u4(X)
    logs = np.array(
        [_e8_row(X, z, a, f.x, f.y, kernel.x, kernel.y) for a in (6, 7)]
    )

    finite = logs.real[np.isfinite(logs.real)]
    log_scale = float(finite.max()) if finite.size else 0.0
    with np.errstate(under="ignore"):
        return np.exp(logs - log_scale), log_scale


def build_B_e8(X, z):
    matrix, log_scale = build_B_e8_scaled(X, z)
    return matrix * np.exp(log_scale)


# Base points
def chi(X, z):
    """Return the point ``chi(z)`` of (P^1)^2 parametrizing the base points."""
    u0, u1, u2, u3, u4, u5, u6, u7 = X.u
    L = X.L
    f = _point(
        _lt(X.base, z / (u0 * u2), u0 / u2, z / (u1 * u3), u1 / u3),
        _lt(X.base, z / (u1 * u2), u1 / u2, z / (u0 * u3), u0 / u3),
        "chi_f",
    )
    g = _point(
        np.log(u7) + _lt(X.base, L / (z * u5 * u7), u5 / u7, z * u3 * u6 / L, u3 / u6),
        np.log(u6) + _lt(X.base, L / (z * u5 * u6), u5 / u6, z * u3 * u7 / L, u3 / u7),
        "chi_g",
    )
    return f, g


def base_points(X):
    """Return the eight base points ``P_1 .. P_8`` as ``(f, g)`` pairs."""
    u0, u1, u2, u3, u4, u5, u6, u7 = X.u
    L, eta, q = X.L, X.base.eta, X.base.q
    arguments = [
        L / (u5 * u6),
        L / (u5 * u7),
        L / (u6 * u7),
        u1 * u2,
        u0 * u2,
        u0 * u1,
        eta,
        q * L / eta,
    ]
    return [chi(X, z) for z in arguments]


def check_base_points(X, tol=constants.tolerance_base_point):
    """Raise :class:`BasePointCollision` if ``(f, g)`` is close to a base point."""
    for index, (f, g) in enumerate(base_points(X), start=1):
        distance = max(proj_distance(X.f, f), proj_distance(X.g, g))
        if distance < tol:
            raise BasePointCollision(
                f"(f, g) is within {distance:.2e} of base point P_{index}."
            )


# Normalized deformations
def _swap(u, i, j):
    u = u.copy()
    u[[i, j]] = u[[j, i]]
    return u


def _pipeline(X, operation, v=None, w=None):
    return normalize(operation(to_garnier(X, v=v, w=w)))


def bar_E34(X, method="closed", v=None, w=None):
    r"""Apply the left action :math:`u_{3,4} \to \eta/(q u_{3,4})`.

    The new kernels at ``u_3`` and ``u_4`` are
    :math:`\mathrm{adj}\,B(\eta/qu_k) \cdot \mathrm{Im}\,B(u_k)` and the new
    ``g`` follows from the new kernel at ``u_4``.

    Parameters:
        X (PainleveState): State.
        method (str): ``"closed"`` or ``"pipeline"``.
        v, w (complex): Normalization points of the pipeline path.

    Raises:
        BasePointCollision: If ``(f, g)`` lies on a base point.
    """
    _check_method(method)
    check_base_points(X)
    if method == "pipeline":
        return _pipeline(X, lambda s: apply_E(s, 3, 4), v, w)

    eta, q = X.base.eta, X.base.q
    u = X.u

    def new_kernel(k, image):
        matrix, _ = build_B_e8_scaled(X, eta / (q * u[k]))
        return ProjPoint.from_vector(adjugate(matrix) @ image.vector())

    f = new_kernel(3, X.g)
    kernel = new_kernel(4, image_u4(X))

    u_new = u.copy()
    u_new[[3, 4]] = eta / (q * u[[3, 4]])
    L = X.L * eta / (q * u[3] * u[4])

    return X.replace(u=u_new, L=L, f=f, g=g_from_kernel_u4(X.base, u_new, L, kernel))


def bar_F34(X, method="closed", v=None, w=None):
    r"""Apply the right action :math:`u_{3,4} \to \eta/u_{3,4}`.

    With :math:`A_k = \theta_p(u_k/u_3, \eta/(u_k u_3))`,
    :math:`B_k = \theta_p(u_k/u_4, \eta/(u_k u_4))`, ``(x_3 : y_3) = f`` and
    ``(x_4 : y_4)`` the kernel at ``u_4``:

    .. math::
        \tilde{x}_3 &= x_4 A_1 [y_3 (x_4 - y_4) B_0 A_2 + (y_3 - x_3) y_4 A_0 B_2] \\
        \tilde{y}_3 &= y_4 A_0 [x_3 (x_4 - y_4) B_1 A_2 + x_4 (y_3 - x_3) A_1 B_2] \\
        \tilde{x}_4 &= x_3 B_1 [y_3 (x_4 - y_4) B_0 A_2 + (y_3 - x_3) y_4 A_0 B_2] \\
        \tilde{y}_4 &= y_3 B_0 [x_3 (x_4 - y_4) B_1 A_2 + x_4 (y_3 - x_3) A_1 B_2]

    The result does not depend on the normalization point ``v``.
    """
    _check_method(method)
    check_base_points(X)
    if method == "pipeline":
        return _pipeline(X, lambda s: apply_F(s, 3, 4), v, w)

    eta = X.base.eta
    u = X.u
    x3, y3 = X.f.x, X.f.y
    kernel = kernel_u4(X)
    x4, y4 = kernel.x, kernel.y

    A = [_lt(X.base, u[k] / u[3], eta / (u[k] * u[3])) for k in range(3)]
    B = [_lt(X.base, u[k] / u[4], eta / (u[k] * u[4])) for k in range(3)]

    first = _log_combination(
        (y3 * (x4 - y4), B[0] + A[2]), ((y3 - x3) * y4, A[0] + B[2])
    )
    second = _log_combination(
        (x3 * (x4 - y4), B[1] + A[2]), (x4 * (y3 - x3), A[1] + B[2])
    )
    f = _point(_log(x4) + A[1] + first, _log(y4) + A[0] + second, "f")
    kernel = _point(_log(x3) + B[1] + first, _log(y3) + B[0] + second, "x_4")

    u_new = u.copy()
    u_new[[3, 4]] = eta / u[[3, 4]]
    L = X.L * eta / (u[3] * u[4])

    return X.replace(u=u_new, L=L, f=f, g=g_from_kernel_u4(X.base, u_new, L, kernel))


def step(X, method="closed"):
    r"""Apply the elliptic Painlevé equation :math:`\bar{T}_{3,4}`.

    :math:`\bar{T}_{3,4} = \bar{F}_{3,4} \circ \bar{E}_{3,4}` sends
    :math:`u_3, u_4 \to q u_3, q u_4`. Use :func:`lax_certificate` to certify
    a step.
    """
    return bar_F34(bar_E34(X, method), method)


def step_inverse(X, method="closed"):
    """Inverse of :func:`step`, ``bar_E34 o bar_F34``."""
    return bar_E34(bar_F34(X, method), method)


def bar_E01(X, method="closed", v=None, w=None):
    r"""Apply the right action :math:`u_{0,1} \to \eta/u_{0,1}`.

    :math:`R_r` is diagonal here and only ``f`` changes:

    .. math::
        f \to \frac{1}{f}
            \frac{\phi_1(u_2) \phi_0(u_3)}{\phi_1(u_3) \phi_0(u_2)},
        \quad \phi_a(z) = \theta_p(z/u_a, \eta/(z u_a)).
    """
    _check_method(method)
    if method == "pipeline":
        return _pipeline(X, lambda s: apply_F(s, 0, 1), v, w)

    eta = X.base.eta
    u = X.u

    def phi(a, z):
        return _lt(X.base, z / u[a], eta / (z * u[a]))

    f = _point(
        _log(X.f.y) + phi(1, u[3]) + phi(0, u[2]),
        _log(X.f.x) + phi(1, u[2]) + phi(0, u[3]),
        "f",
    )

    u_new = u.copy()
    u_new[[0, 1]] = eta / u[[0, 1]]
    return X.replace(u=u_new, L=X.L * eta / (u[0] * u[1]), f=f)


def bar_F67(X, method="closed", v=None, w=None):
    r"""Apply the left action :math:`u_{6,7} \to \eta/(q u_{6,7})`.

    Only ``g`` changes:

    .. math::
        g \to \frac{1}{g}
            \frac{\psi_7(u_3) \psi_6(u_5)}{\psi_6(u_3) \psi_7(u_5)},
        \quad \psi_a(z) = \theta_p(z/u_a, \eta/(q z u_a)).
    """
    _check_method(method)
    if method == "pipeline":
        return _pipeline(X, lambda s: apply_E(s, 6, 7), v, w)

    eta, q = X.base.eta, X.base.q
    u = X.u

    def psi(a, z):
        return _lt(X.base, z / u[a], eta / (q * z * u[a]))

    g = _point(
        _log(X.g.y) + psi(6, u[3]) + psi(7, u[5]),
        _log(X.g.x) + psi(7, u[3]) + psi(6, u[5]),
        "g",
    )

    u_new = u.copy()
    u_new[[6, 7]] = eta / (q * u[[6, 7]])
    return X.replace(u=u_new, L=X.L * eta / (q * u[6] * u[7]), g=g)


def _vector_point(x, y, what):
    if x == 0 and y == 0:
        raise PoleInFormula(f"Both coordinates of {what} vanish.")
    return ProjPoint(x, y)


def gen(X, i, method="closed", v=None, w=None):
    """Apply the generator ``s_i`` (transposition of ``u_i`` and ``u_{i+1}``).

    ===  ============================================================
    s_0  ``f -> 1/f``
    s_1  ``f -> f/(f - 1)``
    s_2  ``f -> 1/f``, ``g`` through the kernel at ``u_4``
    s_3  ``f -> y_4/x_4``, ``g -> B_21(u_4)/B_11(u_4)``
    s_4  ``g -> g B_11(u_4)/B_21(u_4)``
    s_5  ``g -> g/(g - 1)``
    s_6  ``g -> 1/g``
    ===  ============================================================

    ``v`` and ``w`` are the normalization points of the pipeline path.

    Raises:
        IndexOutOfRange: Unless ``0 <= i <= 6``.
        PoleInFormula: On the polar locus of a formula.
    """
    _check_method(method)
    if not 0 <= i <= 6:
        raise IndexOutOfRange(f"Generator index {i} outside 0..6.")
    if method == "pipeline":
        return _pipeline(X, lambda s: sym_action(s, i), v, w)

    u = _swap(X.u, i, i + 1)
    f, g = X.f, X.g

    if i == 0:
        return X.replace(u=u, f=ProjPoint(f.y, f.x))
    if i == 1:
        return X.replace(u=u, f=ProjPoint(f.y - f.x, f.y))
    if i == 2:
        kernel = kernel_u4(X)
        kernel = _vector_point(kernel.x * f.y, kernel.y * f.x, "the kernel at u_4")
        g = g_from_kernel_u4(X.base, u, X.L, kernel)
        return X.replace(u=u, f=ProjPoint(f.y, f.x), g=g)
    if i == 3:
        return X.replace(u=u, f=kernel_u4(X), g=image_u4(X))
    if i == 4:
        h = image_u4(X)
        return X.replace(u=u, g=_vector_point(h.y * g.x, h.x * g.y, "g"))
    if i == 5:
        return X.replace(u=u, g=ProjPoint(g.y - g.x, g.y))
    return X.replace(u=u, g=ProjPoint(g.y, g.x))


def iota_X(X):
    """Apply the reflection: ``u_i -> eta/u_{7-i}`` (with ``u_3``, ``u_4`` kept
    in place), ``eta -> q eta`` and ``f <-> g``."""
    eta, q = X.base.eta, X.base.q
    u0, u1, u2, u3, u4, u5, u6, u7 = X.u
    u = eta / np.array([u7, u6, u5, u3, u4, u2, u1, u0])

    return PainleveState(
        X.base.replace(eta=q * eta),
        u,
        X.g,
        X.f,
        L=eta**4 / X.L,
        v=X.w,
        w=q * X.v,
        seed=X.seed,
    )


def fourier_laplace(X):
    """Replace ``eta`` by ``q L / eta``; ``B(z)`` is unchanged."""
    return X.replace(base=X.base.replace(eta=X.base.q * X.L / X.base.eta))


# Certificates
def sample_points(X, n=5, seed=0):
    """Draw generic evaluation points for a normalized state."""
    rng = np.random.default_rng(seed)
    return utils.sample_generic(rng, n, forbidden_points(X.u, X.base), X.base.p)


def _unit(matrix):
    return matrix / np.linalg.norm(matrix)


def _chain(*factors):
    """Product of unit-normalized factors and its entrywise bound.

    The bound is the product of the entrywise absolute values of the factors,
    the scale at which rounding in any factor enters the product.
    """
    product = np.eye(2, dtype=complex)
    bound = np.eye(2)
    for factor in factors:
        factor = _unit(factor)
        product = product @ factor
        bound = bound @ np.abs(factor)
    return product, bound


def lax_certificate(X, samples=None, seed=0, n=5, method="closed", image=None):
    r"""Return the compatibility residual of one step of the Lax pair.

    With :math:`A_0, A_1` the linear systems before and after :func:`step`
    and :math:`M(z) = R_r(z) N_{012}` the right factor of the step,

    .. math::
        P(z) = A_0(z) M(z), \quad Q(z) = M(\eta/qz) A_1(z)

    have to agree up to a scalar. Both sides are formed from unit-normalized
    factors, with :math:`A(z) \propto \operatorname{adj} B(\eta/qz) B(z)`.
    For the least-squares scalar :math:`c` the residual at ``z`` is
    :math:`\|P - cQ\| / \||P| + |c||Q|\|`, where :math:`|P|` and
    :math:`|Q|` are the entrywise bounds of the two products. The largest
    residual over the samples is returned.

    Parameters:
        X (PainleveState): State before the step.
        samples (array-like): Evaluation points. By default ``n`` points
            drawn with ``seed`` away from the singular points of all
            intermediate states and their reflections.
        method (str): Method of :func:`step`.
        image (PainleveState): State to certify as the image of ``X``.
            Defaults to ``step(X, method)``.
    """
    G0 = to_garnier(X)
    middle = apply_E(G0, 3, 4)
    right_state = apply_F(middle, 3, 4)
    frame = n_ijk(*right_state.kernels[:3])
    G1 = to_garnier(step(X, method) if image is None else image)

    if samples is None:
        samples = certificate_samples(
            G0,
            G1,
            n=n,
            seed=seed,
            others=(middle, right_state),
            distance=constants.certificate_distance,
        )

    eta_q = X.base.eta / X.base.q

    def right(z):
        return r_right_scaled(middle, 3, 4, z)[0] @ frame

    def matrix(state, z):
        return build_B_scaled(state, z)[0]

    residuals = []
    for z in samples:
        z = complex(z)
        reflected = eta_q / z
        P, bound_P = _chain(adjugate(matrix(G0, reflected)), matrix(G0, z), right(z))
        Q, bound_Q = _chain(
            right(reflected), adjugate(matrix(G1, reflected)), matrix(G1, z)
        )

        scalar = np.vdot(Q, P) / np.vdot(Q, Q)
        residuals.append(
            np.linalg.norm(P - scalar * Q)
            / np.linalg.norm(bound_P + abs(scalar) * bound_Q)
        )

    residual = float(max(residuals))
    logger.debug(f"Lax certificate residual {residual:.3e}.")
    return residual


def verify_painleve(X, tol=constants.tolerance_state, samples=None, seed=0, n=5):
    """Check the normalized conditions of a state.

    Determinant zeros at all eight points, the frame kernels at
    ``u_0, u_1, u_2``, the kernel ``f`` and the image ``g`` at ``u_3``, the
    frame images at ``u_7, u_6, u_5``, the closed forms at ``u_4`` and the
    agreement of the twelve-term matrix with the general construction.

    Returns:
        :class:`ellgarnier.report.Report`
    """
    report = Report("PainleveState", tolerance=tol)
    matrices = [build_B_e8_scaled(X, uk)[0] for uk in X.u]

    for k, matrix in enumerate(matrices):
        det = matrix[0, 0] * matrix[1, 1] - matrix[0, 1] * matrix[1, 0]
        report.add(f"det_u{k}", abs(det) / np.linalg.norm(matrix) ** 2)

    kernels = {
        0: ProjPoint(1, 0),
        1: ProjPoint(0, 1),
        2: ProjPoint(1, 1),
        3: X.f,
        4: kernel_u4(X),
    }
    for k, kernel in kernels.items():
        vector = kernel.vector()
        residual = np.linalg.norm(matrices[k] @ vector) / (
            np.linalg.norm(matrices[k]) * np.linalg.norm(vector)
        )
        report.add(f"kernel_u{k}", residual)

    images = {
        3: X.g,
        4: image_u4(X),
        5: ProjPoint(1, 1),
        6: ProjPoint(0, 1),
        7: ProjPoint(1, 0),
    }
    for k, image in images.items():
        report.add(f"image_u{k}", image_residual(matrices[k], image))

    if samples is None:
        samples = sample_points(X, n=n, seed=seed)
    general = to_garnier(X)
    gauge = [
        _unit(build_B_e8_scaled(X, z)[0])
        @ adjugate(_unit(build_B_scaled(general, z)[0]))
        for z in samples
    ]
    report.add("general_gauge", gauge_residual(gauge))

    return report


def painleve_distance(X, Y):
    """Largest relative difference of two normalized states."""
    distances = [
        np.max(np.abs(X.u - Y.u) / np.abs(X.u)),
        abs(X.L - Y.L) / abs(X.L),
        abs(X.base.eta - Y.base.eta) / abs(X.base.eta),
        proj_distance(X.f, Y.f),
        proj_distance(X.g, Y.g),
    ]
    return float(max(distances))
