r"""The elliptic Garnier linear system.

A :class:`GarnierState` holds the singular points :math:`u_0, \ldots,
u_{2m+5}`, the kernels :math:`(x_k : y_k)` of :math:`B(u_k)` for
:math:`k \leq 2m+2` and the constant :math:`L` with :math:`L^2 = \prod u_j`.
From these data :func:`build_B` evaluates the unique (up to scalar) matrix of
theta functions with

    * :math:`\det B(u_k) = 0` for all singular points,
    * kernels :math:`(x_k : y_k)` at :math:`u_0, \ldots, u_{2m+2}`,
    * images :math:`(1:1), (0:1), (1:0)` at :math:`u_{2m+3}, u_{2m+4},
      u_{2m+5}`,

and the symmetric linear system :math:`A(z) = B(\eta/qz)^{-1} B(z)`.

Entries are sums over subsets of the kernel indices. All summands are
evaluated as logarithms, so states far out on a deformation orbit (where
single theta values overflow) stay representable through
:func:`build_B_scaled`.

**Example**

>>> from ellgarnier import garnier
>>> state = garnier.fixture()
>>> garnier.verify_state(state).passed
True
"""
import functools
import itertools
import logging

import numpy as np
import scipy.linalg
from scipy.special import comb

from ellgarnier import constants, utils
from ellgarnier.component import Component
from ellgarnier.errors import CollidingParameters, IndexOutOfRange, SingularAtPoint
from ellgarnier.projective import ProjPoint, cross, kernel_of, proj_distance
from ellgarnier.report import Report
from ellgarnier.theta import EllipticBase, lattice_distance, log_sum, log_theta


__all__ = [
    "GarnierState",
    "check_distinct",
    "forbidden_points",
    "normalization_points",
    "subset_masks",
    "build_B_scaled",
    "build_B",
    "build_A",
    "symmetry_residual",
    "det_profile",
    "verify_state",
    "sym_action",
    "sample_points",
    "image_residual",
    "state_distance",
    "fixture",
    "random_state",
]

logger = logging.getLogger(__name__)


def check_distinct(u, p):
    """Raise :class:`CollidingParameters` if two points agree modulo p^Z."""
    for i, j in itertools.combinations(range(len(u)), 2):
        if lattice_distance(u[i] / u[j], p) < constants.distinct_tolerance:
            raise CollidingParameters(
                f"Singular points u_{i}={u[i]} and u_{j}={u[j]} coincide modulo p^Z."
            )


def forbidden_points(u, base):
    """Points a normalization or sample point has to avoid modulo p^Z."""
    u = np.asarray(u, dtype=complex)
    return np.concatenate([u, base.eta / u, base.eta / (base.q * u)])


def normalization_points(u, base, seed, v=None, w=None):
    """Return admissible normalization points ``(v, w)``.

    Given points are kept unless they collide with a forbidden point; missing
    or colliding points are replaced by unit-circle samples drawn with
    ``seed``.
    """
    forbidden = forbidden_points(u, base)
    rng = np.random.default_rng(seed)
    candidates = [utils.sample_unit_circle(rng, forbidden, base.p) for _ in "vw"]

    points = []
    for name, given, candidate in zip("vw", (v, w), candidates):
        if given is not None and utils.is_away_from(complex(given), forbidden, base.p):
            points.append(complex(given))
            continue

        if given is not None:
            logger.warning(
                f"Normalization point {name}={complex(given):.6f} collides "
                f"with a singular point; resampled {name}={candidate:.6f}."
            )
        points.append(candidate)

    return tuple(points)


class GarnierState(Component):
    """Parameter state of the linear system for general ``m``.

    The state behaves as immutable: every operation returns a new instance,
    use :meth:`replace` to change fields.
    """

    def __init__(self, base, m, u, kernels, L=None, v=None, w=None, seed=0):
        """
        Parameters:
            base (:class:`ellgarnier.theta.EllipticBase`): Nomes and symmetry
                parameter.
            m (int): Order of the system, ``m >= 1``.
            u (array-like): ``2m + 6`` nonzero singular points.
            kernels (list): ``2m + 3`` kernels, given as
                :class:`ellgarnier.projective.ProjPoint` or pairs.
            L (complex): Square root of ``prod(u)``. Defaults to the principal
                square root.
            v, w (complex): Normalization points of the right and left
                deformation matrices. Sampled on the unit circle (seeded by
                ``seed``) if missing or not admissible.
            seed (int): Seed of the normalization point sampling.
        """
        if not isinstance(base, EllipticBase):
            raise TypeError("Argument `base` has to be of type `EllipticBase`.")

        if int(m) != m or m < 1:
            raise ValueError(f"The order `m` has to be a positive integer, got {m}.")
        m = int(m)

        u = np.array(u, dtype=complex)
        if u.shape != (2 * m + 6,):
            raise ValueError(f"Expected {2 * m + 6} singular points, got {u.size}.")
        if np.any(u == 0):
            raise ValueError("Singular points have to be nonzero.")
        check_distinct(u, base.p)

        kernels = [k if isinstance(k, ProjPoint) else ProjPoint(*k) for k in kernels]
        if len(kernels) != 2 * m + 3:
            raise ValueError(f"Expected {2 * m + 3} kernels, got {len(kernels)}.")

        product = np.prod(u)
        if L is None:
            L = np.sqrt(product)
        L = complex(L)
        if abs(L**2 - product) > constants.tolerance_identity * abs(product):
            raise ValueError(f"L={L} does not satisfy L^2 = prod(u) = {product}.")

        self.base = base
        self.m = m
        self.L = L
        self.seed = int(seed)
        self.v, self.w = normalization_points(u, base, self.seed, v, w)

        self.create_variable("u", u)
        self.create_variable(
            "kernel_coordinates", np.array([[k.x, k.y] for k in kernels])
        )
        self._cache = {}

    @property
    def u(self):
        return self["u"]

    @property
    def kernels(self):
        return [ProjPoint(x, y) for x, y in self["kernel_coordinates"]]

    @property
    def n_kernels(self):
        """Number of kernel positions, ``2m + 3``."""
        return 2 * self.m + 3

    def replace(self, **changes):
        """Return a new state with some fields replaced."""
        fields = dict(
            base=self.base,
            m=self.m,
            u=self.u,
            kernels=self.kernels,
            L=self.L,
            v=self.v,
            w=self.w,
            seed=self.seed,
        )
        fields.update(changes)
        return GarnierState(**fields)

    def log_grid(self):
        r"""Return :math:`\log u_j + \log\theta_p(u_i/u_j)` for kernel indices.

        The diagonal is set to zero. The grid is cached on the instance.
        """
        if "grid" not in self._cache:
            n = self.n_kernels
            u = self.u[:n]
            ratios = u[:, np.newaxis] / u[np.newaxis, :]
            np.fill_diagonal(ratios, 0.5)
            grid = np.log(u)[np.newaxis, :] + log_theta(
                ratios, self.base.p, self.base.eps
            )
            np.fill_diagonal(grid, 0)
            self._cache["grid"] = grid

        return self._cache["grid"]

    def to_dict(self):
        """Return a JSON-ready dictionary (complex numbers as ``[re, im]``)."""
        return {
            "kind": "garnier",
            "m": self.m,
            **self.base.to_dict(),
            "u": utils.complex_array_to_pairs(self.u),
            "kernels": [k.to_list() for k in self.kernels],
            "L": utils.complex_to_pair(self.L),
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
            data["m"],
            utils.pairs_to_complex_array(data["u"]),
            [ProjPoint.from_list(k) for k in data["kernels"]],
            L=utils.pair_to_complex(data["L"]),
            v=utils.pair_to_complex(data["v"]) if "v" in data else None,
            w=utils.pair_to_complex(data["w"]) if "w" in data else None,
            seed=data.get("seed", 0),
        )


@functools.lru_cache(maxsize=None)
def subset_masks(n, k):
    """Boolean masks of all ``k``-subsets of ``range(n)`` in lexicographic order."""
    count = comb(n, k, exact=True)
    logger.debug(f"Enumerate {count} subsets of size {k} out of {n}.")

    masks = np.zeros((count, n), dtype=bool)
    for row, subset in enumerate(itertools.combinations(range(n), k)):
        masks[row, list(subset)] = True
    masks.flags.writeable = False

    return masks


def _entry_logs(state, z, a, column):
    """Logarithms of all summands of one entry of B(z).

    ``a`` is the index of the row point (``2m + 4`` or ``2m + 5``) and
    ``column`` selects the subset size ``m + 1`` (0) or ``m + 2`` (1).
    """
    m, n = state.m, state.n_kernels
    p, eps = state.base.p, state.base.eps
    u, L = state.u, state.L
    ua = u[a]

    inside = subset_masks(n, m + 1 + column)
    outside = ~inside

    coordinates = state["kernel_coordinates"]
    with np.errstate(divide="ignore"):
        log_x = np.log(coordinates[:, 0])
        log_y = np.log(coordinates[:, 1])

    u_in = np.prod(np.where(inside, u[:n], 1), axis=1)
    u_out = np.prod(np.where(outside, u[:n], 1), axis=1)
    cross_terms = np.einsum(
        "si,ij,sj->s", inside.astype(float), state.log_grid(), outside.astype(float)
    )
    log_z = log_theta(z / u[:n], p, eps)

    logs = (
        np.where(inside, log_x, 0).sum(axis=1)
        + np.where(outside, log_y, 0).sum(axis=1)
        - np.log(ua)
        - cross_terms
    )
    if column == 0:
        logs += (
            -np.log(u_out)
            + log_theta(u_in * ua * z / L, p, eps)
            + log_theta(u_out * ua / L, p, eps)
            + np.where(inside, log_z, 0).sum(axis=1)
        )
    else:
        logs += (
            1j * np.pi * m
            - np.log(u_in)
            + log_theta(ua * u_in / L, p, eps)
            + log_theta(ua * z * u_out / L, p, eps)
            + np.where(outside, log_z, 0).sum(axis=1)
        )

    return logs + log_theta(z / ua, p, eps) - log_theta(u[n] / ua, p, eps)


def build_B_scaled(state, z):
    r"""Evaluate :math:`B(z)` as a scaled matrix.

    Parameters:
        state (GarnierState): Parameter state.
        z (complex): Evaluation point, nonzero.

    Returns:
        ndarray, float: ``(M, log_scale)`` with
        :math:`B(z) = M \exp(\mathrm{log\_scale})` and ``max |M_ij|`` of
        order one.
    """
    z = complex(z)
    if z == 0:
        raise ValueError("B(z) is not defined at z = 0.")

    n = state.n_kernels
    sums = [
        log_sum(_entry_logs(state, z, a, column))
        for a in (n + 1, n + 2)
        for column in (0, 1)
    ]

    log_scale = max((shift for s, shift in sums if s != 0), default=0.0)
    with np.errstate(under="ignore"):
        matrix = np.array([s * np.exp(shift - log_scale) for s, shift in sums])

    return matrix.reshape(2, 2), log_scale


def build_B(state, z):
    """Evaluate :math:`B(z)`; see :func:`build_B_scaled` for long orbits."""
    matrix, log_scale = build_B_scaled(state, z)
    return matrix * np.exp(log_scale)


def build_A(state, z):
    r"""Evaluate :math:`A(z) = B(\eta/qz)^{-1} B(z)`.

    Raises:
        SingularAtPoint: If :math:`B(\eta/qz)` is singular.
    """
    z = complex(z)
    matrix, log_scale = build_B_scaled(state, z)
    reflected, log_reflected = build_B_scaled(
        state, state.base.eta / (state.base.q * z)
    )

    norm = np.linalg.norm(reflected)
    if abs(scipy.linalg.det(reflected)) <= constants.rank_tolerance * norm**2:
        raise SingularAtPoint(f"B(eta/(qz)) is singular at z={z}.")

    return scipy.linalg.solve(reflected, matrix) * np.exp(log_scale - log_reflected)


def symmetry_residual(state, z):
    r"""Relative residual of :math:`A(z) A(\eta/qz) = I`.

    The defect is divided by :math:`\|A(z)\| \|A(\eta/qz)\|`, the scale at
    which rounding in either factor enters the product.

    Raises:
        SingularAtPoint: If either factor is not defined at ``z``.
    """
    first = build_A(state, z)
    second = build_A(state, state.base.eta / (state.base.q * complex(z)))
    return _relative_norm(first @ second - np.eye(2), first, second)


def det_profile(state, samples):
    r"""Estimate the constant of :math:`\det B(z) = C \prod_k \theta_p(z/u_k)`.

    Parameters:
        state (GarnierState): Parameter state.
        samples (array-like): Evaluation points away from the ``u_k``.

    Returns:
        complex, float: The constant ``C`` (from the first sample) and the
        largest relative deviation of the ratio over all samples.
    """
    p, eps = state.base.p, state.base.eps
    log_ratios = []
    for z in samples:
        matrix, log_scale = build_B_scaled(state, z)
        log_ratios.append(
            np.log(scipy.linalg.det(matrix))
            + 2 * log_scale
            - np.sum(log_theta(z / state.u, p, eps))
        )
    log_ratios = np.array(log_ratios)

    with np.errstate(over="ignore"):
        constant = np.exp(log_ratios[0])
    residual = np.max(np.abs(np.exp(log_ratios - log_ratios[0]) - 1))

    return complex(constant), float(residual)


def sample_points(state, n=5, seed=0):
    """Draw generic evaluation points for the given state."""
    rng = np.random.default_rng(seed)
    forbidden = forbidden_points(state.u, state.base)
    return utils.sample_generic(rng, n, forbidden, state.base.p)


def _relative_norm(numerator, *denominators):
    denominator = np.prod([np.linalg.norm(d) for d in denominators])
    if denominator == 0:
        return np.nan
    return np.linalg.norm(numerator) / denominator


def image_residual(matrix, point):
    """Largest normalized cross product of the columns of ``matrix`` with ``point``."""
    norm = np.linalg.norm(matrix)
    if norm == 0:
        return np.nan
    return max(abs(cross(column, point)) for column in matrix.T) / (
        norm * np.linalg.norm(point.vector())
    )


def verify_state(state, tol=constants.tolerance_state, samples=None, seed=0):
    """Check the defining conditions of a state.

    The report holds determinant zeros at all singular points, the kernels at
    ``u_0 .. u_{2m+2}``, the frame images at ``u_{2m+3} .. u_{2m+5}``, the
    multiplier law, the symmetry :math:`A(z) A(\\eta/qz) = I` and the
    constancy of :math:`\\det B(z) / \\prod_k \\theta_p(z/u_k)`.

    Mathematical failures are reported, never raised.

    Parameters:
        state (GarnierState): State to verify.
        tol (float): Tolerance of all checks.
        samples (array-like): Evaluation points of the functional checks.
            Defaults to five points from :func:`sample_points`.
        seed (int): Seed of the default samples.

    Returns:
        :class:`ellgarnier.report.Report`
    """
    m, n = state.m, state.n_kernels
    report = Report(f"GarnierState(m={m})", tolerance=tol)
    if samples is None:
        samples = sample_points(state, seed=seed)

    matrices = [build_B_scaled(state, uk)[0] for uk in state.u]
    for k, matrix in enumerate(matrices):
        det = scipy.linalg.det(matrix)
        report.add(f"det_u{k}", _relative_norm(det, matrix, matrix))

    for k, kernel in enumerate(state.kernels):
        vector = kernel.vector()
        report.add(
            f"kernel_u{k}", _relative_norm(matrices[k] @ vector, matrices[k], vector)
        )

    frame = (ProjPoint(1, 1), ProjPoint(0, 1), ProjPoint(1, 0))
    for offset, point in enumerate(frame):
        report.add(f"image_u{n + offset}", image_residual(matrices[n + offset], point))

    p, L = state.base.p, state.L
    for i, z in enumerate(samples):
        matrix, log_scale = build_B_scaled(state, z)
        shifted, log_shifted = build_B_scaled(state, p * z)
        log_factor = 1j * np.pi * (m + 1) + np.log(L) - (m + 3) * np.log(z)
        expected = matrix * np.exp(log_scale + log_factor - log_shifted)
        report.add(f"multiplier_{i}", _relative_norm(shifted - expected, shifted))

        try:
            report.add(f"symmetry_{i}", symmetry_residual(state, z))
        except SingularAtPoint:
            report.add(f"symmetry_{i}", np.nan)

    _, residual = det_profile(state, samples)
    report.add("det_constancy", residual)

    return report


def sym_action(state, i):
    """Apply the transposition ``s_i`` of ``u_i`` and ``u_{i+1}``.

    Kernels are swapped along with the points for ``i <= 2m+1``. For
    ``i = 2m+2`` the new kernel at position ``2m+2`` is the kernel of
    :math:`B(u_{2m+3})`, and for ``i = 2m+3, 2m+4`` only the points move.
    The matrix :math:`A(z)` is invariant under all of them.

    Raises:
        IndexOutOfRange: Unless ``0 <= i <= 2m+4``.
    """
    n = state.n_kernels
    if not 0 <= i <= n + 1:
        raise IndexOutOfRange(f"Generator index {i} outside 0..{n + 1}.")

    u = state.u.copy()
    u[[i, i + 1]] = u[[i + 1, i]]

    kernels = state.kernels
    if i <= n - 2:
        kernels[i], kernels[i + 1] = kernels[i + 1], kernels[i]
    elif i == n - 1:
        kernels[i] = kernel_of(build_B_scaled(state, state.u[n])[0])

    return state.replace(u=u, kernels=kernels)


def state_distance(first, second):
    """Largest relative difference of two states (points, L and kernels)."""
    if first.m != second.m:
        return np.inf

    distances = [
        np.max(np.abs(first.u - second.u) / np.abs(first.u)),
        abs(first.L - second.L) / abs(first.L),
        abs(first.base.eta - second.base.eta) / abs(first.base.eta),
    ]
    distances.extend(
        proj_distance(a, b) for a, b in zip(first.kernels, second.kernels)
    )
    return float(max(distances))


def fixture(seed=0):
    """Return the reference state of order ``m = 1`` (source ``fixture-1``)."""
    base = EllipticBase(
        p=constants.fixture_p, q=constants.fixture_q, eta=constants.fixture_eta
    )
    return GarnierState(
        base,
        constants.fixture_m,
        constants.fixture_u,
        constants.fixture_kernels,
        seed=seed,
    )


def random_state(
    m, seed=0, p=constants.fixture_p, q=constants.fixture_q, eta=constants.fixture_eta
):
    """Return a generic state of order ``m``.

    The singular points lie on the annulus ``1.05 <= |u| <= 1.35`` with
    arguments jittered around the ``2m+6``-th roots of unity; kernels are
    ``(1 : c)`` with complex normal ``c``.
    """
    rng = np.random.default_rng(seed)
    n = 2 * m + 6

    jitter = rng.uniform(-1, 1, n)
    radius = rng.uniform(1.05, 1.35, n)
    u = radius * np.exp(2j * np.pi * (np.arange(n) + 0.3 * jitter) / n)

    c = 0.5 * (rng.normal(size=n - 3) + 1j * rng.normal(size=n - 3))
    kernels = [ProjPoint(1, ck) for ck in c]

    return GarnierState(EllipticBase(p=p, q=q, eta=eta), m, u, kernels, seed=seed)
