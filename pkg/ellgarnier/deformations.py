r"""Discrete isomonodromic deformations of the Garnier system.

Right-type deformations :math:`F_{i,j}` multiply :math:`B(z)` from the right
by a matrix :math:`R_r(z)` with :math:`R_r(z) = R_r(\eta/z)` and send
:math:`u_i, u_j \to \eta/u_i, \eta/u_j`. Left-type deformations
:math:`E_{i,j}` multiply from the left by :math:`R_l(z) = R_l(\eta/qz)` and
send :math:`u_i, u_j \to \eta/(qu_i), \eta/(qu_j)`. Both are involutions and
:math:`T_{i,j} = F_{i,j} \circ E_{i,j}` translates :math:`u_i, u_j` by
:math:`q`. The reflection :math:`\iota` trades :math:`B(z)` for
:math:`B(\eta/z)`.

Every step can be certified: the claimed constant gauge between the old and
the new matrix is evaluated at sample points and compared.

**Example**

>>> from ellgarnier import garnier, deformations
>>> state = garnier.fixture()
>>> steps = deformations.run_program(state, "E(3,4) F(3,4)")
>>> [step.kind for step in steps]
['E', 'F']
"""
import logging
import re
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ellgarnier import constants, utils
from ellgarnier.errors import (
    BothColumnsVanish,
    DegenerateImages,
    IndexOutOfRange,
    ProportionalKernels,
    ZeroMatrix,
)
from ellgarnier.garnier import (
    GarnierState,
    build_B_scaled,
    forbidden_points,
    sym_action,
    verify_state,
)
from ellgarnier.projective import (
    ProjPoint,
    adjugate,
    cross,
    image_of,
    kernel_of,
    proj_eq,
)
from ellgarnier.theta import log_theta


__all__ = [
    "r_right_scaled",
    "r_right",
    "r_left_scaled",
    "r_left",
    "apply_F",
    "apply_E",
    "apply_T",
    "translation",
    "apply_iota",
    "gauge_residual",
    "certificate_samples",
    "sym_certificate",
    "e_certificate",
    "f_certificate",
    "iota_certificate",
    "DeformationStep",
    "parse_program",
    "run_program",
]

logger = logging.getLogger(__name__)


def _check_pair(state, i, j):
    last = len(state.u) - 1
    for index in (i, j):
        if not 0 <= index <= last:
            raise IndexOutOfRange(f"Point index {index} outside 0..{last}.")
    if i == j:
        raise ValueError(f"Deformations need two different points, got i=j={i}.")


def _kernel_at(state, k):
    """Kernel of B(u_k); stored for kernel positions, computed otherwise."""
    if k < state.n_kernels:
        return state.kernels[k]
    return kernel_of(build_B_scaled(state, state.u[k])[0])


def _image_at(state, k):
    try:
        return image_of(build_B_scaled(state, state.u[k])[0])
    except ZeroMatrix:
        raise BothColumnsVanish(f"Both columns of B(u_{k}) vanish.")


def _log_factor(state, a, z, point, shift):
    """Log of theta(z/u_a) theta(eta/(shift z u_a)), normalized at ``point``."""
    p, eps, eta = state.base.p, state.base.eps, state.base.eta
    ua = state.u[a]
    args = np.array([z / ua, eta / (shift * z * ua)])
    norm = np.array([point / ua, eta / (shift * point * ua)])
    return np.sum(log_theta(args, p, eps)) - np.sum(log_theta(norm, p, eps))


def _exp_pair(log_a, log_b):
    """Exponentiate two logarithms relative to their common maximum."""
    finite = [v.real for v in (log_a, log_b) if np.isfinite(v.real)]
    shift = max(finite, default=0.0)
    with np.errstate(under="ignore"):
        return np.exp(log_a - shift), np.exp(log_b - shift), shift


def _frame_matrix(first, second, phi_first, phi_second, error):
    """Return ``P diag(phi_first, phi_second) P^-1`` for ``P = [first second]``."""
    x1, y1 = first.x, first.y
    x2, y2 = second.x, second.y
    det = x1 * y2 - x2 * y1
    if proj_eq(first, second, constants.tolerance_frame):
        raise error(f"Points {first} and {second} are proportional.")

    return (
        np.array(
            [
                [
                    x1 * y2 * phi_first - x2 * y1 * phi_second,
                    x1 * x2 * (phi_second - phi_first),
                ],
                [
                    y1 * y2 * (phi_first - phi_second),
                    x1 * y2 * phi_second - x2 * y1 * phi_first,
                ],
            ]
        )
        / det
    )


def r_right_scaled(state, i, j, z):
    r"""Evaluate the right deformation matrix :math:`R_r(z)` as scaled matrix.

    With kernels :math:`k_i, k_j` of :math:`B(u_i), B(u_j)` and

    .. math::
        \phi_a(z) = \frac{\theta_p(z/u_a, \eta/(z u_a))}
                         {\theta_p(v/u_a, \eta/(v u_a))}

    the matrix is :math:`R_r = P \, \mathrm{diag}(\phi_j, \phi_i) P^{-1}`
    with :math:`P = (k_i \; k_j)`. It has image :math:`k_i` at :math:`u_i`,
    image :math:`k_j` at :math:`u_j`, equals the identity at ``v`` and is
    invariant under :math:`z \to \eta/z`.

    Returns:
        ndarray, float: ``(R, log_scale)``.

    Raises:
        ProportionalKernels: If the kernels at ``u_i`` and ``u_j`` agree.
    """
    _check_pair(state, i, j)
    z = complex(z)
    phi_i, phi_j, shift = _exp_pair(
        _log_factor(state, i, z, state.v, 1), _log_factor(state, j, z, state.v, 1)
    )
    matrix = _frame_matrix(
        _kernel_at(state, i), _kernel_at(state, j), phi_j, phi_i, ProportionalKernels
    )
    return matrix, shift


def r_right(state, i, j, z):
    """Evaluate :math:`R_r(z)`; see :func:`r_right_scaled`."""
    matrix, log_scale = r_right_scaled(state, i, j, z)
    return matrix * np.exp(log_scale)


def r_left_scaled(state, i, j, z):
    r"""Evaluate the left deformation matrix :math:`R_l(z)` as scaled matrix.

    With images :math:`c_i, c_j` of :math:`B(u_i), B(u_j)` and

    .. math::
        \psi_a(z) = \frac{\theta_p(z/u_a, \eta/(q z u_a))}
                         {\theta_p(w/u_a, \eta/(q w u_a))}

    the matrix is :math:`R_l = Q \, \mathrm{diag}(\psi_i, \psi_j) Q^{-1}`
    with :math:`Q = (c_i \; c_j)`. Its kernel at :math:`u_i` is
    :math:`c_i`, it equals the identity at ``w`` and
    :math:`\det R_l = \psi_i \psi_j`.

    Raises:
        DegenerateImages: If the images at ``u_i`` and ``u_j`` agree.
    """
    _check_pair(state, i, j)
    z = complex(z)
    q = state.base.q
    psi_i, psi_j, shift = _exp_pair(
        _log_factor(state, i, z, state.w, q), _log_factor(state, j, z, state.w, q)
    )
    matrix = _frame_matrix(
        _image_at(state, i), _image_at(state, j), psi_i, psi_j, DegenerateImages
    )
    return matrix, shift


def r_left(state, i, j, z):
    """Evaluate :math:`R_l(z)`; see :func:`r_left_scaled`."""
    matrix, log_scale = r_left_scaled(state, i, j, z)
    return matrix * np.exp(log_scale)


def apply_F(state, i, j, oracle=False):
    r"""Apply the right-type involution :math:`F_{i,j}`.

    The points move as :math:`u_{i,j} \to \eta/u_{i,j}` and :math:`L \to
    L \eta/(u_i u_j)`. The kernels at ``i`` and ``j`` are swapped; every
    other kernel :math:`k` becomes :math:`R_r(u_k)^{-1} k`, in closed form

    .. math::
        \phi_i(u_k) [k, k_j] \, k_i + \phi_j(u_k) [k_i, k] \, k_j

    with :math:`[a, b] = a_x b_y - a_y b_x`.

    Parameters:
        state (GarnierState): State to deform.
        i, j (int): Point indices.
        oracle (bool): Solve :math:`R_r(u_k) \tilde{k} = k` numerically
            instead of using the closed form.

    Returns:
        GarnierState
    """
    _check_pair(state, i, j)
    n = state.n_kernels
    first, second = _kernel_at(state, i), _kernel_at(state, j)
    if proj_eq(first, second, constants.tolerance_frame):
        raise ProportionalKernels(f"Kernels at u_{i} and u_{j} are proportional.")

    kernels = state.kernels
    updated = list(kernels)
    for k in range(n):
        if k in (i, j):
            continue

        if oracle:
            matrix, _ = r_right_scaled(state, i, j, state.u[k])
            vector = scipy.linalg.solve(matrix, kernels[k].vector())
        else:
            phi_i, phi_j, _ = _exp_pair(
                _log_factor(state, i, state.u[k], state.v, 1),
                _log_factor(state, j, state.u[k], state.v, 1),
            )
            vector = (
                phi_i * cross(kernels[k], second) * first.vector()
                + phi_j * cross(first, kernels[k]) * second.vector()
            )
        updated[k] = ProjPoint.from_vector(vector)

    if i < n:
        updated[i] = second
    if j < n:
        updated[j] = first

    eta = state.base.eta
    u = state.u.copy()
    u[[i, j]] = eta / u[[i, j]]
    L = state.L * eta / (state.u[i] * state.u[j])

    return state.replace(u=u, kernels=updated, L=L)


def apply_E(state, i, j, oracle=False):
    r"""Apply the left-type involution :math:`E_{i,j}`.

    The points move as :math:`u_{i,j} \to \eta/(q u_{i,j})` and :math:`L \to
    L \eta/(q u_i u_j)`. Kernels at other positions are unchanged, the new
    kernel at a kernel position :math:`i` is

    .. math::
        \mathrm{adj}\, B(\eta/(q u_i)) \cdot \mathrm{Im}\, B(u_i).

    Parameters:
        oracle (bool): Solve :math:`B(\eta/(qu_i)) \tilde{k} = c_i` with
            ``scipy.linalg.solve`` instead.
    """
    _check_pair(state, i, j)
    n = state.n_kernels
    eta, q = state.base.eta, state.base.q

    images = {k: _image_at(state, k) for k in (i, j)}
    if proj_eq(images[i], images[j], constants.tolerance_frame):
        raise DegenerateImages(f"Images at u_{i} and u_{j} are proportional.")

    kernels = state.kernels
    for k in (i, j):
        if k >= n:
            continue

        matrix, _ = build_B_scaled(state, eta / (q * state.u[k]))
        if oracle:
            vector = scipy.linalg.solve(matrix, images[k].vector())
        else:
            vector = adjugate(matrix) @ images[k].vector()
        kernels[k] = ProjPoint.from_vector(vector)

    u = state.u.copy()
    u[[i, j]] = eta / (q * u[[i, j]])
    L = state.L * eta / (q * state.u[i] * state.u[j])

    return state.replace(u=u, kernels=kernels, L=L)


def apply_T(state, i, j):
    r"""Apply the translation :math:`T_{i,j} = F_{i,j} \circ E_{i,j}`.

    The points move as :math:`u_{i,j} \to q u_{i,j}` and :math:`L \to qL`.
    """
    return apply_F(apply_E(state, i, j), i, j)


def translation(state, i, j, n):
    """Apply :math:`T_{i,j}^n` for any integer ``n``."""
    for _ in range(abs(n)):
        if n > 0:
            state = apply_T(state, i, j)
        else:
            state = apply_E(apply_F(state, i, j), i, j)

    return state


def apply_iota(state):
    r"""Apply the reflection :math:`\iota` induced by :math:`B(\eta/z)`.

    Sends :math:`u_k \to \eta/u_k`, :math:`\eta \to q\eta`,
    :math:`L \to \eta^{m+3}/L`, every kernel to the image of
    :math:`B(u_k)` and the normalization points to ``(w, q v)``.

    Raises:
        BothColumnsVanish: If some :math:`B(u_k)` vanishes.
    """
    eta, q = state.base.eta, state.base.q
    kernels = [_image_at(state, k) for k in range(state.n_kernels)]

    return GarnierState(
        state.base.replace(eta=q * eta),
        state.m,
        eta / state.u,
        kernels,
        L=eta ** (state.m + 3) / state.L,
        v=state.w,
        w=q * state.v,
        seed=state.seed,
    )


def gauge_residual(matrices):
    """Relative spread of matrices that should agree up to a scalar.

    Every matrix is divided by its entry at the position of the largest
    entry of the first one.
    """
    reference = np.asarray(matrices[0])
    index = np.unravel_index(np.argmax(np.abs(reference)), reference.shape)

    with np.errstate(divide="ignore", invalid="ignore"):
        normalized = [np.asarray(m) / m[index] for m in matrices]
    first = normalized[0]

    residual = max(
        np.linalg.norm(m - first) / np.linalg.norm(first) for m in normalized[1:]
    )
    return float(residual) if np.isfinite(residual) else np.inf


def certificate_samples(
    before, after, n=5, seed=0, others=(), distance=constants.forbidden_distance
):
    """Sample points that are generic for several states at once.

    The singular points of ``before``, ``after`` and every state in ``others``
    are avoided together with their reflections :math:`\\eta/u`.
    """
    rng = np.random.default_rng(seed)
    forbidden = np.concatenate(
        [forbidden_points(s.u, s.base) for s in (before, after, *others)]
    )
    forbidden = np.concatenate([forbidden, before.base.eta / forbidden])
    return utils.sample_generic(rng, n, forbidden, before.base.p, distance=distance)


def _unit(matrix):
    return matrix / np.linalg.norm(matrix)


def _scaled(state, z):
    return _unit(build_B_scaled(state, z)[0])


def _certificate(factor, samples):
    matrices = [factor(complex(z)) for z in samples]
    residual = gauge_residual(matrices)
    logger.debug(f"Gauge certificate residual {residual:.3e}.")
    return residual


def sym_certificate(before, after, samples):
    """Constancy of :math:`B_{new}(z) B_{old}(z)^{-1}` under ``s_i``."""
    return _certificate(
        lambda z: _scaled(after, z) @ adjugate(_scaled(before, z)), samples
    )


def e_certificate(before, after, i, j, samples):
    """Constancy of :math:`B_{new}(z) B_{old}(z)^{-1} R_l(z)^{-1}`."""

    def factor(z):
        r_l = _unit(r_left_scaled(before, i, j, z)[0])
        return _scaled(after, z) @ adjugate(_scaled(before, z)) @ adjugate(r_l)

    return _certificate(factor, samples)


def f_certificate(before, after, i, j, samples):
    """Constancy of :math:`B_{new}(z) R_r(z)^{-1} B_{old}(z)^{-1}`."""

    def factor(z):
        r_r = _unit(r_right_scaled(before, i, j, z)[0])
        return _scaled(after, z) @ adjugate(r_r) @ adjugate(_scaled(before, z))

    return _certificate(factor, samples)


def iota_certificate(before, after, samples):
    r"""Constancy of :math:`B_{new}(z) B_{old}(\eta/z)`."""
    eta = before.base.eta
    return _certificate(
        lambda z: _scaled(after, z) @ _scaled(before, eta / z), samples
    )


@dataclass(frozen=True)
class DeformationStep:
    """One certified step of a deformation program."""

    kind: str
    indices: tuple
    before: GarnierState = field(repr=False)
    after: GarnierState = field(repr=False)
    residuals: dict = field(default_factory=dict)

    def passed(self, tol):
        """``True`` if every residual is at most ``tol``, never for ``nan``."""
        return all(residual <= tol for residual in self.residuals.values())

    def to_record(self):
        """Return a JSON-ready record for the orbit log."""
        return {
            "kind": self.kind,
            "indices": list(self.indices),
            "state": self.after.to_dict(),
            "residuals": dict(self.residuals),
        }


_TOKEN = re.compile(
    r"\s*(?:(?P<kind>[EFT])\(\s*(?P<i>\d+)\s*,\s*(?P<j>\d+)\s*\)"
    r"|s\(\s*(?P<s>\d+)\s*\)|(?P<iota>iota))\s*"
)


def parse_program(program):
    """Parse a word like ``"E(3,4) F(3,4) s(2) iota T(0,5)"``.

    Returns:
        list: ``(kind, indices)`` tuples with kind in ``E, F, T, sym, iota``.
    """
    program = program.strip()
    word = []
    position = 0
    while position < len(program):
        match = _TOKEN.match(program, position)
        if match is None or match.end() == position:
            raise ValueError(
                f"Cannot parse deformation program at {program[position:]!r}."
            )

        if match["kind"]:
            word.append((match["kind"], (int(match["i"]), int(match["j"]))))
        elif match["s"]:
            word.append(("sym", (int(match["s"]),)))
        else:
            word.append(("iota", ()))
        position = match.end()

    return word


def _deform(state, kind, indices, samples, seed):
    """Apply one deformation and return ``(after, gauge_residual)``."""

    def points(before, after):
        return certificate_samples(before, after, samples, seed)

    if kind == "E":
        after = apply_E(state, *indices)
        return after, e_certificate(state, after, *indices, points(state, after))

    if kind == "F":
        after = apply_F(state, *indices)
        return after, f_certificate(state, after, *indices, points(state, after))

    if kind == "T":
        middle = apply_E(state, *indices)
        after = apply_F(middle, *indices)
        residual = max(
            e_certificate(state, middle, *indices, points(state, middle)),
            f_certificate(middle, after, *indices, points(middle, after)),
        )
        return after, residual

    if kind == "sym":
        after = sym_action(state, *indices)
        return after, sym_certificate(state, after, points(state, after))

    if kind == "iota":
        after = apply_iota(state)
        return after, iota_certificate(state, after, points(state, after))

    raise ValueError(f"Unknown deformation `{kind}`.")


def run_program(state, program, tol=constants.tolerance_gauge, samples=5, seed=0):
    """Run a deformation program and certify every step.

    Parameters:
        state (GarnierState): Initial state.
        program (str or list): Program word (see :func:`parse_program`) or
            a parsed list of ``(kind, indices)``.
        tol (float): Tolerance of the state and gauge checks.
        samples (int): Number of sample points per certificate.
        seed (int): Seed of the sample points.

    Returns:
        list[DeformationStep]
    """
    if isinstance(program, str):
        program = parse_program(program)

    steps = []
    for kind, indices in program:
        logger.info(f"Apply {kind}{indices}.")
        after, gauge = _deform(state, kind, tuple(indices), samples, seed)

        residuals = {
            "state": verify_state(after, tol, seed=seed).max_residual,
            "gauge": gauge,
        }
        step = DeformationStep(kind, tuple(indices), state, after, residuals)
        if not step.passed(tol):
            logger.warning(f"Step {kind}{indices} exceeds tolerance: {residuals}.")

        steps.append(step)
        state = after

    return steps
