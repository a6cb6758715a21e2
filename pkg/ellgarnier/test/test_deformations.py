import numpy as np
import pytest

from ellgarnier import deformations, garnier
from ellgarnier.errors import IndexOutOfRange, ProportionalKernels
from ellgarnier.projective import ProjPoint, image_of, kernel_of, proj_eq


PAIRS = [(0, 1), (3, 4), (2, 6)]


@pytest.fixture
def state():
    return garnier.fixture()


@pytest.fixture
def samples(state):
    return garnier.sample_points(state, n=5, seed=7)


def assert_valid(state):
    report = garnier.verify_state(state)
    assert report.passed, report.failed_checks()


class TestDeformationMatrices:
    def test_right_normalization(self, state):
        """R_r(v) = I."""
        matrix = deformations.r_right(state, 3, 4, state.v)
        assert np.allclose(matrix, np.eye(2), atol=1e-12)

    def test_left_normalization(self, state):
        matrix = deformations.r_left(state, 3, 4, state.w)
        assert np.allclose(matrix, np.eye(2), atol=1e-12)

    def test_right_symmetry(self, state, samples):
        """R_r(z) = R_r(eta/z)."""
        eta = state.base.eta
        for z in samples:
            assert np.allclose(
                deformations.r_right(state, 3, 4, z),
                deformations.r_right(state, 3, 4, eta / z),
                rtol=1e-10,
            )

    def test_left_symmetry(self, state, samples):
        """R_l(z) = R_l(eta/qz)."""
        eta_q = state.base.eta / state.base.q
        for z in samples:
            assert np.allclose(
                deformations.r_left(state, 3, 4, z),
                deformations.r_left(state, 3, 4, eta_q / z),
                rtol=1e-10,
            )

    def test_right_images(self, state):
        """R_r(u_i) maps onto the kernel of B(u_i)."""
        for k in (3, 4):
            matrix = deformations.r_right(state, 3, 4, state.u[k])
            assert proj_eq(image_of(matrix), state.kernels[k])

    def test_left_kernels(self, state):
        """R_l(u_i) annihilates the image of B(u_i)."""
        for k in (3, 4):
            matrix = deformations.r_left(state, 3, 4, state.u[k])
            image = image_of(garnier.build_B(state, state.u[k]))
            assert proj_eq(kernel_of(matrix), image)

    def test_left_determinant(self, state):
        """det R_l(z) = psi_i(z) psi_j(z) vanishes at u_i."""
        matrix = deformations.r_left(state, 3, 4, state.u[3])
        assert abs(np.linalg.det(matrix)) < 1e-10 * np.linalg.norm(matrix) ** 2

    def test_invalid_indices(self, state):
        with pytest.raises(IndexOutOfRange):
            deformations.r_right(state, 3, 8, 0.5)
        with pytest.raises(ValueError):
            deformations.r_right(state, 3, 3, 0.5)


class TestInvolutions:
    @pytest.mark.parametrize("i, j", PAIRS)
    def test_F_involution(self, state, i, j):
        """F_ij o F_ij = id."""
        twice = deformations.apply_F(deformations.apply_F(state, i, j), i, j)
        assert garnier.state_distance(twice, state) < 1e-8

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_E_involution(self, state, i, j):
        """E_ij o E_ij = id."""
        twice = deformations.apply_E(deformations.apply_E(state, i, j), i, j)
        assert garnier.state_distance(twice, state) < 1e-8

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_valid_after_maps(self, state, i, j):
        assert_valid(deformations.apply_F(state, i, j))
        assert_valid(deformations.apply_E(state, i, j))

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_F_oracle(self, state, i, j):
        """The closed kernel update agrees with solving R_r(u_k) x = k."""
        closed = deformations.apply_F(state, i, j)
        oracle = deformations.apply_F(state, i, j, oracle=True)
        assert garnier.state_distance(closed, oracle) < 1e-10

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_E_oracle(self, state, i, j):
        closed = deformations.apply_E(state, i, j)
        oracle = deformations.apply_E(state, i, j, oracle=True)
        assert garnier.state_distance(closed, oracle) < 1e-10

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_E_symmetric(self, state, i, j):
        """E_ij and E_ji are the same map."""
        first = deformations.apply_E(state, i, j)
        second = deformations.apply_E(state, j, i)
        assert garnier.state_distance(first, second) < 1e-12

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_F_symmetric(self, state, i, j):
        first = deformations.apply_F(state, i, j)
        second = deformations.apply_F(state, j, i)
        assert garnier.state_distance(first, second) < 1e-12

    def test_E_F_differ(self, state):
        """E_34 o F_34 divides u_3, u_4 by q instead of being the identity."""
        composed = deformations.apply_E(deformations.apply_F(state, 3, 4), 3, 4)
        assert garnier.state_distance(composed, state) > 1e-3
        assert np.allclose(composed.u[[3, 4]], state.u[[3, 4]] / state.base.q)

    def test_F_points(self, state):
        new = deformations.apply_F(state, 3, 4)
        eta = state.base.eta
        assert np.allclose(new.u[[3, 4]], eta / state.u[[3, 4]], rtol=1e-14)
        assert np.isclose(new.L, state.L * eta / (state.u[3] * state.u[4]))
        assert new.kernels[3] == state.kernels[4]

    def test_E_points(self, state):
        new = deformations.apply_E(state, 3, 4)
        eta_q = state.base.eta / state.base.q
        assert np.allclose(new.u[[3, 4]], eta_q / state.u[[3, 4]], rtol=1e-14)
        assert new.kernels[0] == state.kernels[0]

    def test_proportional_kernels(self, state):
        kernels = state.kernels
        kernels[4] = ProjPoint(2 * kernels[3].x, 2 * kernels[3].y)
        degenerate = state.replace(kernels=kernels)
        with pytest.raises(ProportionalKernels):
            deformations.apply_F(degenerate, 3, 4)


class TestTranslations:
    @pytest.mark.parametrize("m", [1, 2])
    def test_T(self, m):
        """T_ij multiplies u_i, u_j and L by q."""
        state = garnier.random_state(m, seed=m)
        new = deformations.apply_T(state, 3, 4)
        q = state.base.q

        assert np.allclose(new.u[[3, 4]], q * state.u[[3, 4]], rtol=1e-13)
        assert np.isclose(new.L, q * state.L, rtol=1e-13)
        assert np.array_equal(new.u[:3], state.u[:3])
        assert_valid(new)

    def test_translation_inverse(self, state):
        """T^1 and T^-1 cancel."""
        forth = deformations.translation(state, 3, 4, 1)
        back = deformations.translation(forth, 3, 4, -1)
        assert garnier.state_distance(back, state) < 1e-8

    def test_translation_zero(self, state):
        assert deformations.translation(state, 0, 1, 0) is state

    def test_composition(self, state):
        """E_{2,4} = s_3 o E_{2,3} o s_3."""
        direct = deformations.apply_E(state, 2, 4)
        composed = garnier.sym_action(
            deformations.apply_E(garnier.sym_action(state, 3), 2, 3), 3
        )
        assert garnier.state_distance(direct, composed) < 1e-8


class TestReflection:
    def test_parameters(self, state):
        new = deformations.apply_iota(state)
        eta, q = state.base.eta, state.base.q

        assert np.isclose(new.base.eta, q * eta)
        assert np.allclose(new.u, eta / state.u)
        assert np.isclose(new.L, eta**4 / state.L)
        assert (new.v, new.w) == (state.w, q * state.v)
        assert_valid(new)

    def test_kernels_are_images(self, state):
        new = deformations.apply_iota(state)
        for k, kernel in enumerate(new.kernels):
            image = image_of(garnier.build_B(state, state.u[k]))
            assert proj_eq(kernel, image)

    def test_rank_one_columns(self, state):
        """Both nonzero columns of B(u_k) span the image at every singular point."""
        for uk in state.u:
            matrix = garnier.build_B(state, uk)
            norm = np.linalg.norm(matrix)
            assert abs(np.linalg.det(matrix)) < 1e-9 * norm**2

            image = image_of(matrix)
            for column in matrix.T:
                if np.linalg.norm(column) > 1e-6 * norm:
                    assert proj_eq(ProjPoint.from_vector(column), image)


class TestCertificates:
    def test_gauge_residual(self):
        """Scalar multiples have vanishing residual."""
        matrix = np.array([[1, 2j], [0.5, -1]])
        assert deformations.gauge_residual([matrix, 3j * matrix]) < 1e-14
        assert deformations.gauge_residual([matrix, matrix.T]) > 0.1

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_e_certificate(self, state, i, j):
        after = deformations.apply_E(state, i, j)
        points = deformations.certificate_samples(state, after)
        assert deformations.e_certificate(state, after, i, j, points) < 1e-7

    @pytest.mark.parametrize("i, j", PAIRS)
    def test_f_certificate(self, state, i, j):
        after = deformations.apply_F(state, i, j)
        points = deformations.certificate_samples(state, after)
        assert deformations.f_certificate(state, after, i, j, points) < 1e-7

    @pytest.mark.parametrize("i", range(7))
    def test_sym_certificate(self, state, i):
        after = garnier.sym_action(state, i)
        points = deformations.certificate_samples(state, after)
        assert deformations.sym_certificate(state, after, points) < 1e-7

    def test_iota_certificate(self, state):
        after = deformations.apply_iota(state)
        points = deformations.certificate_samples(state, after)
        assert deformations.iota_certificate(state, after, points) < 1e-7

    def test_wrong_map_fails(self, state):
        """A certificate detects a state that is not related by the map."""
        after = deformations.apply_F(state, 3, 4)
        points = deformations.certificate_samples(state, after)
        assert deformations.e_certificate(state, after, 3, 4, points) > 1e-3


class TestPrograms:
    def test_parse(self):
        word = deformations.parse_program(" E(3,4) F( 3 , 4 ) s(2) iota T(0,5) ")
        assert word == [
            ("E", (3, 4)),
            ("F", (3, 4)),
            ("sym", (2,)),
            ("iota", ()),
            ("T", (0, 5)),
        ]

    def test_parse_empty(self):
        assert deformations.parse_program("   ") == []

    @pytest.mark.parametrize("program", ["E(3)", "G(1,2)", "E(3,4) x"])
    def test_parse_invalid(self, program):
        with pytest.raises(ValueError):
            deformations.parse_program(program)

    def test_run(self, state):
        """E_34 followed by F_34 translates u_3, u_4 by q."""
        steps = deformations.run_program(state, "E(3,4) F(3,4)")

        assert [s.kind for s in steps] == ["E", "F"]
        assert all(s.passed(1e-7) for s in steps)

        last = steps[-1].after
        assert np.allclose(last.u[[3, 4]], state.base.q * state.u[[3, 4]])

    def test_run_all_kinds(self, state):
        steps = deformations.run_program(state, "s(2) T(0,1) iota")
        assert [s.kind for s in steps] == ["sym", "T", "iota"]
        assert all(s.residuals["gauge"] < 1e-7 for s in steps)

    def test_record(self, state):
        record = deformations.run_program(state, "F(0,1)")[0].to_record()
        assert set(record) == {"kind", "indices", "state", "residuals"}
        assert record["indices"] == [0, 1]
        assert record["state"]["kind"] == "garnier"

    def test_nan_residual_fails(self, state):
        """A step with a nan residual never passes."""
        residuals = {"state": np.nan, "gauge": 1e-12}
        step = deformations.DeformationStep("E", (3, 4), state, state, residuals)
        assert not step.passed(1e-7)
