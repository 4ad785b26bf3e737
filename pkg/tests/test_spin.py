import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadspin.errors import InvariantViolation, ValidationError
from quadspin.liouville import equilibrium_state
from quadspin.spin import (
    CoherentStateParams,
    DensityMatrix,
    SpinNumber,
    coherent_state,
    commutator,
    expectation,
    make_quadrupole_tensors,
    make_spin_operators,
    make_tensor_basis,
    real_expectation,
    variance,
)

from conftest import ALL_SPINS, QUAD_SPINS


class TestSpinNumber:
    @pytest.mark.parametrize(
        "text, two_i", [("1/2", 1), ("3/2", 3), ("7/2", 7), ("2", 4), (3.5, 7), (Fraction(9, 2), 9)]
    )
    def test_parse(self, text, two_i):
        assert SpinNumber.parse(text).two_i == two_i

    @pytest.mark.parametrize("bad", ["1/3", "abc", 0.3, "0", "-1/2"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValidationError):
            SpinNumber.parse(bad)

    def test_dimension_and_str(self):
        spin = SpinNumber(7)
        assert spin.dimension() == spin.dim == 8
        assert spin.value == 3.5
        assert str(spin) == "7/2"
        assert str(SpinNumber(4)) == "2"

    def test_rejects_non_integer_storage(self):
        with pytest.raises(ValidationError):
            SpinNumber(1.5)
        with pytest.raises(ValidationError):
            SpinNumber(True)


class TestSpinOperators:
    def test_spin_half(self):
        ops = make_spin_operators(SpinNumber(1))
        np.testing.assert_allclose(ops.Iz, np.diag([0.5, -0.5]))
        assert ops.Iplus[0, 1] == pytest.approx(1.0)

    def test_spin_three_halves_ladder(self):
        ops = make_spin_operators(SpinNumber(3))
        np.testing.assert_allclose(np.diag(ops.Iz).real, [1.5, 0.5, -0.5, -1.5])
        np.testing.assert_allclose(np.diag(ops.Iplus, 1).real, [math.sqrt(3), 2, math.sqrt(3)], atol=1e-15)

    @pytest.mark.parametrize("spin", ALL_SPINS, ids=str)
    def test_su2_algebra(self, spin):
        ops = make_spin_operators(spin)
        np.testing.assert_allclose(commutator(ops.Ix, ops.Iy), 1j * ops.Iz, atol=1e-13)
        np.testing.assert_allclose(commutator(ops.Iy, ops.Iz), 1j * ops.Ix, atol=1e-13)
        np.testing.assert_allclose(commutator(ops.Iz, ops.Ix), 1j * ops.Iy, atol=1e-13)

    @pytest.mark.parametrize("spin", ALL_SPINS, ids=str)
    def test_casimir(self, spin):
        ops = make_spin_operators(spin)
        total = ops.Ix @ ops.Ix + ops.Iy @ ops.Iy + ops.Iz @ ops.Iz
        np.testing.assert_allclose(total, ops.Isq, atol=1e-13)
        np.testing.assert_allclose(ops.Isq, spin.value * (spin.value + 1) * np.eye(spin.dim))


class TestTensorBasis:
    def test_spin_half_rank_one(self):
        basis = make_tensor_basis(SpinNumber(1))
        np.testing.assert_allclose(basis[(1, 0)], np.diag([1, -1]) / math.sqrt(2), atol=1e-15)

    @pytest.mark.parametrize("spin", ALL_SPINS, ids=str)
    def test_gram_matrix_is_identity(self, spin):
        basis = make_tensor_basis(spin)
        assert len(basis) == spin.dim**2
        stack = np.array([t.ravel() for t in basis.values()])
        gram = stack.conj() @ stack.T
        np.testing.assert_allclose(gram, np.eye(spin.dim**2), atol=1e-12)

    def test_spin_three_halves_orthonormal_to_1e13(self):
        basis = make_tensor_basis(SpinNumber(3))
        stack = np.array([t.ravel() for t in basis.values()])
        assert np.max(np.abs(stack.conj() @ stack.T - np.eye(16))) < 1e-13

    @pytest.mark.parametrize("spin", ALL_SPINS, ids=str)
    def test_grading_and_adjoint(self, spin):
        iz = make_spin_operators(spin).Iz
        basis = make_tensor_basis(spin)
        for (l, m), t in basis.items():
            np.testing.assert_allclose(commutator(iz, t), m * t, atol=1e-13)
            np.testing.assert_allclose(t.conj().T, (-1) ** m * basis[(l, -m)], atol=1e-12)

    @pytest.mark.parametrize("spin", ALL_SPINS, ids=str)
    def test_identity_and_rank_one_elements(self, spin):
        basis = make_tensor_basis(spin)
        np.testing.assert_allclose(basis[(0, 0)], np.eye(spin.dim) / math.sqrt(spin.dim), atol=1e-14)
        iz = make_spin_operators(spin).Iz
        np.testing.assert_allclose(basis[(1, 0)], iz / np.linalg.norm(iz), atol=1e-13)

    def test_example_order_one_commutator(self):
        spin = SpinNumber(3)
        t21 = make_tensor_basis(spin)[(2, 1)]
        iz = make_spin_operators(spin).Iz
        np.testing.assert_allclose(iz @ t21 - t21 @ iz, t21, atol=1e-14)


class TestQuadrupoleTensors:
    def test_q0_spin_three_halves(self):
        q = make_quadrupole_tensors(SpinNumber(3))
        np.testing.assert_allclose(q[0], np.diag([3, -3, -3, 3]), atol=1e-14)

    @pytest.mark.parametrize("spin", QUAD_SPINS, ids=str)
    def test_adjoint_and_order(self, spin):
        q = make_quadrupole_tensors(spin)
        iz = make_spin_operators(spin).Iz
        for p in range(-2, 3):
            np.testing.assert_allclose(q[p].conj().T, (-1) ** p * q[-p], atol=1e-14)
            np.testing.assert_allclose(commutator(iz, q[p]), p * q[p], atol=1e-13)

    @pytest.mark.parametrize("spin", QUAD_SPINS, ids=str)
    def test_rank_two(self, spin):
        # each Q(p) lies entirely in the rank-2 subspace of the tensor basis
        basis = make_tensor_basis(spin)
        for p, op in make_quadrupole_tensors(spin).items():
            for (l, m), t in basis.items():
                overlap = np.sum(op * t.conj())
                if l != 2 or m != p:
                    assert abs(overlap) < 1e-11

    def test_spin_half_rejected(self):
        with pytest.raises(ValidationError, match="no quadrupole"):
            make_quadrupole_tensors(SpinNumber(1))


class TestCoherentState:
    def test_south_pole_reference(self):
        rho = coherent_state(SpinNumber(3), CoherentStateParams(0.0, 0.0))
        expected = np.zeros((4, 4))
        expected[3, 3] = 1
        np.testing.assert_allclose(rho.matrix, expected, atol=1e-15)

    def test_north_pole_limit(self):
        rho = coherent_state(SpinNumber(3), CoherentStateParams(math.pi, 0.3))
        assert abs(rho.matrix[0, 0] - 1) < 1e-15

    def test_equator_amplitudes(self):
        rho = coherent_state(SpinNumber(3), CoherentStateParams(math.pi / 2, 0.0))
        amps = np.sqrt(np.diag(rho.matrix).real)
        np.testing.assert_allclose(amps, [0.35355339, 0.61237244, 0.61237244, 0.35355339], atol=1e-8)
        assert real_expectation(rho, make_spin_operators(rho.spin).Ix) == pytest.approx(1.5, abs=1e-13)

    def test_matches_zeta_formula(self):
        # c_m = zeta^(I+m) / (1 + |zeta|^2)^I * sqrt(binomial)
        spin, theta, phi = SpinNumber(5), 1.1, 0.7
        zeta = math.tan(theta / 2) * np.exp(-1j * phi)
        amps = np.array(
            [zeta ** (spin.two_i - i) * math.sqrt(math.comb(spin.two_i, i)) for i in range(spin.dim)]
        ) / (1 + abs(zeta) ** 2) ** spin.value
        rho = coherent_state(spin, CoherentStateParams(theta, phi))
        np.testing.assert_allclose(rho.matrix, np.outer(amps, amps.conj()), atol=1e-13)

    def test_spin_seven_halves_moments(self):
        spin = SpinNumber(7)
        rho = coherent_state(spin)
        ops = make_spin_operators(spin)
        assert real_expectation(rho, ops.Ix) == pytest.approx(3.5, abs=1e-12)
        assert abs(real_expectation(rho, ops.Iy)) < 1e-12
        assert abs(real_expectation(rho, ops.Iz)) < 1e-12
        assert variance(rho, ops.Iy) == pytest.approx(1.75, abs=1e-12)
        assert variance(rho, ops.Iz) == pytest.approx(1.75, abs=1e-12)

    @pytest.mark.parametrize("spin", ALL_SPINS, ids=str)
    def test_mean_direction_norm(self, spin):
        ops = make_spin_operators(spin)
        for theta in np.linspace(0, math.pi, 5):
            for phi in np.linspace(0, 2 * math.pi, 5, endpoint=False):
                rho = coherent_state(spin, CoherentStateParams(theta, phi))
                mean = [real_expectation(rho, op) for op in (ops.Ix, ops.Iy, ops.Iz)]
                assert np.linalg.norm(mean) == pytest.approx(spin.value, abs=1e-12)
                assert rho.purity() == pytest.approx(1.0, abs=1e-13)
                # the state points along (sin t cos p, sin t sin p, -cos t)
                direction = [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), -math.cos(theta)]
                np.testing.assert_allclose(mean, spin.value * np.array(direction), atol=1e-12)

    def test_angle_validation(self):
        with pytest.raises(ValidationError):
            CoherentStateParams(-0.1, 0.0)
        with pytest.raises(ValidationError):
            CoherentStateParams(1.0, float("nan"))


class TestExpectationVariance:
    def test_examples(self):
        spin = SpinNumber(3)
        iz = make_spin_operators(spin).Iz
        mixed = DensityMatrix(np.eye(4) / 4, spin)
        assert abs(expectation(mixed, iz)) < 1e-15
        rho_eq = equilibrium_state(spin)
        assert real_expectation(rho_eq, iz) == pytest.approx(5 / 6, abs=1e-14)
        assert variance(rho_eq, iz) == pytest.approx(5 / 9, abs=1e-14)

    def test_eigenstate_has_zero_variance(self):
        spin = SpinNumber(5)
        rho = coherent_state(spin, CoherentStateParams(0.0, 0.0))
        assert variance(rho, make_spin_operators(spin).Iz) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            expectation(coherent_state(SpinNumber(3)), np.eye(2))

    def test_non_hermitian_variance_rejected(self):
        spin = SpinNumber(3)
        with pytest.raises(ValidationError):
            variance(coherent_state(spin), make_spin_operators(spin).Iplus)

    @settings(max_examples=40, deadline=None)
    @given(two_i=st.integers(1, 9), theta=st.floats(0, math.pi), phi=st.floats(0, 2 * math.pi))
    def test_variance_nonnegative(self, two_i, theta, phi):
        spin = SpinNumber(two_i)
        rho = coherent_state(spin, CoherentStateParams(theta, phi))
        for op in make_spin_operators(spin)[:3]:
            assert variance(rho, op) >= 0.0


class TestDensityMatrixValidation:
    def test_rejects_non_hermitian(self):
        with pytest.raises(InvariantViolation, match="Hermitian"):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]), SpinNumber(1))

    def test_rejects_bad_trace(self):
        with pytest.raises(InvariantViolation, match="trace"):
            DensityMatrix(np.eye(2), SpinNumber(1))

    def test_rejects_negative(self):
        with pytest.raises(InvariantViolation, match="negative"):
            DensityMatrix(np.diag([1.2, -0.2]), SpinNumber(1))

    def test_separate_positivity_tolerance(self):
        rho = DensityMatrix(np.diag([1 + 1e-6, -1e-6]), SpinNumber(1), psd_tol=1e-5)
        assert rho.matrix[1, 1] < 0

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError):
            DensityMatrix(np.eye(3) / 3, SpinNumber(1))

    def test_matrix_is_read_only(self):
        rho = coherent_state(SpinNumber(3))
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 0

    def test_fidelity(self):
        spin = SpinNumber(3)
        a = coherent_state(spin)
        b = coherent_state(spin, CoherentStateParams(math.pi / 2, math.pi))
        assert a.fidelity(a) == pytest.approx(1.0, abs=1e-12)
        assert a.fidelity(b) == pytest.approx(0.0, abs=1e-12)
