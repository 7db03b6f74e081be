import numpy as np
import pytest

from eulerfd import (GasModel, analytic_flux, analytic_jacobian_apply,
                     conserved_from_primitive, eigensystem, max_wave_speed,
                     primitive_from_conserved)
from eulerfd.errors import InvalidStateError

GAS = GasModel(1.4)


def random_valid_states(n, rng):
    W = np.empty((n, 5))
    W[:, 0] = rng.uniform(0.05, 5.0, n)
    W[:, 1:4] = rng.uniform(-3.0, 3.0, (n, 3))
    W[:, 4] = rng.uniform(0.05, 5.0, n)
    return W


class TestConversions:
    def test_zero_velocity(self):
        W = primitive_from_conserved(np.array([1.0, 0, 0, 0, 2.5]), GAS)
        assert np.allclose(W, [1, 0, 0, 0, 1], rtol=0, atol=1e-15)

    def test_sod_right_state(self):
        W = primitive_from_conserved(np.array([0.125, 0, 0, 0, 0.25]), GAS)
        assert np.allclose(W, [0.125, 0, 0, 0, 0.1], rtol=1e-14)
        U = conserved_from_primitive(np.array([0.125, 0, 0, 0, 0.1]), GAS)
        assert U[4] == pytest.approx(0.25, rel=1e-14)

    def test_moving_state_pressure(self):
        W = primitive_from_conserved(np.array([1.0, 1.0, 0, 0, 1.0]), GAS)
        assert np.allclose(W, [1, 1, 0, 0, 0.2], rtol=1e-14)

    def test_energy_assembly(self):
        U = conserved_from_primitive(np.array([1.0, 0, 0, 0, 1.0]), GAS)
        assert U[4] == pytest.approx(2.5, rel=1e-15)
        U = conserved_from_primitive(np.array([1.0, 1.0, 1.0, 0, 1.0]), GAS)
        assert U[4] == pytest.approx(3.5, rel=1e-15)

    def test_round_trip_many_random_states(self):
        rng = np.random.default_rng(7)
        W = random_valid_states(10_000, rng)
        W2 = primitive_from_conserved(conserved_from_primitive(W, GAS), GAS)
        assert np.all(np.abs(W2 - W) <= 1e-14 * np.maximum(1.0, np.abs(W)))

    def test_invalid_density_raises(self):
        with pytest.raises(InvalidStateError) as ei:
            primitive_from_conserved(np.array([-1.0, 0, 0, 0, 1.0]), GAS)
        assert ei.value.index == 0

    def test_invalid_pressure_raises_with_index(self):
        U = np.tile(np.array([1.0, 0, 0, 0, 2.5]), (4, 1))
        U[2, 4] = 0.0  # kinetic-free state with zero energy -> p = 0
        with pytest.raises(InvalidStateError) as ei:
            primitive_from_conserved(U, GAS)
        assert ei.value.index == 2


class TestFlux:
    def test_rest_state_x(self):
        F = analytic_flux(np.array([1.0, 0, 0, 0, 2.5]), "x", GAS)
        assert np.allclose(F, [0, 1, 0, 0, 0], atol=1e-15)

    def test_rest_state_y(self):
        G = analytic_flux(np.array([1.0, 0, 0, 0, 2.5]), "y", GAS)
        assert np.allclose(G, [0, 0, 1, 0, 0], atol=1e-15)

    def test_moving_state(self):
        # U from primitive (1, 1, 0, 0, 0.2): E = 0.5 + 0.5 = 1.0, so the
        # energy flux is u (E + p) = 1.2
        U = conserved_from_primitive(np.array([1.0, 1.0, 0, 0, 0.2]), GAS)
        F = analytic_flux(U, "x", GAS)
        assert np.allclose(F, [1.0, 1.2, 0, 0, 1.2], rtol=1e-14)

    def test_rotational_symmetry(self):
        # permuting (axis, velocity components) permutes the flux; only the
        # kinetic-energy summation order changes, so agreement is ulp-level
        rng = np.random.default_rng(3)
        W = random_valid_states(64, rng)
        U = conserved_from_primitive(W, GAS)
        F = analytic_flux(U, "x", GAS)
        Urot = U[:, [0, 3, 1, 2, 4]]
        G = analytic_flux(Urot, "y", GAS)
        scale = np.max(np.abs(F))
        assert np.max(np.abs(G - F[:, [0, 3, 1, 2, 4]])) < 5e-16 * scale
        Hrot = analytic_flux(U[:, [0, 2, 3, 1, 4]], "z", GAS)
        assert np.max(np.abs(Hrot - F[:, [0, 2, 3, 1, 4]])) < 5e-16 * scale


class TestWaveSpeed:
    def test_sound_speed_rest(self):
        U = conserved_from_primitive(np.array([1.0, 0, 0, 0, 1.0]), GAS)
        assert max_wave_speed(U, "x", GAS) == pytest.approx(np.sqrt(1.4), rel=1e-14)

    def test_moving(self):
        U = conserved_from_primitive(np.array([1.0, 1.0, 0, 0, 1.0]), GAS)
        assert max_wave_speed(U, "x", GAS) == pytest.approx(1 + np.sqrt(1.4), rel=1e-14)

    def test_sod_right(self):
        U = conserved_from_primitive(np.array([0.125, 0, 0, 0, 0.1]), GAS)
        assert max_wave_speed(U, "x", GAS) == pytest.approx(np.sqrt(1.12), rel=1e-12)


def assemble_jacobian(U, axis):
    cols = [analytic_jacobian_apply(U, e, axis, GAS) for e in np.eye(5)]
    return np.stack(cols, axis=-1)


class TestJacobian:
    def test_stationary_density_column(self):
        U = np.array([1.0, 0, 0, 0, 2.5])
        out = analytic_jacobian_apply(U, np.eye(5)[0], "x", GAS)
        assert np.allclose(out, 0.0, atol=1e-15)

    def test_stationary_momentum_column(self):
        U = np.array([1.0, 0, 0, 0, 2.5])
        out = analytic_jacobian_apply(U, np.eye(5)[1], "x", GAS)
        assert np.allclose(out, [1, 0, 0, 0, 3.5], rtol=1e-14)

    def test_linearity(self):
        rng = np.random.default_rng(11)
        U = conserved_from_primitive(random_valid_states(32, rng), GAS)
        V = rng.normal(size=(32, 5))
        W = rng.normal(size=(32, 5))
        a, b = 0.7, -1.3
        lhs = analytic_jacobian_apply(U, a * V + b * W, "x", GAS)
        rhs = (a * analytic_jacobian_apply(U, V, "x", GAS)
               + b * analytic_jacobian_apply(U, W, "x", GAS))
        assert np.all(np.abs(lhs - rhs) <= 1e-14 * np.max(np.abs(lhs)))

    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    def test_against_finite_difference(self, axis):
        rng = np.random.default_rng(13)
        W = random_valid_states(200, rng)
        U = conserved_from_primitive(W, GAS)
        V = rng.normal(size=(200, 5))
        h = 1e-7
        fd = (analytic_flux(U + h * V, axis, GAS)
              - analytic_flux(U - h * V, axis, GAS)) / (2 * h)
        exact = analytic_jacobian_apply(U, V, axis, GAS)
        scale = np.maximum(1.0, np.max(np.abs(exact)))
        assert np.max(np.abs(fd - exact)) / scale < 1e-6


class TestEigensystem:
    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    def test_left_right_identity(self, axis):
        rng = np.random.default_rng(5)
        W = random_valid_states(128, rng)
        es = eigensystem(W, axis, GAS)
        prod = np.einsum("...ij,...jk->...ik", es.left, es.right)
        eye = np.broadcast_to(np.eye(5), prod.shape)
        assert np.max(np.abs(prod - eye)) < 1e-12

    def test_stationary_speeds(self):
        es = eigensystem(np.array([1.0, 0, 0, 0, 1.0]), "x", GAS)
        c = np.sqrt(1.4)
        assert np.allclose(es.speeds, [-c, 0, 0, 0, c], rtol=1e-14)
        assert np.all(np.diff(es.speeds) >= 0)

    @pytest.mark.parametrize("axis", ["x", "y", "z"])
    def test_eigenvector_property(self, axis):
        rng = np.random.default_rng(17)
        W = random_valid_states(50, rng)
        U = conserved_from_primitive(W, GAS)
        es = eigensystem(W, axis, GAS)
        for k in range(5):
            r = es.right[..., :, k]
            Ar = analytic_jacobian_apply(U, r, axis, GAS)
            resid = Ar - es.speeds[..., k, None] * r
            assert np.max(np.abs(resid)) < 1e-10 * max(1.0, np.max(np.abs(Ar)))

    def test_diagonalization(self):
        rng = np.random.default_rng(19)
        W = random_valid_states(50, rng)
        U = conserved_from_primitive(W, GAS)
        for axis in ("x", "y", "z"):
            es = eigensystem(W, axis, GAS)
            A = assemble_jacobian(U, axis)
            lam = np.einsum("...ij,...jk,...kl->...il", es.left, A, es.right)
            diag = np.zeros_like(lam)
            for k in range(5):
                diag[..., k, k] = es.speeds[..., k]
            assert np.max(np.abs(lam - diag)) < 1e-10 * max(1.0, np.max(np.abs(A)))
