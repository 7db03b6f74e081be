import numpy as np
import pytest

from support import GAS, uniform_field, vortex_field

from eulerfd import (BoundarySpec, GridSpec, conserved_from_primitive,
                     create_grid, fill_guards)
from eulerfd.problems import get_problem
from eulerfd.reconstruct import (IDEAL_WEIGHTS, WENO_EPS, global_alpha,
                                 interface_flux, split_fluxes, weno5_point)
from eulerfd.stepper import RK_GUARD
from eulerfd.timeflux import pointwise_flux_field, time_averaged_flux


class TestWeno5Point:
    def test_constant_data(self):
        assert weno5_point([3.25] * 5) == 3.25

    def test_linear_data_exact(self):
        # f_i = 2 + 0.5 i for i = -2..2; the i+1/2 face value is 2 + 0.25
        vals = [2.0 + 0.5 * i for i in range(-2, 3)]
        assert weno5_point(vals) == pytest.approx(2.25, abs=1e-14)

    def test_hand_evaluated_geometric_stencil(self):
        # stencil (1,2,4,8,16): smoothness indicators worked out by hand,
        #   b0 = 13/12*1 + 25/4 = 22/3, b1 = 13/12*4 + 9 = 40/3,
        #   b2 = 13/12*16 + 4 = 64/3
        # candidates p0 = 16/3, p1 = 17/3, p2 = 16/3
        b = (22.0 / 3.0, 40.0 / 3.0, 64.0 / 3.0)
        p = (16.0 / 3.0, 17.0 / 3.0, 16.0 / 3.0)
        a = [w / (WENO_EPS + bk) ** 2 for w, bk in zip(IDEAL_WEIGHTS, b)]
        expect = sum(ak * pk for ak, pk in zip(a, p)) / sum(a)
        got = weno5_point([1.0, 2.0, 4.0, 8.0, 16.0])
        assert got == pytest.approx(expect, rel=1e-14)

    def test_near_ideal_weights_on_gentle_smooth_data(self):
        # tiny smooth amplitude keeps the indicators far below the
        # regularizer, so the value matches the linear-weights interpolant
        n = 256
        x = np.linspace(0, 2 * np.pi, n, endpoint=False)
        f = 1e-3 * np.sin(x)
        sten = [f[i:n - 4 + i] for i in range(5)]
        got = weno5_point(sten)
        linear = sum(w * p for w, p in zip(
            IDEAL_WEIGHTS,
            ((2 * sten[0] - 7 * sten[1] + 11 * sten[2]) / 6.0,
             (-sten[1] + 5 * sten[2] + 2 * sten[3]) / 6.0,
             (2 * sten[2] + 5 * sten[3] - sten[4]) / 6.0)))
        assert np.max(np.abs(got - linear)) < 1e-12

    def test_fifth_order_flux_difference_on_smooth_data(self):
        # face values reconstruct the auxiliary function whose cell averages
        # are the samples, so fifth order shows up in the difference quotient
        errs = []
        for n in (32, 64):
            dx = 2 * np.pi / n
            x = (np.arange(n) + 0.5) * dx
            f = np.sin(x)
            sten = [np.roll(f, 2 - i) for i in range(5)]
            right_face = weno5_point(sten)
            quotient = (right_face - np.roll(right_face, 1)) / dx
            errs.append(np.max(np.abs(quotient - np.cos(x))))
        slope = np.log2(errs[0] / errs[1])
        assert slope == pytest.approx(5.0, abs=0.3)

    def test_step_data_bounded_overshoot(self):
        f = np.array([0.0, 0.0, 1.0, 1.0, 1.0])
        v = weno5_point(f)
        assert -0.1 <= v <= 1.1
        f2 = np.array([1.0, 1.0, 0.0, 0.0, 0.0])
        v2 = weno5_point(f2)
        assert -0.1 <= v2 <= 1.1


class TestSplit:
    def test_reassembly(self):
        U, bc, spec = vortex_field(n=24)
        favg = pointwise_flux_field(U, 0, GAS)
        split = split_fluxes(favg, U, 0, GAS)
        total = split.plus.data + split.minus.data
        sl = spec.slab(favg.depth)
        scale = np.max(np.abs(favg.data[sl]))
        assert np.max(np.abs(total[sl] - favg.data[sl])) < 1e-15 * scale

    def test_sod_alpha(self):
        prob = get_problem("sod45")
        spec = prob.grid(64, RK_GUARD)
        U = prob.initial_field(spec, GAS)
        fill_guards(U, prob.bc)
        assert global_alpha(U, 0, GAS) == pytest.approx(np.sqrt(1.4), rel=1e-12)

    def test_uniform_split_is_uniform(self):
        U, bc, spec = uniform_field(guard=RK_GUARD)
        favg = pointwise_flux_field(U, 0, GAS)
        split = split_fluxes(favg, U, 0, GAS)
        assert np.all(split.plus.interior() == split.plus.interior()[0, 0, 0])


class TestInterfaceFlux:
    def test_uniform_faces_equal_analytic_flux(self):
        from eulerfd import analytic_flux
        value = (1.0, 0.3, -0.2, 0.1, 2.5)
        U, bc, spec = uniform_field(value=value, guard=RK_GUARD)
        for d in spec.active_axes:
            favg = pointwise_flux_field(U, d, GAS)
            split = split_fluxes(favg, U, d, GAS)
            fh = interface_flux(split, U, d, GAS)
            expect = analytic_flux(np.array(value), d, GAS)
            assert np.max(np.abs(fh - expect)) < 5e-15 * np.max(np.abs(expect) + 1)
            # every face carries bitwise the same value
            assert np.all(fh == fh.reshape(-1, 5)[0])

    def test_compiled_matches_reference(self):
        U, bc, spec = vortex_field(n=32, guard=RK_GUARD)
        for d in spec.active_axes:
            favg = pointwise_flux_field(U, d, GAS)
            split = split_fluxes(favg, U, d, GAS)
            a = interface_flux(split, U, d, GAS, compiled=True)
            b = interface_flux(split, U, d, GAS, compiled=False)
            assert np.max(np.abs(a - b)) < 1e-13 * np.max(np.abs(b))

    def test_3d_compiled_matches_reference(self):
        rng = np.random.default_rng(5)
        spec = GridSpec(ndim=3, lo=(0, 0, 0), hi=(1, 1, 1), n=(8, 8, 8),
                        guard=RK_GUARD)
        U = create_grid(spec, 5)
        W = np.empty((8, 8, 8, 5))
        W[..., 0] = 1.0 + 0.3 * rng.random((8, 8, 8))
        W[..., 1:4] = 0.5 * rng.standard_normal((8, 8, 8, 3))
        W[..., 4] = 1.0 + 0.3 * rng.random((8, 8, 8))
        U.data[spec.interior()] = conserved_from_primitive(W, GAS)
        fill_guards(U, BoundarySpec.uniform("periodic", 3))
        for d in spec.active_axes:
            favg = pointwise_flux_field(U, d, GAS)
            split = split_fluxes(favg, U, d, GAS)
            a = interface_flux(split, U, d, GAS, compiled=True)
            b = interface_flux(split, U, d, GAS, compiled=False)
            assert a.shape[d] == 9
            assert np.max(np.abs(a - b)) < 1e-13 * np.max(np.abs(b))

    def test_mirror_equivariance(self):
        # mirroring the state along x mirrors the face fluxes with the
        # parity of each component under x -> -x
        rng = np.random.default_rng(7)
        n = 32
        spec = GridSpec(ndim=1, lo=(0.0,), hi=(1.0,), n=(n,), guard=RK_GUARD)
        U = create_grid(spec, 5)
        W = np.empty((n, 5))
        W[:, 0] = 1.0 + 0.3 * rng.random(n)
        W[:, 1] = 0.4 * rng.standard_normal(n)
        W[:, 2] = 0.4 * rng.standard_normal(n)
        W[:, 3] = 0.4 * rng.standard_normal(n)
        W[:, 4] = 1.0 + 0.3 * rng.random(n)
        U.data[spec.interior()] = conserved_from_primitive(W, GAS)[:, None, None]
        bc = BoundarySpec.uniform("periodic", 1)
        fill_guards(U, bc)

        Um = create_grid(spec, 5)
        flip = U.interior()[::-1].copy()
        flip[..., 1] = -flip[..., 1]
        Um.data[spec.interior()] = flip
        fill_guards(Um, bc)

        def faces(field):
            favg = pointwise_flux_field(field, 0, GAS)
            split = split_fluxes(favg, field, 0, GAS)
            return interface_flux(split, field, 0, GAS)

        fh = faces(U)
        fhm = faces(Um)
        # x-flux parity under mirror: (odd, even, odd, odd, odd)
        D = np.array([-1.0, 1.0, -1.0, -1.0, -1.0])
        expect = D * fh[::-1]
        assert np.max(np.abs(fhm - expect)) < 1e-12 * np.max(np.abs(fh))


class TestSmoothAccuracy:
    def test_flux_divergence_fifth_order_on_vortex(self):
        # (fhat_{i+1/2} - fhat_{i-1/2})/dx approximates dF/dx of the smooth
        # state at fifth order; the analytic derivative comes from tiny-step
        # differentiation of the exact flux along x
        from eulerfd.euler import raw_flux
        from eulerfd.problems import _vortex_primitive

        def flux_x_derivative(X, Y, h=1e-5):
            fp = raw_flux(conserved_from_primitive(
                _vortex_primitive(X + h, Y, GAS), GAS), 0, GAS.gamma)
            fm = raw_flux(conserved_from_primitive(
                _vortex_primitive(X - h, Y, GAS), GAS), 0, GAS.gamma)
            return (fp - fm) / (2 * h)

        errs = []
        for n in (96, 192):
            U, bc, spec = vortex_field(n=n, guard=RK_GUARD)
            favg = pointwise_flux_field(U, 0, GAS)
            split = split_fluxes(favg, U, 0, GAS)
            fh = interface_flux(split, U, 0, GAS)
            quotient = (fh[1:] - fh[:-1]) / spec.dx3[0]
            Xc, Yc = np.meshgrid(spec.centers(0, guards=False),
                                 spec.centers(1, guards=False), indexing="ij")
            exact = flux_x_derivative(Xc, Yc)[:, :, None, :]
            errs.append(np.mean(np.abs(quotient - exact)))
        slope = np.log2(errs[0] / errs[1])
        # nonlinear weights shave order off near the vortex core at these
        # resolutions; ~4.5 in L1 is the known regime between 4 and 5
        assert slope == pytest.approx(4.5, abs=0.8)
