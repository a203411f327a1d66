import math

import numpy as np
import pytest

from ellcm.calogero import CMConfig, PhasePoint, eom, hamiltonian_cm
from ellcm.elliptic import TorusModulus, wp_dz
from ellcm.errors import PathError
from ellcm.flow import (
    ExtendedTangent,
    IntegratorConfig,
    canonical_pairing,
    extended_two_form,
    hamiltonian_dtau,
    hamiltonian_vector_field,
    integrate_isomonodromic,
    integrate_isospectral,
    integrate_scalar_painleve,
    symplectic_jacobian_check,
)
from ellcm.painleve import EllipticState, PainleveParams
from ellcm.rng import SplitMix64

TM_I = TorusModulus(1j)
TWO_PI_I = 2j * math.pi

TIGHT = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)


def random_tangent(rng, n):
    draw = lambda: complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return ExtendedTangent([draw() for _ in range(n)],
                           [draw() for _ in range(n)], draw())


class TestIsospectral:
    def test_free_flight(self):
        cfg = CMConfig(2, 0.0, TM_I)
        ph = PhasePoint([0.1 + 0.05j, 0.6 - 0.1j], [0.3, -0.2 + 0.1j])
        tr = integrate_isospectral(cfg, ph, (0.0, 1.0))
        assert np.max(np.abs(tr.states[-1].q - (ph.q + ph.p))) < 1e-10
        assert np.max(np.abs(tr.states[-1].p - ph.p)) < 1e-10

    def test_h_conservation(self):
        cfg = CMConfig(3, 1.0, TM_I)
        ph = PhasePoint([0.12 + 0.02j, 0.45 + 0.31j, 0.78 - 0.05j],
                        [0.25, -0.15 + 0.1j, -0.1 - 0.1j])
        tr = integrate_isospectral(cfg, ph, (0.0, 1.0),
                                   IntegratorConfig(rel_tol=1e-10,
                                                    abs_tol=1e-12))
        drift = abs(hamiltonian_cm(cfg, tr.states[-1])
                    - hamiltonian_cm(cfg, ph))
        assert drift < 1e-8

    def test_momentum_conservation(self):
        cfg = CMConfig(3, 1.0, TM_I)
        ph = PhasePoint([0.12, 0.45 + 0.31j, 0.78 - 0.05j],
                        [0.25, -0.15, -0.1])
        tr = integrate_isospectral(cfg, ph, (0.0, 1.0), TIGHT)
        assert abs(tr.states[-1].p.sum() - ph.p.sum()) < 1e-10

    def test_n2_reduction_sign(self):
        # with sum p = 0 the relative half-coordinate satisfies
        # d^2 q/dt^2 = s g^2 wp'(2q) with the single global sign s = -1;
        # FD second derivative with one Richardson step over h, h/2
        cfg = CMConfig(2, 0.8, TM_I)
        ph = PhasePoint([0.2 + 0.1j, -0.15 - 0.05j], [0.3, -0.3],
                        traceless=True)
        icfg = IntegratorConfig(rel_tol=1e-13, abs_tol=1e-15)
        q0 = (ph.q[0] - ph.q[1]) / 2

        def acc_at(h):
            vals = []
            for dt in (h, -h):
                tr = integrate_isospectral(cfg, ph, (0.0, dt), icfg,
                                           samples=1)
                vals.append((tr.states[-1].q[0] - tr.states[-1].q[1]) / 2)
            return (vals[0] - 2 * q0 + vals[1]) / h**2

        acc = (4 * acc_at(1e-3) - acc_at(2e-3)) / 3
        target = cfg.g**2 * wp_dz(2 * q0, TM_I)
        assert abs(acc - (-1) * target) < 1e-6

    def test_collision_truncates(self):
        # a configuration stalled inside the separation reject band: every
        # proposed step ends there, the step collapses, and the trajectory
        # is returned truncated with the flag set
        cfg = CMConfig(2, 5e-6, TM_I)
        ph = PhasePoint([0.5 - 2.5e-5, 0.5 + 2.5e-5], [0.1, -0.1])
        tr = integrate_isospectral(cfg, ph, (0.0, 1.0))
        assert tr.diagnostics.truncated
        assert tr.diagnostics.message != ""

    def test_rk4_convergence_order(self):
        # measured against a tight-tolerance adaptive reference at g != 0
        # (the g = 0 solution is linear, where rk4 is exact to rounding)
        cfg = CMConfig(2, 1.0, TM_I)
        ph = PhasePoint([0.1, 0.6 + 0.2j], [0.4, -0.4])
        ref = integrate_isospectral(cfg, ph, (0.0, 0.5),
                                    IntegratorConfig(rel_tol=1e-13,
                                                     abs_tol=1e-14),
                                    samples=1).states[-1]
        errs = []
        for h in (0.01, 0.005, 0.0025):
            tr = integrate_isospectral(
                cfg, ph, (0.0, 0.5),
                IntegratorConfig(method="rk4_fixed", initial_step=h),
                samples=1)
            errs.append(np.max(np.abs(tr.states[-1].q - ref.q)))
        order1 = math.log2(errs[0] / errs[1])
        order2 = math.log2(errs[1] / errs[2])
        assert order1 > 3.4 and order2 > 3.4

    def test_rk4_exact_on_free_flight(self):
        cfg = CMConfig(2, 0.0, TM_I)
        ph = PhasePoint([0.1, 0.6], [0.4, -0.4])
        tr = integrate_isospectral(
            cfg, ph, (0.0, 1.0),
            IntegratorConfig(method="rk4_fixed", initial_step=0.05),
            samples=1)
        assert np.max(np.abs(tr.states[-1].q - (ph.q + ph.p))) < 1e-10


class TestIsomonodromic:
    def test_free_flight(self):
        cfg = CMConfig(2, 0.0, TM_I)
        ph = PhasePoint([0.1 + 0.05j, 0.6 - 0.1j], [0.3, -0.2 + 0.1j])
        tr = integrate_isomonodromic(cfg, ph, (1j, 1j + 0.2 + 0.1j))
        expect = ph.q + ph.p * (0.2 + 0.1j) / TWO_PI_I
        assert np.max(np.abs(tr.states[-1].q - expect)) < 1e-10

    def test_momentum_conservation(self):
        cfg = CMConfig(3, 0.9, TM_I)
        ph = PhasePoint([0.12, 0.45 + 0.31j, 0.78 - 0.05j],
                        [0.25, -0.15, -0.1])
        tr = integrate_isomonodromic(cfg, ph, (1j, 1j + 0.1), TIGHT)
        assert abs(tr.states[-1].p.sum() - ph.p.sum()) < 1e-10

    def test_path_leaves_upper_half_plane(self):
        cfg = CMConfig(2, 0.5, TM_I)
        ph = PhasePoint([0.1, 0.6], [0.3, -0.3])
        with pytest.raises(PathError):
            integrate_isomonodromic(cfg, ph, (1j, 0.2 - 0.05j))

    def test_h_drift_matches_partial_tau_quadrature(self):
        # dH/dtau along the flow = dH/dtau at frozen (q, p); integrate the
        # partial by Simpson over the samples and compare with the jump
        cfg = CMConfig(2, 0.9, TM_I)
        ph = PhasePoint([0.12 + 0.03j, 0.55 - 0.06j], [0.3, -0.25])
        tau0, tau1 = 1j, 1j + 0.1
        nsamp = 8
        tr = integrate_isomonodromic(cfg, ph, (tau0, tau1), TIGHT,
                                     samples=nsamp)
        hs = [hamiltonian_cm(cfg.with_tau(tr.tau_of_sample[i]), tr.states[i])
              for i in range(len(tr.times))]
        partials = [hamiltonian_dtau(cfg.with_tau(tr.tau_of_sample[i]),
                                     tr.states[i])
                    for i in range(len(tr.times))]
        # composite Simpson on the evenly spaced samples; along the flow
        # dH/dtau equals the frozen-(q, p) partial exactly (the fiber terms
        # cancel), so the jump equals the plain quadrature
        h = (tau1 - tau0) / nsamp
        integral = 0j
        for i in range(0, nsamp, 2):
            integral += h / 3 * (partials[i] + 4 * partials[i + 1]
                                 + partials[i + 2])
        assert abs((hs[-1] - hs[0]) - integral) < 1e-5

    def test_zero_curvature_along_trajectory(self):
        from ellcm.calogero import zero_curvature_residual
        cfg = CMConfig(2, 0.8, TM_I)
        ph = PhasePoint([0.12 + 0.03j, 0.55 - 0.06j], [0.3, -0.25])
        tr = integrate_isomonodromic(cfg, ph, (1j, 1j + 0.05), TIGHT,
                                     samples=4)
        for i in range(0, len(tr.times), 2):
            res = zero_curvature_residual(cfg.with_tau(tr.tau_of_sample[i]),
                                          tr.states[i], 0.31 + 0.17j)
            assert res < 1e-6


class TestScalarPainleve:
    def test_free(self):
        st = EllipticState(0.3 + 0.1j, 0.2 - 0.1j, 1j)
        tr = integrate_scalar_painleve(st, PainleveParams((0, 0, 0, 0)),
                                       (1j, 1j + 0.1j))
        expect = st.q + st.p * 0.1j / TWO_PI_I
        assert abs(tr.states[-1].q[0] - expect) < 1e-12

    def test_second_derivative_matches_rhs(self):
        from ellcm.painleve import elliptic_p6_rhs
        params = PainleveParams((0.1, -0.05, 0.07, 0.02))
        st = EllipticState(0.31 + 0.12j, 0.2, 0.95j)
        h = 1e-3
        qs = []
        for dt in (h, 0.0, -h):
            if dt == 0.0:
                qs.append(st.q)
                continue
            tr = integrate_scalar_painleve(
                st, params, (st.tau, st.tau + dt),
                IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14), samples=1)
            qs.append(tr.states[-1].q[0])
        acc = (qs[0] - 2 * qs[1] + qs[2]) / h**2
        target = elliptic_p6_rhs(st.q, st.tau, params) / TWO_PI_I**2
        assert abs(acc - target) < 1e-5 * max(1.0, abs(target))


class TestExtendedTwoForm:
    def setup_method(self):
        self.cfg = CMConfig(3, 1.0, TM_I)
        self.ph = PhasePoint([0.12 + 0.02j, 0.45 + 0.31j, 0.78 - 0.05j],
                             [0.25, -0.15 + 0.1j, -0.1 - 0.1j])
        self.rng = SplitMix64(29)

    def test_antisymmetry(self):
        u = random_tangent(self.rng, 3)
        v = random_tangent(self.rng, 3)
        a = extended_two_form(self.ph, 1j, u, v, self.cfg)
        b = extended_two_form(self.ph, 1j, v, u, self.cfg)
        assert abs(a + b) < 1e-12

    def test_bilinearity(self):
        u = random_tangent(self.rng, 3)
        v = random_tangent(self.rng, 3)
        w = random_tangent(self.rng, 3)
        lam = 0.7 - 0.3j
        combined = ExtendedTangent(v.dq + lam * w.dq, v.dp + lam * w.dp,
                                   v.dtau + lam * w.dtau)
        lhs = extended_two_form(self.ph, 1j, u, combined, self.cfg)
        rhs = (extended_two_form(self.ph, 1j, u, v, self.cfg)
               + lam * extended_two_form(self.ph, 1j, u, w, self.cfg))
        assert abs(lhs - rhs) < 1e-10

    def test_fiber_restriction_is_canonical(self):
        u = random_tangent(self.rng, 3)
        v = random_tangent(self.rng, 3)
        uf = ExtendedTangent(u.dq, u.dp, 0.0)
        vf = ExtendedTangent(v.dq, v.dp, 0.0)
        got = extended_two_form(self.ph, 1j, uf, vf, self.cfg)
        canonical = complex(np.sum(uf.dq * vf.dp - uf.dp * vf.dq))
        assert got == canonical

    def test_flow_field_in_kernel(self):
        X = hamiltonian_vector_field(self.ph, 1j, self.cfg)
        for _ in range(20):
            v = random_tangent(self.rng, 3)
            assert abs(extended_two_form(self.ph, 1j, X, v,
                                         self.cfg)) < 1e-7

    def test_kernel_self_pairing(self):
        # zero up to FMA-contracted complex multiplies in the fiber term
        X = hamiltonian_vector_field(self.ph, 1j, self.cfg)
        assert abs(extended_two_form(self.ph, 1j, X, X, self.cfg)) < 1e-12

    def test_field_matches_eom(self):
        X = hamiltonian_vector_field(self.ph, 1j, self.cfg)
        dq, dp = eom(self.cfg, self.ph)
        assert np.max(np.abs(X.dq - dq)) < 1e-10
        assert np.max(np.abs(X.dp - dp)) < 1e-10
        assert X.dtau == TWO_PI_I

    def test_g0_field(self):
        cfg = CMConfig(3, 0.0, TM_I)
        X = hamiltonian_vector_field(self.ph, 1j, cfg)
        assert np.array_equal(X.dp, np.zeros(3))


class TestSymplecticJacobian:
    def test_g0_shear_exact(self):
        cfg = CMConfig(2, 0.0, TM_I)
        ph = PhasePoint([0.1 + 0.05j, 0.6 - 0.1j], [0.3, -0.2])
        res = symplectic_jacobian_check(cfg, ph, (1j, 1j + 0.05))
        assert res < 1e-9

    def test_n2_generic(self):
        cfg = CMConfig(2, 1.0, TM_I)
        ph = PhasePoint([0.15 + 0.1j, 0.55 - 0.08j], [0.2, -0.35 + 0.1j])
        res = symplectic_jacobian_check(cfg, ph, (1j, 1j + 0.05),
                                        fd_step=1e-6)
        assert res < 1e-5

    def test_composition(self):
        cfg = CMConfig(2, 1.0, TM_I)
        ph = PhasePoint([0.15 + 0.1j, 0.55 - 0.08j], [0.2, -0.35 + 0.1j])
        full = symplectic_jacobian_check(cfg, ph, (1j, 1j + 0.05))
        first = symplectic_jacobian_check(cfg, ph, (1j, 1j + 0.025))
        # transport the midpoint state and check the second half
        tr = integrate_isomonodromic(cfg, ph, (1j, 1j + 0.025), TIGHT,
                                     samples=1)
        second = symplectic_jacobian_check(cfg.with_tau(1j + 0.025),
                                           tr.states[-1],
                                           (1j + 0.025, 1j + 0.05))
        assert max(first, second) < 10 * max(full, 1e-9)

    def test_canonical_pairing_shape(self):
        omega = canonical_pairing(2)
        u = np.array([1.0, 0.0, 0.0, 0.0])
        v = np.array([0.0, 0.0, 1.0, 0.0])
        assert (u @ omega @ v) == 1.0  # dq_0 ^ dp_0 pairing
