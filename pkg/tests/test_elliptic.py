import cmath
import math

import pytest

from ellcm.elliptic import (
    GeneralLattice,
    TorusModulus,
    TruncationConfig,
    lame_x,
    lame_x_dtau,
    lame_x_dz,
    lame_y,
    lattice_distance,
    rho,
    theta1,
    theta1_d3z_at_0,
    theta1_dz,
    theta1_product,
    wp,
    wp_dz,
    wp_dz_general,
    wp_general,
    wp_lattice_oracle,
)
from ellcm.errors import (
    DegenerateLatticeError,
    PoleProximityError,
    TruncationError,
)
from ellcm.rng import SplitMix64

from _oracles import fd6_richardson, fd_central, fd_third_at_0, theta1_direct

TM_I = TorusModulus(1j)
TWO_PI_I = 2j * math.pi


class TestTorusModulus:
    def test_nome_cached(self):
        tm = TorusModulus(0.3 + 0.9j)
        assert tm.nome == cmath.exp(1j * math.pi * (0.3 + 0.9j))
        assert abs(tm.nome) < 1

    def test_lower_half_plane_rejected(self):
        with pytest.raises(ValueError):
            TorusModulus(0.5 - 0.1j)
        with pytest.raises(ValueError):
            TorusModulus(0.7)

    def test_truncation_validation(self):
        with pytest.raises(ValueError):
            TruncationConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            TruncationConfig(max_terms=4)
        with pytest.raises(ValueError):
            TruncationConfig(lattice_radius=1)


class TestTheta1:
    def test_zero_at_origin(self):
        assert abs(theta1(0, TM_I)) < 1e-12

    def test_zero_at_lattice_points(self):
        for z in (1.0, 1j, 2 + 1j, -1 + 1j):
            assert abs(theta1(z, TM_I)) < 1e-12

    def test_antiperiodicity(self):
        z = 0.2 + 0.1j
        assert abs(theta1(z + 1, TM_I) + theta1(z, TM_I)) < 1e-13

    def test_reference_value(self):
        # frozen from the direct defining-series oracle (1e-14 stagnation)
        expected = 1.0744053196400076 + 0.0j
        assert abs(theta1(0.3, TorusModulus(0.5j)) - expected) < 1e-14
        assert abs(theta1_direct(0.3, 0.5j) - expected) < 1e-14

    def test_against_direct_sum_oracle(self):
        rng = SplitMix64(11)
        for _ in range(20):
            tau = rng.tau()
            z = rng.complex_in_box(-1.5, 1.5, -0.8, 0.8)
            a = theta1(z, TorusModulus(tau))
            b = theta1_direct(z, tau)
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))

    def test_quasi_periodicity_b_cycle(self):
        z = 0.37 + 0.21j
        lhs = theta1(z + 1j, TM_I)
        rhs = -cmath.exp(-1j * math.pi * (1j + 2 * z)) * theta1(z, TM_I)
        assert abs(lhs - rhs) / abs(rhs) < 1e-10

    def test_truncation_failure_carries_partial(self):
        cfg = TruncationConfig(rel_tol=1e-14, max_terms=8)
        # nome close to 1: eight terms cannot reach stagnation
        with pytest.raises(TruncationError) as err:
            theta1(0.3, TorusModulus(0.02j), cfg)
        assert err.value.partial is not None

    def test_external_convention_cross_check(self):
        # paper-normalized theta1(z) equals the classical odd theta with
        # argument pi z and nome exp(i pi tau)
        mp = pytest.importorskip("mpmath")
        for z, tau in [(0.23 + 0.11j, 0.9j), (0.4, 0.3 + 0.8j)]:
            got = theta1(z, TorusModulus(tau))
            ref = complex(mp.jtheta(1, mp.pi * mp.mpc(z),
                                    mp.exp(1j * mp.pi * mp.mpc(tau))))
            assert abs(got - ref) < 1e-12 * max(1.0, abs(ref))


class TestTheta1Product:
    def test_zero_at_origin(self):
        assert abs(theta1_product(0, TM_I)) < 1e-12

    def test_matches_series(self):
        z, tau = 0.13 + 0.07j, 0.3 + 0.9j
        tm = TorusModulus(tau)
        assert abs(theta1_product(z, tm) - theta1(z, tm)) < 1e-10

    def test_antiperiodicity(self):
        tm = TorusModulus(2j)
        assert abs(theta1_product(1.4, tm) + theta1_product(0.4, tm)) < 1e-12

    def test_truncation_failure(self):
        cfg = TruncationConfig(rel_tol=1e-14, max_terms=8)
        with pytest.raises(TruncationError) as err:
            theta1_product(0.3, TorusModulus(0.02j), cfg)
        assert err.value.partial is not None

    def test_matches_series_at_random_points(self):
        rng = SplitMix64(5)
        for _ in range(20):
            tau = rng.tau()
            z = rng.cell_point(tau)
            tm = TorusModulus(tau)
            a, b = theta1(z, tm), theta1_product(z, tm)
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


class TestTheta1Derivatives:
    def test_dz_even(self):
        assert abs(theta1_dz(-0.2, TM_I) - theta1_dz(0.2, TM_I)) < 1e-13

    def test_dz_at_zero_matches_product_limit(self):
        # 2 pi nu^{1/4} prod (1 - nu^2m)(1 - 2 nu^2m + nu^4m)
        nu = TM_I.nome
        prod = 2 * math.pi * nu**0.25
        for m in range(1, 60):
            prod *= (1 - nu ** (2 * m)) * (1 - 2 * nu ** (2 * m)
                                           + nu ** (4 * m))
        assert abs(theta1_dz(0, TM_I) - prod) < 1e-13

    def test_dz_reference_fd(self):
        tm = TorusModulus(0.7j)
        got = theta1_dz(0.3 + 0.1j, tm)
        # frozen from the 6-point FD + Richardson oracle
        expected = 2.4253384787246093 - 0.89171800983892657j
        assert abs(got - expected) < 1e-10
        assert abs(fd6_richardson(lambda w: theta1(w, tm), 0.3 + 0.1j)
                   - got) < 1e-10

    def test_d3z_real_for_imaginary_tau(self):
        v = theta1_d3z_at_0(TorusModulus(0.9j))
        assert abs(v.imag) < 1e-12 * abs(v)

    def test_d3z_reference_fd(self):
        tm = TorusModulus(0.8j)
        got = theta1_d3z_at_0(tm)
        assert abs(fd_third_at_0(lambda w: theta1(w, tm)) - got) < 1e-4
        # frozen FD value
        assert abs(got - (-27.22320489846434)) < 1e-4

    def test_rho_small_z_expansion_coefficient(self):
        # rho(z) - 1/z ~ (theta1'''(0)/(3 theta1'(0))) z
        z = 1e-3
        c = theta1_d3z_at_0(TM_I) / (3 * theta1_dz(0, TM_I))
        assert abs((rho(z, TM_I) - 1 / z) - c * z) < 1e-6


class TestRho:
    def test_odd(self):
        z = 0.25 + 0.1j
        assert abs(rho(-z, TM_I) + rho(z, TM_I)) < 1e-12

    def test_additive_quasi_periodicity(self):
        tm = TorusModulus(0.9j)
        assert abs(rho(0.3 + 0.9j, tm) - rho(0.3, tm) + TWO_PI_I) < 1e-11

    def test_a_periodicity(self):
        assert abs(rho(0.3 + 1, TM_I) - rho(0.3, TM_I)) < 1e-12

    def test_simple_pole(self):
        z = 1e-4
        assert abs(z * rho(z, TM_I) - 1) < 1e-6

    def test_pole_guard(self):
        with pytest.raises(PoleProximityError):
            rho(1 + 1j + 1e-9, TM_I)


class TestWp:
    def test_even(self):
        z = 0.31 + 0.12j
        assert abs(wp(-z, TM_I) - wp(z, TM_I)) < 1e-12

    def test_double_periodicity(self):
        tau = 0.4 + 1.1j
        tm = TorusModulus(tau)
        z = 0.2 + 0.3j
        assert abs(wp(z + 1, tm) - wp(z, tm)) < 1e-12
        assert abs(wp(z + tau, tm) - wp(z, tm)) < 1e-12

    def test_reference_against_lattice_oracle(self):
        tm = TorusModulus(0.5 + 0.8j)
        got = wp(0.37 + 0.21j, tm)
        # frozen from the Richardson-extrapolated lattice sum
        expected = 1.9764075483841423 - 4.1571666342311246j
        assert abs(got - expected) < 1e-10

    def test_leading_pole(self):
        z = 1e-3
        assert abs(z * z * wp(z, TM_I) - 1) < 1e-5

    def test_oracle_agreement(self):
        rng = SplitMix64(7)
        for _ in range(8):
            z = rng.cell_point(1j)
            assert abs(wp(z, TM_I) - wp_lattice_oracle(z, TM_I)) < 1e-8

    def test_oracle_evenness(self):
        z = 0.23 + 0.31j
        a = wp_lattice_oracle(z, TM_I)
        b = wp_lattice_oracle(-z, TM_I)
        assert abs(a - b) < 1e-12 * abs(a)

    def test_oracle_leading_pole(self):
        z = 1e-3
        assert abs(z * z * wp_lattice_oracle(z, TM_I) - 1) < 1e-5


class TestWpDz:
    def test_odd(self):
        assert abs(wp_dz(-0.27, TM_I) + wp_dz(0.27, TM_I)) < 1e-11

    def test_landin(self):
        tau = 1.4j
        z = 0.23 + 0.11j
        lhs = wp_dz(z, TorusModulus(tau / 2))
        tm = TorusModulus(tau)
        rhs = wp_dz(z, tm) + wp_dz(z + tau / 2, tm)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))

    def test_fd_consistency(self):
        rng = SplitMix64(13)
        for _ in range(10):
            tau = rng.tau()
            tm = TorusModulus(tau)
            z = rng.cell_point(tau)
            fd = fd_central(lambda w: wp(w, tm), z, 1e-5)
            assert abs(wp_dz(z, tm) - fd) < 1e-6 * max(1.0, abs(fd))


class TestWeierstrassCubic:
    """wp and wp_dz jointly satisfy wp'^2 = 4 wp^3 - g2 wp - g3 with the
    invariants computed by independent Eisenstein lattice sums."""

    @staticmethod
    def _eisenstein(tau, power, N):
        import numpy as np
        rng = np.arange(-N, N + 1)
        m, n = np.meshgrid(rng, rng, indexing="ij")
        lam = m + n * tau
        lam = lam[(m != 0) | (n != 0)]
        return complex(np.sum(lam ** -float(power)))

    @classmethod
    def _eisenstein_rich(cls, tau, power, N=60):
        import numpy as np
        radii = [N, 2 * N, 4 * N, 8 * N]
        vals = np.array([cls._eisenstein(tau, power, r) for r in radii])
        mat = np.array([[1.0, r**-2.0, r**-3.0, r**-4.0] for r in radii],
                       dtype=complex)
        return complex(np.linalg.solve(mat, vals)[0])

    @pytest.mark.parametrize("tau", [1j, 0.5 + 0.8j, 0.3 + 1.2j])
    def test_cubic_relation(self, tau):
        tm = TorusModulus(tau)
        g2 = 60.0 * self._eisenstein_rich(tau, 4)
        g3 = 140.0 * self._eisenstein_rich(tau, 6)
        rng = SplitMix64(99)
        for _ in range(6):
            z = rng.cell_point(tau)
            P, Pp = wp(z, tm), wp_dz(z, tm)
            res = Pp * Pp - (4 * P**3 - g2 * P - g3)
            assert abs(res) <= 1e-10 * max(1.0, abs(Pp * Pp))

    def test_lemniscatic_invariants(self):
        # square lattice: g3 vanishes and g2 is the classical constant
        g2 = 60.0 * self._eisenstein_rich(1j, 4)
        g3 = 140.0 * self._eisenstein_rich(1j, 6)
        assert abs(g3) < 1e-10
        assert abs(g2 - 189.07272012923385) < 1e-9


class TestGeneralLattice:
    def test_homogeneity_wp(self):
        j = 1.7 - 0.2j
        lhs = wp_general(0.21, GeneralLattice(1, 1j))
        rhs = j**2 * wp_general(j * 0.21, GeneralLattice(j, 1j * j))
        assert abs(lhs - rhs) <= 1e-9 * abs(lhs)

    def test_homogeneity_wp_dz(self):
        j = 1.7 - 0.2j
        lhs = wp_dz_general(0.21, GeneralLattice(1, 1j))
        rhs = j**3 * wp_dz_general(j * 0.21, GeneralLattice(j, 1j * j))
        assert abs(lhs - rhs) <= 1e-9 * abs(lhs)

    def test_identity_scaling(self):
        assert wp_general(0.21, GeneralLattice(1, 1j)) == wp(0.21, TM_I)

    def test_orientation_normalization(self):
        # swapped generators describe the same lattice
        a = wp_general(0.2 + 0.1j, GeneralLattice(1, 1j))
        b = wp_general(0.2 + 0.1j, GeneralLattice(1j, 1))
        assert abs(a - b) < 1e-12 * abs(a)

    def test_degenerate_lattice(self):
        with pytest.raises(DegenerateLatticeError):
            wp_general(0.2, GeneralLattice(1.0, 2.0))

    def test_against_direct_general_sum(self):
        from _oracles import wp_direct_general
        w1, w2 = 1.3 - 0.1j, 0.4 + 1.2j
        z = 0.31 + 0.22j
        direct = wp_direct_general(z, w1, w2, radius=200)
        assert abs(wp_general(z, GeneralLattice(w1, w2)) - direct) < 5e-3


class TestLame:
    def test_x_periodic_in_z_a_cycle(self):
        u, z = 0.3, 0.2 + 0.1j
        assert abs(lame_x(u, z + 1, TM_I) - lame_x(u, z, TM_I)) < 1e-12

    def test_x_quasi_periodic_in_z_b_cycle(self):
        u, z = 0.3, 0.2 + 0.1j
        lhs = lame_x(u, z + 1j, TM_I)
        rhs = cmath.exp(TWO_PI_I * u) * lame_x(u, z, TM_I)
        assert abs(lhs - rhs) / abs(rhs) < 1e-10

    def test_x_quasi_periodic_in_u(self):
        u, z = 0.31 + 0.07j, 0.44
        x0 = lame_x(u, z, TM_I)
        assert abs(lame_x(u + 1, z, TM_I) - x0) / abs(x0) < 1e-10
        lhs = lame_x(u + 1j, z, TM_I)
        rhs = cmath.exp(TWO_PI_I * z) * x0
        assert abs(lhs - rhs) / abs(rhs) < 1e-10

    def test_x_pole_in_z(self):
        z = 1e-4
        assert abs(z * lame_x(0.3, z, TM_I) + 1) < 1e-3

    def test_x_expansion_in_u(self):
        u, z = 1e-4, 0.44
        assert abs(u * lame_x(u, z, TM_I) - 1) < 1e-3
        assert abs(lame_x(u, z, TM_I) - 1 / u + rho(z, TM_I)) < 1e-3

    def test_y_is_u_derivative(self):
        u, z = 0.31 + 0.07j, 0.44
        fd = fd_central(lambda w: lame_x(w, z, TM_I), u, 1e-6)
        assert abs(lame_y(u, z, TM_I) - fd) < 1e-6

    def test_y_periodic_in_z_a_cycle(self):
        u, z = 0.3, 0.2 + 0.1j
        assert abs(lame_y(u, z + 1, TM_I) - lame_y(u, z, TM_I)) < 1e-12

    def test_wronskian_identity(self):
        tm = TorusModulus(0.8j)
        u, z = 0.29, 0.51
        lhs = (lame_x(u, z, tm) * lame_y(-u, z, tm)
               - lame_y(u, z, tm) * lame_x(-u, z, tm))
        assert abs(lhs - wp_dz(u, tm)) <= 1e-10 * max(1.0, abs(lhs))

    def test_x_dz_fd(self):
        u, z = 0.31 + 0.05j, 0.44 - 0.03j
        fd = fd_central(lambda w: lame_x(u, w, TM_I), z, 1e-6)
        assert abs(lame_x_dz(u, z, TM_I) - fd) < 1e-6

    def test_x_dtau_fd(self):
        u, z = 0.31, 0.44
        fd = (lame_x(u, z, TorusModulus(1j + 1e-5))
              - lame_x(u, z, TorusModulus(1j - 1e-5))) / 2e-5
        assert abs(lame_x_dtau(u, z, TM_I) - fd) < 1e-7

    def test_pole_guard_names_variable(self):
        with pytest.raises(PoleProximityError) as err:
            lame_x(1 + 1j, 0.4, TM_I)
        assert err.value.variable == "u"
        with pytest.raises(PoleProximityError) as err:
            lame_y(0.3, 0.3 + 1e-9, TM_I)  # z - u on the lattice
        assert "z - u" in err.value.variable


class TestLatticeDistance:
    def test_at_lattice_point(self):
        assert lattice_distance(2 + 3j, 1j) < 1e-14

    def test_generic(self):
        assert abs(lattice_distance(0.5, 1j) - 0.5) < 1e-14

    def test_near_far_corner(self):
        d = lattice_distance(0.999 + 0.999j, 1j)
        assert d == pytest.approx(abs(0.999 + 0.999j - (1 + 1j)), rel=1e-10)
