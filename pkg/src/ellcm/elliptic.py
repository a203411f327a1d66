"""High-accuracy elliptic kernels on the torus C/(Z + tau Z).

Everything is generated by the odd theta function

    theta1(z) = 2 * sum_{k>=0} (-1)^k nu^{(k+1/2)^2} sin((2k+1) pi z),
    nu = exp(i pi tau),  Im tau > 0,

whose terms decay like nu^{k^2}.  Arguments are first reduced modulo the
lattice and the exact quasi-periodicity prefactors are restored, so the
series always runs in its fast-convergence regime.  All derivatives are
term-wise analytic; finite differences live only in test oracles.

Derived kernels:

    rho(z)   = theta1'(z) / theta1(z)              (odd, rho(z+tau) = rho(z) - 2 pi i)
    wp(z)    = -rho'(z) + theta1'''(0)/(3 theta1'(0))   (Laurent 1/z^2 + O(z^2))
    wp_dz(z) = -rho''(z)
    x(u, z)  = theta1(z-u) theta1'(0) / (theta1(z) theta1(u))
    y(u, z)  = d/du x(u, z) = -x(u, z) (rho(u) + rho(z-u))

The brute-force lattice sum for wp is retained as a cross-validation oracle
(`wp_lattice_oracle`); it converges only algebraically and is never used on
the fast path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateLatticeError, PoleProximityError, TruncationError

TWO_PI_I = 2j * math.pi

#: Evaluations closer than this (in reduced coordinates) to a lattice point
#: raise PoleProximityError instead of blowing up silently.
POLE_EXCLUSION_RADIUS = 1e-6


@dataclass(frozen=True)
class TorusModulus:
    """The lattice modulus tau in the upper half-plane, with cached nome."""

    tau: complex
    nome: complex = field(init=False)

    def __post_init__(self):
        tau = complex(self.tau)
        if not (tau.imag > 0.0):
            raise ValueError(f"tau = {tau} must lie in the upper half-plane")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "nome", cmath.exp(1j * math.pi * tau))


@dataclass(frozen=True)
class TruncationConfig:
    """Stagnation thresholds for series/product evaluation.

    ``rel_tol``: a term counts as stagnant once its magnitude drops below
    ``rel_tol`` times the running partial sum, for two consecutive terms.
    ``max_terms`` caps the loop; ``lattice_radius`` is the base half-width N
    of the brute-force wp double sum.
    """

    rel_tol: float = 1e-14
    max_terms: int = 200
    lattice_radius: int = 40

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 8:
            raise ValueError("max_terms must be at least 8")
        if self.lattice_radius < 2:
            raise ValueError("lattice_radius must be at least 2")


DEFAULT_TRUNCATION = TruncationConfig()


@dataclass(frozen=True)
class GeneralLattice:
    """A lattice with generators (omega1, omega2), orientation-normalized."""

    omega1: complex
    omega2: complex

    def normalized(self) -> tuple[complex, complex]:
        """Return generators ordered so that Im(omega2/omega1) > 0."""
        w1, w2 = complex(self.omega1), complex(self.omega2)
        if w1 == 0 or w2 == 0:
            raise DegenerateLatticeError("lattice generator is zero")
        ratio = w2 / w1
        if abs(ratio.imag) < 1e-14:
            raise DegenerateLatticeError(
                f"generators {w1}, {w2} are (numerically) collinear"
            )
        if ratio.imag < 0:
            w1, w2 = w2, w1
        return w1, w2


# ----------------------------------------------------------------------
# Lattice reduction
# ----------------------------------------------------------------------

def reduce_to_cell(z: complex, tau: complex) -> tuple[complex, int, int]:
    """Write z = w + m + n*tau with lattice coordinates of w in [-1/2, 1/2].

    Returns (w, m, n).
    """
    z = complex(z)
    b = z.imag / tau.imag
    a = z.real - b * tau.real
    m = round(a)
    n = round(b)
    return z - m - n * tau, m, n


def lattice_distance(z: complex, tau: complex) -> float:
    """Distance from z to the nearest point of Z + tau Z."""
    w, _, _ = reduce_to_cell(z, tau)
    best = abs(w)
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            if i == 0 and j == 0:
                continue
            best = min(best, abs(w - i - j * tau))
    return best


def _check_pole(z: complex, tau: complex, name: str,
                radius: float = POLE_EXCLUSION_RADIUS) -> None:
    d = lattice_distance(z, tau)
    if d < radius:
        raise PoleProximityError(z, name, d)


# ----------------------------------------------------------------------
# Theta series
# ----------------------------------------------------------------------

def _theta_series_at(w: complex, tm: TorusModulus, cfg: TruncationConfig):
    """Partial sums of theta1 and its first three z-derivatives at w.

    w must already be reduced; convergence then needs only |nome| < 1.
    """
    nu = tm.nome
    nu2 = nu * nu
    coef = cmath.exp(0.25j * math.pi * tm.tau)  # nu^{1/4}
    nu2_pow = complex(1.0)

    s = [0j, 0j, 0j, 0j]
    streak = 0
    for k in range(cfg.max_terms):
        a = (2 * k + 1) * math.pi
        arg = a * w
        sn = cmath.sin(arg)
        cs = cmath.cos(arg)
        terms = (
            2.0 * coef * sn,
            2.0 * coef * a * cs,
            -2.0 * coef * a * a * sn,
            -2.0 * coef * a * a * a * cs,
        )
        ok = True
        for i in range(4):
            s[i] += terms[i]
            if abs(terms[i]) > cfg.rel_tol * max(abs(s[i]), 1e-300):
                ok = False
        streak = streak + 1 if ok else 0
        if streak >= 2 and k >= 1:
            return tuple(s)
        nu2_pow *= nu2
        coef = -coef * nu2_pow  # (-1)^{k+1} nu^{(k+3/2)^2} relative update
    raise TruncationError("theta1 series did not stagnate", s[0])


def _theta_bundle(z: complex, tm: TorusModulus, cfg: TruncationConfig):
    """(theta1, theta1', theta1'', theta1''') at z, via reduction.

    With z = w + m + n*tau,

        theta1(z) = F(w) theta1(w),
        F(w) = (-1)^{m+n} exp(-i pi (n^2 tau + 2 n w)),

    so derivatives transform binomially with mu = -2 pi i n.
    """
    w, m, n = reduce_to_cell(z, tm.tau)
    s = _theta_series_at(w, tm, cfg)
    if m == 0 and n == 0:
        return s
    parity = -1.0 if (m + n) % 2 else 1.0
    F = parity * cmath.exp(-1j * math.pi * (n * n * tm.tau + 2 * n * w))
    mu = -TWO_PI_I * n
    t0 = s[0]
    t1 = s[1] + mu * s[0]
    t2 = s[2] + 2 * mu * s[1] + mu * mu * s[0]
    t3 = s[3] + 3 * mu * s[2] + 3 * mu * mu * s[1] + mu * mu * mu * s[0]
    return (F * t0, F * t1, F * t2, F * t3)


def _theta_ratio_bundle(z: complex, tm: TorusModulus, cfg: TruncationConfig):
    """(rho, theta1''/theta1, theta1'''/theta1) at z, prefactor-free.

    The reduction prefactor cancels in these ratios, so with mu = -2 pi i n

        rho(z)            = rho(w) + mu
        theta1''/theta1   = B(w) + 2 mu rho(w) + mu^2
        theta1'''/theta1  = T(w) + 3 mu B(w) + 3 mu^2 rho(w) + mu^3,

    valid for any representable z (the reduced series never overflows).
    """
    w, _, n = reduce_to_cell(z, tm.tau)
    s = _theta_series_at(w, tm, cfg)
    r = s[1] / s[0]
    B = s[2] / s[0]
    T = s[3] / s[0]
    if n == 0:
        return r, B, T
    mu = -TWO_PI_I * n
    return (r + mu,
            B + 2 * mu * r + mu * mu,
            T + 3 * mu * B + 3 * mu * mu * r + mu * mu * mu)


def _theta_log_prefactor(z: complex, tm: TorusModulus) -> tuple[complex, complex]:
    """(w, log F) with theta1(z) = exp(log F) theta1(w) and w reduced.

    log F = i pi (m + n) - i pi (n^2 tau + 2 n w); keeping it in log form
    lets ratios of theta values combine their prefactors additively before
    a single exponential is taken.
    """
    w, m, n = reduce_to_cell(z, tm.tau)
    return w, 1j * math.pi * ((m + n) - n * n * tm.tau - 2 * n * w)


def _theta1_dz0(tm: TorusModulus, cfg: TruncationConfig) -> complex:
    """theta1'(0) = 2 pi sum (-1)^k (2k+1) nu^{(k+1/2)^2}."""
    nu2 = tm.nome * tm.nome
    coef = cmath.exp(0.25j * math.pi * tm.tau)
    nu2_pow = complex(1.0)
    total = 0j
    streak = 0
    for k in range(cfg.max_terms):
        term = 2.0 * math.pi * (2 * k + 1) * coef
        total += term
        streak = streak + 1 if abs(term) <= cfg.rel_tol * abs(total) else 0
        if streak >= 2 and k >= 1:
            return total
        nu2_pow *= nu2
        coef = -coef * nu2_pow
    raise TruncationError("theta1'(0) series did not stagnate", total)


# ----------------------------------------------------------------------
# Public theta operations
# ----------------------------------------------------------------------

def theta1(z: complex, tm: TorusModulus,
           cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """theta1(z), summed symmetrically (terms k and -k-1 are paired)."""
    return _theta_bundle(z, tm, cfg)[0]


def theta1_dz(z: complex, tm: TorusModulus,
              cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """theta1'(z) by term-wise differentiation of the series."""
    return _theta_bundle(z, tm, cfg)[1]


def theta1_d3z_at_0(tm: TorusModulus,
                    cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """theta1'''(0) = -2 pi^3 sum (-1)^k (2k+1)^3 nu^{(k+1/2)^2}."""
    nu2 = tm.nome * tm.nome
    coef = cmath.exp(0.25j * math.pi * tm.tau)
    nu2_pow = complex(1.0)
    total = 0j
    streak = 0
    for k in range(cfg.max_terms):
        a = (2 * k + 1) * math.pi
        term = -2.0 * a * a * a * coef
        total += term
        streak = streak + 1 if abs(term) <= cfg.rel_tol * abs(total) else 0
        if streak >= 2 and k >= 1:
            return total
        nu2_pow *= nu2
        coef = -coef * nu2_pow
    raise TruncationError("theta1'''(0) series did not stagnate", total)


def theta1_product(z: complex, tm: TorusModulus,
                   cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """theta1(z) via the triple-product form

        -2 nu^{1/4} cos(pi (z+1/2))
            prod_m (1 - nu^{2m}) (1 + 2 cos(2 pi (z+1/2)) nu^{2m} + nu^{4m}),

    reduced and prefactored exactly like the series path.
    """
    w, m, n = reduce_to_cell(z, tm.tau)
    nu = tm.nome
    nu2 = nu * nu
    c1 = cmath.cos(math.pi * (w + 0.5))
    c2 = cmath.cos(2 * math.pi * (w + 0.5))
    prod = -2.0 * cmath.exp(0.25j * math.pi * tm.tau) * c1
    nu2_pow = complex(1.0)
    streak = 0
    converged = False
    for k in range(1, cfg.max_terms + 1):
        nu2_pow *= nu2
        factor = (1.0 - nu2_pow) * (1.0 + 2.0 * c2 * nu2_pow + nu2_pow * nu2_pow)
        prod *= factor
        if abs(factor - 1.0) <= cfg.rel_tol:
            streak += 1
            if streak >= 2:
                converged = True
                break
        else:
            streak = 0
    if not converged:
        raise TruncationError("theta1 product did not stagnate", prod)
    if m == 0 and n == 0:
        return prod
    parity = -1.0 if (m + n) % 2 else 1.0
    return parity * cmath.exp(-1j * math.pi * (n * n * tm.tau + 2 * n * w)) * prod


# ----------------------------------------------------------------------
# rho, wp and friends
# ----------------------------------------------------------------------

def rho(z: complex, tm: TorusModulus,
        cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """rho(z) = theta1'(z)/theta1(z)."""
    _check_pole(z, tm.tau, "z")
    return _theta_ratio_bundle(z, tm, cfg)[0]


def rho_dz(z: complex, tm: TorusModulus,
           cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """rho'(z) = theta1''/theta1 - rho^2."""
    _check_pole(z, tm.tau, "z")
    r, B, _ = _theta_ratio_bundle(z, tm, cfg)
    return B - r * r


def weierstrass_constant(tm: TorusModulus,
                         cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """theta1'''(0) / (3 theta1'(0)): the constant making wp = -rho' + c
    free of a constant term in its Laurent expansion at 0."""
    return theta1_d3z_at_0(tm, cfg) / (3.0 * _theta1_dz0(tm, cfg))


def wp(z: complex, tm: TorusModulus,
       cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """Weierstrass wp(z, tau), theta fast path: -rho'(z) + theta1'''(0)/(3 theta1'(0))."""
    _check_pole(z, tm.tau, "z")
    r, B, _ = _theta_ratio_bundle(z, tm, cfg)
    return r * r - B + weierstrass_constant(tm, cfg)


def wp_dz(z: complex, tm: TorusModulus,
          cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """wp'(z, tau) = -rho''(z), fully analytic."""
    _check_pole(z, tm.tau, "z")
    r, B, T = _theta_ratio_bundle(z, tm, cfg)
    return 3.0 * r * B - T - 2.0 * r * r * r


# ----------------------------------------------------------------------
# Brute-force lattice-sum oracle
# ----------------------------------------------------------------------

def _wp_sum_raw(z: complex, tau: complex, radius: int) -> complex:
    """1/z^2 + sum over 0 < max(|m|,|n|) <= radius of the defining summand."""
    rng = np.arange(-radius, radius + 1)
    m, n = np.meshgrid(rng, rng, indexing="ij")
    lam = m + n * tau
    lam = lam[(m != 0) | (n != 0)]
    terms = 1.0 / (z + lam) ** 2 - 1.0 / lam**2
    return complex(1.0 / z**2 + terms.sum())


def wp_lattice_oracle(z: complex, tm: TorusModulus,
                      cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """wp by direct truncated double sum with Richardson extrapolation in 1/N.

    The square cutoff leaves a truncation error a/N^2 + b/N^3 + c/N^4 + ...;
    evaluating at N, 2N, 4N, 8N and eliminating the first three powers leaves
    O(N^-5).  Test oracle only: O((8N)^2) summands per call.
    """
    _check_pole(z, tm.tau, "z")
    base = cfg.lattice_radius
    radii = [base, 2 * base, 4 * base, 8 * base]
    vals = np.array([_wp_sum_raw(z, tm.tau, r) for r in radii])
    # Solve S + a/N^2 + b/N^3 + c/N^4 = S_N for S.
    mat = np.array(
        [[1.0, r**-2.0, r**-3.0, r**-4.0] for r in radii], dtype=complex
    )
    sol = np.linalg.solve(mat, vals)
    return complex(sol[0])


# ----------------------------------------------------------------------
# General lattices by homogeneity
# ----------------------------------------------------------------------

def wp_general(z: complex, lat: GeneralLattice,
               cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """wp(z, Lambda) = omega1^{-2} wp(z/omega1, omega2/omega1)."""
    w1, w2 = lat.normalized()
    tm = TorusModulus(w2 / w1)
    return wp(z / w1, tm, cfg) / (w1 * w1)


def wp_dz_general(z: complex, lat: GeneralLattice,
                  cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """wp'(z, Lambda) = omega1^{-3} wp'(z/omega1, omega2/omega1)."""
    w1, w2 = lat.normalized()
    tm = TorusModulus(w2 / w1)
    return wp_dz(z / w1, tm, cfg) / (w1 * w1 * w1)


# ----------------------------------------------------------------------
# Lame functions
# ----------------------------------------------------------------------

def _lame_x_value(u: complex, z: complex, tm: TorusModulus,
                  cfg: TruncationConfig) -> complex:
    """x via reduced theta values, with the three reduction prefactors
    combined additively in log form (their individual exponentials can
    overflow at arguments where x itself is perfectly representable)."""
    w_u, log_u = _theta_log_prefactor(u, tm)
    w_z, log_z = _theta_log_prefactor(z, tm)
    w_zu, log_zu = _theta_log_prefactor(z - u, tm)
    s_u = _theta_series_at(w_u, tm, cfg)[0]
    s_z = _theta_series_at(w_z, tm, cfg)[0]
    s_zu = _theta_series_at(w_zu, tm, cfg)[0]
    return (cmath.exp(log_zu - log_z - log_u) * s_zu
            * _theta1_dz0(tm, cfg) / (s_z * s_u))


def _lame_core(u: complex, z: complex, tm: TorusModulus, cfg: TruncationConfig):
    """Shared pieces for x(u,z) and everything derived from it.

    Returns (x, rho_u, rho_zu, rho_z, rho_dz_zu) where zu := z - u.
    Pole checks for u and z are done here; the z-u check is left to callers
    that actually divide by theta1(z-u)-free quantities (rho at z-u).
    """
    _check_pole(u, tm.tau, "u")
    _check_pole(z, tm.tau, "z")
    x = _lame_x_value(u, z, tm, cfg)
    rho_u = _theta_ratio_bundle(u, tm, cfg)[0]
    rho_z = _theta_ratio_bundle(z, tm, cfg)[0]
    if lattice_distance(z - u, tm.tau) == 0.0:
        raise PoleProximityError(z - u, "z - u", 0.0)
    rho_zu, B_zu, _ = _theta_ratio_bundle(z - u, tm, cfg)
    rho_dz_zu = B_zu - rho_zu * rho_zu
    return x, rho_u, rho_zu, rho_z, rho_dz_zu


def lame_x(u: complex, z: complex, tm: TorusModulus,
           cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """x(u, z) = theta1(z-u) theta1'(0) / (theta1(z) theta1(u))."""
    _check_pole(u, tm.tau, "u")
    _check_pole(z, tm.tau, "z")
    return _lame_x_value(u, z, tm, cfg)


def lame_y(u: complex, z: complex, tm: TorusModulus,
           cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """y(u, z) = d/du x(u, z) = -x(u, z) (rho(u) + rho(z-u))."""
    _check_pole(z - u, tm.tau, "z - u")
    x, rho_u, rho_zu, _, _ = _lame_core(u, z, tm, cfg)
    return -x * (rho_u + rho_zu)


def lame_x_dz(u: complex, z: complex, tm: TorusModulus,
              cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """d/dz x(u, z) = x(u, z) (rho(z-u) - rho(z))."""
    _check_pole(z - u, tm.tau, "z - u")
    x, _, rho_zu, rho_z, _ = _lame_core(u, z, tm, cfg)
    return x * (rho_zu - rho_z)


def lame_x_dtau(u: complex, z: complex, tm: TorusModulus,
                cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """d/dtau x(u, z), via the mixed heat equation

        2 pi i dx/dtau + d^2 x / du dz = 0,

    with the mixed partial evaluated analytically:
        d^2x/dudz = y (rho(z-u) - rho(z)) - x rho'(z-u).
    """
    _check_pole(z - u, tm.tau, "z - u")
    x, rho_u, rho_zu, rho_z, rho_dz_zu = _lame_core(u, z, tm, cfg)
    y = -x * (rho_u + rho_zu)
    mixed = y * (rho_zu - rho_z) - x * rho_dz_zu
    return -mixed / TWO_PI_I


def lame_y_dz(u: complex, z: complex, tm: TorusModulus,
              cfg: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """d/dz y(u, z) = -x_dz (rho(u) + rho(z-u)) - x rho'(z-u)."""
    _check_pole(z - u, tm.tau, "z - u")
    x, rho_u, rho_zu, rho_z, rho_dz_zu = _lame_core(u, z, tm, cfg)
    x_dz = x * (rho_zu - rho_z)
    return -x_dz * (rho_u + rho_zu) - x * rho_dz_zu
