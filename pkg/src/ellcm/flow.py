"""Non-autonomous Hamiltonian integration and the extended 2-form machinery.

Two time conventions:

  * isospectral: d/dt (q, p) = eom at frozen tau (autonomous, H conserved);
  * isomonodromic: 2 pi i d/dtau (q, p) = eom, tau entering the elliptic
    kernels as well (non-autonomous, monodromy preserved instead).

Complex "times" are integrated along straight segments parameterized by a
real arc variable; the embedded Dormand-Prince 5(4) pair supplies the local
error estimate for step control, and a classic fixed-step RK4 is available
for convergence studies.

The extended phase space (q, p, tau) carries

    Omega_iso(u, v) = sum_j (dq_j ^ dp_j)(u, v) + (1/(2 pi i)) (dH ^ dtau)(u, v),

whose kernel is spanned by the flow field
X_H = (dH/dp, -dH/dq, 2 pi i).  (With a minus sign on the dH ^ dtau term
the displayed X_H would not be annihilated; the plus sign is forced by
i_{X_H} Omega = 0 together with the canonical fiber restriction.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from .calogero import CMConfig, PhasePoint, eom, hamiltonian_cm, hamiltonian_gradient, min_separation
from .elliptic import DEFAULT_TRUNCATION, TruncationConfig
from .errors import IntegrationError, PathError, PoleProximityError
from .painleve import EllipticState, PainleveParams, scalar_painleve_rhs

TWO_PI_I = 2j * math.pi

FlowKind = Literal["isospectral_t", "isomonodromic_tau"]

# Collision thresholds for the pairwise reduced separation (wp' grows like
# separation^-3, so both FD and step control degrade below these).
COLLISION_REJECT = 1e-4
COLLISION_TRUNCATE = 1e-6


@dataclass(frozen=True)
class IntegratorConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    initial_step: float = 1e-2
    max_steps: int = 200_000
    method: Literal["rk4_fixed", "rk45_adaptive"] = "rk45_adaptive"

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.initial_step <= 0:
            raise ValueError("initial_step must be positive")


@dataclass
class Diagnostics:
    steps_accepted: int = 0
    steps_rejected: int = 0
    max_local_error: float = 0.0
    truncated: bool = False
    message: str = ""


@dataclass(eq=False)
class Trajectory:
    kind: FlowKind
    times: list[complex]
    states: list[PhasePoint]
    tau_of_sample: list[complex]
    diagnostics: Diagnostics

    def q_array(self) -> np.ndarray:
        return np.array([s.q for s in self.states])

    def p_array(self) -> np.ndarray:
        return np.array([s.p for s in self.states])


@dataclass(frozen=True, eq=False)
class ExtendedTangent:
    """A tangent vector (dq, dp, dtau) of the extended phase space."""

    dq: np.ndarray
    dp: np.ndarray
    dtau: complex

    def __post_init__(self):
        object.__setattr__(self, "dq", np.asarray(self.dq, dtype=complex))
        object.__setattr__(self, "dp", np.asarray(self.dp, dtype=complex))
        object.__setattr__(self, "dtau", complex(self.dtau))


# ----------------------------------------------------------------------
# Dormand-Prince 5(4) and classic RK4 on complex segments
# ----------------------------------------------------------------------

_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
          187 / 2100, 1 / 40)


def _dp_step(f, s, y, h):
    """One Dormand-Prince step; returns (y5, error_vector)."""
    k = [f(s, y)]
    for i in range(1, 7):
        acc = np.zeros_like(y)
        for j, a in enumerate(_DP_A[i]):
            if a != 0.0:
                acc = acc + a * k[j]
        k.append(f(s + _DP_C[i] * h, y + h * acc))
    y5 = y + h * sum(b * ki for b, ki in zip(_DP_B5, k) if b != 0.0)
    y4 = y + h * sum(b * ki for b, ki in zip(_DP_B4, k) if b != 0.0)
    return y5, y5 - y4


def _rk4_step(f, s, y, h):
    k1 = f(s, y)
    k2 = f(s + h / 2, y + h / 2 * k1)
    k3 = f(s + h / 2, y + h / 2 * k2)
    k4 = f(s + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_segment(f: Callable, y0: np.ndarray, length: float,
                      icfg: IntegratorConfig,
                      diag: Diagnostics,
                      sample_at: Sequence[float] = (),
                      on_sample: Callable | None = None,
                      separation: Callable | None = None) -> np.ndarray:
    """Drive dy/ds = f(s, y) from s = 0 to s = length (real arc parameter).

    ``sample_at`` lists interior arc positions the stepper must hit exactly
    (``on_sample(s, y)`` fires there and at the endpoint).  ``separation``
    maps a state to its smallest reduced pairwise distance; a proposed step
    ending below COLLISION_REJECT is rejected and retried shorter, below
    COLLISION_TRUNCATE the trajectory is truncated with the flag set on
    ``diag`` (wp' ~ separation^-3 makes both stepping and error estimates
    meaningless past that point).
    """
    y = np.asarray(y0, dtype=complex)
    s = 0.0
    targets = sorted(set(list(sample_at) + [length]))
    targets = [t for t in targets if t > 1e-15]
    adaptive = icfg.method == "rk45_adaptive"
    h = min(icfg.initial_step, length)
    ti = 0
    while ti < len(targets):
        if diag.steps_accepted + diag.steps_rejected > icfg.max_steps:
            raise IntegrationError(
                f"exceeded max_steps = {icfg.max_steps} at s = {s:.6g}")
        target = targets[ti]
        h_try = min(h, target - s)
        if adaptive:
            try:
                y_new, err = _dp_step(f, s, y, h_try)
            except PoleProximityError as exc:
                diag.truncated = True
                diag.message = f"collision at s = {s:.6g}: {exc}"
                return y
            scale = icfg.abs_tol + icfg.rel_tol * np.maximum(np.abs(y),
                                                             np.abs(y_new))
            ratio = float(np.max(np.abs(err) / scale))
            sep = separation(y_new) if separation is not None else math.inf
            if sep < COLLISION_TRUNCATE:
                diag.truncated = True
                diag.message = (f"collision at s = {s:.6g}: "
                                f"min separation {sep:.3e}")
                return y
            if ratio <= 1.0 and sep >= COLLISION_REJECT:
                diag.steps_accepted += 1
                diag.max_local_error = max(diag.max_local_error,
                                           float(np.max(np.abs(err))))
                s += h_try
                y = y_new
                h = h_try * (min(5.0, max(0.2, 0.9 * ratio ** -0.2))
                             if ratio > 0 else 5.0)
            elif ratio > 1.0:
                diag.steps_rejected += 1
                h = h_try * min(5.0, max(0.2, 0.9 * ratio ** -0.2))
            else:
                # error fine but separation entering the reject band
                diag.steps_rejected += 1
                h = 0.5 * h_try
            if h < 1e-14 * max(length, 1.0):
                diag.truncated = True
                diag.message = f"step collapsed at s = {s:.6g}"
                return y
        else:
            try:
                y_new = _rk4_step(f, s, y, h_try)
            except PoleProximityError as exc:
                diag.truncated = True
                diag.message = f"collision at s = {s:.6g}: {exc}"
                return y
            sep = separation(y_new) if separation is not None else math.inf
            if sep < COLLISION_TRUNCATE:
                diag.truncated = True
                diag.message = (f"collision at s = {s:.6g}: "
                                f"min separation {sep:.3e}")
                return y
            diag.steps_accepted += 1
            s += h_try
            y = y_new
        if abs(s - target) < 1e-13 * max(1.0, length):
            s = target
            if on_sample is not None:
                on_sample(s, y)
            ti += 1
    return y


# ----------------------------------------------------------------------
# Flows
# ----------------------------------------------------------------------

def _pack(ph: PhasePoint) -> np.ndarray:
    return np.concatenate([ph.q, ph.p])


def _unpack(y: np.ndarray, n: int) -> PhasePoint:
    return PhasePoint(y[:n], y[n:])


def _sample_positions(length: float, num: int) -> list[float]:
    if num <= 1:
        return []
    return [length * i / num for i in range(1, num)]


def integrate_isospectral(cfg: CMConfig, ph0: PhasePoint,
                          t_span: tuple[float, float],
                          icfg: IntegratorConfig = IntegratorConfig(),
                          trunc: TruncationConfig = DEFAULT_TRUNCATION,
                          samples: int = 16) -> Trajectory:
    """Autonomous flow d(q, p)/dt = eom at frozen tau; conserves H."""
    t0, t1 = float(t_span[0]), float(t_span[1])
    length = abs(t1 - t0)
    if length == 0:
        raise ValueError("empty time span")
    direction = (t1 - t0) / length
    n = cfg.n

    def f(s, y):
        dq, dp = eom(cfg, _unpack(y, n), trunc)
        return direction * np.concatenate([dq, dp])

    def sep_fn(y):
        return min_separation(cfg, _unpack(y, n))

    diag = Diagnostics()
    tau = cfg.tm.tau
    traj = Trajectory("isospectral_t", [complex(t0)], [ph0], [tau], diag)

    def on_sample(s, y):
        traj.times.append(t0 + direction * s)
        traj.states.append(_unpack(y, n))
        traj.tau_of_sample.append(tau)

    guard_fn = sep_fn if cfg.g != 0 and n > 1 else None
    integrate_segment(f, _pack(ph0), length, icfg, diag,
                      sample_at=_sample_positions(length, samples),
                      on_sample=on_sample, separation=guard_fn)
    return traj


def integrate_isomonodromic(cfg: CMConfig, ph0: PhasePoint,
                            tau_path: tuple[complex, complex],
                            icfg: IntegratorConfig = IntegratorConfig(),
                            trunc: TruncationConfig = DEFAULT_TRUNCATION,
                            samples: int = 16) -> Trajectory:
    """Non-autonomous tau-flow 2 pi i d(q, p)/dtau = eom along a straight
    segment in the upper half-plane."""
    tau0, tau1 = complex(tau_path[0]), complex(tau_path[1])
    if tau0.imag <= 0 or tau1.imag <= 0:
        raise PathError(f"tau path [{tau0}, {tau1}] leaves the upper half-plane")
    length = abs(tau1 - tau0)
    if length == 0:
        raise ValueError("empty tau path")
    direction = (tau1 - tau0) / length
    n = cfg.n

    def f(s, y):
        tau = tau0 + direction * s
        dq, dp = eom(cfg.with_tau(tau), _unpack(y, n), trunc)
        return direction * np.concatenate([dq, dp]) / TWO_PI_I

    def sep_fn(y):
        return min_separation(cfg, _unpack(y, n))

    diag = Diagnostics()
    traj = Trajectory("isomonodromic_tau", [tau0], [ph0], [tau0], diag)

    def on_sample(s, y):
        tau = tau0 + direction * s
        traj.times.append(tau)
        traj.states.append(_unpack(y, n))
        traj.tau_of_sample.append(tau)

    guard_fn = sep_fn if cfg.g != 0 and n > 1 else None
    integrate_segment(f, _pack(ph0), length, icfg, diag,
                      sample_at=_sample_positions(length, samples),
                      on_sample=on_sample, separation=guard_fn)
    return traj


def integrate_scalar_painleve(state0: EllipticState, params: PainleveParams,
                              tau_path: tuple[complex, complex],
                              icfg: IntegratorConfig = IntegratorConfig(),
                              lattice_scale: complex = 1.0,
                              trunc: TruncationConfig = DEFAULT_TRUNCATION,
                              samples: int = 16) -> Trajectory:
    """The scalar flow 2 pi i q' = p, 2 pi i p' = sum_a alpha_a wp'(q+omega_a).

    lattice_scale feeds through to the general-lattice right-hand side used
    by the extended scaling symmetry tests.
    """
    tau0, tau1 = complex(tau_path[0]), complex(tau_path[1])
    if tau0.imag <= 0 or tau1.imag <= 0:
        raise PathError(f"tau path [{tau0}, {tau1}] leaves the upper half-plane")
    length = abs(tau1 - tau0)
    if length == 0:
        raise ValueError("empty tau path")
    direction = (tau1 - tau0) / length

    def f(s, y):
        tau = tau0 + direction * s
        dq, dp = scalar_painleve_rhs(y[0], y[1], tau, params,
                                     lattice_scale, trunc)
        return direction * np.array([dq, dp])

    diag = Diagnostics()
    traj = Trajectory("isomonodromic_tau", [tau0],
                      [PhasePoint([state0.q], [state0.p])], [tau0], diag)

    def on_sample(s, y):
        tau = tau0 + direction * s
        traj.times.append(tau)
        traj.states.append(PhasePoint([y[0]], [y[1]]))
        traj.tau_of_sample.append(tau)

    integrate_segment(f, np.array([state0.q, state0.p], dtype=complex),
                      length, icfg, diag,
                      sample_at=_sample_positions(length, samples),
                      on_sample=on_sample)
    return traj


# ----------------------------------------------------------------------
# Extended symplectic 2-form
# ----------------------------------------------------------------------

def hamiltonian_dtau(cfg: CMConfig, ph: PhasePoint, fd_step: float = 1e-6,
                     trunc: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """dH/dtau at frozen (q, p), central differences with one Richardson step.

    The only FD-computed partial of the extended form; everything else is
    analytic.
    """
    tau = cfg.tm.tau

    def diff(h):
        hp = hamiltonian_cm(cfg.with_tau(tau + h), ph, trunc)
        hm = hamiltonian_cm(cfg.with_tau(tau - h), ph, trunc)
        return (hp - hm) / (2.0 * h)

    d1 = diff(fd_step)
    d2 = diff(fd_step / 2.0)
    return (4.0 * d2 - d1) / 3.0


def extended_two_form(ph: PhasePoint, tau: complex, u: ExtendedTangent,
                      v: ExtendedTangent, cfg: CMConfig,
                      trunc: TruncationConfig = DEFAULT_TRUNCATION) -> complex:
    """Omega_iso(u, v) = sum_j (dq^dp)(u,v) + (1/(2 pi i)) (dH^dtau)(u,v)."""
    cfg = cfg.with_tau(tau)
    fiber = complex(np.sum(u.dq * v.dp - u.dp * v.dq))
    dHdq, dHdp = hamiltonian_gradient(cfg, ph, trunc)
    dHdtau = hamiltonian_dtau(cfg, ph, trunc=trunc)

    def dH(w: ExtendedTangent) -> complex:
        return complex(np.sum(dHdq * w.dq) + np.sum(dHdp * w.dp)
                       + dHdtau * w.dtau)

    wedge = dH(u) * v.dtau - dH(v) * u.dtau
    return fiber + wedge / TWO_PI_I


def hamiltonian_vector_field(ph: PhasePoint, tau: complex, cfg: CMConfig,
                             trunc: TruncationConfig = DEFAULT_TRUNCATION
                             ) -> ExtendedTangent:
    """X_H = (dq_j = dH/dp_j, dp_j = -dH/dq_j, dtau = 2 pi i)."""
    cfg = cfg.with_tau(tau)
    dHdq, dHdp = hamiltonian_gradient(cfg, ph, trunc)
    return ExtendedTangent(dq=dHdp, dp=-dHdq, dtau=TWO_PI_I)


def canonical_pairing(n: int) -> np.ndarray:
    """The matrix of sum_j dq_j ^ dp_j in (q_1..q_n, p_1..p_n) coordinates."""
    omega = np.zeros((2 * n, 2 * n), dtype=complex)
    omega[:n, n:] = np.eye(n)
    omega[n:, :n] = -np.eye(n)
    return omega


def symplectic_jacobian_check(cfg: CMConfig, ph0: PhasePoint,
                              tau_path: tuple[complex, complex],
                              icfg: IntegratorConfig = IntegratorConfig(
                                  rel_tol=1e-11, abs_tol=1e-13),
                              fd_step: float = 1e-6,
                              trunc: TruncationConfig = DEFAULT_TRUNCATION
                              ) -> float:
    """|| M^T Omega0 M - Omega0 ||_max for the fiber flow map Jacobian M.

    M is the 2n x 2n complex Jacobian of (q0, p0) -> (q(tau1), p(tau1)),
    by central differences with step fd_step (the flow map is holomorphic,
    so real-step differences give the complex derivative).  Closedness of
    the extended form shows up as symplecticity of this parallel transport.
    """
    n = cfg.n

    def flow_map(y0: np.ndarray) -> np.ndarray:
        traj = integrate_isomonodromic(cfg, _unpack(y0, n), tau_path, icfg,
                                       trunc, samples=1)
        if traj.diagnostics.truncated:
            raise IntegrationError(
                "flow map truncated under perturbation: " +
                traj.diagnostics.message)
        return _pack(traj.states[-1])

    y0 = _pack(ph0)
    dim = 2 * n
    M = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        yp = y0.copy()
        ym = y0.copy()
        yp[j] += fd_step
        ym[j] -= fd_step
        M[:, j] = (flow_map(yp) - flow_map(ym)) / (2.0 * fd_step)
    omega0 = canonical_pairing(n)
    return float(np.max(np.abs(M.T @ omega0 @ M - omega0)))
