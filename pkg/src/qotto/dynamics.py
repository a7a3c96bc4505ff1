"""Exact joint and reduced dynamics of the qubit + single-qubit-bath model.

The total Hamiltonian omega (sigma_z x 1 + 1 x sigma_z) + f(t)/2 (sigma_x x
sigma_x + sigma_y x sigma_y) commutes with itself at different times, so the
joint state of a product input (arbitrary system qubit, diagonal bath qubit
with parameter g) is known in closed form for any accumulated phase
F(t). This module provides that closed form, the reduced qubit state, the
time-local master equation, the vectorized map/generator pair with its
reshuffled form and CP-divisibility witness, and an independent adaptive ODE
integrator used to audit all of the closed forms.

Convention: the joint state evolves through U(t) = exp(-i * int_0^t H dt').
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import linalg
from .errors import IntegrationFailureError, PositivityError, SingularGeneratorError
from .profiles import CouplingProfile, RatePair
from .tolerances import TOL

#: honest integration starts here; f(t) ~ 1/(2 sqrt(g t)) diverges at t = 0
ORACLE_T_START = 1e-6

_COUPLING_PATTERN = np.zeros((4, 4), dtype=complex)
_COUPLING_PATTERN[1, 2] = 1.0
_COUPLING_PATTERN[2, 1] = 1.0

_FREE_PART = np.diag([2.0, 0.0, 0.0, -2.0]).astype(complex)

_PHI_PLUS = np.zeros(4, dtype=complex)
_PHI_PLUS[0] = _PHI_PLUS[3] = 1.0 / math.sqrt(2.0)
_WITNESS_PROJECTOR = np.eye(4, dtype=complex) - np.outer(_PHI_PLUS, _PHI_PLUS.conj())


@dataclass(frozen=True)
class QubitState:
    """(p, x) parameterization of a qubit density matrix.

    p is the population of the sigma_z (+1) eigenstate |0>, x the complex
    coherence; positivity requires |x|^2 <= p(1-p).
    """

    p: float
    x: complex = 0j

    def __post_init__(self):
        if not -TOL.qubit_positivity <= self.p <= 1.0 + TOL.qubit_positivity:
            raise ValueError(f"population p must lie in [0, 1], got {self.p}")
        if abs(self.x) ** 2 > self.p * (1.0 - self.p) + TOL.qubit_positivity:
            raise ValueError(
                f"coherence too large: |x|^2 = {abs(self.x)**2:.3e} exceeds "
                f"p(1-p) = {self.p * (1.0 - self.p):.3e}")

    def matrix(self) -> np.ndarray:
        return np.array([[self.p, self.x], [np.conj(self.x), 1.0 - self.p]], dtype=complex)


@dataclass(frozen=True)
class BathSpec:
    """Single-qubit bath: level splitting omega, inverse temperature beta."""

    omega: float
    beta: float
    g: float | None = None

    def __post_init__(self):
        if self.omega <= 0.0:
            raise ValueError(f"bath splitting omega must be positive, got {self.omega}")
        if self.beta < 0.0:
            raise ValueError(f"inverse temperature beta must be >= 0, got {self.beta}")
        expected = math.tanh(self.beta * self.omega)
        if self.g is None:
            object.__setattr__(self, "g", expected)
        elif abs(self.g - expected) > TOL.profile_g_match:
            raise ValueError(
                f"bath parameter g = {self.g} does not match tanh(beta*omega) = {expected}")

    def thermal_matrix(self) -> np.ndarray:
        return bath_thermal_matrix(self.g)


def bath_thermal_matrix(g: float) -> np.ndarray:
    """diag((1-g)/2, (1+g)/2): thermal bath qubit with parameter g."""
    return np.diag([(1.0 - g) / 2.0, (1.0 + g) / 2.0]).astype(complex)


def total_hamiltonian(omega: float, f_value: float) -> np.ndarray:
    """omega (sigma_z x 1 + 1 x sigma_z) plus the exchange coupling at strength f_value."""
    return omega * _FREE_PART + f_value * _COUPLING_PATTERN


def coupling_hamiltonian(f_value: float) -> np.ndarray:
    """The exchange interaction alone: f_value at entries (1,2) and (2,1)."""
    return f_value * _COUPLING_PATTERN


def joint_state_closed_form(sys: QubitState, g: float, omega: float,
                            phase: float, t: float) -> np.ndarray:
    """Closed-form joint state at accumulated phase F = phase and time t.

    The input is the product of ``sys`` with the thermal bath qubit of
    parameter g; the output is the exactly evolved 4x4 density operator.
    """
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"bath parameter g must lie in [0, 1], got {g}")
    p, x = sys.p, complex(sys.x)
    lo = (1.0 - g) / 2.0
    hi = (1.0 + g) / 2.0
    cf = math.cos(phase)
    sf = math.sin(phase)
    s2f = math.sin(2.0 * phase)
    c2f = math.cos(2.0 * phase)
    ph = np.exp(-2j * omega * t)
    mid = 0.25j * (g + 2.0 * p - 1.0) * s2f

    rho = np.array([
        [lo * p, 1j * lo * x * ph * sf, lo * x * ph * cf, 0.0],
        [-1j * lo * np.conj(x * ph) * sf,
         lo * sf**2 + 0.5 * p * (g + c2f), mid, hi * x * ph * cf],
        [lo * np.conj(x * ph) * cf, -mid,
         lo * cf**2 + 0.5 * p * (g - c2f), -1j * hi * x * ph * sf],
        [0.0, hi * np.conj(x * ph) * cf, 1j * hi * np.conj(x * ph) * sf, hi * (1.0 - p)],
    ], dtype=complex)

    evals = np.linalg.eigvalsh(rho)
    if evals.min() < TOL.psd_floor or abs(np.trace(rho).real - 1.0) > TOL.trace_one:
        raise PositivityError(
            f"closed-form joint state invalid: min eig {evals.min():.3e}, "
            f"trace {np.trace(rho).real:.12g}")
    return rho


def joint_state(sys: QubitState, profile: CouplingProfile, omega: float,
                t: float) -> np.ndarray:
    """Closed-form joint state with the phase supplied by a coupling profile."""
    return joint_state_closed_form(sys, profile.g, omega, profile.phase(t), t)


def reduced_state(sys: QubitState, profile: CouplingProfile, omega: float,
                  t: float) -> QubitState:
    """Reduced qubit state: p(t) = p cos^2 F + (1-g)/2 sin^2 F, x(t) = x e^{-2i omega t} cos F."""
    if t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    phase = profile.phase(t)
    cf = math.cos(phase)
    p_t = sys.p * cf**2 + 0.5 * (1.0 - profile.g) * math.sin(phase) ** 2
    x_t = complex(sys.x) * np.exp(-2j * omega * t) * cf
    return QubitState(p=min(max(p_t, 0.0), 1.0), x=x_t)


def master_equation_rhs(rho: np.ndarray, omega: float, rates: RatePair) -> np.ndarray:
    """Time-local generator: -i omega [sigma_z, rho] plus pumping/damping dissipators."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 state, got {rho.shape}")
    sz, sp, sm = linalg.SIGMA_Z, linalg.SIGMA_PLUS, linalg.SIGMA_MINUS
    out = -1j * omega * (sz @ rho - rho @ sz)
    n_minus = sp @ sm
    n_plus = sm @ sp
    out += rates.gamma_minus * (sm @ rho @ sp - 0.5 * (n_minus @ rho + rho @ n_minus))
    out += rates.gamma_plus * (sp @ rho @ sm - 0.5 * (n_plus @ rho + rho @ n_plus))
    return out


# --- independent integrator -------------------------------------------------

def _liouville_rhs(profile: CouplingProfile, omega: float):
    def rhs(t, y):
        rho = (y[:16] + 1j * y[16:]).reshape(4, 4)
        h = total_hamiltonian(omega, profile.f(t))
        drho = -1j * (h @ rho - rho @ h)
        return np.concatenate([drho.real.ravel(), drho.imag.ravel()])
    return rhs


def _seed_state(sys: QubitState, profile: CouplingProfile, omega: float,
                t_seed: float) -> np.ndarray:
    # H(t) is different-time commuting, so the sliver [0, t_seed] around the
    # f singularity is advanced exactly by its accumulated phase; honest
    # stepping takes over at t_seed where f is finite.
    rho0 = np.kron(sys.matrix(), bath_thermal_matrix(profile.g))
    h_eff = omega * t_seed * _FREE_PART + profile.phase(t_seed) * _COUPLING_PATTERN
    u = linalg.matrix_exp_skewhermitian(h_eff, 1.0)
    return u @ rho0 @ u.conj().T


def oracle_propagate(sys: QubitState, profile: CouplingProfile, omega: float,
                     t: float, steps: int | None = None,
                     rtol: float = 1e-10, atol: float = 1e-12) -> np.ndarray:
    """Joint state at time t by adaptive 4th/5th-order integration of drho/dt = -i [H(t), rho].

    Deliberately avoids the commuting-Hamiltonian shortcut (except on the
    initial sliver below ``ORACLE_T_START``) so that it is an independent
    check of the closed-form state.
    """
    if t <= 0.0:
        raise ValueError(f"oracle time must be positive, got {t}")
    t_seed = max(ORACLE_T_START, profile.t_min)
    if t <= t_seed:
        return _seed_state(sys, profile, omega, t)
    y0 = _seed_state(sys, profile, omega, t_seed)
    y0 = np.concatenate([y0.real.ravel(), y0.imag.ravel()])
    max_step = (t - t_seed) / steps if steps else np.inf
    sol = solve_ivp(_liouville_rhs(profile, omega), (t_seed, t), y0,
                    method="RK45", rtol=rtol, atol=atol, max_step=max_step)
    if not sol.success:
        raise IntegrationFailureError(sol.message)
    y = sol.y[:, -1]
    return (y[:16] + 1j * y[16:]).reshape(4, 4)


def oracle_trajectory(sys: QubitState, profile: CouplingProfile, omega: float,
                      times: np.ndarray, rtol: float = 1e-10,
                      atol: float = 1e-12) -> np.ndarray:
    """Joint states sampled at the given times (all >= ORACLE_T_START), shape (n, 4, 4)."""
    times = np.asarray(times, dtype=float)
    t_seed = max(ORACLE_T_START, profile.t_min)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0.0):
        raise ValueError("times must be a strictly increasing 1-d array with >= 2 entries")
    if times[0] < t_seed:
        raise ValueError(f"trajectory must start at or after {t_seed}, got {times[0]}")
    y0 = _seed_state(sys, profile, omega, times[0])
    y0 = np.concatenate([y0.real.ravel(), y0.imag.ravel()])
    sol = solve_ivp(_liouville_rhs(profile, omega), (times[0], times[-1]), y0,
                    method="RK45", rtol=rtol, atol=atol, t_eval=times)
    if not sol.success:
        raise IntegrationFailureError(sol.message)
    y = sol.y
    return (y[:16].T + 1j * y[16:].T).reshape(-1, 4, 4)


# --- vectorized map, generator and witness ----------------------------------

@dataclass(frozen=True)
class VectorizedRep:
    """Row-major vectorized dynamical map, its generator, and the reshuffled generator."""

    map_hat: np.ndarray
    gen_hat: np.ndarray
    omega_of_gen: np.ndarray


def reshuffle(a: np.ndarray) -> np.ndarray:
    """Index involution Omega: Omega(A)[(i,k),(j,l)] = A[(l,k),(j,i)] on 4x4 operators."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (4, 4):
        raise ValueError(f"reshuffle expects a 4x4 matrix, got {a.shape}")
    return a.reshape(2, 2, 2, 2).transpose(3, 1, 2, 0).reshape(4, 4)


def _map_hat(profile: CouplingProfile, omega: float, t: float) -> np.ndarray:
    g = profile.g
    phase = profile.phase(t)
    s = math.sin(phase) ** 2
    cf = math.cos(phase)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 1.0 - 0.5 * (1.0 + g) * s
    m[0, 3] = 0.5 * (1.0 - g) * s
    m[3, 0] = 0.5 * (1.0 + g) * s
    m[3, 3] = 1.0 - 0.5 * (1.0 - g) * s
    m[1, 1] = np.exp(-2j * omega * t) * cf
    m[2, 2] = np.exp(2j * omega * t) * cf
    return m


def _map_hat_dot(profile: CouplingProfile, omega: float, t: float) -> np.ndarray:
    g = profile.g
    # f(t) diverges at t = 0 but the products f sin(2F) and f sin(F) have
    # finite limits; evaluating them just above zero realizes those limits
    t_f = max(t, 1e-12)
    phase = profile.phase(t_f)
    fval = profile.f(t_f)
    ds = fval * math.sin(2.0 * phase)
    cf = math.cos(phase)
    sf = math.sin(phase)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = -0.5 * (1.0 + g) * ds
    m[0, 3] = 0.5 * (1.0 - g) * ds
    m[3, 0] = 0.5 * (1.0 + g) * ds
    m[3, 3] = -0.5 * (1.0 - g) * ds
    m[1, 1] = np.exp(-2j * omega * t) * (-2j * omega * cf - fval * sf)
    m[2, 2] = np.exp(2j * omega * t) * (2j * omega * cf - fval * sf)
    return m


def _map_hat_inv(profile: CouplingProfile, omega: float, t: float) -> np.ndarray:
    # adjugate inverse; the population-block determinant equals 1 - sin^2 F,
    # which is evaluated as cos^2 F to avoid cancellation near singularities
    g = profile.g
    phase = profile.phase(t)
    s = math.sin(phase) ** 2
    cf = math.cos(phase)
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = (1.0 - 0.5 * (1.0 - g) * s) / cf**2
    m[0, 3] = -0.5 * (1.0 - g) * s / cf**2
    m[3, 0] = -0.5 * (1.0 + g) * s / cf**2
    m[3, 3] = (1.0 - 0.5 * (1.0 + g) * s) / cf**2
    m[1, 1] = np.exp(2j * omega * t) / cf
    m[2, 2] = np.exp(-2j * omega * t) / cf
    return m


def vectorized_reps(profile: CouplingProfile, omega: float, t: float) -> VectorizedRep:
    """Vectorized map Lambda_t, generator L_t = dLambda_t Lambda_t^{-1}, and Omega(L_t)."""
    map_hat = _map_hat(profile, omega, t)
    cf = math.cos(profile.phase(t))
    if abs(cf) < TOL.cos_phase_singular:
        raise SingularGeneratorError(
            f"dynamical map not invertible at t = {t}: |cos F| = {abs(cf):.2e}")
    gen_hat = _map_hat_dot(profile, omega, t) @ _map_hat_inv(profile, omega, t)
    return VectorizedRep(map_hat=map_hat, gen_hat=gen_hat,
                         omega_of_gen=reshuffle(gen_hat))


def cp_divisibility_witness(rep: VectorizedRep) -> tuple[bool, np.ndarray]:
    """PSD flag and spectrum of Pi Omega(L_t) Pi with Pi = 1 - |phi+><phi+|.

    For this model the projected operator is diag(0, (1+g) gamma, (1-g) gamma, 0)
    in the {phi+, |01>, |10>, phi-} basis, so positivity is equivalent to
    gamma(t) >= 0.
    """
    m = _WITNESS_PROJECTOR @ rep.omega_of_gen @ _WITNESS_PROJECTOR
    dev = np.max(np.abs(m - m.conj().T))
    if dev > 1e-9 * max(1.0, np.max(np.abs(m))):
        raise ValueError(f"projected witness operator is not Hermitian: deviation {dev:.3e}")
    evals = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return bool(evals.min() >= TOL.rate_floor), evals


def witness_min_eigenvalue(profile: CouplingProfile, omega: float, t: float) -> float:
    """Smallest eigenvalue of the projected witness operator at time t."""
    _, evals = cp_divisibility_witness(vectorized_reps(profile, omega, t))
    return float(evals.min())
