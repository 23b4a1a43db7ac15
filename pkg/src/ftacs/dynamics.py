"""Rigid-body attitude plant, tracking-error coordinates, and RK4 stepping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonFiniteState, SingularInertia
from .so3 import g_matrix, normalize, quat_inv, quat_mul, rotation_matrix, skew, spectral_norm


@dataclass
class SpacecraftState:
    """Body attitude quaternion (vs inertial) and body-frame rate."""

    q: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        self.q = normalize(np.asarray(self.q, dtype=float))
        self.omega = np.asarray(self.omega, dtype=float)


@dataclass
class DesiredState:
    """Reference attitude, rate, and rate derivative at one instant."""

    qd: np.ndarray
    omega_d: np.ndarray
    omega_d_dot: np.ndarray

    def __post_init__(self):
        self.qd = normalize(np.asarray(self.qd, dtype=float))
        self.omega_d = np.asarray(self.omega_d, dtype=float)
        self.omega_d_dot = np.asarray(self.omega_d_dot, dtype=float)


@dataclass
class TrackingError:
    """Error coordinates q_e, omega_e and the sliding variable s."""

    qe: np.ndarray
    omega_e: np.ndarray
    omega_bar_d: np.ndarray
    s: np.ndarray


def check_inertia(J: np.ndarray) -> np.ndarray:
    """Validate a symmetric positive-definite inertia matrix."""
    J = np.asarray(J, dtype=float)
    if spectral_norm(J - J.T) > 1e-12:
        raise SingularInertia("inertia matrix must be symmetric")
    eig = np.linalg.eigvalsh(J)
    if eig.min() <= 1e-12:
        raise SingularInertia("inertia matrix must be positive definite")
    return J


def attitude_kinematics(q: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Quaternion derivative qdot = 0.5*[-qv^T; G(q)]*omega."""
    qv = q[1:]
    return 0.5 * np.concatenate([[-qv @ omega], g_matrix(q) @ omega])


def euler_dynamics(
    J: np.ndarray,
    omega: np.ndarray,
    tau_c: np.ndarray,
    tau_d: np.ndarray,
    J_inv: np.ndarray | None = None,
) -> np.ndarray:
    """Rate derivative J^-1 * (-omega x J*omega + tau_c + tau_d)."""
    if J_inv is None:
        J_inv = inertia_inverse(J)
    return J_inv @ (-np.cross(omega, J @ omega) + tau_c + tau_d)


def inertia_inverse(J: np.ndarray) -> np.ndarray:
    check_inertia(J)
    return np.linalg.inv(J)


def tracking_errors(state: SpacecraftState, desired: DesiredState, k: float) -> TrackingError:
    """q_e = q_d^-1 (x) q, omega_e = omega - R(q_e)*omega_d, s = omega_e + k*q_e,vec."""
    if k <= 0:
        raise ValueError("k must be positive")
    qe = quat_mul(quat_inv(desired.qd), state.q)
    omega_bar_d = rotation_matrix(qe) @ desired.omega_d
    omega_e = state.omega - omega_bar_d
    return TrackingError(qe=qe, omega_e=omega_e, omega_bar_d=omega_bar_d, s=omega_e + k * qe[1:])


def xi_matrix(J: np.ndarray, omega_e: np.ndarray, omega_bar_d: np.ndarray) -> np.ndarray:
    """(J*(omega_e + omega_bar_d))^x - omega_bar_d^x*J - J*omega_bar_d^x."""
    wbx = skew(omega_bar_d)
    return skew(J @ (omega_e + omega_bar_d)) - wbx @ J - J @ wbx


def psi_terms(
    J: np.ndarray, err: TrackingError, desired: DesiredState, k: float
) -> tuple[np.ndarray, np.ndarray]:
    """Composite feedforward terms of the sliding-variable dynamics."""
    qe_v = err.qe[1:]
    qx = skew(qe_v)
    psi = (
        -0.5 * k * k * (qx @ (J @ qe_v))
        + 0.5 * k * (g_matrix(err.qe) @ (J @ err.omega_e))
        - k * (xi_matrix(J, np.zeros(3), err.omega_bar_d) @ qe_v)
    )
    psi_d = np.cross(err.omega_bar_d, J @ err.omega_bar_d) + J @ (
        rotation_matrix(err.qe) @ desired.omega_d_dot
    )
    return psi, psi_d


def s_dot_rhs(
    J: np.ndarray,
    err: TrackingError,
    desired: DesiredState,
    k: float,
    tau_c: np.ndarray,
    tau_d: np.ndarray,
    J_inv: np.ndarray | None = None,
) -> np.ndarray:
    """Analytic sdot from the closed-form sliding-variable dynamics."""
    if J_inv is None:
        J_inv = inertia_inverse(J)
    qx = skew(err.qe[1:])
    psi, psi_d = psi_terms(J, err, desired, k)
    js_dot = (
        xi_matrix(J, err.omega_e, err.omega_bar_d) @ err.s
        + 0.5 * k * ((qx @ J + J @ qx) @ err.s)
        + psi
        - psi_d
        + tau_c
        + tau_d
    )
    return J_inv @ js_dot


TorqueFn = Callable[[float, SpacecraftState], np.ndarray]
DisturbanceFn = Callable[[float], np.ndarray]


def rk4_step(
    state: SpacecraftState,
    J: np.ndarray,
    torque_fn: TorqueFn,
    disturbance_fn: DisturbanceFn,
    t: float,
    dt: float,
    J_inv: np.ndarray | None = None,
) -> SpacecraftState:
    """Classical fixed-step RK4 update of (q, omega); q renormalized once."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if J_inv is None:
        J_inv = inertia_inverse(J)

    def deriv(ti: float, q: np.ndarray, w: np.ndarray):
        st = SpacecraftState.__new__(SpacecraftState)
        st.q, st.omega = q, w
        tau_c = torque_fn(ti, st)
        return attitude_kinematics(q, w), euler_dynamics(J, w, tau_c, disturbance_fn(ti), J_inv)

    q0, w0 = state.q, state.omega
    k1q, k1w = deriv(t, q0, w0)
    k2q, k2w = deriv(t + 0.5 * dt, q0 + 0.5 * dt * k1q, w0 + 0.5 * dt * k1w)
    k3q, k3w = deriv(t + 0.5 * dt, q0 + 0.5 * dt * k2q, w0 + 0.5 * dt * k2w)
    k4q, k4w = deriv(t + dt, q0 + dt * k3q, w0 + dt * k3w)

    q_new = q0 + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q)
    w_new = w0 + (dt / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
    if not (np.all(np.isfinite(q_new)) and np.all(np.isfinite(w_new))):
        raise NonFiniteState(f"non-finite state at t={t}")
    out = SpacecraftState.__new__(SpacecraftState)
    out.q = normalize(q_new)
    out.omega = w_new
    return out
