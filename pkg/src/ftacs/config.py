"""Gain, model-estimate, and uncertainty-budget containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .so3 import spectral_norm


@dataclass
class ControllerGains:
    """Sliding-mode controller parameters.

    k: sliding-variable gain (1/s), K: 3x3 SPD feedback matrix,
    epsilon: boundary-layer width, gamma: robust-term margin.
    """

    k: float
    K: np.ndarray
    epsilon: float
    gamma: float

    def __post_init__(self):
        self.K = np.asarray(self.K, dtype=float)
        if self.k <= 0 or self.epsilon <= 0 or self.gamma <= 0:
            raise ValueError("k, epsilon, gamma must be positive")
        if spectral_norm(self.K - self.K.T) > 1e-12:
            raise ValueError("K must be symmetric")
        if np.linalg.eigvalsh(self.K).min() <= 0:
            raise ValueError("K must be positive definite")

    @property
    def lambda_min_K(self) -> float:
        return float(np.linalg.eigvalsh(self.K)[0])

    @property
    def lambda_max_K(self) -> float:
        return float(np.linalg.eigvalsh(self.K)[-1])


@dataclass
class ModelEstimates:
    """Inertia and disturbance estimates used by the controller."""

    J_hat: np.ndarray
    tau_d_hat: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.J_hat = np.asarray(self.J_hat, dtype=float)
        self.tau_d_hat = np.asarray(self.tau_d_hat, dtype=float)
        if spectral_norm(self.J_hat - self.J_hat.T) > 1e-12:
            raise ValueError("J_hat must be symmetric")

    @property
    def J_hat_norm(self) -> float:
        return spectral_norm(self.J_hat)


@dataclass
class UncertaintyBudget:
    """Known bounds on all system uncertainties.

    rho_q / rho_w bound the estimation errors, rho_J / rho_d / rho_d_hat the
    model errors, lambda_l / lambda_r the true inertia eigenvalues,
    rho_v / rho_a the reference motion, and rho_E the actuator-fault
    mismatch operator.  J_hat_norm is the 2-norm of the inertia estimate.
    """

    rho_q: float
    rho_w: float
    rho_J: float
    rho_d: float
    rho_d_hat: float
    lambda_l: float
    lambda_r: float
    rho_v: float
    rho_a: float
    rho_E: float
    J_hat_norm: float

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not 0.0 <= self.rho_q < 1.0:
            raise ValueError("rho_q must be in [0, 1)")
        if not 0.0 <= self.rho_E < 1.0:
            raise ValueError("rho_E must be in [0, 1)")
        if not 0.0 < self.lambda_l <= self.lambda_r:
            raise ValueError("need 0 < lambda_l <= lambda_r")
        for name in ("rho_w", "rho_J", "rho_d", "rho_d_hat", "rho_v", "rho_a", "J_hat_norm"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def replace(self, **kwargs) -> "UncertaintyBudget":
        from dataclasses import replace

        return replace(self, **kwargs)


def zero_budget(J_hat_norm: float, lambda_l: float = 1.0, lambda_r: float = 1.0) -> UncertaintyBudget:
    """Budget with every uncertainty bound set to zero."""
    return UncertaintyBudget(
        rho_q=0.0,
        rho_w=0.0,
        rho_J=0.0,
        rho_d=0.0,
        rho_d_hat=0.0,
        lambda_l=lambda_l,
        lambda_r=lambda_r,
        rho_v=0.0,
        rho_a=0.0,
        rho_E=0.0,
        J_hat_norm=J_hat_norm,
    )
