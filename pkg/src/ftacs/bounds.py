"""Steady-state tracking-error bound prediction.

Implements the uncertainty-to-coefficient mapping (rho_0, rho_s, a0..a3,
b0..b3, kappa, kappa'), the quadratic comparison functions phi1/phi2, and the
two-stage fixed-point iteration that produces a strictly decreasing sequence
of ultimate bounds on ||s||, ||q_e,vec|| and ||omega_e||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .config import ControllerGains, UncertaintyBudget
from .errors import GainConditionViolated, NotActivated, NotContractive

DEFAULT_ETA = 1e-6


@dataclass
class RobustCoefficients:
    """Polynomial coefficients bounding the lumped uncertainty torque."""

    a0: float
    a1: float
    a2: float
    a3: float


def rho_zero(rho_q: float) -> float:
    """Ultimate bound sqrt(2*(1 - sqrt(1 - rho_q^2))) on ||M|| and ||E||."""
    return math.sqrt(2.0 * (1.0 - math.sqrt(1.0 - rho_q * rho_q)))


def rho_s_bound(budget: UncertaintyBudget, k: float) -> float:
    """Ultimate bound rho_w + 2*rho_q*rho_v + k*rho_0 on the s-estimation error."""
    return budget.rho_w + 2.0 * budget.rho_q * budget.rho_v + k * rho_zero(budget.rho_q)


def robust_coefficients(budget: UncertaintyBudget, k: float) -> RobustCoefficients:
    """a0..a3 such that ||tau_r|| <= a3*||s|| + a2*||q_e||^2 + a1*||q_e|| + a0."""
    r0 = rho_zero(budget.rho_q)
    jn = budget.J_hat_norm
    a3 = 0.5 * k * (r0 * jn + budget.rho_J)
    a2 = 0.5 * k * k * budget.rho_J
    a1 = k * k * r0 * jn + k * a3 + 3.0 * k * budget.rho_v * (budget.rho_J + 2.0 * budget.rho_q * jn)
    a0 = (
        0.5 * k * k * r0 * r0 * jn
        + 0.5 * k * (budget.rho_w + 2.0 * budget.rho_q * budget.rho_v) * jn
        + 3.0 * k * budget.rho_v * r0 * jn
        + 4.0 * budget.rho_q * budget.rho_v**2 * jn
        + 2.0 * budget.rho_q * budget.rho_a * jn
        + budget.rho_J * budget.rho_v**2
        + budget.rho_J * budget.rho_a
        + budget.rho_d
    )
    return RobustCoefficients(a0=a0, a1=a1, a2=a2, a3=a3)


def b_coefficients(
    budget: UncertaintyBudget, gains: ControllerGains, a: RobustCoefficients
) -> tuple[float, float, float, float]:
    """b0..b3 such that ||H*u|| <= rho_E*(b3*||s|| + b2*||q_e||^2 + b1*||q_e|| + b0)."""
    k = gains.k
    jn = budget.J_hat_norm
    lmax = gains.lambda_max_K
    r0 = rho_zero(budget.rho_q)
    rs = rho_s_bound(budget, k)
    b3 = 0.5 * k * jn + lmax
    b2 = 0.5 * k * k * jn
    b1 = 2.0 * b2 * r0 + 0.5 * k * k * jn + 3.0 * k * budget.rho_v * jn + a.a1
    b0 = (
        b2 * r0 * r0
        + 0.5 * k * (budget.rho_w + 2.0 * budget.rho_q * budget.rho_v) * jn
        + 3.0 * k * budget.rho_v * r0 * jn
        + lmax * rs
        + a.a1 * (r0 + gains.gamma)
        + a.a0
        + (budget.rho_v**2 + budget.rho_a) * jn
        + budget.rho_d_hat
    )
    return b0, b1, b2, b3


@dataclass
class BoundCoefficients:
    """All scalars feeding the fixed-point bound iteration."""

    rho_0: float
    rho_s: float
    a0: float
    a1: float
    a2: float
    a3: float
    b0: float
    b1: float
    b2: float
    b3: float
    kappa: float
    kappa_prime: float


def compute_coefficients(budget: UncertaintyBudget, gains: ControllerGains) -> BoundCoefficients:
    a = robust_coefficients(budget, gains.k)
    b0, b1, b2, b3 = b_coefficients(budget, gains, a)
    kappa = gains.lambda_min_K - a.a3 - budget.rho_E * b3
    kappa_prime = kappa + (a.a1 * gains.gamma + a.a0) / gains.epsilon
    return BoundCoefficients(
        rho_0=rho_zero(budget.rho_q),
        rho_s=rho_s_bound(budget, gains.k),
        a0=a.a0,
        a1=a.a1,
        a2=a.a2,
        a3=a.a3,
        b0=b0,
        b1=b1,
        b2=b2,
        b3=b3,
        kappa=kappa,
        kappa_prime=kappa_prime,
    )


PhiFn = Callable[[float, float], float]


def phi_functions(
    coeffs: BoundCoefficients, gains: ControllerGains, budget: UncertaintyBudget
) -> tuple[PhiFn, PhiFn, PhiFn]:
    """The comparison quadratics phi1 (outside the boundary layer), phi2
    (inside), and their pointwise max phi_bar.

    The second argument is the vanishing slack of the ultimate-bound limits;
    predictions evaluate at y = 0.
    """
    c = coeffs
    rE = budget.rho_E
    eps = gains.epsilon
    gam = gains.gamma
    lmax = gains.lambda_max_K
    a0, a1, a2 = c.a0, c.a1, c.a2
    r0, rs = c.rho_0, c.rho_s

    def phi1(x: float, y: float = 0.0) -> float:
        return (
            (a2 + rE * c.b2) * x * x
            + (2.0 / eps * a1 * (rs + y) + rE * c.b1) * x
            + 2.0 / eps * (rs + y) * (a1 * (gam + r0 + y) + a0)
            + rE * c.b0
            + (2.0 + lmax + a1) * y
            - (a1 * gam - a1 * r0 - lmax * rs)
        )

    def phi2(x: float, y: float = 0.0) -> float:
        return (
            (a2 + rE * c.b2) * x * x
            + (a1 * (rs + y) / eps + a1 + rE * c.b1) * x
            + (rs + y) / eps * (a1 * (gam + r0 + y) + a0)
            + a0
            + rE * c.b0
            + lmax * (rs + y)
            + 2.0 * y
        )

    def phi_bar(x: float, y: float = 0.0) -> float:
        return max(phi1(x, y), phi2(x, y))

    return phi1, phi2, phi_bar


@dataclass
class BoundTrace:
    """Iteration history and converged limits of the bound prediction."""

    loop1: list[tuple[float, float]] = field(default_factory=list)
    loop2: list[tuple[float, float]] = field(default_factory=list)
    switch_index: int | None = None
    s_inf: float = math.nan
    q_inf: float = math.nan
    s_inf_prime: float | None = None
    q_inf_prime: float | None = None
    eta: float = DEFAULT_ETA

    @property
    def total_iterations(self) -> int:
        return len(self.loop1) + len(self.loop2)

    @property
    def s_final(self) -> float:
        return self.s_inf if self.s_inf_prime is None else self.s_inf_prime

    @property
    def q_final(self) -> float:
        return self.q_inf if self.q_inf_prime is None else self.q_inf_prime

    @property
    def omega_bound(self) -> float:
        """Ultimate bound on ||omega_e|| (rad/s): factor 2 since Lambda = k*I."""
        return 2.0 * self.s_final

    @property
    def theta_bound(self) -> float:
        """Ultimate bound on the principal rotation angle (rad)."""
        return 2.0 * math.asin(min(self.q_final, 1.0))


def loop1_iterate(
    coeffs: BoundCoefficients,
    gains: ControllerGains,
    budget: UncertaintyBudget,
    eta: float = DEFAULT_ETA,
) -> BoundTrace:
    """First fixed-point loop from q_bar_0 = 1."""
    if coeffs.kappa <= 0:
        raise GainConditionViolated(f"kappa = {coeffs.kappa} <= 0")
    _, _, phi_bar = phi_functions(coeffs, gains, budget)
    ratio = math.sqrt(budget.lambda_r / budget.lambda_l)
    trace = BoundTrace(eta=eta)
    q_prev = 1.0
    while True:
        s_i = ratio * phi_bar(q_prev, 0.0) / coeffs.kappa
        q_i = s_i / gains.k
        trace.loop1.append((s_i, q_i))
        if len(trace.loop1) == 1 and q_i >= 1.0:
            raise NotContractive(f"q_bar_1 = {q_i} >= 1; sequence does not contract")
        if abs(q_i - q_prev) <= eta:
            break
        q_prev = q_i
    trace.s_inf, trace.q_inf = trace.loop1[-1]
    return trace


def loop2_iterate(
    trace: BoundTrace,
    coeffs: BoundCoefficients,
    gains: ControllerGains,
    budget: UncertaintyBudget,
    eta: float = DEFAULT_ETA,
) -> BoundTrace:
    """Boundary-layer refinement loop, seeded by the loop-1 limit."""
    if not trace.s_inf + coeffs.rho_s < gains.epsilon:
        raise NotActivated(
            f"s_inf + rho_s = {trace.s_inf + coeffs.rho_s} >= epsilon = {gains.epsilon}"
        )
    _, phi2, _ = phi_functions(coeffs, gains, budget)
    ratio = math.sqrt(budget.lambda_r / budget.lambda_l)
    trace.switch_index = len(trace.loop1)
    q_prev = trace.q_inf
    while True:
        s_i = ratio * phi2(q_prev, 0.0) / coeffs.kappa_prime
        q_i = s_i / gains.k
        trace.loop2.append((s_i, q_i))
        if abs(q_i - q_prev) <= eta:
            break
        q_prev = q_i
    trace.s_inf_prime, trace.q_inf_prime = trace.loop2[-1]
    return trace


def predict(
    budget: UncertaintyBudget,
    gains: ControllerGains,
    eta: float = DEFAULT_ETA,
    run_loop2: bool = True,
) -> BoundTrace:
    """Run the two-stage bound prediction end to end."""
    coeffs = compute_coefficients(budget, gains)
    trace = loop1_iterate(coeffs, gains, budget, eta)
    if run_loop2:
        try:
            trace = loop2_iterate(trace, coeffs, gains, budget, eta)
        except NotActivated:
            pass  # loop-1 limits stand as final
    return trace


def gain_sweep(
    budget: UncertaintyBudget,
    gain_grid: list[ControllerGains],
    eta: float = DEFAULT_ETA,
) -> list[dict]:
    """Evaluate predict() over a grid of gains; rows sorted by q-bound.

    Failing grid points (gain condition or non-contraction) are flagged with
    ok=False and sorted last, never dropped.
    """
    if not gain_grid:
        raise ValueError("gain grid must be nonempty")
    rows = []
    for gains in gain_grid:
        row = {
            "k": gains.k,
            "lambda_min_K": gains.lambda_min_K,
            "lambda_max_K": gains.lambda_max_K,
            "epsilon": gains.epsilon,
            "gamma": gains.gamma,
        }
        try:
            trace = predict(budget, gains, eta)
        except (GainConditionViolated, NotContractive) as exc:
            row.update(ok=False, reason=type(exc).__name__, q_bound=math.inf,
                       omega_bound=math.inf, theta_bound=math.inf, iterations=0)
        else:
            row.update(
                ok=True,
                reason="",
                q_bound=trace.q_final,
                omega_bound=trace.omega_bound,
                theta_bound=trace.theta_bound,
                iterations=trace.total_iterations,
            )
        rows.append(row)
    rows.sort(key=lambda r: (not r["ok"], r["q_bound"]))
    return rows
