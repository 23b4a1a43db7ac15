"""Closed-loop simulation, Monte Carlo campaigns, steady-state statistics,
predicted-vs-simulated verification, and trace persistence."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .actuation import allocation_matrix
from .bounds import BoundTrace, predict
from .controller import (
    ControlDiagnostics,
    estimated_errors,
    feedforward_terms,
    robust_coefficients,
    robust_term,
    virtual_control,
)
from .dynamics import DesiredState, SpacecraftState, inertia_inverse, tracking_errors
from .errors import BoundViolated, EmptyTail, NonFiniteState
from .estimation import (
    ObserverOutput,
    SyntheticErrorProfile,
    bias_observer_step,
    estimation_error,
    random_unit_vector,
    sensor_sample,
)
from .scenario import Scenario
from .so3 import normalize, quat_from_axis_angle, quat_inv, quat_mul


@dataclass
class RunTrace:
    """Recorded closed-loop history on a uniform (decimated) time grid."""

    t: np.ndarray
    qe: np.ndarray
    omega_e: np.ndarray
    s: np.ndarray
    s_hat: np.ndarray
    theta_e_deg: np.ndarray
    tau_u: np.ndarray
    qtilde_norm: np.ndarray
    wtilde_norm: np.ndarray
    seed: int
    scenario_name: str = ""
    dt: float = 0.0


@dataclass
class TailStats:
    """Maxima over the final tail window of a run."""

    theta_e_max_deg: float
    omega_e_max: float
    qe_vec_max: float
    s_max: float
    qtilde_max: float
    wtilde_max: float


@dataclass
class CampaignSummary:
    """Per-instance tail statistics and campaign-wide maxima."""

    instances: list[TailStats]
    seeds: list[int]
    failures: list[str]
    theta_e_max_deg: float
    omega_e_max: float
    qe_vec_max: float
    qtilde_max: float
    wtilde_max: float
    predicted: BoundTrace | None = None
    instance_pass: list[bool] = field(default_factory=list)


def _initial_state(scenario: Scenario, rng: np.random.Generator) -> SpacecraftState:
    init = scenario.init
    if init.kind == "fixed":
        return SpacecraftState(q=np.asarray(init.q0, dtype=float),
                               omega=np.asarray(init.omega0, dtype=float))
    omega0 = rng.uniform(-init.omega_abs_max, init.omega_abs_max, size=3)
    theta0 = rng.uniform(0.0, init.theta_max)
    q0 = quat_from_axis_angle(random_unit_vector(rng), theta0)
    return SpacecraftState(q=q0, omega=omega0)


def _qdot(q: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Quaternion kinematics qdot = 0.5*[-qv.w; q0*w + qv x w], scalar form.

    Equivalent to dynamics.attitude_kinematics but without array-construction
    overhead; this is the innermost function of the simulation loop.
    """
    q0, q1, q2, q3 = q
    wx, wy, wz = w
    return np.array(
        [
            -0.5 * (q1 * wx + q2 * wy + q3 * wz),
            0.5 * (q0 * wx + q2 * wz - q3 * wy),
            0.5 * (q0 * wy + q3 * wx - q1 * wz),
            0.5 * (q0 * wz + q1 * wy - q2 * wx),
        ]
    )


def _cross3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def _rk4_quat(q: np.ndarray, w0: np.ndarray, wh: np.ndarray, wf: np.ndarray, dt: float) -> np.ndarray:
    """RK4 step of the quaternion kinematics with rates given at the three
    stage times (start, midpoint, end)."""
    k1 = _qdot(q, w0)
    k2 = _qdot(q + 0.5 * dt * k1, wh)
    k3 = _qdot(q + 0.5 * dt * k2, wh)
    k4 = _qdot(q + dt * k3, wf)
    return normalize(q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


def _rk4_plant(
    q: np.ndarray,
    w: np.ndarray,
    J: np.ndarray,
    J_inv: np.ndarray,
    tau: np.ndarray,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """RK4 step of (q, omega) under a torque held constant over the step."""

    def wdot(wi):
        return J_inv @ (tau - _cross3(wi, J @ wi))

    k1q = _qdot(q, w)
    k1w = wdot(w)
    q2, w2 = q + 0.5 * dt * k1q, w + 0.5 * dt * k1w
    k2q = _qdot(q2, w2)
    k2w = wdot(w2)
    q3, w3 = q + 0.5 * dt * k2q, w + 0.5 * dt * k2w
    k3q = _qdot(q3, w3)
    k3w = wdot(w3)
    q4, w4 = q + dt * k3q, w + dt * k3w
    k4q = _qdot(q4, w4)
    k4w = wdot(w4)
    q_new = q + (dt / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q)
    w_new = w + (dt / 6.0) * (k1w + 2 * k2w + 2 * k3w + k4w)
    return normalize(q_new), w_new


def run_scenario(scenario: Scenario, seed: int | None = None) -> RunTrace:
    """Propagate the full closed loop truth -> observer -> controller ->
    actuators -> dynamics at fixed dt."""
    seed = scenario.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    dt = scenario.dt
    n = scenario.n_steps
    dec = scenario.record_decimation
    m = scenario.bank.m

    J = scenario.J
    J_inv = inertia_inverse(J)
    gains = scenario.gains
    budget = scenario.budget
    if budget is not None:
        coeffs = robust_coefficients(budget, gains.k)
    else:
        from .config import zero_budget

        coeffs = robust_coefficients(zero_budget(scenario.estimates.J_hat_norm), gains.k)

    # precompute reference, disturbance, and health signals on the step grid
    t_grid = dt * np.arange(n)
    wd0 = scenario.omega_d(t_grid)
    wdh = scenario.omega_d(t_grid + 0.5 * dt)
    wdf = scenario.omega_d(t_grid + dt)
    wddot = scenario.omega_d.derivative(t_grid)
    taud_mid = scenario.disturbance(t_grid + 0.5 * dt)
    e_arr = np.array([scenario.health(t) for t in t_grid])
    ehat_arr = np.array([scenario.health_estimate(t) for t in t_grid])

    # allocation matrices, computed once per distinct health-estimate row
    uniq, inv_idx = np.unique(np.round(ehat_arr, 15), axis=0, return_inverse=True)
    alloc = np.array([allocation_matrix(scenario.bank, e) for e in uniq])

    obs_spec = scenario.observer
    synth = None
    if obs_spec.kind == "synthetic":
        synth = SyntheticErrorProfile(
            amp_q=obs_spec.amp_q,
            amp_w=obs_spec.amp_w,
            freq_q=obs_spec.freq_q,
            freq_w=obs_spec.freq_w,
            phase_q=obs_spec.phase_q,
            phase_w=obs_spec.phase_w,
        )

    state = _initial_state(scenario, rng)
    qd = scenario.qd0.copy()
    D = scenario.bank.D

    bias = scenario.noise.b0.copy()
    q_hat_obs: np.ndarray | None = None
    b_hat = np.zeros(3)

    n_rec = (n + dec - 1) // dec
    rec = {
        "t": np.empty(n_rec),
        "qe": np.empty((n_rec, 4)),
        "omega_e": np.empty((n_rec, 3)),
        "s": np.empty((n_rec, 3)),
        "s_hat": np.empty((n_rec, 3)),
        "theta_e_deg": np.empty(n_rec),
        "tau_u": np.empty((n_rec, m)),
        "qtilde_norm": np.empty(n_rec),
        "wtilde_norm": np.empty(n_rec),
    }
    r = 0

    for i in range(n):
        t = t_grid[i]
        desired = DesiredState.__new__(DesiredState)
        desired.qd, desired.omega_d, desired.omega_d_dot = qd, wd0[i], wddot[i]

        if obs_spec.kind == "perfect":
            obs = ObserverOutput(q_hat=state.q, omega_hat=state.omega)
        elif obs_spec.kind == "synthetic":
            obs = ObserverOutput(
                q_hat=_quat_mul_inv(state.q, synth.qtilde(t)),
                omega_hat=state.omega + synth.omega_tilde(t),
            )
        else:  # bias observer fed by noisy sensors
            sample, bias = sensor_sample(state, bias, scenario.noise, rng, dt)
            if q_hat_obs is None:
                q_hat_obs = sample.qm.copy()
            q_hat_obs, b_hat, obs = bias_observer_step(
                q_hat_obs, b_hat, sample, obs_spec.k_o, obs_spec.k_b, dt
            )

        tau_u, u, diag = _control_step_alloc(
            obs, desired, gains, scenario.estimates, coeffs, alloc[inv_idx[i]],
            scenario.bank.tau_max,
        )
        tau_c = D @ (e_arr[i] * tau_u)

        if i % dec == 0:
            err = tracking_errors(state, desired, gains.k)
            qt = estimation_error(obs.q_hat, state.q)
            rec["t"][r] = t
            rec["qe"][r] = err.qe
            rec["omega_e"][r] = err.omega_e
            rec["s"][r] = err.s
            rec["s_hat"][r] = diag.s_hat
            rec["theta_e_deg"][r] = math.degrees(2.0 * math.acos(min(abs(err.qe[0]), 1.0)))
            rec["tau_u"][r] = tau_u
            rec["qtilde_norm"][r] = np.linalg.norm(qt[1:])
            rec["wtilde_norm"][r] = np.linalg.norm(obs.omega_hat - state.omega)
            r += 1

        q_new, w_new = _rk4_plant(state.q, state.omega, J, J_inv, tau_c + taud_mid[i], dt)
        if not (np.all(np.isfinite(q_new)) and np.all(np.isfinite(w_new))):
            raise NonFiniteState(f"non-finite state at step {i} (t={t:.3f} s)")
        state.q, state.omega = q_new, w_new
        qd = _rk4_quat(qd, wd0[i], wdh[i], wdf[i], dt)

    return RunTrace(
        t=rec["t"],
        qe=rec["qe"],
        omega_e=rec["omega_e"],
        s=rec["s"],
        s_hat=rec["s_hat"],
        theta_e_deg=rec["theta_e_deg"],
        tau_u=rec["tau_u"],
        qtilde_norm=rec["qtilde_norm"],
        wtilde_norm=rec["wtilde_norm"],
        seed=int(seed) if np.isscalar(seed) else -1,
        scenario_name=scenario.name,
        dt=dt * dec,
    )


def _quat_mul_inv(q: np.ndarray, qt: np.ndarray) -> np.ndarray:
    """q (x) qt^-1."""
    return quat_mul(q, quat_inv(qt))


def _control_step_alloc(obs, desired, gains, estimates, coeffs, alloc_mat, tau_max):
    """control_step with a precomputed allocation matrix."""
    q_hat_e, omega_hat_e, s_hat, omega_bar_hat_d = estimated_errors(obs, desired, gains.k)
    psi_hat, psi_hat_d = feedforward_terms(
        estimates, q_hat_e, omega_hat_e, omega_bar_hat_d, desired, gains.k
    )
    u_s, inside = robust_term(s_hat, q_hat_e[1:], coeffs, gains.gamma, gains.epsilon)
    u = virtual_control(s_hat, gains.K, u_s, psi_hat, psi_hat_d, estimates.tau_d_hat)
    tau_u_raw = alloc_mat @ u
    tau_u = np.clip(tau_u_raw, -tau_max, tau_max)
    diag = ControlDiagnostics(
        s_hat=s_hat, q_hat_e=q_hat_e, u_s=u_s, inside_boundary_layer=inside, tau_u_raw=tau_u_raw
    )
    return tau_u, u, diag


def steady_state_stats(trace: RunTrace, tail_fraction: float = 0.2) -> TailStats:
    """Maxima over the final tail_fraction of recorded samples."""
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must be in (0, 1]")
    n = len(trace.t)
    start = n - max(1, int(round(tail_fraction * n)))
    if n == 0 or start >= n:
        raise EmptyTail("tail window has no samples")
    sl = slice(start, n)
    return TailStats(
        theta_e_max_deg=float(np.max(trace.theta_e_deg[sl])),
        omega_e_max=float(np.max(np.linalg.norm(trace.omega_e[sl], axis=1))),
        qe_vec_max=float(np.max(np.linalg.norm(trace.qe[sl, 1:], axis=1))),
        s_max=float(np.max(np.linalg.norm(trace.s[sl], axis=1))),
        qtilde_max=float(np.max(trace.qtilde_norm[sl])),
        wtilde_max=float(np.max(trace.wtilde_norm[sl])),
    )


def instance_seeds(campaign_seed: int, n: int) -> list[int]:
    """Deterministic per-instance seeds derived from the campaign seed."""
    ss = np.random.SeedSequence(campaign_seed)
    return [int(child.generate_state(1)[0]) for child in ss.spawn(n)]


def run_campaign(scenario: Scenario, n_instances: int, eta: float = 1e-6) -> CampaignSummary:
    """Run n independent instances; aggregate tail statistics.

    Per-instance failures are recorded and the campaign continues.
    """
    if n_instances < 1:
        raise ValueError("n_instances must be >= 1")
    seeds = instance_seeds(scenario.seed, n_instances)
    instances: list[TailStats] = []
    failures: list[str] = []
    for idx, seed in enumerate(seeds):
        try:
            trace = run_scenario(scenario, seed=seed)
            instances.append(steady_state_stats(trace, scenario.tail_fraction))
        except NonFiniteState as exc:
            failures.append(f"instance {idx} (seed {seed}): {exc}")

    predicted = None
    instance_pass: list[bool] = []
    if scenario.budget is not None:
        predicted = predict(scenario.budget, scenario.gains, eta=eta)
        theta_bound_deg = math.degrees(predicted.theta_bound)
        instance_pass = [
            st.theta_e_max_deg <= theta_bound_deg and st.omega_e_max <= predicted.omega_bound
            for st in instances
        ]

    def agg(attr):
        return max((getattr(st, attr) for st in instances), default=math.nan)

    return CampaignSummary(
        instances=instances,
        seeds=seeds,
        failures=failures,
        theta_e_max_deg=agg("theta_e_max_deg"),
        omega_e_max=agg("omega_e_max"),
        qe_vec_max=agg("qe_vec_max"),
        qtilde_max=agg("qtilde_max"),
        wtilde_max=agg("wtilde_max"),
        predicted=predicted,
        instance_pass=instance_pass,
    )


def verify(scenario: Scenario, n_instances: int, eta: float = 1e-6, strict: bool = True) -> dict:
    """Predict bounds, run a campaign, and check the envelope property."""
    if scenario.budget is None:
        raise ValueError("scenario has no uncertainty budget")
    summary = run_campaign(scenario, n_instances, eta=eta)
    predicted = summary.predicted
    theta_bound_deg = math.degrees(predicted.theta_bound)
    omega_bound = predicted.omega_bound
    report = {
        "scenario": scenario.name,
        "n_instances": n_instances,
        "theta_bound_deg": theta_bound_deg,
        "omega_bound_rad_s": omega_bound,
        "theta_tail_max_deg": summary.theta_e_max_deg,
        "omega_tail_max_rad_s": summary.omega_e_max,
        "qe_bound": predicted.q_final,
        "qe_tail_max": summary.qe_vec_max,
        "theta_margin_ratio": theta_bound_deg / summary.theta_e_max_deg
        if summary.theta_e_max_deg > 0
        else math.inf,
        "omega_margin_ratio": omega_bound / summary.omega_e_max
        if summary.omega_e_max > 0
        else math.inf,
        "failures": summary.failures,
        "passed": bool(
            not summary.failures
            and summary.theta_e_max_deg <= theta_bound_deg
            and summary.omega_e_max <= omega_bound
        ),
    }
    if strict and not report["passed"]:
        offenders = [i for i, ok in enumerate(summary.instance_pass) if not ok]
        raise BoundViolated(
            f"tail maxima exceed predicted bounds (instances {offenders}): "
            f"theta {summary.theta_e_max_deg:.4g} deg vs {theta_bound_deg:.4g} deg, "
            f"omega {summary.omega_e_max:.4g} vs {omega_bound:.4g} rad/s"
        )
    return report


# ---------------------------------------------------------------------------
# persistence


def trace_columns(m: int) -> list[str]:
    return (
        ["t", "qe0", "qe1", "qe2", "qe3", "wex", "wey", "wez", "theta_e_deg", "snorm", "shatnorm"]
        + [f"tau_u{i + 1}" for i in range(m)]
        + ["qtilde_norm", "wtilde_norm"]
    )


def export_trace_csv(trace: RunTrace, path: str | Path):
    """Fixed-column CSV export of a run trace (13 + m columns)."""
    m = trace.tau_u.shape[1]
    data = np.column_stack(
        [
            trace.t,
            trace.qe,
            trace.omega_e,
            trace.theta_e_deg,
            np.linalg.norm(trace.s, axis=1),
            np.linalg.norm(trace.s_hat, axis=1),
            trace.tau_u,
            trace.qtilde_norm,
            trace.wtilde_norm,
        ]
    )
    header = ",".join(trace_columns(m))
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def export_summary_jsonl(summary: CampaignSummary, path: str | Path):
    """One JSONL record per instance plus a campaign-level record."""
    with open(path, "w") as fh:
        for idx, (st, seed) in enumerate(zip(summary.instances, summary.seeds)):
            rec = {"instance": idx, "seed": seed, **st.__dict__}
            if summary.instance_pass:
                rec["passed"] = summary.instance_pass[idx]
            fh.write(json.dumps(rec) + "\n")
        camp = {
            "campaign": True,
            "theta_e_max_deg": summary.theta_e_max_deg,
            "omega_e_max": summary.omega_e_max,
            "qe_vec_max": summary.qe_vec_max,
            "qtilde_max": summary.qtilde_max,
            "wtilde_max": summary.wtilde_max,
            "failures": summary.failures,
        }
        if summary.predicted is not None:
            camp["theta_bound_deg"] = math.degrees(summary.predicted.theta_bound)
            camp["omega_bound_rad_s"] = summary.predicted.omega_bound
            camp["qe_bound"] = summary.predicted.q_final
        fh.write(json.dumps(camp) + "\n")


def export_bound_trace_jsonl(trace: BoundTrace, path: str | Path):
    """One record per fixed-point iteration plus a summary record."""
    with open(path, "w") as fh:
        for i, (s, q) in enumerate(trace.loop1, start=1):
            fh.write(json.dumps({"loop": 1, "i": i, "s_bar": s, "q_bar": q}) + "\n")
        for i, (s, q) in enumerate(trace.loop2, start=1):
            fh.write(json.dumps({"loop": 2, "i": i, "s_bar": s, "q_bar": q}) + "\n")
        fh.write(
            json.dumps(
                {
                    "summary": True,
                    "eta": trace.eta,
                    "switch_index": trace.switch_index,
                    "total_iterations": trace.total_iterations,
                    "s_inf": trace.s_inf,
                    "q_inf": trace.q_inf,
                    "s_inf_prime": trace.s_inf_prime,
                    "q_inf_prime": trace.q_inf_prime,
                    "q_bound": trace.q_final,
                    "omega_bound_rad_s": trace.omega_bound,
                    "theta_bound_rad": trace.theta_bound,
                }
            )
            + "\n"
        )
