"""Fault-tolerant attitude control simulation and steady-state bound prediction.

Library layout:
    so3         quaternion/rotation primitives
    config      gain, model-estimate, and uncertainty-budget dataclasses
    dynamics    rigid-body dynamics, tracking errors, sliding-variable flow
    actuation   redundant thruster bank, health-weighted allocation
    estimation  sensor models and bounded-error observers
    controller  continuous sliding-mode fault-tolerant control law
    bounds      sequential fixed-point prediction of ultimate error bounds
    scenario    scenario configs, YAML I/O, built-in presets
    harness     closed-loop runner, Monte Carlo campaigns, verification, export
"""

from .bounds import (
    BoundCoefficients,
    BoundTrace,
    compute_coefficients,
    gain_sweep,
    phi_functions,
    predict,
    robust_coefficients,
)
from .config import ControllerGains, ModelEstimates, UncertaintyBudget, zero_budget
from .controller import check_gain_conditions, control_step
from .errors import (
    BoundViolated,
    BudgetViolation,
    EmptyTail,
    FtacsError,
    GainConditionViolated,
    NonFiniteState,
    NotActivated,
    NotContractive,
    RankDeficient,
    SingularInertia,
)
from .harness import (
    CampaignSummary,
    RunTrace,
    TailStats,
    export_bound_trace_jsonl,
    export_summary_jsonl,
    export_trace_csv,
    run_campaign,
    run_scenario,
    steady_state_stats,
    verify,
)
from .scenario import (
    PRESETS,
    Scenario,
    load_scenario,
    load_scenario_file,
    paper_fault_free,
    paper_faulty,
    nominal_exact,
    save_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCoefficients",
    "BoundTrace",
    "BoundViolated",
    "BudgetViolation",
    "CampaignSummary",
    "ControllerGains",
    "EmptyTail",
    "FtacsError",
    "GainConditionViolated",
    "ModelEstimates",
    "NonFiniteState",
    "NotActivated",
    "NotContractive",
    "PRESETS",
    "RankDeficient",
    "RunTrace",
    "Scenario",
    "SingularInertia",
    "TailStats",
    "UncertaintyBudget",
    "check_gain_conditions",
    "compute_coefficients",
    "control_step",
    "export_bound_trace_jsonl",
    "export_summary_jsonl",
    "export_trace_csv",
    "gain_sweep",
    "load_scenario",
    "load_scenario_file",
    "nominal_exact",
    "paper_fault_free",
    "paper_faulty",
    "phi_functions",
    "predict",
    "robust_coefficients",
    "run_campaign",
    "run_scenario",
    "save_scenario",
    "steady_state_stats",
    "verify",
    "zero_budget",
]
