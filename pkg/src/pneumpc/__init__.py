"""Positive-negative pressure pneumatic plant and mode-switching MPC benchmark."""

from .gas_flow import (
    Conductances,
    FlowConstants,
    branch_flow,
    q_out_cases,
    shape_factor,
    shape_factor_smoothed,
)
from .plant import (
    PlantParams,
    PlantState,
    control_gain_g,
    drift_f,
    simulate_hold,
    spool_map,
    step_euler,
)
from .transcription import DecisionVector, HorizonSpec, rk4_step, rollout, gradient
from .nlp_solver import SolveOptions, SolveResult, solve_box_nlp, warm_start_shift
from .controllers import (
    ControlAction,
    MiNmpcController,
    NmpcController,
    PidController,
    PidState,
    brute_force_miocp,
    heuristic_mode,
    minmpc_step,
    nmpc_step,
    pid_step,
    round_omega,
)
from .bench import (
    BenchConfig,
    Metrics,
    RunTrace,
    Scenario,
    compute_metrics,
    load_config,
    make_controller,
    make_scenario,
    reference_window,
    run_closed_loop,
    sine_scenario,
    step_scenario,
)

__version__ = "0.1.0"
