"""Adversarial Age-of-Information scheduling: simulator, oracles, analysis."""

from .model import (
    AnalysisError,
    DimensionError,
    GuardError,
    InputError,
    ObservableState,
    ProtocolError,
    RunLog,
    SimulationError,
    SlotInput,
    SystemConfig,
    Trace,
    average_age_of_run,
    cost_of_run,
    read_trace,
    run_simulation,
    step_ages,
    write_runlog,
    write_trace,
)
from .policies import POLICY_NAMES, CmaPolicy, make_policy
from .oracle import OptResult, opt_exact_dp, opt_lower_bound_superintervals, opt_single_good
from .adversaries import (
    BlockingAdversary,
    RelocatingAdversary,
    gen_iid_trace,
    gen_yao_trace,
    mobility_random_walk,
    mobility_static,
)
from .analysis import (
    RatioReport,
    SuperInterval,
    YaoEstimate,
    analytic_ratio_floor,
    bound_hmax,
    bound_hmax_optimal,
    decompose_super_intervals,
    empirical_eta,
    estimate_opt_stationary,
    estimate_policy_time_avg_max,
    geometric_mgf,
    per_interval_cma_bound,
    total_cma_bound,
    tv_distance_geometric,
    verify_max_user_recency,
    yao_ratio_floor,
)
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
