"""Agent choice via quantum flux: measurement pools, policies, audits."""

from .agents import (
    AgentPolicy,
    ChannelHistory,
    DecisionEvent,
    MacroChoice,
    PolicyKind,
    baseline_macro_drift,
    decide,
    macro_from_outcome,
    outcome_from_macro,
)
from .audit import (
    AuditReport,
    ChannelStats,
    EmptyInput,
    EmptyLog,
    InvalidCounts,
    P_FLOOR,
    audit_log,
    binomial_p_value,
    fisher_combine,
)
from .bloch import (
    DegenerateFrame,
    Direction3,
    Frame,
    Observable,
    Outcome,
    born_probability,
    collapse,
    make_ready_frame,
    measurement_frame,
    sample_outcome,
)
from .chemotaxis import (
    Bacterium,
    Trajectory,
    World,
    drift_statistic,
    make_bacterium,
    prime,
    run_scenario,
)
from .config import ParseError, RunConfig, ValidationError, parse_config, parse_grid
from .pool import (
    Channel,
    Pool,
    PoolConfig,
    QuantumSystem,
    Scheduler,
    UnknownObservable,
    UnknownSystem,
    alignment_matrix,
    apply_measurement,
    channel_born_plus,
    init_pool,
    select_channel,
    select_pair,
    step_flux,
)
from .rng import make_generator
from .sim import (
    PowerCell,
    PowerGrid,
    SimParams,
    power_curve,
    run_events,
    run_replicates,
)
from .special import (
    chi2_sf,
    normal_upper_quantile,
    regularized_gamma_p,
    regularized_gamma_q,
    wilson_half_width,
)

__version__ = "0.1.0"

__all__ = [
    "AgentPolicy",
    "AuditReport",
    "Bacterium",
    "Channel",
    "ChannelHistory",
    "ChannelStats",
    "DecisionEvent",
    "DegenerateFrame",
    "Direction3",
    "EmptyInput",
    "EmptyLog",
    "Frame",
    "InvalidCounts",
    "MacroChoice",
    "Observable",
    "Outcome",
    "P_FLOOR",
    "ParseError",
    "PolicyKind",
    "Pool",
    "PoolConfig",
    "PowerCell",
    "PowerGrid",
    "QuantumSystem",
    "RunConfig",
    "Scheduler",
    "SimParams",
    "Trajectory",
    "UnknownObservable",
    "UnknownSystem",
    "ValidationError",
    "World",
    "alignment_matrix",
    "apply_measurement",
    "audit_log",
    "baseline_macro_drift",
    "binomial_p_value",
    "born_probability",
    "channel_born_plus",
    "chi2_sf",
    "collapse",
    "decide",
    "drift_statistic",
    "fisher_combine",
    "init_pool",
    "macro_from_outcome",
    "make_bacterium",
    "make_generator",
    "make_ready_frame",
    "measurement_frame",
    "normal_upper_quantile",
    "outcome_from_macro",
    "parse_config",
    "parse_grid",
    "power_curve",
    "prime",
    "regularized_gamma_p",
    "regularized_gamma_q",
    "run_events",
    "run_replicates",
    "run_scenario",
    "sample_outcome",
    "select_channel",
    "select_pair",
    "step_flux",
    "wilson_half_width",
]
