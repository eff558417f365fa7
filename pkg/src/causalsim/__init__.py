"""Causal decision-making under uncertainty, end to end: discrete causal
models with exact interventional inference, Dirichlet beliefs over their
tables, decision agents that learn from intervention outcomes, and a
seeded experiment harness that compares them reproducibly.
"""

from .cgm import (
    MAX_JOINT_STATES,
    ROW_SUM_TOL,
    Assignment,
    CausalGraph,
    CausalModel,
    Cpt,
    Intervention,
    InvalidModelError,
    ValidationIssue,
    VariableSpec,
    ensure_valid,
    intervene,
    interventional_marginal,
    interventional_query,
    joint_probability,
    joint_size,
    parent_configurations,
    query,
    sample,
    validate,
    validate_graph,
)
from .model_io import (
    FormatError,
    graph_from_dict,
    graph_to_dict,
    load_model,
    model_from_dict,
    model_to_dict,
    read_json,
    save_model,
)
from .beliefs import (
    BeliefState,
    DirichletRow,
    beliefs_from_dict,
    beliefs_to_dict,
    init_uniform,
    posterior_mean,
    total_pseudo_count,
    update,
)
from .agents import (
    Action,
    AgentRecord,
    CausalAgentState,
    QAgentState,
    UtilityFunction,
    best_action,
    causal_choose,
    causal_learn,
    expected_utility,
    q_choose,
    q_learn,
    random_choose,
)
from .environment import (
    Environment,
    StepRecord,
    environment_block_to_dict,
    load_environment,
    medic_scenario,
    step,
)
from .experiment import (
    AgentConfig,
    CausalAgentConfig,
    ExperimentConfig,
    ExperimentResult,
    QLearningConfig,
    RandomConfig,
    ReplicationLog,
    RoundSeries,
    TrialLog,
    apply_overrides,
    config_from_dict,
    convergence_index,
    default_agents,
    load_experiment_config,
    run_experiment,
)
from .reporting import write_csv, write_svg
from .cli import cli_main, main

__version__ = "0.1.0"
