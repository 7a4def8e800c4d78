"""Agent-based rural-urban migration on a weighted social digraph."""

from .config import dumps_config, load_config, parse_config, shipped_config
from .dynamics import (
    ConsensusVerdict,
    DivergenceError,
    DynamicsParams,
    IntentionState,
    intention_spread,
    predict_consensus,
    rhs,
    step,
)
from .econ import (
    EconDerived,
    EconDomainError,
    EconParams,
    agricultural_income,
    derive_constants,
    expected_wage_differential,
    manufacturing_wage,
    relative_price,
)
from .engine import (
    ConfigError,
    ScenarioConfig,
    SimResult,
    initialize,
    oscillation_amplitude,
    overshoot_ratio,
    run,
)
from .estimators import ConsensusAnalyzer, IntentionDynamics
from .graph import (
    EigenSolverError,
    SocialGraph,
    Spectrum,
    has_spanning_tree,
    laplacian,
    random_graph,
    spectrum,
)
from .migration import MigrationParams, WorkerRoster, migration_probability, monthly_review

__version__ = "0.1.0"
