"""Exact infinite-population EDA dynamics under truncation and two-tournament
selection, closed-form stopping times, and a finite-population simulator."""

__version__ = "0.1.0"

from .errors import ConfigError, ConsistencyError, DomainError, EdaLabError, UnsupportedSchemaError
from .fitness import (
    LevelDistribution,
    Problem,
    d_of,
    distribution_with_d,
    make_explicit,
    make_onemax,
    uniform_level_distribution,
)
from .selection import (
    DriftRecord,
    SelectionSchema,
    TruncationCut,
    predicted_drift,
    tournament_select_fair,
    tournament_select_paper,
    truncation_cut,
    truncation_select,
)
from .dynamics import Trajectory, run, step, verify_drift
from .theory import (
    BoundReport,
    bound_report,
    drift_time_bound,
    fair_tournament_d,
    tournament_d,
    tournament_exact_tau,
    tournament_upper_bound,
    truncation_d,
    truncation_exact_tau,
    truncation_upper_bound,
)
from .simulator import SimConfig, TrialResult, monte_carlo, run_trial
