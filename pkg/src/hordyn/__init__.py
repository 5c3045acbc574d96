"""Payoff-based higher-order replicator dynamics in population games."""

from .analysis import (
    fixed_point_exrd,
    incremental_probe,
    linearize_higher_order,
    theorem3_certificate,
    variational_sample_check,
)
from .dynamics import (
    ClosedLoopSystem,
    LearningRule,
    Trajectory,
    equilibrium_internal_state,
    init_score_at,
    integrate,
)
from .games import (
    MatrixGame,
    PopulationGame,
    congestion_example,
    contractiveness,
    interior_nash,
    nash_gap,
    rps_example,
)
from .lti import TransferFunction, is_stable, lift, passivity_report, realize
from .simplex import project_zero_mean, softmax, softmax_jacobian, tangent_basis

__version__ = "0.1.0"
