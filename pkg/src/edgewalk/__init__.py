"""Inference of the edge probability of a per-step-resampled random graph.

A fixed set of walkers moves on an n-vertex graph whose edge set is redrawn
independently every time step (each edge present with probability p); only
the per-vertex occupancy counts are observed.  This package provides the
closed-form moment functions of that model, a seeded simulator, two point
estimators (method of moments and least squares), an exact small-instance
oracle, and a Monte Carlo study harness with a CLI.
"""

from .estimators import (
    DegenerateSeriesError,
    EstimationReport,
    SummaryStats,
    estimate_ls,
    estimate_mom,
    summarize,
)
from .exact_oracle import (
    PairChain,
    build_pair_chain,
    enumerate_graphs,
    exact_lag1_cov,
    exact_pair_same_prob,
    exact_scenarios,
    single_walker_kernel,
)
from .moment_kernel import (
    P_MIN,
    Inversion,
    ModelDims,
    MomentProfile,
    MonotonicityError,
    binom_pmf,
    deriv,
    invert_monotone_decreasing,
    kappa,
    lag1_cov,
    lag1_cov_decreasing_violations,
    ls_intercept,
    ls_slope,
    ls_slope_deriv,
    moment_profile,
    move_prob,
    occupancy_pair_probs,
    scenario_probs,
    second_moment,
    stay_prob,
    stay_prob_deriv,
)
from .simulator import (
    GraphSample,
    ObservationSeries,
    SimConfig,
    WalkerPositions,
    sample_graph,
    simulate,
    step,
)
from .study_cli import (
    CurvePoint,
    InsufficientSamplesError,
    QQData,
    ReplicationRow,
    ReplicationTable,
    SigmaEstimates,
    StudyConfig,
    empirical_sigmas,
    main,
    qq_data,
    run_replications,
    seed_for,
    sensitivity_curves,
)

__version__ = "0.1.0"
