"""Adaptive MSE estimation of pure qudit states and unitary gates.

A stochastic-approximation loop drives probe settings toward the unknown
state using squared-error measurements from a simulated multi-arm
interferometer, and a cumulative maximum-likelihood refinement sharpens
the iterate after every step.  Unitaries are estimated column by column
with optional unitarization feedback.  The experiment layer wraps seeded
Monte Carlo grids, convergence statistics against the (d-1)/N_T accuracy
benchmark, and power-law fits.
"""

from .backend import BACKEND, available_backends
from .core import (
    RngStream,
    closest_unitary,
    gram_schmidt,
    haar_random_state,
    haar_random_unitary,
    hs_distance,
    is_unitary,
    normalize,
    squared_error,
)
from .cspsa import (
    CspsaState,
    GainSchedule,
    default_gains,
    gains_at,
    gradient_estimate,
    probes,
    sample_perturbation,
    step,
)
from .errors import (
    ConfigError,
    ContractViolation,
    DegenerateIterate,
    DegenerateVector,
    DimensionError,
    EmptyData,
    EmptyEnsemble,
    EstimationError,
    InvalidData,
    InvalidDimension,
    InvalidGain,
    InvalidStart,
    RangeError,
    RankDeficient,
    SingularMatrix,
)
from .experiment import (
    ExperimentConfig,
    ResultsTable,
    build_experiment_config,
    emit_csv,
    fit_report,
    read_csv,
    run_state_experiment,
    run_unitary_experiment,
)
from .interferometer import (
    MeasurementRecord,
    OutcomeDistribution,
    estimate_se,
    exact_se_oracle,
    outcome_probabilities,
    sample_record,
)
from .metrics import (
    PowerLawFit,
    SampleStatistics,
    gill_massar_mse,
    mse_over_estimates,
    power_law_fit,
    predicted_unitary_mse,
    summary_statistics,
)
from .mle import DataLog, log_likelihood, refine
from .protocols import (
    EstimationConfig,
    EstimationTrajectory,
    UnitaryEstimationOptions,
    UnitaryTrajectory,
    estimate_state,
    estimate_unitary,
    shot_accounting,
)
from .simplex import SimplexOptions, nelder_mead

__version__ = "0.1.0"
