"""Adaptive estimation protocols for states and unitary gates.

One state-estimation iteration measures the squared error at two probe
settings displaced from the current iterate, rebuilds from those
measurements the objective values belonging to the unnormalized displaced
iterates, feeds them to the stochastic-gradient update, and then replaces
the iterate with the maximum-likelihood refinement over all records so
far.

Only normalized probes ever reach the simulated measurement.  The device
reports SE(target, probe/|probe|), while the gradient needs the value at
the unnormalized displacement z_k + c_k Delta.  The two are related
exactly, for unit target and unit w, by

    SE(target, lam * w) = (1 - lam)^2 + lam * SE(target, w),

so the protocol rescales each measured value with the known probe norm
lam before differencing.  Skipping this step biases the gradient enough
that runs stall well away from the target.

Unitary estimation runs d such column estimations side by side, assembles
the matrix estimate each iteration, and reports it raw and after the two
unitarization procedures.  With re-updating enabled, the post-processed
columns are written back as the next iterates.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .core import (
    NORM_TOL,
    RngStream,
    as_generator,
    closest_unitary,
    gram_schmidt,
    haar_random_state,
    hs_distance,
    normalize,
    squared_error,
    unitarity_defect,
)
from .cspsa import (
    CspsaState,
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
    RankDeficient,
    SingularMatrix,
)
from .interferometer import estimate_se, exact_se_oracle, sample_record
from .mle import DataLog, refine
from .simplex import SimplexOptions

logger = logging.getLogger(__name__)

# Retries allowed when a probe lands on the origin (measure-zero event).
_MAX_PROBE_RETRIES = 5

POST_PROCESSING_CHOICES = ("none", "closest_unitary", "gram_schmidt")


@dataclass(frozen=True)
class EstimationConfig:
    """Settings for one estimation run.

    gains and simplex of None select the defaults for the dimension.  In
    noiseless mode the exact SE oracle replaces sampling, nothing is
    logged, and the likelihood refinement is skipped (there are no counts
    to build a likelihood from).
    """

    d: int
    N: int
    k_max: int
    gains: object = None
    simplex: object = None
    mle_enabled: bool = True
    noiseless: bool = False

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError("d must be >= 1, got %r" % (self.d,))
        if self.N < 1:
            raise ConfigError("N must be >= 1, got %r" % (self.N,))
        if self.k_max < 1:
            raise ConfigError("k_max must be >= 1, got %r" % (self.k_max,))


@dataclass(frozen=True)
class UnitaryEstimationOptions:
    """Post-processing variant and whether it feeds back into the iterates."""

    post_processing: str = "none"
    re_update: bool = False

    def __post_init__(self):
        if self.post_processing not in POST_PROCESSING_CHOICES:
            raise ConfigError(
                "post_processing must be one of %r, got %r"
                % (POST_PROCESSING_CHOICES, self.post_processing)
            )
        if self.re_update and self.post_processing == "none":
            raise ConfigError("re_update requires a post-processing choice")


@dataclass
class EstimationTrajectory:
    """Per-iteration record of one state-estimation run."""

    d: int
    N: int
    noiseless: bool
    estimates: list
    se: np.ndarray
    n_t: np.ndarray
    restarts: int

    @property
    def final_estimate(self):
        return self.estimates[-1]


@dataclass
class UnitaryTrajectory:
    """Per-iteration record of one unitary-estimation run.

    raw/closest/gs hold the assembled matrix estimates per iteration, and
    the hs_* arrays their Hilbert-Schmidt distances to the target.  n_t is
    the per-column copy count 2Nk; n_t_star the total over all d columns.
    """

    d: int
    N: int
    noiseless: bool
    raw: list
    closest: list
    gs: list
    hs_raw: np.ndarray
    hs_closest: np.ndarray
    hs_gs: np.ndarray
    n_t: np.ndarray
    n_t_star: np.ndarray
    restarts: int
    closest_fallbacks: int
    gs_fallbacks: int

    @property
    def final_raw(self):
        return self.raw[-1]

    @property
    def final_closest(self):
        return self.closest[-1]

    @property
    def final_gs(self):
        return self.gs[-1]


def _check_unit(v, what):
    v = np.asarray(v, dtype=complex)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ContractViolation("%s must be normalized" % what)
    return v


class _ColumnRun:
    """State shared by the per-iteration pieces of one column estimation."""

    def __init__(self, target, config, gains, sopts, gen, guess=None):
        self.target = target
        self.config = config
        self.gains = gains
        self.sopts = sopts
        self.gen = gen
        if guess is None:
            guess = haar_random_state(config.d, gen)
        else:
            guess = np.array(guess, dtype=complex)
            if np.linalg.norm(guess) < NORM_TOL:
                raise DegenerateVector("initial guess has zero norm")
        self.state = CspsaState(iterate=guess, k=0)
        self.log = DataLog()
        self.restarts = 0

    def _measured_se(self, probe_unit):
        if self.config.noiseless:
            return exact_se_oracle(self.target, probe_unit)
        record = sample_record(self.target, probe_unit, self.config.N, self.gen)
        self.log.append(record)
        return estimate_se(record)

    def iterate_once(self, it):
        """Advance this run by one full iteration (index it, counted from 0)."""
        a_k, c_k = gains_at(self.gains, it)
        delta = sample_perturbation(self.config.d, self.gen)

        for _ in range(_MAX_PROBE_RETRIES):
            z_plus, z_minus = probes(self.state, delta, c_k)
            lam_plus = np.linalg.norm(z_plus)
            lam_minus = np.linalg.norm(z_minus)
            if lam_plus >= NORM_TOL and lam_minus >= NORM_TOL:
                break
            # A probe collapsed onto the origin; restart the iterate so the
            # iteration still performs its two measurements.
            logger.warning("degenerate probe at iteration %d, restarting", it + 1)
            self.state = CspsaState(haar_random_state(self.config.d, self.gen), self.state.k)
            self.restarts += 1
        else:
            raise ContractViolation("probe degenerate after repeated restarts")

        se_plus = self._measured_se(z_plus / lam_plus)
        se_minus = self._measured_se(z_minus / lam_minus)
        # Rebuild the objective at the unnormalized displaced iterates from
        # the normalized-probe measurements (see the module docstring).
        f_plus = (1.0 - lam_plus) ** 2 + lam_plus * se_plus
        f_minus = (1.0 - lam_minus) ** 2 + lam_minus * se_minus

        g = gradient_estimate(f_plus, f_minus, c_k, delta)
        try:
            self.state = step(self.state, g, a_k)
        except DegenerateIterate:
            logger.warning("degenerate iterate at iteration %d, restarting", it + 1)
            self.state = CspsaState(haar_random_state(self.config.d, self.gen), self.state.k + 1)
            self.restarts += 1

        if self.config.mle_enabled and not self.config.noiseless:
            refined = refine(normalize(self.state.iterate), self.log, self.sopts)
            self.state = CspsaState(iterate=refined, k=self.state.k)

        return normalize(self.state.iterate)


def estimate_state(target, config, initial_guess=None, *, rng):
    """Run the adaptive estimation of one pure state.

    target must be normalized; initial_guess of None draws a fresh uniform
    one.  rng is an RngStream (or numpy Generator) owning all randomness
    of this run: guess, perturbations and shot noise.
    """
    target = _check_unit(target, "target")
    if len(target) != config.d:
        raise ConfigError("target has dimension %d, config says %d" % (len(target), config.d))
    gains = config.gains if config.gains is not None else default_gains(config.d)
    sopts = config.simplex if config.simplex is not None else SimplexOptions()
    gen = as_generator(rng)

    run = _ColumnRun(target, config, gains, sopts, gen, guess=initial_guess)
    estimates = []
    se_values = np.empty(config.k_max)
    n_t = np.zeros(config.k_max, dtype=np.int64)
    for it in range(config.k_max):
        est = run.iterate_once(it)
        estimates.append(est)
        se_values[it] = squared_error(est, target)
        if not config.noiseless:
            n_t[it] = 2 * config.N * (it + 1)

    if not config.noiseless and run.log.total_shots() != 2 * config.N * config.k_max:
        raise ContractViolation("shot bookkeeping drifted from 2*N*k")

    return EstimationTrajectory(
        d=config.d,
        N=config.N,
        noiseless=config.noiseless,
        estimates=estimates,
        se=se_values,
        n_t=n_t,
        restarts=run.restarts,
    )


def estimate_unitary(target_u, config, options=None, *, rng):
    """Run the column-wise adaptive estimation of a unitary.

    Every column j is an independent state estimation whose target is the
    j-th column of target_u, with its own perturbations, records and
    randomness (derived as rng.child(j), so rng must be an RngStream).
    Each iteration assembles the matrix estimate and reports it raw plus
    through both unitarization procedures; when options.re_update is set,
    the selected post-processed columns become the next iterates.
    """
    if options is None:
        options = UnitaryEstimationOptions()
    target_u = np.asarray(target_u, dtype=complex)
    d = config.d
    if target_u.shape != (d, d):
        raise ConfigError("target has shape %r, config says d=%d" % (target_u.shape, d))
    if unitarity_defect(target_u) > 1e-10:
        raise ContractViolation("target matrix is not unitary")
    if not isinstance(rng, RngStream):
        raise ConfigError("estimate_unitary needs an RngStream to derive column streams")
    gains = config.gains if config.gains is not None else default_gains(d)
    sopts = config.simplex if config.simplex is not None else SimplexOptions()

    columns = [
        _ColumnRun(target_u[:, j].copy(), config, gains, sopts, rng.child(j).generator())
        for j in range(d)
    ]

    raw_list, closest_list, gs_list = [], [], []
    hs_raw = np.empty(config.k_max)
    hs_closest = np.empty(config.k_max)
    hs_gs = np.empty(config.k_max)
    n_t = np.zeros(config.k_max, dtype=np.int64)
    closest_fallbacks = 0
    gs_fallbacks = 0

    for it in range(config.k_max):
        estimates = [col.iterate_once(it) for col in columns]
        u_raw = np.column_stack(estimates)

        try:
            u_c = closest_unitary(u_raw)
        except SingularMatrix:
            logger.warning("raw estimate singular at iteration %d, reporting raw", it + 1)
            u_c = u_raw
            closest_fallbacks += 1
        try:
            u_gs = gram_schmidt(u_raw)
        except RankDeficient:
            logger.warning("raw estimate rank-deficient at iteration %d, reporting raw", it + 1)
            u_gs = u_raw
            gs_fallbacks += 1

        raw_list.append(u_raw)
        closest_list.append(u_c)
        gs_list.append(u_gs)
        hs_raw[it] = hs_distance(u_raw, target_u)
        hs_closest[it] = hs_distance(u_c, target_u)
        hs_gs[it] = hs_distance(u_gs, target_u)
        if not config.noiseless:
            n_t[it] = 2 * config.N * (it + 1)

        if options.re_update:
            fed_back = u_c if options.post_processing == "closest_unitary" else u_gs
            for j, col in enumerate(columns):
                # Post-processed columns are unit vectors, so the iterate
                # magnitude resets to one here.
                col.state = CspsaState(iterate=fed_back[:, j].copy(), k=col.state.k)

    return UnitaryTrajectory(
        d=d,
        N=config.N,
        noiseless=config.noiseless,
        raw=raw_list,
        closest=closest_list,
        gs=gs_list,
        hs_raw=hs_raw,
        hs_closest=hs_closest,
        hs_gs=hs_gs,
        n_t=n_t,
        n_t_star=d * n_t,
        restarts=sum(col.restarts for col in columns),
        closest_fallbacks=closest_fallbacks,
        gs_fallbacks=gs_fallbacks,
    )


def shot_accounting(traj):
    """Copies consumed per iteration.

    For a state trajectory this is the array of N_T = 2Nk values; for a
    unitary trajectory a pair (per-column N_T, total over columns), the
    total being d times the per-column count.  Only sampled-mode
    trajectories consume copies.
    """
    if isinstance(traj, UnitaryTrajectory):
        if traj.noiseless:
            raise ContractViolation("no copies are consumed in noiseless mode")
        return traj.n_t.copy(), traj.n_t_star.copy()
    if isinstance(traj, EstimationTrajectory):
        if traj.noiseless:
            raise ContractViolation("no copies are consumed in noiseless mode")
        return traj.n_t.copy()
    raise ContractViolation("unknown trajectory type %r" % type(traj).__name__)
