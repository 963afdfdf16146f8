"""Configuration-driven Monte Carlo harness.

An experiment draws m targets, runs n independent estimations of each at
every requested shot count, and reduces the per-run error curves to
per-iteration statistics: the per-target MSE is the mean over that
target's n runs, and the reported mean/median/quartiles are taken across
the m targets.  Everything derives deterministically from the master
seed; the (target, run) grid is embarrassingly parallel and the reduction
happens in fixed index order, so the jobs setting never changes a single
output bit.

Randomness layout: targets come from the stream child(0) of the master
seed, and the run at (shot index, target i, run j) owns child(1, shot
index, i, j).  Each unitary run derives one further child per column.

The CSV output (and the N_T and benchmark columns in particular) always
reports the sampling budget 2Nk per column, d columns for unitary mode,
even in noiseless diagnostic runs where no copies are actually consumed.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import RngStream, haar_random_state, haar_random_unitary
from .cspsa import GainSchedule, default_gains
from .errors import ConfigError, RangeError
from .metrics import gill_massar_mse, power_law_fit, summary_statistics
from .protocols import (
    EstimationConfig,
    UnitaryEstimationOptions,
    estimate_state,
    estimate_unitary,
)
from .simplex import SimplexOptions

CSV_HEADER = "mode,d,N,k,N_T,variant,mean_mse,median_mse,q1,q3,gm_benchmark,samples"

STATE_VARIANT = "raw"
UNITARY_VARIANTS = ("raw", "closest", "gs")

# Flat config-file keys and their parsers.  Keys are case-sensitive.
_KEY_PARSERS = {
    "mode": str,
    "d": int,
    "shots": "shots",
    "iterations": int,
    "targets": int,
    "runs": int,
    "seed": int,
    "noiseless": "bool",
    "mle": "bool",
    "jobs": int,
    "out": str,
    "post": str,
    "re_update": "bool",
    "gain_a": float,
    "gain_A": float,
    "gain_s": float,
    "gain_b": float,
    "gain_r": float,
    "simplex_max_evaluations": int,
    "simplex_x_tolerance": float,
    "simplex_f_tolerance": float,
    "simplex_reflection": float,
    "simplex_expansion": float,
    "simplex_contraction": float,
    "simplex_shrink": float,
}

_GAIN_KEYS = ("gain_a", "gain_A", "gain_s", "gain_b", "gain_r")
_SIMPLEX_KEYS = (
    "simplex_max_evaluations",
    "simplex_x_tolerance",
    "simplex_f_tolerance",
    "simplex_reflection",
    "simplex_expansion",
    "simplex_contraction",
    "simplex_shrink",
)

_POST_ALIASES = {
    "none": "none",
    "closest": "closest_unitary",
    "closest_unitary": "closest_unitary",
    "gs": "gram_schmidt",
    "gram_schmidt": "gram_schmidt",
}


def _parse_bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError("expected a boolean, got %r" % (text,))


def _parse_shots(text):
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    try:
        values = tuple(int(str(p).strip()) for p in parts if str(p).strip())
    except ValueError:
        raise ConfigError("shots must be a comma-separated list of integers, got %r" % (text,))
    if not values:
        raise ConfigError("shots list is empty")
    return values


def parse_config_text(text):
    """Parse flat `key = value` lines into a typed mapping.

    Blank lines and lines starting with # are skipped; unknown keys and
    malformed values raise ConfigError.
    """
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError("line %d is not `key = value`: %r" % (lineno, raw))
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_PARSERS:
            raise ConfigError("unknown configuration key %r (line %d)" % (key, lineno))
        parser = _KEY_PARSERS[key]
        try:
            if parser == "bool":
                mapping[key] = _parse_bool(value)
            elif parser == "shots":
                mapping[key] = _parse_shots(value)
            else:
                mapping[key] = parser(value)
        except ConfigError:
            raise
        except (TypeError, ValueError):
            raise ConfigError("bad value for %r on line %d: %r" % (key, lineno, value))
    return mapping


def load_config_file(path):
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read config file %r: %s" % (path, exc))
    return parse_config_text(text)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo experiment."""

    mode: str = "state"
    d: int = 2
    shots: tuple = (1000,)
    k_max: int = 100
    targets: int = 20
    runs: int = 10
    seed: int = 0
    gains: object = None
    simplex: object = None
    unitary: object = None
    mle_enabled: bool = True
    noiseless: bool = False
    jobs: int = 1
    out: str = None

    def __post_init__(self):
        if self.mode not in ("state", "unitary"):
            raise ConfigError("mode must be state or unitary, got %r" % (self.mode,))
        if self.d < 1:
            raise ConfigError("d must be >= 1, got %r" % (self.d,))
        if not self.shots or any(n < 1 for n in self.shots):
            raise ConfigError("shots must all be >= 1, got %r" % (self.shots,))
        if self.k_max < 1:
            raise ConfigError("iterations must be >= 1, got %r" % (self.k_max,))
        if self.targets < 1:
            raise ConfigError("targets must be >= 1, got %r" % (self.targets,))
        if self.runs < 1:
            raise ConfigError("runs must be >= 1, got %r" % (self.runs,))
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1, got %r" % (self.jobs,))

    def estimation_config(self, n_shots):
        return EstimationConfig(
            d=self.d,
            N=int(n_shots),
            k_max=self.k_max,
            gains=self.gains,
            simplex=self.simplex,
            mle_enabled=self.mle_enabled,
            noiseless=self.noiseless,
        )


def build_experiment_config(mapping):
    """Turn a typed key mapping (file plus overrides) into ExperimentConfig."""
    unknown = sorted(set(mapping) - set(_KEY_PARSERS))
    if unknown:
        raise ConfigError("unknown configuration keys: %s" % ", ".join(unknown))

    d = int(mapping.get("d", 2))
    gains = None
    if any(k in mapping for k in _GAIN_KEYS):
        base = default_gains(d)
        gains = GainSchedule(
            a=float(mapping.get("gain_a", base.a)),
            A=float(mapping.get("gain_A", base.A)),
            s=float(mapping.get("gain_s", base.s)),
            b=float(mapping.get("gain_b", base.b)),
            r=float(mapping.get("gain_r", base.r)),
        )
    simplex = None
    if any(k in mapping for k in _SIMPLEX_KEYS):
        base = SimplexOptions()
        simplex = SimplexOptions(
            max_evaluations=mapping.get("simplex_max_evaluations", base.max_evaluations),
            x_tolerance=float(mapping.get("simplex_x_tolerance", base.x_tolerance)),
            f_tolerance=float(mapping.get("simplex_f_tolerance", base.f_tolerance)),
            reflection=float(mapping.get("simplex_reflection", base.reflection)),
            expansion=float(mapping.get("simplex_expansion", base.expansion)),
            contraction=float(mapping.get("simplex_contraction", base.contraction)),
            shrink=float(mapping.get("simplex_shrink", base.shrink)),
        )
    unitary = None
    if "post" in mapping or "re_update" in mapping:
        post_raw = str(mapping.get("post", "none")).strip().lower()
        if post_raw not in _POST_ALIASES:
            raise ConfigError(
                "post must be one of %s, got %r" % (", ".join(sorted(set(_POST_ALIASES))), post_raw)
            )
        unitary = UnitaryEstimationOptions(
            post_processing=_POST_ALIASES[post_raw],
            re_update=bool(mapping.get("re_update", False)),
        )

    return ExperimentConfig(
        mode=str(mapping.get("mode", "state")),
        d=d,
        shots=_parse_shots(mapping.get("shots", (1000,))),
        k_max=int(mapping.get("iterations", 100)),
        targets=int(mapping.get("targets", 20)),
        runs=int(mapping.get("runs", 10)),
        seed=int(mapping.get("seed", 0)),
        gains=gains,
        simplex=simplex,
        unitary=unitary,
        mle_enabled=bool(mapping.get("mle", True)),
        noiseless=bool(mapping.get("noiseless", False)),
        jobs=int(mapping.get("jobs", 1)),
        out=mapping.get("out"),
    )


@dataclass(frozen=True)
class ResultRow:
    mode: str
    d: int
    N: int
    k: int
    n_t: int
    variant: str
    mean_mse: float
    median_mse: float
    q1: float
    q3: float
    gm_benchmark: float
    samples: int


@dataclass
class ResultsTable:
    """Rows of per-iteration statistics plus the per-target curves behind them.

    target_curves maps (N, variant) to an array of shape (targets, k_max)
    holding each target's run-averaged MSE curve; it backs significance
    checks that need more than the reduced rows and is not serialized.
    """

    rows: list
    target_curves: dict = field(default_factory=dict)

    def k_values(self):
        return sorted({row.k for row in self.rows})


def _run_state_cell(task):
    seed, n_index, target_index, run_index, target, econf = task
    stream = RngStream(seed).child(1, n_index, target_index, run_index)
    traj = estimate_state(target, econf, rng=stream)
    return traj.se


def _run_unitary_cell(task):
    seed, n_index, target_index, run_index, target_u, econf, options = task
    stream = RngStream(seed).child(1, n_index, target_index, run_index)
    traj = estimate_unitary(target_u, econf, options, rng=stream)
    return np.stack([traj.hs_raw, traj.hs_closest, traj.hs_gs])


def _map_tasks(fn, tasks, jobs):
    if jobs <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def run_state_experiment(config):
    """Run the state-mode Monte Carlo grid described by config."""
    if config.mode != "state":
        raise ConfigError("run_state_experiment needs mode=state, got %r" % (config.mode,))
    master = RngStream(config.seed)
    tgen = master.child(0).generator()
    targets = [haar_random_state(config.d, tgen) for _ in range(config.targets)]

    rows = []
    curves = {}
    for n_index, n_shots in enumerate(config.shots):
        econf = config.estimation_config(n_shots)
        tasks = [
            (config.seed, n_index, i, j, targets[i], econf)
            for i in range(config.targets)
            for j in range(config.runs)
        ]
        se_curves = _map_tasks(_run_state_cell, tasks, config.jobs)
        se_array = np.array(se_curves).reshape(config.targets, config.runs, config.k_max)
        target_mse = se_array.mean(axis=1)
        curves[(n_shots, STATE_VARIANT)] = target_mse
        for k in range(1, config.k_max + 1):
            stats = summary_statistics(target_mse[:, k - 1])
            n_t = 2 * n_shots * k
            rows.append(
                ResultRow(
                    mode="state",
                    d=config.d,
                    N=n_shots,
                    k=k,
                    n_t=n_t,
                    variant=STATE_VARIANT,
                    mean_mse=stats.mean,
                    median_mse=stats.median,
                    q1=stats.q1,
                    q3=stats.q3,
                    gm_benchmark=gill_massar_mse(2 * config.d, n_t),
                    samples=config.targets * config.runs,
                )
            )
    return ResultsTable(rows=rows, target_curves=curves)


def run_unitary_experiment(config):
    """Run the unitary-mode Monte Carlo grid described by config."""
    if config.mode != "unitary":
        raise ConfigError("run_unitary_experiment needs mode=unitary, got %r" % (config.mode,))
    options = config.unitary if config.unitary is not None else UnitaryEstimationOptions()
    master = RngStream(config.seed)
    tgen = master.child(0).generator()
    targets = [haar_random_unitary(config.d, tgen) for _ in range(config.targets)]

    rows = []
    curves = {}
    for n_index, n_shots in enumerate(config.shots):
        econf = config.estimation_config(n_shots)
        tasks = [
            (config.seed, n_index, i, j, targets[i], econf, options)
            for i in range(config.targets)
            for j in range(config.runs)
        ]
        hs_curves = _map_tasks(_run_unitary_cell, tasks, config.jobs)
        hs_array = np.array(hs_curves).reshape(
            config.targets, config.runs, len(UNITARY_VARIANTS), config.k_max
        )
        target_mse = hs_array.mean(axis=1)
        for v_index, variant in enumerate(UNITARY_VARIANTS):
            curves[(n_shots, variant)] = target_mse[:, v_index, :]
        for k in range(1, config.k_max + 1):
            per_column_n_t = 2 * n_shots * k
            n_t_star = config.d * per_column_n_t
            benchmark = config.d * gill_massar_mse(2 * config.d, per_column_n_t)
            for v_index, variant in enumerate(UNITARY_VARIANTS):
                stats = summary_statistics(target_mse[:, v_index, k - 1])
                rows.append(
                    ResultRow(
                        mode="unitary",
                        d=config.d,
                        N=n_shots,
                        k=k,
                        n_t=n_t_star,
                        variant=variant,
                        mean_mse=stats.mean,
                        median_mse=stats.median,
                        q1=stats.q1,
                        q3=stats.q3,
                        gm_benchmark=benchmark,
                        samples=config.targets * config.runs,
                    )
                )
    return ResultsTable(rows=rows, target_curves=curves)


def run_experiment(config):
    if config.mode == "state":
        return run_state_experiment(config)
    return run_unitary_experiment(config)


@dataclass(frozen=True)
class FitEntry:
    """One fitted cell of the results table."""

    d: int
    N: int
    variant: str
    fit: object


def fit_report(table, windows):
    """Power-law fits of mean MSE vs N_T for every (d, N, variant) cell.

    Each window is an (k_lo, k_hi) iteration range and must lie inside
    the table's iteration span.
    """
    ks = table.k_values()
    if not ks:
        raise RangeError("results table is empty")
    entries = []
    cells = sorted({(row.d, row.N, row.variant) for row in table.rows})
    for window in windows:
        k_lo, k_hi = int(window[0]), int(window[1])
        if k_lo >= k_hi:
            raise RangeError("window must satisfy k_lo < k_hi, got %r" % (window,))
        if k_lo < ks[0] or k_hi > ks[-1]:
            raise RangeError(
                "window %r falls outside the table's iterations [%d, %d]"
                % (window, ks[0], ks[-1])
            )
        for d, n_shots, variant in cells:
            points = [
                (row.n_t, row.mean_mse)
                for row in table.rows
                if row.d == d
                and row.N == n_shots
                and row.variant == variant
                and k_lo <= row.k <= k_hi
            ]
            fit = power_law_fit(points, (k_lo, k_hi))
            entries.append(FitEntry(d=d, N=n_shots, variant=variant, fit=fit))
    return entries


def _format_value(value):
    return "%.17g" % value


def emit_csv(table, path):
    """Write the results table as CSV; overwrites any existing file.

    Floats carry 17 significant digits so parsing them back is lossless.
    """
    lines = [CSV_HEADER]
    for row in table.rows:
        lines.append(
            ",".join(
                [
                    row.mode,
                    str(row.d),
                    str(row.N),
                    str(row.k),
                    str(row.n_t),
                    row.variant,
                    _format_value(row.mean_mse),
                    _format_value(row.median_mse),
                    _format_value(row.q1),
                    _format_value(row.q3),
                    _format_value(row.gm_benchmark),
                    str(row.samples),
                ]
            )
        )
    try:
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError("cannot write results to %r: %s" % (path, exc)) from exc


def read_csv(path):
    """Parse a results CSV produced by emit_csv back into a ResultsTable."""
    try:
        with open(path, "r") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise OSError("cannot read results from %r: %s" % (path, exc)) from exc
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError("%r does not look like a results CSV" % (path,))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 12:
            raise ConfigError("malformed CSV row on line %d of %r" % (lineno, path))
        rows.append(
            ResultRow(
                mode=parts[0],
                d=int(parts[1]),
                N=int(parts[2]),
                k=int(parts[3]),
                n_t=int(parts[4]),
                variant=parts[5],
                mean_mse=float(parts[6]),
                median_mse=float(parts[7]),
                q1=float(parts[8]),
                q3=float(parts[9]),
                gm_benchmark=float(parts[10]),
                samples=int(parts[11]),
            )
        )
    return ResultsTable(rows=rows)
