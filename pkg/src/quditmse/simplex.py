"""Hand-rolled Nelder-Mead simplex optimizer.

Kept deliberately small and explicit: the likelihood refiner needs exact
control over the coefficient set, the initial-simplex rule and the
termination tests, because the compiled kernel reimplements the identical
algorithm and the two must follow the same path decision for decision.

minimize_simplex is the core (minimization); nelder_mead is the public
wrapper that maximizes by negating the objective.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidStart


@dataclass(frozen=True)
class SimplexOptions:
    """Budget, tolerances and coefficients of the simplex search.

    max_evaluations of None means 200 per parameter, filled in at call
    time.  The initial simplex is the start point plus displacement along
    each coordinate axis.
    """

    max_evaluations: int = None
    x_tolerance: float = 1e-8
    f_tolerance: float = 1e-10
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    displacement: float = 0.05

    def __post_init__(self):
        if self.max_evaluations is not None and self.max_evaluations < 1:
            raise ConfigError("max_evaluations must be >= 1")
        if self.x_tolerance <= 0 or self.f_tolerance <= 0:
            raise ConfigError("tolerances must be > 0")
        if self.reflection <= 0:
            raise ConfigError("reflection coefficient must be > 0")
        if self.expansion <= 1:
            raise ConfigError("expansion coefficient must be > 1")
        if not 0 < self.contraction < 1:
            raise ConfigError("contraction coefficient must be in (0, 1)")
        if not 0 < self.shrink < 1:
            raise ConfigError("shrink coefficient must be in (0, 1)")
        if self.displacement == 0:
            raise ConfigError("displacement must be nonzero")

    def budget(self, n):
        """Evaluation budget for an n-parameter problem."""
        if self.max_evaluations is not None:
            return int(self.max_evaluations)
        return 200 * n


def minimize_simplex(f, x0, opts):
    """Nelder-Mead minimization of f from x0.

    Returns (x_best, f_best, evaluations).  Termination happens at the top
    of the loop, either on the evaluation budget or when both the function
    spread across the simplex and the max-norm spread of the vertices fall
    inside the tolerances.  The best vertex never gets worse, so f_best is
    always <= f(x0).

    The compiled kernel mirrors this function step for step; any change
    here must be transcribed there.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    f0 = float(f(x0))
    if not np.isfinite(f0):
        raise InvalidStart("objective is not finite at the start point")
    budget = opts.budget(n)

    pts = np.empty((n + 1, n), dtype=float)
    fs = np.empty(n + 1, dtype=float)
    pts[0] = x0
    fs[0] = f0
    for i in range(n):
        pts[i + 1] = x0
        pts[i + 1, i] += opts.displacement
        fs[i + 1] = float(f(pts[i + 1]))
    evals = n + 1

    while True:
        order = np.argsort(fs, kind="stable")
        pts = pts[order]
        fs = fs[order]
        if evals >= budget:
            break
        if fs[n] - fs[0] <= opts.f_tolerance:
            if np.max(np.abs(pts[1:] - pts[0])) <= opts.x_tolerance:
                break
        centroid = np.mean(pts[:n], axis=0)

        xr = centroid + opts.reflection * (centroid - pts[n])
        fr = float(f(xr))
        evals += 1
        if fr < fs[0]:
            xe = centroid + opts.expansion * (xr - centroid)
            fe = float(f(xe))
            evals += 1
            if fe < fr:
                pts[n], fs[n] = xe, fe
            else:
                pts[n], fs[n] = xr, fr
            continue
        if fr < fs[n - 1]:
            pts[n], fs[n] = xr, fr
            continue
        if fr < fs[n]:
            xc = centroid + opts.contraction * (xr - centroid)
            fc = float(f(xc))
            evals += 1
            if fc <= fr:
                pts[n], fs[n] = xc, fc
                continue
        else:
            xc = centroid - opts.contraction * (centroid - pts[n])
            fc = float(f(xc))
            evals += 1
            if fc < fs[n]:
                pts[n], fs[n] = xc, fc
                continue
        # Neither contraction was acceptable: shrink toward the best vertex.
        for i in range(1, n + 1):
            pts[i] = pts[0] + opts.shrink * (pts[i] - pts[0])
            fs[i] = float(f(pts[i]))
        evals += n

    order = np.argsort(fs, kind="stable")
    return pts[order[0]].copy(), float(fs[order[0]]), evals


def nelder_mead(objective, start, opts=None):
    """Maximize objective from start; returns the best point found.

    The result is never worse than the start point.  Termination follows
    the options' tolerances and evaluation budget.
    """
    if opts is None:
        opts = SimplexOptions()
    start = np.asarray(start, dtype=float)
    value = float(objective(start))
    if not np.isfinite(value):
        raise InvalidStart("objective is not finite at the start point")

    def neg(x):
        return -float(objective(x))

    best, _, _ = minimize_simplex(neg, start, opts)
    return best
