"""Pure-numpy likelihood kernels; fallback when the compiled module is absent.

The parameter vector x packs a complex candidate state as 2d floats with
real and imaginary parts interleaved: x[2i] = Re z_i, x[2i+1] = Im z_i.
probes is an (R, d) complex array of measurement settings and counts an
(R, 2d) float array of click counts in the fixed arm order (plus arms
0..d-1, then minus arms).
"""

import numpy as np

from .simplex import minimize_simplex, SimplexOptions

BACKEND_NAME = "python"

_P_FLOOR = 1e-300
_NORM_TOL = 1e-12


def neg_log_likelihood(x, probes, counts):
    """Negative cumulative log-likelihood of the candidate packed in x.

    The candidate is normalized internally; a numerically zero candidate
    gets +inf so the simplex walks away from it.  Zero-count outcomes
    contribute nothing even when their probability vanishes.
    """
    x = np.asarray(x, dtype=float)
    z = x[0::2] + 1j * x[1::2]
    n = np.linalg.norm(z)
    if n < _NORM_TOL:
        return float("inf")
    z = z / n
    sp = (z[np.newaxis, :] + probes) * 0.5
    sm = (z[np.newaxis, :] - probes) * 0.5
    p = np.concatenate(
        [sp.real * sp.real + sp.imag * sp.imag, sm.real * sm.real + sm.imag * sm.imag],
        axis=1,
    )
    np.maximum(p, _P_FLOOR, out=p)
    return -float(np.sum(counts * np.log(p)))


def refine_params(x0, probes, counts, max_evaluations, x_tolerance, f_tolerance,
                  reflection, expansion, contraction, shrink, displacement):
    """Simplex minimization of neg_log_likelihood from x0.

    Returns (x_best, f_best, evaluations).  Same contract as the compiled
    version; this one simply closes over the numpy objective.
    """
    probes = np.ascontiguousarray(probes, dtype=complex)
    counts = np.ascontiguousarray(counts, dtype=float)

    def objective(x):
        return neg_log_likelihood(x, probes, counts)

    opts = SimplexOptions(
        max_evaluations=int(max_evaluations),
        x_tolerance=x_tolerance,
        f_tolerance=f_tolerance,
        reflection=reflection,
        expansion=expansion,
        contraction=contraction,
        shrink=shrink,
        displacement=displacement,
    )
    return minimize_simplex(objective, np.asarray(x0, dtype=float), opts)
