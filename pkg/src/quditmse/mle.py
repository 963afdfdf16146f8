"""Cumulative maximum-likelihood refinement of a state estimate.

All measurement records gathered so far enter one multinomial
log-likelihood, and a Nelder-Mead search over the 2d real components of
the candidate (normalized inside the objective) maximizes it.  The
refiner never returns a candidate with lower likelihood than its start.
"""

import numpy as np

from . import backend
from .core import normalize
from .errors import EmptyData
from .simplex import SimplexOptions

_P_FLOOR = 1e-300


class DataLog:
    """Append-only list of measurement records with packed array views.

    The packed form (probes matrix, counts matrix) is what the likelihood
    kernels consume; it is rebuilt lazily after appends.  Counts columns
    follow the fixed arm order: plus arms 0..d-1, then minus arms.
    """

    def __init__(self, records=None):
        self.records = []
        self._packed = None
        if records is not None:
            for rec in records:
                self.append(rec)

    def __len__(self):
        return len(self.records)

    def append(self, record):
        self.records.append(record)
        self._packed = None

    def total_shots(self):
        return sum(rec.shots for rec in self.records)

    def packed(self):
        """(probes, counts) arrays over all records, cached between appends."""
        if not self.records:
            raise EmptyData("no measurement records logged")
        if self._packed is None:
            probes = np.ascontiguousarray(
                [rec.probe for rec in self.records], dtype=complex
            )
            counts = np.ascontiguousarray(
                [
                    np.concatenate([rec.counts_plus, rec.counts_minus])
                    for rec in self.records
                ],
                dtype=float,
            )
            self._packed = (probes, counts)
        return self._packed


def _pack_params(z):
    x = np.empty(2 * len(z), dtype=float)
    x[0::2] = np.real(z)
    x[1::2] = np.imag(z)
    return x


def _unpack_params(x):
    return x[0::2] + 1j * x[1::2]


def log_likelihood(candidate, log):
    """Cumulative log-likelihood of the (internally normalized) candidate.

    Sum over records and outcomes of counts * ln p, with zero-count
    outcomes contributing zero and probabilities clamped at 1e-300 where
    counts are present.
    """
    probes, counts = log.packed()
    z = normalize(candidate)
    return -float(backend.neg_log_likelihood(_pack_params(z), probes, counts))


def refine(start, log, opts=None):
    """Maximize the cumulative likelihood from start; returns a unit vector.

    The candidate is parametrized by its 2d real components, the simplex
    runs on the negative log-likelihood, and the better of (search result,
    start) is returned so the likelihood never decreases.
    """
    if opts is None:
        opts = SimplexOptions()
    probes, counts = log.packed()
    z0 = normalize(start)
    x0 = _pack_params(z0)
    budget = opts.budget(x0.size)
    x_best, f_best, _ = backend.refine_params(
        x0,
        probes,
        counts,
        budget,
        opts.x_tolerance,
        opts.f_tolerance,
        opts.reflection,
        opts.expansion,
        opts.contraction,
        opts.shrink,
        opts.displacement,
    )
    result = normalize(_unpack_params(x_best))
    # The simplex keeps its best vertex, so this only trips on exact ties
    # or rounding at the normalization step; keep the guarantee airtight.
    f_start = backend.neg_log_likelihood(x0, probes, counts)
    if f_best > f_start:
        return z0
    return result
