"""Stochastic approximation over complex variables.

The optimizer perturbs the current iterate z_k along a random direction
Delta whose entries are drawn from {+1, -1, +i, -i}, evaluates the noisy
objective at z_k + c_k Delta and z_k - c_k Delta, and forms a one-scalar
gradient estimate

    g_i = (f_plus - f_minus) / (2 c_k conj(Delta_i)),

which is an unbiased estimate of the conjugate-coordinate (Wirtinger)
gradient for quadratic objectives.  The update is z_{k+1} = z_k - a_k g.
Gains decay as a_k = a/(k+1+A)^s and c_k = b/(k+1)^r with k counted from
zero.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_generator
from .errors import DegenerateIterate, DimensionError, InvalidGain

# Values a perturbation entry can take, indexed by uniform draws in 0..3.
PERTURBATION_VALUES = np.array([1.0 + 0.0j, -1.0 + 0.0j, 0.0 + 1.0j, 0.0 - 1.0j])

ITERATE_TOL = 1e-12


@dataclass(frozen=True)
class GainSchedule:
    """Parameters of the decaying step and perturbation magnitudes."""

    a: float
    A: float
    s: float
    b: float
    r: float

    def __post_init__(self):
        for name in ("a", "s", "b", "r"):
            if getattr(self, name) <= 0:
                raise InvalidGain("%s must be > 0, got %r" % (name, getattr(self, name)))
        if self.A < 0:
            raise InvalidGain("A must be >= 0, got %r" % (self.A,))


def default_gains(d):
    """Default schedule for dimension d.

    a=3, s=1, b=0.35, r=1/6 follow the usual two-measurement tuning rules.
    The damping constant grows with the dimension because the perturbation
    noise does: A = 2d keeps the first steps small enough that runs at
    d >= 4 do not get thrown far from the target before the decay of a_k
    takes over.  Every field can be overridden through the configuration.
    """
    return GainSchedule(a=3.0, A=2.0 * d, s=1.0, b=0.35, r=1.0 / 6.0)


@dataclass(frozen=True)
class CspsaState:
    """Iterate plus iteration counter; the iterate may be unnormalized."""

    iterate: np.ndarray
    k: int


def gains_at(sched, k):
    """Step size a_k and perturbation size c_k at iteration k (k >= 0)."""
    a_k = sched.a / (k + 1.0 + sched.A) ** sched.s
    c_k = sched.b / (k + 1.0) ** sched.r
    return a_k, c_k


def sample_perturbation(d, rng):
    """Draw a length-d vector with i.i.d. entries uniform on {+1,-1,+i,-i}."""
    gen = as_generator(rng)
    idx = gen.integers(0, 4, size=d)
    return PERTURBATION_VALUES[idx]


def probes(state, delta, c_k):
    """The two evaluation points z_k + c_k Delta and z_k - c_k Delta.

    Returned unnormalized; the measurement layer normalizes its own inputs.
    """
    if state.iterate.shape != delta.shape:
        raise DimensionError(
            "iterate and perturbation differ: %r vs %r" % (state.iterate.shape, delta.shape)
        )
    offset = c_k * delta
    return state.iterate + offset, state.iterate - offset


def gradient_estimate(f_plus, f_minus, c_k, delta):
    """One-scalar gradient estimate from the two objective values."""
    if c_k <= 0:
        raise InvalidGain("c_k must be > 0, got %r" % (c_k,))
    return (f_plus - f_minus) / (2.0 * c_k * np.conj(delta))


def step(state, g, a_k):
    """Apply z <- z - a_k g and advance the iteration counter."""
    if state.iterate.shape != np.shape(g):
        raise DimensionError(
            "iterate and gradient differ: %r vs %r" % (state.iterate.shape, np.shape(g))
        )
    new = state.iterate - a_k * np.asarray(g)
    if np.linalg.norm(new) < ITERATE_TOL:
        raise DegenerateIterate("update produced a zero-norm iterate")
    return CspsaState(iterate=new, k=state.k + 1)
