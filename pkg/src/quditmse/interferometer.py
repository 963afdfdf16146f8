"""Simulated multi-arm interferometric measurement.

The device interferes the unknown state z with a known probe setting and
has 2d output arms.  Arm k of the "plus" port fires with probability
|z_k + probe_k|^2 / 4 and arm k of the "minus" port with
|z_k - probe_k|^2 / 4.  For normalized inputs these 2d numbers sum to one,
and four times the total minus-port probability equals the squared error
between z and the probe, which is what makes the device useful: counting
minus-port clicks estimates the SE directly.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_generator, squared_error
from .errors import ContractViolation, DimensionError, EmptyEnsemble

# How far from unit norm an input may be before it is rejected.
INPUT_NORM_TOL = 1e-9


@dataclass(frozen=True)
class OutcomeDistribution:
    """Click probabilities for the 2d output arms of one measurement."""

    plus_port: np.ndarray
    minus_port: np.ndarray

    def concatenated(self):
        """All 2d probabilities in the fixed order plus arms, then minus arms."""
        return np.concatenate([self.plus_port, self.minus_port])


@dataclass(frozen=True)
class MeasurementRecord:
    """Counts from measuring N copies at one probe setting."""

    probe: np.ndarray
    counts_plus: np.ndarray
    counts_minus: np.ndarray
    shots: int

    def __post_init__(self):
        total = int(np.sum(self.counts_plus)) + int(np.sum(self.counts_minus))
        if total != self.shots:
            raise ContractViolation(
                "counts sum to %d but shots = %d" % (total, self.shots)
            )


def _check_normalized_pair(z, probe):
    z = np.asarray(z, dtype=complex)
    probe = np.asarray(probe, dtype=complex)
    if z.shape != probe.shape or z.ndim != 1:
        raise DimensionError("shape mismatch: %r vs %r" % (z.shape, probe.shape))
    for name, v in (("state", z), ("probe", probe)):
        if abs(np.linalg.norm(v) - 1.0) > INPUT_NORM_TOL:
            raise ContractViolation("%s is not normalized (norm %.12f)" % (name, np.linalg.norm(v)))
    return z, probe


def outcome_probabilities(z, probe):
    """Arm probabilities for state z measured against a probe setting.

    Both inputs must be normalized; the 2d entries sum to one within 1e-12.
    """
    z, probe = _check_normalized_pair(z, probe)
    sp = (z + probe) / 2.0
    sm = (z - probe) / 2.0
    plus = sp.real * sp.real + sp.imag * sp.imag
    minus = sm.real * sm.real + sm.imag * sm.imag
    return OutcomeDistribution(plus_port=plus, minus_port=minus)


def sample_record(z, probe, n_shots, rng):
    """Measure N copies of z at the given probe and return the counts.

    Counts are one multinomial draw over the 2d arm probabilities; the
    record keeps the probe setting so a likelihood can be evaluated later.
    """
    if n_shots < 1:
        raise EmptyEnsemble("need at least one shot, got %r" % (n_shots,))
    dist = outcome_probabilities(z, probe)
    p = dist.concatenated()
    # Exact unit total for the sampler; the raw sum is already 1 to ~1e-16.
    p = p / p.sum()
    gen = as_generator(rng)
    counts = gen.multinomial(int(n_shots), p)
    d = len(dist.plus_port)
    return MeasurementRecord(
        probe=np.array(probe, dtype=complex),
        counts_plus=counts[:d].copy(),
        counts_minus=counts[d:].copy(),
        shots=int(n_shots),
    )


def estimate_se(record):
    """Estimated squared error from one record: 4 * (minus clicks) / shots."""
    return 4.0 * float(np.sum(record.counts_minus)) / float(record.shots)


def exact_se_oracle(z, probe):
    """Noiseless (infinite-ensemble) value of the SE estimator.

    Equals 4 times the total minus-port probability, which coincides with
    squared_error(z, probe) for normalized inputs.
    """
    dist = outcome_probabilities(z, probe)
    return 4.0 * float(np.sum(dist.minus_port))


def _self_check(z, probe):
    """Debug helper: the identity 4*P_minus == SE, evaluated both ways."""
    return exact_se_oracle(z, probe), squared_error(z, probe)
