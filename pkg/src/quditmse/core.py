"""Complex linear algebra for qudit states and unitary matrices.

States are plain numpy complex vectors of length d, unitaries are d x d
complex arrays.  The squared error used throughout is the plain Euclidean
one, sum |z_i - w_i|^2, which is sensitive to the relative phase between
the two vectors (a common phase applied to both drops out, a phase applied
to one of them does not).
"""

import numpy as np

from .errors import (
    DegenerateVector,
    DimensionError,
    InvalidDimension,
    RankDeficient,
    SingularMatrix,
)

# Below this norm a vector is treated as having no usable direction.
NORM_TOL = 1e-12
# Allowed max-norm deviation of U^dag U from the identity.
UNITARY_TOL = 1e-10


class RngStream:
    """Named handle for a reproducible random stream.

    A stream is identified by a master seed plus a key path (tuple of
    nonnegative ints).  Two streams with different key paths are
    statistically independent, and the same (seed, key) always yields the
    same draw sequence.  child(i, j, ...) derives a sub-stream, which is
    how experiment cells, runs and matrix columns get disjoint randomness.
    """

    def __init__(self, seed, stream=()):
        if isinstance(stream, (int, np.integer)):
            stream = (int(stream),)
        self.seed = int(seed)
        self.stream = tuple(int(s) for s in stream)

    def child(self, *indices):
        """Return the sub-stream obtained by appending indices to the key."""
        return RngStream(self.seed, self.stream + tuple(int(i) for i in indices))

    def generator(self):
        """Create a fresh numpy Generator positioned at the stream start."""
        ss = np.random.SeedSequence(self.seed, spawn_key=self.stream)
        return np.random.default_rng(ss)

    def __repr__(self):
        return "RngStream(seed=%d, stream=%r)" % (self.seed, self.stream)


def as_generator(rng):
    """Accept an RngStream or a numpy Generator and return a Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


def normalize(v):
    """Return v / ||v||, preserving the global phase."""
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n < NORM_TOL:
        raise DegenerateVector("cannot normalize a zero-norm vector")
    return v / n


def squared_error(z, w):
    """Sum of |z_i - w_i|^2 between two equal-length complex vectors.

    Zero exactly when the vectors agree entrywise, global phase included.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape != w.shape:
        raise DimensionError("shape mismatch: %r vs %r" % (z.shape, w.shape))
    diff = z - w
    return float(np.real(np.vdot(diff, diff)))


def haar_random_state(d, rng):
    """Draw a uniformly distributed pure state of dimension d.

    Standard construction: d i.i.d. standard complex Gaussian entries,
    normalized.
    """
    if d < 1:
        raise InvalidDimension("dimension must be >= 1, got %r" % (d,))
    gen = as_generator(rng)
    re = gen.standard_normal(d)
    im = gen.standard_normal(d)
    return normalize(re + 1j * im)


def haar_random_unitary(d, rng):
    """Draw a Haar-distributed d x d unitary.

    QR-factorize a complex Ginibre matrix and absorb the phases of R's
    diagonal into Q so the distribution is exactly uniform.
    """
    if d < 1:
        raise InvalidDimension("dimension must be >= 1, got %r" % (d,))
    gen = as_generator(rng)
    g = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r).copy()
    mod = np.abs(diag)
    # Measure-zero guard: a zero pivot contributes an arbitrary phase.
    mod[mod < NORM_TOL] = 1.0
    phases = diag / mod
    # q columns are the orthonormal frame; r's diagonal phases would bias it.
    return q * phases[np.newaxis, :]


def gram_schmidt(m):
    """Orthonormalize the columns of m in ascending index order.

    Modified Gram-Schmidt: each column is projected against the already
    accepted ones before normalization, which is the numerically stable
    variant.  Column j of the result spans the same space as columns
    0..j of the input, and column 0 is just the normalized first column.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError("expected a square matrix, got shape %r" % (m.shape,))
    d = m.shape[0]
    q = np.zeros((d, d), dtype=complex)
    for j in range(d):
        v = m[:, j].copy()
        for i in range(j):
            v -= q[:, i] * np.vdot(q[:, i], v)
        n = np.linalg.norm(v)
        if n < NORM_TOL:
            raise RankDeficient("column %d is dependent on earlier columns" % j)
        q[:, j] = v / n
    return q


def closest_unitary(m):
    """Unitary polar factor of m, the unitary minimizing ||m - U||_HS.

    Computed from the singular value decomposition m = V S W^dag as V W^dag,
    which equals m (m^dag m)^(-1/2) but stays stable for poorly conditioned
    input.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError("expected a square matrix, got shape %r" % (m.shape,))
    v, s, wh = np.linalg.svd(m)
    if np.min(s) <= NORM_TOL:
        raise SingularMatrix("smallest singular value %.3e is too close to zero" % np.min(s))
    return v @ wh


def hs_distance(u, v):
    """Hilbert-Schmidt distance Tr[(U-V)(U-V)^dag] = sum |U_jk - V_jk|^2."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise DimensionError("shape mismatch: %r vs %r" % (u.shape, v.shape))
    diff = u - v
    return float(np.real(np.sum(diff * np.conj(diff))))


def unitarity_defect(m):
    """Max-norm deviation of m^dag m from the identity."""
    m = np.asarray(m, dtype=complex)
    d = m.shape[0]
    return float(np.max(np.abs(m.conj().T @ m - np.eye(d))))


def is_unitary(m, tol=UNITARY_TOL):
    """True when m passes the unitarity check at tolerance tol."""
    return unitarity_defect(m) <= tol
