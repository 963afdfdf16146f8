# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False, language_level=3
"""Compiled likelihood kernels.

Same contract as _kernels_py: neg_log_likelihood evaluates the negative
cumulative log-likelihood of a candidate packed as interleaved re/im
floats, and refine_params runs the Nelder-Mead simplex over it.  The
simplex control flow is a line-for-line transcription of
simplex.minimize_simplex; keep the two in lockstep.  Floating-point sums
are accumulated in loop order here and in vectorized order in numpy, so
cross-backend agreement is to rounding, not to the bit.
"""

import numpy as np

from libc.math cimport log, sqrt, INFINITY

from .errors import InvalidStart

BACKEND_NAME = "cython"

cdef double P_FLOOR = 1e-300
cdef double NORM_TOL = 1e-12


cdef double _nll(const double* x, const double complex* probes, const double* counts,
                 Py_ssize_t n_records, Py_ssize_t d) noexcept nogil:
    cdef double nrm = 0.0
    cdef Py_ssize_t i, r
    cdef double inv, acc, zr, zi, pr, pi, ar, ai, p, c
    cdef const double complex* row
    cdef const double* crow
    for i in range(2 * d):
        nrm += x[i] * x[i]
    nrm = sqrt(nrm)
    if nrm < NORM_TOL:
        return INFINITY
    inv = 1.0 / nrm
    acc = 0.0
    for r in range(n_records):
        row = probes + r * d
        crow = counts + r * 2 * d
        for i in range(d):
            c = crow[i]
            if c != 0.0:
                zr = x[2 * i] * inv
                zi = x[2 * i + 1] * inv
                pr = row[i].real
                pi = row[i].imag
                ar = (zr + pr) * 0.5
                ai = (zi + pi) * 0.5
                p = ar * ar + ai * ai
                if p < P_FLOOR:
                    p = P_FLOOR
                acc += c * log(p)
        for i in range(d):
            c = crow[d + i]
            if c != 0.0:
                zr = x[2 * i] * inv
                zi = x[2 * i + 1] * inv
                pr = row[i].real
                pi = row[i].imag
                ar = (zr - pr) * 0.5
                ai = (zi - pi) * 0.5
                p = ar * ar + ai * ai
                if p < P_FLOOR:
                    p = P_FLOOR
                acc += c * log(p)
    return -acc


def neg_log_likelihood(x, probes, counts):
    """Negative cumulative log-likelihood; see _kernels_py for the contract."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double complex[:, ::1] pv = np.ascontiguousarray(probes, dtype=np.complex128)
    cdef double[:, ::1] cv = np.ascontiguousarray(counts, dtype=np.float64)
    if cv.shape[1] != 2 * pv.shape[1] or xv.shape[0] != 2 * pv.shape[1]:
        raise ValueError("inconsistent shapes for x, probes, counts")
    return _nll(&xv[0], &pv[0, 0], &cv[0, 0], pv.shape[0], pv.shape[1])


cdef void _sort_simplex(double[:, ::1] P, double[::1] F, double[:, ::1] S,
                        Py_ssize_t n) noexcept nogil:
    # Stable insertion sort of the n+1 vertices by objective value; row 0 of
    # the scratch block S holds the vertex being inserted.
    cdef Py_ssize_t i, j, k
    cdef double key
    for i in range(1, n + 1):
        key = F[i]
        for k in range(n):
            S[0, k] = P[i, k]
        j = i - 1
        while j >= 0 and F[j] > key:
            F[j + 1] = F[j]
            for k in range(n):
                P[j + 1, k] = P[j, k]
            j -= 1
        F[j + 1] = key
        for k in range(n):
            P[j + 1, k] = S[0, k]


def refine_params(x0, probes, counts, max_evaluations, x_tolerance, f_tolerance,
                  reflection, expansion, contraction, shrink, displacement):
    """Simplex minimization of the likelihood kernel from x0.

    Returns (x_best, f_best, evaluations) exactly like the numpy version.
    """
    x0a = np.ascontiguousarray(x0, dtype=np.float64)
    pa = np.ascontiguousarray(probes, dtype=np.complex128)
    ca = np.ascontiguousarray(counts, dtype=np.float64)
    cdef double[::1] x0v = x0a
    cdef double complex[:, ::1] pv = pa
    cdef double[:, ::1] cv = ca
    cdef Py_ssize_t n = x0v.shape[0]
    cdef Py_ssize_t d = pv.shape[1]
    cdef Py_ssize_t n_records = pv.shape[0]
    if cv.shape[1] != 2 * d or n != 2 * d:
        raise ValueError("inconsistent shapes for x0, probes, counts")

    cdef long budget = int(max_evaluations)
    cdef double xtol = x_tolerance
    cdef double ftol = f_tolerance
    cdef double refl = reflection
    cdef double expa = expansion
    cdef double contr = contraction
    cdef double shr = shrink
    cdef double disp = displacement

    pts = np.empty((n + 1, n), dtype=np.float64)
    fs = np.empty(n + 1, dtype=np.float64)
    scratch = np.empty((4, n), dtype=np.float64)
    cdef double[:, ::1] P = pts
    cdef double[::1] F = fs
    cdef double[:, ::1] S = scratch  # rows: sort tmp, centroid, xr, xe/xc

    cdef const double complex* pp = &pv[0, 0]
    cdef const double* cc = &cv[0, 0]
    cdef Py_ssize_t i, k
    cdef long evals
    cdef double fr, fe, fc, spread, acc

    with nogil:
        for k in range(n):
            P[0, k] = x0v[k]
        F[0] = _nll(&P[0, 0], pp, cc, n_records, d)
    if not np.isfinite(fs[0]):
        raise InvalidStart("objective is not finite at the start point")

    with nogil:
        for i in range(n):
            for k in range(n):
                P[i + 1, k] = x0v[k]
            P[i + 1, i] = P[i + 1, i] + disp
            F[i + 1] = _nll(&P[i + 1, 0], pp, cc, n_records, d)
        evals = n + 1

        while True:
            _sort_simplex(P, F, S, n)
            if evals >= budget:
                break
            if F[n] - F[0] <= ftol:
                spread = 0.0
                for i in range(1, n + 1):
                    for k in range(n):
                        acc = P[i, k] - P[0, k]
                        if acc < 0:
                            acc = -acc
                        if acc > spread:
                            spread = acc
                if spread <= xtol:
                    break
            # Centroid of the n best vertices, summed in row order.
            for k in range(n):
                acc = 0.0
                for i in range(n):
                    acc += P[i, k]
                S[1, k] = acc / n

            for k in range(n):
                S[2, k] = S[1, k] + refl * (S[1, k] - P[n, k])
            fr = _nll(&S[2, 0], pp, cc, n_records, d)
            evals += 1
            if fr < F[0]:
                for k in range(n):
                    S[3, k] = S[1, k] + expa * (S[2, k] - S[1, k])
                fe = _nll(&S[3, 0], pp, cc, n_records, d)
                evals += 1
                if fe < fr:
                    for k in range(n):
                        P[n, k] = S[3, k]
                    F[n] = fe
                else:
                    for k in range(n):
                        P[n, k] = S[2, k]
                    F[n] = fr
                continue
            if fr < F[n - 1]:
                for k in range(n):
                    P[n, k] = S[2, k]
                F[n] = fr
                continue
            if fr < F[n]:
                for k in range(n):
                    S[3, k] = S[1, k] + contr * (S[2, k] - S[1, k])
                fc = _nll(&S[3, 0], pp, cc, n_records, d)
                evals += 1
                if fc <= fr:
                    for k in range(n):
                        P[n, k] = S[3, k]
                    F[n] = fc
                    continue
            else:
                for k in range(n):
                    S[3, k] = S[1, k] - contr * (S[1, k] - P[n, k])
                fc = _nll(&S[3, 0], pp, cc, n_records, d)
                evals += 1
                if fc < F[n]:
                    for k in range(n):
                        P[n, k] = S[3, k]
                    F[n] = fc
                    continue
            for i in range(1, n + 1):
                for k in range(n):
                    P[i, k] = P[0, k] + shr * (P[i, k] - P[0, k])
                F[i] = _nll(&P[i, 0], pp, cc, n_records, d)
            evals += n

        _sort_simplex(P, F, S, n)

    return pts[0].copy(), float(fs[0]), int(evals)
