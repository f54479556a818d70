# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled greedy MAP step loop.

Same selection semantics as the numpy fallback in tokensieve.qcsp:
argmax of v^2 over unselected candidates (strict >, so ties go to the
lower index), Cholesky-style update with the eps-guarded denominator,
candidates at v^2 <= 0 never win.  The coefficient matrix is laid out
one contiguous row per candidate so the per-candidate dot products
stream sequential memory and selected candidates can be skipped.

The dot product accumulates in four lanes combined as (s0+s1)+(s2+s3),
a fixed order that keeps results deterministic while letting the
compiler vectorize without reassociation license.
"""

from libc.math cimport sqrt, INFINITY


cdef inline double _dot(const double* x, const double* y, Py_ssize_t t) nogil:
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t l = 0
    while l + 4 <= t:
        s0 += x[l] * y[l]
        s1 += x[l + 1] * y[l + 1]
        s2 += x[l + 2] * y[l + 2]
        s3 += x[l + 3] * y[l + 3]
        l += 4
    while l < t:
        s0 += x[l] * y[l]
        l += 1
    return (s0 + s1) + (s2 + s3)


def greedy_steps(double[:, ::1] kernel, double[:, ::1] cis, double[::1] v_sq,
                 unsigned char[::1] selected, long long[::1] order,
                 double[::1] gains, Py_ssize_t t_start, Py_ssize_t t_stop,
                 double eps):
    """Run greedy steps [t_start, t_stop); returns (steps_done, exhausted)."""
    cdef Py_ssize_t n = v_sq.shape[0]
    cdef Py_ssize_t done = t_stop
    cdef bint exhausted = False
    cdef Py_ssize_t t, i, j
    cdef double best, vj, denom, e
    cdef const double* row
    cdef const double* uj

    with nogil:
        for t in range(t_start, t_stop):
            j = -1
            best = 0.0
            for i in range(n):
                if selected[i] == 0 and v_sq[i] > best:
                    best = v_sq[i]
                    j = i
            if j < 0:
                done = t
                exhausted = True
                break
            vj = v_sq[j]
            denom = sqrt(vj + eps)
            selected[j] = 1
            order[t] = j
            gains[t] = vj
            v_sq[j] = -INFINITY
            row = &kernel[j, 0]
            uj = &cis[j, 0]
            for i in range(n):
                if selected[i]:
                    continue
                e = (row[i] - _dot(&cis[i, 0], uj, t)) / denom
                cis[i, t] = e
                v_sq[i] -= e * e
    return done, exhausted
