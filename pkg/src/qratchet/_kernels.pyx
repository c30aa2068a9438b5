# cython: language_level=3
"""Compiled inner loops.  Signatures mirror :mod:`qratchet._fallback`.

The particle loops are written step-outer / particle-inner over contiguous
arrays so the compiler can vectorize the ``sin`` calls.
"""

from libc.math cimport sin

import numpy as np


cdef inline double _dv(const double* m, const double* a, const double* c,
                       Py_ssize_t nterms, double x) noexcept nogil:
    cdef double s = 0.0
    cdef Py_ssize_t j
    for j in range(nterms):
        s -= a[j] * m[j] * sin(m[j] * x + c[j])
    return s


cdef void _evolve_single(double* q, double* bp, Py_ssize_t n,
                         double gk, double mk, double ck,
                         double gl, double ml, double cl,
                         Py_ssize_t steps, double* sums) noexcept nogil:
    # single-harmonic potentials: P += gk sin(mk q + ck); q -= gl sin(ml P + cl)
    cdef Py_ssize_t i, t
    cdef double s, x
    for t in range(1, steps + 1):
        for i in range(n):
            x = bp[i] + gk * sin(mk * q[i] + ck)
            bp[i] = x
            q[i] = q[i] - gl * sin(ml * x + cl)
        s = 0.0
        for i in range(n):
            s += bp[i] - q[i]
        sums[t] = s


cdef void _evolve_general(double* q, double* bp, Py_ssize_t n,
                          const double* mk, const double* ak, const double* ck, Py_ssize_t nk,
                          const double* ml, const double* al, const double* cl, Py_ssize_t nl,
                          double k_tilde, double l_tilde,
                          Py_ssize_t steps, double* sums) noexcept nogil:
    cdef Py_ssize_t i, t
    cdef double s, x
    for t in range(1, steps + 1):
        for i in range(n):
            x = bp[i] - k_tilde * _dv(mk, ak, ck, nk, q[i])
            bp[i] = x
            q[i] = q[i] + l_tilde * _dv(ml, al, cl, nl, x)
        s = 0.0
        for i in range(n):
            s += bp[i] - q[i]
        sums[t] = s


def classical_evolve(double[::1] q, double[::1] p,
                     const double[::1] mk, const double[::1] ak, const double[::1] ck,
                     const double[::1] ml, const double[::1] al, const double[::1] cl,
                     double k_tilde, double l_tilde, Py_ssize_t steps,
                     double[::1] sums):
    """Iterate the eta-classical map in place on one block of particles.

    ``sums[t]`` receives the sum of ``p`` after ``t`` steps.
    """
    cdef Py_ssize_t n = q.shape[0], i, t
    cdef Py_ssize_t nk = mk.shape[0], nl = ml.shape[0]
    cdef double s
    if sums.shape[0] < steps + 1:
        raise ValueError("sums too short")
    if p.shape[0] != n:
        raise ValueError("q and p differ in length")
    cdef double[::1] bp = np.empty(n)
    if n == 0:
        for t in range(steps + 1):
            sums[t] = 0.0
        return
    with nogil:
        s = 0.0
        for i in range(n):
            s += p[i]
            bp[i] = q[i] + p[i]
        sums[0] = s
        if nk <= 1 and nl <= 1:
            # an empty potential is the single term with zero amplitude
            _evolve_single(&q[0], &bp[0], n,
                           k_tilde * ak[0] * mk[0] if nk else 0.0, mk[0] if nk else 1.0,
                           ck[0] if nk else 0.0,
                           l_tilde * al[0] * ml[0] if nl else 0.0, ml[0] if nl else 1.0,
                           cl[0] if nl else 0.0,
                           steps, &sums[0])
        else:
            _evolve_general(&q[0], &bp[0], n, &mk[0] if nk else NULL, &ak[0] if nk else NULL,
                            &ck[0] if nk else NULL, nk, &ml[0] if nl else NULL,
                            &al[0] if nl else NULL, &cl[0] if nl else NULL, nl,
                            k_tilde, l_tilde, steps, &sums[0])
        for i in range(n):
            p[i] = bp[i] - q[i]


def mul_moment(double complex[::1] c, const double complex[::1] phase,
               const double[::1] weight):
    """``c *= phase`` in place; return ``sum |c|^2 * weight``."""
    cdef Py_ssize_t n = c.shape[0], i
    cdef double acc = 0.0
    cdef double complex z
    with nogil:
        for i in range(n):
            z = c[i] * phase[i]
            c[i] = z
            acc += (z.real * z.real + z.imag * z.imag) * weight[i]
    return acc


def mul_inplace(double complex[::1] c, const double complex[::1] phase):
    cdef Py_ssize_t n = c.shape[0], i
    with nogil:
        for i in range(n):
            c[i] = c[i] * phase[i]
