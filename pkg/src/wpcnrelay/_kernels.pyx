# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: simplex grid search and detector simulation.

Mirrors wpcnrelay._kernels_py operation for operation; both backends must
stay drop-in interchangeable (same enumeration order, same golden-section
bookkeeping, same random-stream consumption).
"""
from libc.math cimport cos, log, log1p, sin, sqrt

from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_normal,
    random_standard_uniform,
)

import numpy as np

BACKEND_NAME = "compiled"

cdef double _INVPHI = (sqrt(5.0) - 1.0) / 2.0
cdef double _LN2 = log(2.0)
cdef double _TWO_PI = 6.283185307179586476925287
cdef double _INF = float("inf")


cdef inline double _persp(double t, double x, double rho) nogil:
    if t <= 0.0 or x <= 0.0:
        return 0.0
    return t * log1p(rho * x / t) / _LN2


cdef inline double _inner(double tau, double side_a, double r13, double t41,
                          double t42, double e, double rho2) nogil:
    cdef double v1 = r13 + _persp(t41, tau, rho2)
    cdef double v2 = _persp(t42, e - tau, rho2)
    cdef double v = side_a
    if v1 < v:
        v = v1
    if v2 < v:
        v = v2
    return v


def grid_search(double rho12, double rho13, double rho2, double a1, double a2,
                double c_rb, double delta, int max_steps, int scheme_id,
                int n_golden):
    """Best point of the time-simplex grid; see the numpy twin for docs."""
    cdef int i1, i2, i3, i4, i5, lim2, lim5, k
    cdef int m = max_steps
    cdef long n_points = 0
    cdef double t1, t2, t3, t41, t42, e, side_a, r13
    cdef double a, b, c, d, fc, fd, width, c_new, d_new, f_probe, probe
    cdef double tau_best, val, v_cand, left_sel
    cdef double best_val = -1.0
    cdef double best_tau = 0.0
    cdef int b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0
    cdef bint left
    cdef bint pin_t2 = scheme_id >= 1
    cdef bint pin_t41 = scheme_id == 2

    for i1 in range(m + 1):
        t1 = i1 * delta
        lim2 = 0 if pin_t2 else m - i1
        for i2 in range(lim2 + 1):
            t2 = i2 * delta
            for i3 in range(m - i1 - i2 + 1):
                t3 = i3 * delta
                lim5 = 0 if pin_t41 else m - i1 - i2 - i3
                for i4 in range(lim5 + 1):
                    t41 = i4 * delta
                    for i5 in range(m - i1 - i2 - i3 - i4 + 1):
                        t42 = i5 * delta
                        n_points += 1
                        e = a1 * t1 + a2 * t2
                        r13 = _persp(t3, t1, rho13)
                        if scheme_id == 2:
                            side_a = _INF
                            tau_best = 0.0
                            val = _inner(0.0, side_a, r13, t41, t42, e, rho2)
                        else:
                            side_a = c_rb * t2 + _persp(t3, t1, rho12)
                            a = 0.0
                            b = e
                            c = b - _INVPHI * (b - a)
                            d = a + _INVPHI * (b - a)
                            fc = _inner(c, side_a, r13, t41, t42, e, rho2)
                            fd = _inner(d, side_a, r13, t41, t42, e, rho2)
                            for k in range(n_golden):
                                left = fc > fd
                                if left:
                                    b = d
                                else:
                                    a = c
                                width = b - a
                                if left:
                                    c_new = b - _INVPHI * width
                                    d_new = c
                                    probe = c_new
                                else:
                                    c_new = d
                                    d_new = a + _INVPHI * width
                                    probe = d_new
                                f_probe = _inner(probe, side_a, r13, t41, t42,
                                                 e, rho2)
                                if left:
                                    fd = fc
                                    fc = f_probe
                                else:
                                    fc = fd
                                    fd = f_probe
                                c = c_new
                                d = d_new
                            tau_best = 0.5 * (a + b)
                            val = _inner(tau_best, side_a, r13, t41, t42, e, rho2)
                            v_cand = _inner(0.0, side_a, r13, t41, t42, e, rho2)
                            if v_cand > val:
                                val = v_cand
                                tau_best = 0.0
                            v_cand = _inner(e, side_a, r13, t41, t42, e, rho2)
                            if v_cand > val:
                                val = v_cand
                                tau_best = e
                        if val > best_val:
                            best_val = val
                            best_tau = tau_best
                            b1 = i1
                            b2 = i2
                            b3 = i3
                            b4 = i4
                            b5 = i5
    return best_val, (b1, b2, b3, b4, b5), best_tau, n_points


def detector_chunk(bitgen, int nbits, int nsamp, double a_carrier,
                   double a_refl, double noise_std, double threshold):
    """Simulate nbits backscattered bits; see the numpy twin for docs."""
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(
        bitgen.capsule, "BitGenerator")
    cdef int i, j
    cdef long errors = 0
    cdef double u, phase, s_re, s_im, w, y, stat, mean_re
    cdef bint bit, decided
    u_bits = np.empty(nbits, dtype=np.float64)
    phases = np.empty(nbits, dtype=np.float64)
    cdef double[::1] u_view = u_bits
    cdef double[::1] p_view = phases
    for i in range(nbits):
        u_view[i] = random_standard_uniform(rng)
    for i in range(nbits):
        p_view[i] = random_standard_uniform(rng) * _TWO_PI
    for i in range(nbits):
        bit = u_view[i] < 0.5
        phase = p_view[i]
        if bit:
            s_re = a_refl * cos(phase)
            s_im = a_refl * sin(phase)
        else:
            s_re = 0.0
            s_im = 0.0
        mean_re = a_carrier + s_re
        stat = 0.0
        for j in range(nsamp):
            w = random_standard_normal(rng) * noise_std
            y = mean_re + w
            y = y - a_carrier
            stat += y * y
        for j in range(nsamp):
            w = random_standard_normal(rng) * noise_std
            y = s_im + w
            stat += y * y
        decided = stat > threshold
        if decided != bit:
            errors += 1
    return int(errors)
