# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled recursion kernels.

Same contracts as ``_kernels_py``; that module is the readable reference.
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def gjr_recursion(resid, tau, double alpha, double beta, double gamma):
    cdef double[::1] r = np.ascontiguousarray(resid, dtype=np.float64)
    cdef double[::1] t = np.ascontiguousarray(tau, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double intercept = 1.0 - alpha - 0.5 * gamma - beta
    cdef double g_prev = 1.0
    cdef double e, coef
    cdef Py_ssize_t d
    out[0] = g_prev
    for d in range(1, n):
        e = r[d - 1]
        coef = alpha + gamma if e < 0.0 else alpha
        g_prev = intercept + coef * e * e / t[d] + beta * g_prev
        out[d] = g_prev
    return out_arr


def garch_recursion(resid, double omega, double alpha, double beta, double gamma,
                    double h1):
    cdef double[::1] r = np.ascontiguousarray(resid, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double h_prev = h1
    cdef double e, coef
    cdef Py_ssize_t d
    out[0] = h_prev
    for d in range(1, n):
        e = r[d - 1]
        coef = alpha + gamma if e < 0.0 else alpha
        h_prev = omega + coef * e * e + beta * h_prev
        out[d] = h_prev
    return out_arr


def dcc_recursion(xi_a, xi_b, rho_bar, double a, double b):
    cdef double[::1] xa = np.ascontiguousarray(xi_a, dtype=np.float64)
    cdef double[::1] xb = np.ascontiguousarray(xi_b, dtype=np.float64)
    cdef double[::1] rb = np.ascontiguousarray(rho_bar, dtype=np.float64)
    cdef Py_ssize_t n = xa.shape[0]
    rho_arr = np.empty(n)
    qaa_arr = np.empty(n)
    qbb_arr = np.empty(n)
    qab_arr = np.empty(n)
    cdef double[::1] rho = rho_arr
    cdef double[::1] q_aa = qaa_arr
    cdef double[::1] q_bb = qbb_arr
    cdef double[::1] q_ab = qab_arr
    cdef double base = 1.0 - a - b
    cdef double qaa = 1.0, qbb = 1.0, qab = rb[0]
    cdef double ya, yb, r
    cdef Py_ssize_t t
    q_aa[0] = qaa
    q_bb[0] = qbb
    q_ab[0] = qab
    rho[0] = min(1.0, max(-1.0, qab))
    for t in range(1, n):
        ya = xa[t - 1]
        yb = xb[t - 1]
        qaa = base + a * ya * ya + b * qaa
        qbb = base + a * yb * yb + b * qbb
        qab = rb[t] * base + a * ya * yb + b * qab
        q_aa[t] = qaa
        q_bb[t] = qbb
        q_ab[t] = qab
        r = qab / sqrt(qaa * qbb)
        rho[t] = min(1.0, max(-1.0, r))
    return rho_arr, qaa_arr, qbb_arr, qab_arr


def gjr_simulate_block(tau, innov, double mu, double alpha, double beta,
                       double gamma, double g_prev, double resid_prev,
                       bint has_prev):
    cdef double[::1] t = np.ascontiguousarray(tau, dtype=np.float64)
    cdef double[::1] z = np.ascontiguousarray(innov, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    r_arr = np.empty(n)
    g_arr = np.empty(n)
    cdef double[::1] returns = r_arr
    cdef double[::1] g_path = g_arr
    cdef double intercept = 1.0 - alpha - 0.5 * gamma - beta
    cdef double g = g_prev, e = resid_prev
    cdef bint started = has_prev
    cdef double coef
    cdef Py_ssize_t d
    for d in range(n):
        if started:
            coef = alpha + gamma if e < 0.0 else alpha
            g = intercept + coef * e * e / t[d] + beta * g
        started = True
        e = sqrt(t[d] * g) * z[d]
        returns[d] = mu + e
        g_path[d] = g
    return r_arr, g_arr, g, e
