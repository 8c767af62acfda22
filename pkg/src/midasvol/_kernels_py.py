"""Pure-Python reference implementations of the serial recursion kernels.

These mirror the compiled extension in ``_kernels.pyx`` operation for
operation; ``midasvol.kernels`` picks whichever is importable. Keep both
in sync: the test suite asserts they agree to float precision.
"""

import math

import numpy as np


def gjr_recursion(resid, tau, alpha, beta, gamma):
    """Short-run variance component of the two-component model.

    g[0] = 1 and, for d >= 1,

        g[d] = (1 - alpha - gamma/2 - beta)
               + (alpha + gamma * 1[resid[d-1] < 0]) * resid[d-1]^2 / tau[d]
               + beta * g[d-1]

    The recursion runs continuously over the whole day index (no reset at
    period boundaries).
    """
    r = np.ascontiguousarray(resid, dtype=np.float64).tolist()
    t = np.ascontiguousarray(tau, dtype=np.float64).tolist()
    n = len(r)
    out = np.empty(n)
    intercept = 1.0 - alpha - 0.5 * gamma - beta
    g_prev = 1.0
    out[0] = g_prev
    for d in range(1, n):
        e = r[d - 1]
        coef = alpha + gamma if e < 0.0 else alpha
        g_prev = intercept + coef * e * e / t[d] + beta * g_prev
        out[d] = g_prev
    return out


def garch_recursion(resid, omega, alpha, beta, gamma, h1):
    """GJR-GARCH(1,1) conditional variance path with h[0] = h1."""
    r = np.ascontiguousarray(resid, dtype=np.float64).tolist()
    n = len(r)
    out = np.empty(n)
    h_prev = h1
    out[0] = h_prev
    for d in range(1, n):
        e = r[d - 1]
        coef = alpha + gamma if e < 0.0 else alpha
        h_prev = omega + coef * e * e + beta * h_prev
        out[d] = h_prev
    return out


def dcc_recursion(xi_a, xi_b, rho_bar, a, b):
    """Bivariate correlation recursion toward a (possibly moving) target.

    Q[0] has unit diagonal and off-diagonal rho_bar[0]; afterwards each
    entry mean-reverts to the target with news weight ``a`` and memory
    ``b``. Returns (rho, q_aa, q_bb, q_ab); rho is clamped to [-1, 1]
    against last-bit rounding.
    """
    xa = np.ascontiguousarray(xi_a, dtype=np.float64).tolist()
    xb = np.ascontiguousarray(xi_b, dtype=np.float64).tolist()
    rb = np.ascontiguousarray(rho_bar, dtype=np.float64).tolist()
    n = len(xa)
    rho = np.empty(n)
    q_aa = np.empty(n)
    q_bb = np.empty(n)
    q_ab = np.empty(n)
    base = 1.0 - a - b
    qaa, qbb, qab = 1.0, 1.0, rb[0]
    q_aa[0], q_bb[0], q_ab[0] = qaa, qbb, qab
    rho[0] = min(1.0, max(-1.0, qab))
    for t in range(1, n):
        ya, yb = xa[t - 1], xb[t - 1]
        qaa = base + a * ya * ya + b * qaa
        qbb = base + a * yb * yb + b * qbb
        qab = rb[t] * base + a * ya * yb + b * qab
        q_aa[t], q_bb[t], q_ab[t] = qaa, qbb, qab
        r = qab / math.sqrt(qaa * qbb)
        rho[t] = min(1.0, max(-1.0, r))
    return rho, q_aa, q_bb, q_ab


def gjr_simulate_block(tau, innov, mu, alpha, beta, gamma, g_prev, resid_prev, has_prev):
    """Simulate one block of days given its daily long-run path.

    Carries (g_prev, resid_prev) across blocks so callers can feed back
    block-level quantities (e.g. realized variance) into the next block's
    tau. With has_prev False the first day starts the recursion at
    g = g_prev with no innovation term.
    """
    t = np.ascontiguousarray(tau, dtype=np.float64).tolist()
    z = np.ascontiguousarray(innov, dtype=np.float64).tolist()
    n = len(t)
    returns = np.empty(n)
    g_path = np.empty(n)
    intercept = 1.0 - alpha - 0.5 * gamma - beta
    g, e = g_prev, resid_prev
    started = bool(has_prev)
    for d in range(n):
        if started:
            coef = alpha + gamma if e < 0.0 else alpha
            g = intercept + coef * e * e / t[d] + beta * g
        started = True
        e = math.sqrt(t[d] * g) * z[d]
        returns[d] = mu + e
        g_path[d] = g
    return returns, g_path, g, e
