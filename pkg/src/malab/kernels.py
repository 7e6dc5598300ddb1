"""Hot numeric kernels: an embedded Dormand-Prince 5(4) integrator for the
two-component systems used throughout the package, plus finite-difference
weights.

Every function here sticks to the numba nopython subset so that the same
source runs compiled or interpreted (see :mod:`malab._accel`).

System codes (``par`` holds the equation constants):

==  =====================  ==========================================  ==================
id  independent variable   state (y0, y1)                              par
==  =====================  ==========================================  ==================
0   r                      (u, u')                                     (n, p, A)
1   r                      (w, w'), w = log u                          (n, p, A)
2   phi                    (zeta, integral of dphi / zeta)             (alpha, p, beta)
3   s = log r              (phi, zeta = r phi_r)                       (alpha, p, beta)
==  =====================  ==========================================  ==================
"""

import math

import numpy as np

from ._accel import jit

RADIAL = 0
RADIAL_LOG = 1
ZETA = 2
PHI_OF_LOGR = 3

STATUS_COMPLETED = 0
STATUS_CAP = 1
STATUS_UNDERFLOW = 2
STATUS_POSITIVITY = 3

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0


@jit
def rhs(system, par, t, y0, y1):
    """Right-hand side of system ``system`` at ``(t, y0, y1)``."""
    if system == 0:
        n, p, a = par[0], par[1], par[2]
        return y1, a * y0 ** p * (t / y1) ** (n - 1.0)
    if system == 1:
        n, p, a = par[0], par[1], par[2]
        return y1, a * math.exp((p - n) * y0) * (t / y1) ** (n - 1.0) - y1 * y1
    if system == 2:
        al, p, be = par[0], par[1], par[2]
        num = al * al * y0 * y0 + t ** p
        den = y0 * (al * (al - 1.0) * t - be * y0)
        return num / den, 1.0 / y0
    al, p, be = par[0], par[1], par[2]
    num = al * al * y1 * y1 + y0 ** p
    return y1, num / (al * (al - 1.0) * y0 - be * y1)


@jit
def _positive(system, y0, y1):
    if not (math.isfinite(y0) and math.isfinite(y1)):
        return False
    if system == 0 or system == 3:
        return y0 > 0.0 and y1 > 0.0
    if system == 1:
        return y1 > 0.0
    return y0 > 0.0


@jit
def dp_step(system, par, t, y0, y1, h, k10, k11):
    """One Dormand-Prince step of size ``h`` given the stage-1 slope.

    Returns the 5th-order solution, the embedded error estimate and the
    slope at the new point.
    """
    k20, k21 = rhs(system, par, t + _C2 * h, y0 + h * _A21 * k10, y1 + h * _A21 * k11)
    k30, k31 = rhs(system, par, t + _C3 * h,
                   y0 + h * (_A31 * k10 + _A32 * k20),
                   y1 + h * (_A31 * k11 + _A32 * k21))
    k40, k41 = rhs(system, par, t + _C4 * h,
                   y0 + h * (_A41 * k10 + _A42 * k20 + _A43 * k30),
                   y1 + h * (_A41 * k11 + _A42 * k21 + _A43 * k31))
    k50, k51 = rhs(system, par, t + _C5 * h,
                   y0 + h * (_A51 * k10 + _A52 * k20 + _A53 * k30 + _A54 * k40),
                   y1 + h * (_A51 * k11 + _A52 * k21 + _A53 * k31 + _A54 * k41))
    k60, k61 = rhs(system, par, t + h,
                   y0 + h * (_A61 * k10 + _A62 * k20 + _A63 * k30 + _A64 * k40 + _A65 * k50),
                   y1 + h * (_A61 * k11 + _A62 * k21 + _A63 * k31 + _A64 * k41 + _A65 * k51))
    n0 = y0 + h * (_B1 * k10 + _B3 * k30 + _B4 * k40 + _B5 * k50 + _B6 * k60)
    n1 = y1 + h * (_B1 * k11 + _B3 * k31 + _B4 * k41 + _B5 * k51 + _B6 * k61)
    k70, k71 = rhs(system, par, t + h, n0, n1)
    e0 = h * (_E1 * k10 + _E3 * k30 + _E4 * k40 + _E5 * k50 + _E6 * k60 + _E7 * k70)
    e1 = h * (_E1 * k11 + _E3 * k31 + _E4 * k41 + _E5 * k51 + _E6 * k61 + _E7 * k71)
    return n0, n1, e0, e1, k70, k71


@jit
def _err_norm(y0, y1, n0, n1, e0, e1, rtol, atol):
    s0 = atol + rtol * max(abs(y0), abs(n0))
    s1 = atol + rtol * max(abs(y1), abs(n1))
    v = 0.5 * ((e0 / s0) ** 2 + (e1 / s1) ** 2)
    if not math.isfinite(v):
        return math.inf
    return math.sqrt(v)


@jit
def solve(system, par, t0, y00, y01, t_out, cap_index, caps,
          rtol, atol, h_max, h_min, h_init):
    """Adaptive DP5(4) integration with PI step control.

    The state is recorded exactly at each abscissa of ``t_out`` (steps are
    shortened to land on them, no interpolation). Component ``cap_index``
    is watched against the ascending thresholds ``caps``; each crossing is
    located by bisection on the step length to 1e-12 relative in ``t``.
    Integration stops at ``t_out[-1]`` or at the last cap.

    Returns ``(out_t, out_y, n_out, cap_t, cap_y, n_cap, status, n_steps,
    n_reject, n_rhs)``.
    """
    m = t_out.shape[0]
    out_t = np.empty(m)
    out_y = np.empty((m, 2))
    ncap = caps.shape[0]
    cap_t = np.full(ncap, np.nan)
    cap_y = np.full((ncap, 2), np.nan)
    t_end = t_out[m - 1]

    t, y0, y1 = t0, y00, y01
    n_out = 0
    n_cap = 0
    n_steps = 0
    n_reject = 0
    n_rhs = 0
    while n_out < m and t_out[n_out] <= t0:
        out_t[n_out] = t0
        out_y[n_out, 0] = y0
        out_y[n_out, 1] = y1
        n_out += 1
    while n_cap < ncap and (y0 if cap_index == 0 else y1) >= caps[n_cap]:
        cap_t[n_cap] = t0
        cap_y[n_cap, 0] = y0
        cap_y[n_cap, 1] = y1
        n_cap += 1
    if n_out == m:
        return out_t, out_y, n_out, cap_t, cap_y, n_cap, STATUS_COMPLETED, 0, 0, 0
    if ncap > 0 and n_cap == ncap:
        return out_t, out_y, n_out, cap_t, cap_y, n_cap, STATUS_CAP, 0, 0, 0
    if not _positive(system, y0, y1):
        return out_t, out_y, n_out, cap_t, cap_y, n_cap, STATUS_POSITIVITY, 0, 0, 0

    k10, k11 = rhs(system, par, t, y0, y1)
    n_rhs += 1
    if h_init > 0.0:
        h = h_init
    else:
        s0 = atol + rtol * abs(y0)
        s1 = atol + rtol * abs(y1)
        d0 = math.sqrt(0.5 * ((y0 / s0) ** 2 + (y1 / s1) ** 2))
        d1 = math.sqrt(0.5 * ((k10 / s0) ** 2 + (k11 / s1) ** 2))
        if d0 < 1e-5 or d1 < 1e-5:
            h = 1e-6 * max(abs(t), 1.0)
        else:
            h = 0.01 * d0 / d1
    h = min(h, h_max, t_end - t)
    err_old = 1e-4
    last_rejected = False
    status = STATUS_COMPLETED

    while True:
        if h < h_min * max(1.0, abs(t)):
            status = STATUS_UNDERFLOW
            break
        h_prop = h
        hit = False
        t_next = t_out[n_out]
        if math.isfinite(t_next) and t + h >= t_next - 1e-15 * abs(t_next):
            h = t_next - t
            hit = True
        n0, n1, e0, e1, k70, k71 = dp_step(system, par, t, y0, y1, h, k10, k11)
        n_rhs += 6
        err = _err_norm(y0, y1, n0, n1, e0, e1, rtol, atol)
        if err <= 1.0 and _positive(system, n0, n1):
            # cap crossings inside this accepted step
            ycap = n0 if cap_index == 0 else n1
            stop = False
            while n_cap < ncap and ycap >= caps[n_cap]:
                lo = 0.0
                hi = h
                b0, b1 = n0, n1
                while hi - lo > 1e-12 * max(abs(t + hi), 1e-300):
                    mid = 0.5 * (lo + hi)
                    m0, m1, _a, _b, _c, _d = dp_step(system, par, t, y0, y1, mid, k10, k11)
                    n_rhs += 6
                    mc = m0 if cap_index == 0 else m1
                    if mc >= caps[n_cap]:
                        hi = mid
                        b0, b1 = m0, m1
                    else:
                        lo = mid
                cap_t[n_cap] = t + hi
                cap_y[n_cap, 0] = b0
                cap_y[n_cap, 1] = b1
                n_cap += 1
                if n_cap == ncap:
                    stop = True
            if stop:
                status = STATUS_CAP
                break
            t = t_out[n_out] if hit else t + h
            y0, y1 = n0, n1
            k10, k11 = k70, k71
            n_steps += 1
            if hit:
                out_t[n_out] = t
                out_y[n_out, 0] = y0
                out_y[n_out, 1] = y1
                n_out += 1
                if n_out == m:
                    status = STATUS_COMPLETED
                    break
            fac = 0.9 * max(err, 1e-10) ** (-0.14) * err_old ** 0.08
            fac = min(5.0, max(0.2, fac))
            if last_rejected:
                fac = min(fac, 1.0)
            err_old = max(err, 1e-4)
            last_rejected = False
            h = min(h_prop * fac if hit else h * fac, h_max)
        else:
            n_reject += 1
            if math.isfinite(err):
                fac = max(0.2, 0.9 * err ** (-0.2))
            else:
                fac = 0.2
            h = h * fac
            last_rejected = True
    if status == STATUS_UNDERFLOW and not _positive(system, y0, y1):
        status = STATUS_POSITIVITY
    return out_t, out_y, n_out, cap_t, cap_y, n_cap, status, n_steps, n_reject, n_rhs


@jit
def fornberg_weights(x0, x, m):
    """Finite-difference weights for derivatives 0..m at ``x0`` on nodes ``x``.

    Fornberg's recursion; returns an array of shape ``(m + 1, len(x))``.
    """
    nn = x.shape[0]
    c = np.zeros((m + 1, nn))
    c1 = 1.0
    c4 = x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, nn):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


@jit
def stencil_derivatives(x, y, width):
    """First and second derivatives of sampled ``y`` at every node.

    Uses ``width``-point Fornberg stencils centred where possible and
    shifted inward at the ends.
    """
    n = x.shape[0]
    d1 = np.empty(n)
    d2 = np.empty(n)
    half = width // 2
    for i in range(n):
        lo = i - half
        if lo < 0:
            lo = 0
        if lo + width > n:
            lo = n - width
        c = fornberg_weights(x[i], x[lo:lo + width], 2)
        s1 = 0.0
        s2 = 0.0
        for k in range(width):
            s1 += c[1, k] * y[lo + k]
            s2 += c[2, k] * y[lo + k]
        d1[i] = s1
        d2[i] = s2
    return d1, d2
