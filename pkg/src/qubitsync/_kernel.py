"""Compiled right-hand side and Dormand-Prince 5(4) stepper.

State vector layout (complex, length 7):
    [rho_11, rho_10, rho_01, rho_00, Gamma_1, Gamma_2, Gamma_3]
with rho in the dressed basis.

Coefficient vector layout (float, length 7):
    [delta_rabi, p0, p_plus, p_minus, gamma, lambda, omega_laser]
"""

import math

import numpy as np
from numba import njit

N_STATE = 7

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_TRACE_DRIFT = 2
STATUS_MAX_STEPS = 3
STATUS_NONFINITE = 4

TRACE_RENORM_LIMIT = 1e-7

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)


@njit(cache=True)
def rhs(t, y, coef, out):
    delta, p0, pp, pm, gam, lam, wl = (coef[0], coef[1], coef[2], coef[3],
                                       coef[4], coef[5], coef[6])
    r11, r10, r01, r00 = y[0], y[1], y[2], y[3]
    g1, g2, g3 = y[4], y[5], y[6]

    # dissipator D = L rho B - B L rho with
    # L = g1 p0 sz + g2 pm s+ + g3 pp s-,  B = p0 sz + pp s+ + pm s-
    l00 = g1 * p0
    l01 = g2 * pm
    l10 = g3 * pp
    l11 = -g1 * p0
    m00 = l00 * r11 + l01 * r01
    m01 = l00 * r10 + l01 * r00
    m10 = l10 * r11 + l11 * r01
    m11 = l10 * r10 + l11 * r00
    b00, b01, b10, b11 = p0, pp, pm, -p0
    d00 = (m00 * b00 + m01 * b10) - (b00 * m00 + b01 * m10)
    d01 = (m00 * b01 + m01 * b11) - (b00 * m01 + b01 * m11)
    d10 = (m10 * b00 + m11 * b10) - (b10 * m00 + b11 * m10)
    d11 = (m10 * b01 + m11 * b11) - (b10 * m01 + b11 * m11)

    out[0] = d00 + d00.conjugate()
    out[1] = -1j * delta * r10 + d01 + d10.conjugate()
    out[2] = 1j * delta * r01 + d10 + d01.conjugate()
    out[3] = d11 + d11.conjugate()

    x = 1.0 + 1j * lam * t
    c = gam * lam * lam / (x * x)
    e_l = complex(math.cos(wl * t), math.sin(wl * t))
    e_d = complex(math.cos(delta * t), math.sin(delta * t))
    base = c * e_l
    out[4] = base
    out[5] = base * e_d.conjugate()
    out[6] = base * e_d


@njit(cache=True)
def _min_eig(y):
    a = y[0].real
    d = y[3].real
    b = abs(y[1])
    half = 0.5 * (a - d)
    return 0.5 * (a + d) - math.sqrt(half * half + b * b)


@njit(cache=True)
def _clean(y):
    """Hermitian symmetrization and small-drift trace renormalization.

    Returns the trace deviation seen before renormalization.
    """
    r10 = 0.5 * (y[1] + y[2].conjugate())
    y[1] = r10
    y[2] = r10.conjugate()
    y[0] = complex(y[0].real, 0.0)
    y[3] = complex(y[3].real, 0.0)
    tr = y[0].real + y[3].real
    dev = tr - 1.0
    if abs(dev) < TRACE_RENORM_LIMIT and dev != 0.0:
        y[0] = y[0] / tr
        y[3] = y[3] / tr
        y[1] = y[1] / tr
        y[2] = y[2] / tr
    return dev


@njit(cache=True)
def _err_norm(y, ynew, err, rtol, atol):
    acc = 0.0
    for i in range(N_STATE):
        sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
        r = abs(err[i]) / sc
        acc += r * r
    return math.sqrt(acc / N_STATE)


@njit(cache=True)
def integrate(y0, coef, sample_times, rtol, atol, max_step, max_steps):
    """Adaptive DOPRI5 from t=0 to sample_times[-1], landing exactly on samples.

    Returns (samples, status, n_accepted, n_rejected, min_eig, max_trace_dev,
    t_reached).
    """
    n_samples = sample_times.shape[0]
    samples = np.zeros((n_samples, N_STATE), dtype=np.complex128)
    y = y0.copy()
    ynew = np.empty(N_STATE, dtype=np.complex128)
    ytmp = np.empty(N_STATE, dtype=np.complex128)
    err = np.empty(N_STATE, dtype=np.complex128)
    k1 = np.empty(N_STATE, dtype=np.complex128)
    k2 = np.empty(N_STATE, dtype=np.complex128)
    k3 = np.empty(N_STATE, dtype=np.complex128)
    k4 = np.empty(N_STATE, dtype=np.complex128)
    k5 = np.empty(N_STATE, dtype=np.complex128)
    k6 = np.empty(N_STATE, dtype=np.complex128)
    k7 = np.empty(N_STATE, dtype=np.complex128)

    t = 0.0
    min_eig = _min_eig(y)
    max_dev = abs(y[0].real + y[3].real - 1.0)
    n_acc = 0
    n_rej = 0
    status = STATUS_OK

    idx = 0
    while idx < n_samples and sample_times[idx] <= 0.0:
        samples[idx, :] = y
        idx += 1
    if idx == n_samples:
        return samples, status, n_acc, n_rej, min_eig, max_dev, t

    h = max_step
    rhs(t, y, coef, k1)

    while idx < n_samples:
        if n_acc + n_rej >= max_steps:
            status = STATUS_MAX_STEPS
            break
        target = sample_times[idx]
        h_try = h
        landing = False
        if t + h_try >= target - 1e-12 * max(1.0, abs(target)):
            h_try = target - t
            landing = True
        if h_try <= 1e-14 * max(1.0, abs(t)):
            if landing:
                # already at the sample within rounding
                samples[idx, :] = y
                idx += 1
                continue
            status = STATUS_STEP_UNDERFLOW
            break

        for i in range(N_STATE):
            ytmp[i] = y[i] + h_try * A21 * k1[i]
        rhs(t + C2 * h_try, ytmp, coef, k2)
        for i in range(N_STATE):
            ytmp[i] = y[i] + h_try * (A31 * k1[i] + A32 * k2[i])
        rhs(t + C3 * h_try, ytmp, coef, k3)
        for i in range(N_STATE):
            ytmp[i] = y[i] + h_try * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
        rhs(t + C4 * h_try, ytmp, coef, k4)
        for i in range(N_STATE):
            ytmp[i] = y[i] + h_try * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                      + A54 * k4[i])
        rhs(t + C5 * h_try, ytmp, coef, k5)
        for i in range(N_STATE):
            ytmp[i] = y[i] + h_try * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                      + A64 * k4[i] + A65 * k5[i])
        rhs(t + h_try, ytmp, coef, k6)
        for i in range(N_STATE):
            ynew[i] = y[i] + h_try * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                      + B5 * k5[i] + B6 * k6[i])
        t_new = target if landing else t + h_try
        rhs(t_new, ynew, coef, k7)
        for i in range(N_STATE):
            err[i] = h_try * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                              + E6 * k6[i] + E7 * k7[i])
        en = _err_norm(y, ynew, err, rtol, atol)
        if not math.isfinite(en):
            status = STATUS_NONFINITE
            break

        if en <= 1.0:
            dev = _clean(ynew)
            if abs(dev) > max_dev:
                max_dev = abs(dev)
            if abs(dev) >= TRACE_RENORM_LIMIT:
                status = STATUS_TRACE_DRIFT
                break
            for i in range(N_STATE):
                y[i] = ynew[i]
            t = t_new
            n_acc += 1
            # fresh derivative at the cleaned state (no FSAL reuse)
            rhs(t, y, coef, k1)
            e = _min_eig(y)
            if e < min_eig:
                min_eig = e
            if landing:
                samples[idx, :] = y
                idx += 1
            if en == 0.0:
                fac = 5.0
            else:
                fac = min(5.0, max(0.2, 0.9 * en ** -0.2))
            if not landing or h_try >= h:
                h = min(max_step, h_try * fac)
        else:
            n_rej += 1
            fac = max(0.2, 0.9 * en ** -0.2)
            h = h_try * fac
            if h <= 1e-14 * max(1.0, abs(t)):
                status = STATUS_STEP_UNDERFLOW
                break

    return samples, status, n_acc, n_rej, min_eig, max_dev, t
