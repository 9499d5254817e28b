"""
Fixed-step classic RK4 loops, compiled with numba.

Every kernel works on plain floats and preallocated arrays so that sweeps
over hundreds of parameter values and the forward-backward iteration stay
fast. Status codes: 0 ok, 1 non-finite state, 2 conservation violated.
"""

import numpy as np
from numba import njit

OK = 0
NON_FINITE = 1
CONSERVATION = 2

CONSERVATION_TOL = 1e-9


@njit(cache=True, inline="always")
def _clamp01(x):
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


@njit(cache=True, nogil=True)
def sir_rk4(s, i, r, beta, gamma, k, behavior, h, nsub, ndays,
            early_stop, i_stop, ds_stop, keep_fine):
    """Integrate dS=-b*S*I*eps, dI=b*S*I*eps-g*I, dR=g*I with eps=clamp(1+k*I).

    ``behavior`` False pins eps to 1 (standard SIR). Output is sampled every
    ``nsub`` steps (one day). Returns (t, s, i, r, eps, ndays_done, stopped,
    status, fine_s, fine_i, fine_r, fine_eps).
    """
    out_s = np.empty(ndays + 1)
    out_i = np.empty(ndays + 1)
    out_r = np.empty(ndays + 1)
    out_e = np.empty(ndays + 1)
    nfine = ndays * nsub + 1 if keep_fine else 1
    fs = np.empty(nfine)
    fi = np.empty(nfine)
    fr = np.empty(nfine)
    fe = np.empty(nfine)

    out_s[0] = s
    out_i[0] = i
    out_r[0] = r
    out_e[0] = _clamp01(1.0 + k * i) if behavior else 1.0
    if keep_fine:
        fs[0] = s
        fi[0] = i
        fr[0] = r
        fe[0] = out_e[0]
    half = 0.5 * h
    status = OK
    stopped = False
    day = 0
    while day < ndays:
        s_prev = s
        for sub in range(nsub):
            e1 = _clamp01(1.0 + k * i) if behavior else 1.0
            inf1 = beta * s * i * e1
            ds1 = -inf1
            di1 = inf1 - gamma * i
            dr1 = gamma * i

            s2 = s + half * ds1
            i2 = i + half * di1
            e2 = _clamp01(1.0 + k * i2) if behavior else 1.0
            inf2 = beta * s2 * i2 * e2
            ds2 = -inf2
            di2 = inf2 - gamma * i2
            dr2 = gamma * i2

            s3 = s + half * ds2
            i3 = i + half * di2
            e3 = _clamp01(1.0 + k * i3) if behavior else 1.0
            inf3 = beta * s3 * i3 * e3
            ds3 = -inf3
            di3 = inf3 - gamma * i3
            dr3 = gamma * i3

            s4 = s + h * ds3
            i4 = i + h * di3
            e4 = _clamp01(1.0 + k * i4) if behavior else 1.0
            inf4 = beta * s4 * i4 * e4
            ds4 = -inf4
            di4 = inf4 - gamma * i4
            dr4 = gamma * i4

            s = s + h / 6.0 * (ds1 + 2.0 * ds2 + 2.0 * ds3 + ds4)
            i = i + h / 6.0 * (di1 + 2.0 * di2 + 2.0 * di3 + di4)
            r = r + h / 6.0 * (dr1 + 2.0 * dr2 + 2.0 * dr3 + dr4)
            if keep_fine:
                n = day * nsub + sub + 1
                fs[n] = s
                fi[n] = i
                fr[n] = r
                fe[n] = _clamp01(1.0 + k * i) if behavior else 1.0
        day += 1
        out_s[day] = s
        out_i[day] = i
        out_r[day] = r
        out_e[day] = _clamp01(1.0 + k * i) if behavior else 1.0
        if not (np.isfinite(s) and np.isfinite(i) and np.isfinite(r)):
            status = NON_FINITE
            break
        if abs(s + i + r - 1.0) > CONSERVATION_TOL:
            status = CONSERVATION
            break
        if early_stop and i < i_stop and s_prev - s < ds_stop:
            stopped = True
            break
    t = np.arange(day + 1) * 1.0
    nf = day * nsub + 1 if keep_fine else 1
    return (t, out_s[:day + 1], out_i[:day + 1], out_r[:day + 1], out_e[:day + 1],
            day, stopped, status, fs[:nf], fi[:nf], fr[:nf], fe[:nf])


@njit(cache=True, nogil=True)
def endogenous_forward(s, i, r, beta, gamma, c, eta_fine, h, nsub, ndays,
                       i_stop, ds_stop):
    """Forward pass of the endogenous-cost model for a given co-state path.

    Exposure is clamp(1 + beta*eta(t)*I/c) with eta linearly interpolated
    between fine nodes; past the end of ``eta_fine`` its last value is held.
    Stops at the first day boundary where the daily drop in S and I are
    both below the thresholds. Returns fine-grid (s, i, r, eps, eps_raw),
    the number of fine steps done and a status code.
    """
    nmax = ndays * nsub
    fs = np.empty(nmax + 1)
    fi = np.empty(nmax + 1)
    fr = np.empty(nmax + 1)
    fe = np.empty(nmax + 1)
    fraw = np.empty(nmax + 1)
    neta = eta_fine.shape[0]
    bc = beta / c

    fs[0] = s
    fi[0] = i
    fr[0] = r
    raw = 1.0 + bc * eta_fine[0] * i
    fraw[0] = raw
    fe[0] = _clamp01(raw)
    half = 0.5 * h
    status = OK
    n = 0
    day = 0
    while day < ndays:
        s_prev = s
        for sub in range(nsub):
            ea = eta_fine[n] if n < neta else eta_fine[neta - 1]
            eb = eta_fine[n + 1] if n + 1 < neta else eta_fine[neta - 1]
            em = 0.5 * (ea + eb)

            e1 = _clamp01(1.0 + bc * ea * i)
            inf1 = beta * s * i * e1
            ds1 = -inf1
            di1 = inf1 - gamma * i

            s2 = s + half * ds1
            i2 = i + half * di1
            e2 = _clamp01(1.0 + bc * em * i2)
            inf2 = beta * s2 * i2 * e2
            ds2 = -inf2
            di2 = inf2 - gamma * i2

            s3 = s + half * ds2
            i3 = i + half * di2
            e3 = _clamp01(1.0 + bc * em * i3)
            inf3 = beta * s3 * i3 * e3
            ds3 = -inf3
            di3 = inf3 - gamma * i3

            s4 = s + h * ds3
            i4 = i + h * di3
            e4 = _clamp01(1.0 + bc * eb * i4)
            inf4 = beta * s4 * i4 * e4
            ds4 = -inf4
            di4 = inf4 - gamma * i4

            r = r + h / 6.0 * gamma * (i + 2.0 * i2 + 2.0 * i3 + i4)
            s = s + h / 6.0 * (ds1 + 2.0 * ds2 + 2.0 * ds3 + ds4)
            i = i + h / 6.0 * (di1 + 2.0 * di2 + 2.0 * di3 + di4)
            n += 1
            fs[n] = s
            fi[n] = i
            fr[n] = r
            raw = 1.0 + bc * eb * i
            fraw[n] = raw
            fe[n] = _clamp01(raw)
        day += 1
        if not (np.isfinite(s) and np.isfinite(i) and np.isfinite(r)):
            status = NON_FINITE
            break
        if abs(s + i + r - 1.0) > CONSERVATION_TOL:
            status = CONSERVATION
            break
        if s_prev - s < ds_stop and i < i_stop:
            break
    return fs[:n + 1], fi[:n + 1], fr[:n + 1], fe[:n + 1], fraw[:n + 1], n, status


@njit(cache=True, nogil=True)
def costate_backward(i_fine, eps_fine, eta_terminal, beta, rho, c, premium0, h):
    """Integrate d(eta)/dt = eta*(rho + eps*beta*I) + premium0 - c/2*(1-eps)^2
    backward from the last node, with I and eps linear between nodes."""
    n = i_fine.shape[0] - 1
    eta = np.empty(n + 1)
    eta[n] = eta_terminal
    y = eta_terminal
    half = 0.5 * c
    for m in range(n, 0, -1):
        ia = i_fine[m]
        ea = eps_fine[m]
        ib = i_fine[m - 1]
        eb = eps_fine[m - 1]
        im = 0.5 * (ia + ib)
        em = 0.5 * (ea + eb)
        # stepping with -h from node m to m-1
        k1 = y * (rho + ea * beta * ia) + premium0 - half * (1.0 - ea) ** 2
        y2 = y - 0.5 * h * k1
        k2 = y2 * (rho + em * beta * im) + premium0 - half * (1.0 - em) ** 2
        y3 = y - 0.5 * h * k2
        k3 = y3 * (rho + em * beta * im) + premium0 - half * (1.0 - em) ** 2
        y4 = y - h * k3
        k4 = y4 * (rho + eb * beta * ib) + premium0 - half * (1.0 - eb) ** 2
        y = y - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        eta[m - 1] = y
    return eta


@njit(cache=True, nogil=True)
def probability_forward(i_fine, eps_fine, beta, h):
    """dp/dt = eps*beta*I*(1-p), p(0)=0, with I and eps linear between nodes."""
    n = i_fine.shape[0] - 1
    p = np.empty(n + 1)
    p[0] = 0.0
    y = 0.0
    for m in range(n):
        fa = eps_fine[m] * beta * i_fine[m]
        fb = eps_fine[m + 1] * beta * i_fine[m + 1]
        fm = 0.5 * (eps_fine[m] + eps_fine[m + 1]) * beta * 0.5 * (i_fine[m] + i_fine[m + 1])
        k1 = fa * (1.0 - y)
        k2 = fm * (1.0 - (y + 0.5 * h * k1))
        k3 = fm * (1.0 - (y + 0.5 * h * k2))
        k4 = fb * (1.0 - (y + h * k3))
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p[m + 1] = y
    return p
