"""Compiled chain kernels.

The hot loop (momentum refresh, leapfrog, accept/reject, weight update) is a
single numba kernel shared by SAHMC and HMC; HMC is the kernel run with a
one-region partition and frozen weights, which also makes the two samplers
bit-identical when m = 1. Targets supply compiled ``pot(x, pars)`` /
``grad(x, pars, out)`` callables, specialised per target family.
"""

from __future__ import annotations

import numpy as np
from numba import njit

LOG_2PI = np.log(2.0 * np.pi)
DIVERGENCE_LIMIT = 1e100


@njit(cache=True)
def _all_ok(v):
    for i in range(v.size):
        if not np.isfinite(v[i]) or abs(v[i]) > DIVERGENCE_LIMIT:
            return False
    return True


@njit(nogil=True)
def chain_kernel(
    pot,
    grad,
    pars,
    x0,
    mass_diag,
    eps,
    L,
    n_iter,
    seed,
    thresholds,
    theta0,
    pi,
    gain_t0,
    adapt,
    th_lo,
    th_hi,
    snap_every,
    mom_head,
):
    """Run one chain for ``n_iter`` iterations.

    Returns (samples, energies, regions, accepts, visits, theta_final,
    snap_iters, snap_theta, momenta, n_divergent). ``regions`` is 1-based.
    """
    d = x0.size
    m = pi.size
    np.random.seed(seed)

    sqrt_mass = np.sqrt(mass_diag)
    kconst = 0.5 * d * LOG_2PI + 0.5 * np.sum(np.log(mass_diag))

    x = x0.copy()
    u_cur = pot(x, pars)
    theta = theta0.copy()

    samples = np.empty((n_iter, d))
    energies = np.empty(n_iter)
    regions = np.empty(n_iter, np.int64)
    accepts = np.zeros(n_iter, np.bool_)
    visits = np.zeros(m, np.int64)
    n_head = min(mom_head, n_iter)
    momenta = np.empty((n_head, d))

    n_snap = n_iter // snap_every + 2
    snap_iters = np.empty(n_snap, np.int64)
    snap_theta = np.empty((n_snap, m))
    snap_iters[0] = 0
    snap_theta[0] = theta
    s = 1

    n_divergent = 0
    g = np.empty(d)
    xp = np.empty(d)
    yp = np.empty(d)

    for t in range(n_iter):
        # momentum refresh
        z = np.random.standard_normal(d)
        y = sqrt_mass * z
        if t < n_head:
            momenta[t] = y
        k_cur = kconst + 0.5 * np.sum(z * z)

        # leapfrog trajectory
        for i in range(d):
            xp[i] = x[i]
            yp[i] = y[i]
        ok = True
        grad(xp, pars, g)
        if not _all_ok(g):
            ok = False
        else:
            for i in range(d):
                yp[i] -= 0.5 * eps * g[i]
            for step in range(1, L + 1):
                for i in range(d):
                    xp[i] += eps * yp[i] / mass_diag[i]
                if not _all_ok(xp):
                    ok = False
                    break
                grad(xp, pars, g)
                h = eps if step < L else 0.5 * eps
                for i in range(d):
                    yp[i] -= h * g[i]
                if not _all_ok(yp):
                    ok = False
                    break

        # accept/reject; the uniform draw always happens so the stream does
        # not depend on the trajectory outcome
        u_rand = np.random.uniform(0.0, 1.0)
        accepted = False
        u_star = 0.0
        if ok:
            u_star = pot(xp, pars)
            if np.isfinite(u_star):
                k_star = kconst + 0.5 * np.sum(yp * yp / mass_diag)
                j_cur = np.searchsorted(thresholds, u_cur)
                j_star = np.searchsorted(thresholds, u_star)
                log_r = (theta[j_cur] - theta[j_star]) + (u_cur + k_cur - u_star - k_star)
                if np.log(u_rand) < log_r:
                    accepted = True
        else:
            n_divergent += 1

        if accepted:
            for i in range(d):
                x[i] = xp[i]
            u_cur = u_star

        j_new = np.searchsorted(thresholds, u_cur)
        visits[j_new] += 1
        samples[t] = x
        energies[t] = u_cur
        regions[t] = j_new + 1
        accepts[t] = accepted

        if adapt:
            a = gain_t0 / max(gain_t0, float(t + 1))
            for i in range(m):
                theta[i] -= a * pi[i]
            theta[j_new] += a
            mn = theta[0]
            mx = theta[0]
            for i in range(1, m):
                if theta[i] < mn:
                    mn = theta[i]
                if theta[i] > mx:
                    mx = theta[i]
            c = 0.0
            if mx > th_hi:
                c = th_hi - mx
            elif mn < th_lo:
                c = th_lo - mn
            if c != 0.0:
                if mn + c < th_lo or mx + c > th_hi:
                    raise ValueError("theta range overflow")
                for i in range(m):
                    theta[i] += c

        if (t + 1) % snap_every == 0:
            snap_iters[s] = t + 1
            snap_theta[s] = theta
            s += 1

    if snap_iters[s - 1] != n_iter:
        snap_iters[s] = n_iter
        snap_theta[s] = theta
        s += 1

    return (
        samples,
        energies,
        regions,
        accepts,
        visits,
        theta,
        snap_iters[:s],
        snap_theta[:s],
        momenta,
        n_divergent,
    )


@njit(nogil=True)
def potential_on_grid(pot, pars, points):
    """Evaluate a compiled potential on an (n, d) array of points."""
    n = points.shape[0]
    out = np.empty(n)
    for i in range(n):
        out[i] = pot(points[i], pars)
    return out
