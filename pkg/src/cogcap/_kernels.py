"""Hot loops of the Monte Carlo engine.

Each kernel exists as a numba loop (``*_nb``) and a vectorised numpy
equivalent (``*_np``). Random numbers are drawn outside the kernels, so both
paths see identical inputs and agree up to floating-point rounding.
``frame_kernel`` and ``lindley_kernel`` point at the backend chosen in
:mod:`cogcap._backend`.
"""
import math

import numpy as np

from ._backend import USE_NUMBA, njit

SCEN_BUSY_HIT = 1    # all declared busy, chosen channel busy
SCEN_BUSY_FALSE = 2  # all declared busy, chosen channel idle
SCEN_MISS = 3        # idle declared, chosen channel busy (OFF)
SCEN_IDLE_HIT = 4    # idle declared, chosen channel idle


@njit(cache=True, nogil=True)
def _frame_kernel_nb(busy, detected, z, zsp, sel_u, lt1, lt2, inv_c1, mu1, mu2, p_max,
                     Bc, sn2, ssp2, tn, random_select,
                     scen, k_idle, lrsel, zsel, zspsel, power, service, interference):
    n, M = z.shape
    noisy = Bc * (sn2 + ssp2)
    clean = Bc * sn2
    for i in range(n):
        k = 0
        for j in range(M):
            if not detected[i, j]:
                k += 1
        idle_mode = k > 0
        ncand = k if idle_mode else M

        best = -1
        best_lr = -np.inf
        if random_select:
            target = int(sel_u[i] * ncand)
            if target >= ncand:
                target = ncand - 1
            seen = 0
            for j in range(M):
                if idle_mode and detected[i, j]:
                    continue
                if seen == target:
                    best = j
                    break
                seen += 1
            best_lr = math.log(z[i, best]) - math.log(zsp[i, best])
        else:
            for j in range(M):
                if idle_mode and detected[i, j]:
                    continue
                lr = math.log(z[i, j]) - math.log(zsp[i, j])
                if best < 0 or lr > best_lr:
                    best = j
                    best_lr = lr

        zs = z[i, best]
        zp = zsp[i, best]
        if idle_mode:
            lt = lt2
            mu = mu2
        else:
            lt = lt1
            mu = mu1
        P = 0.0
        if zs > 0.0 and (lt == -np.inf or (lt != np.inf and best_lr >= lt)):
            P = mu / zs * math.expm1((best_lr - lt) * inv_c1)
            if P > p_max:
                P = p_max

        is_busy = busy[i, best]
        if not idle_mode:
            r = Bc * math.log2(1.0 + P * zs / noisy)
            service[i] = tn * r
            if is_busy:
                scen[i] = SCEN_BUSY_HIT
                interference[i] = P * zp
            else:
                scen[i] = SCEN_BUSY_FALSE
                interference[i] = 0.0
        else:
            if is_busy:
                scen[i] = SCEN_MISS
                service[i] = 0.0
                interference[i] = P * zp
            else:
                scen[i] = SCEN_IDLE_HIT
                service[i] = tn * Bc * math.log2(1.0 + P * zs / clean)
                interference[i] = 0.0
        k_idle[i] = k
        lrsel[i] = best_lr
        zsel[i] = zs
        zspsel[i] = zp
        power[i] = P


def _frame_kernel_np(busy, detected, z, zsp, sel_u, lt1, lt2, inv_c1, mu1, mu2, p_max,
                     Bc, sn2, ssp2, tn, random_select,
                     scen, k_idle, lrsel, zsel, zspsel, power, service, interference):
    n, M = z.shape
    rows = np.arange(n)
    idle_decl = ~detected
    k = idle_decl.sum(axis=1)
    idle_mode = k > 0
    cand = np.where(idle_mode[:, None], idle_decl, True)
    with np.errstate(divide="ignore"):
        lr_all = np.log(z) - np.log(zsp)
    if random_select:
        ncand = np.where(idle_mode, k, M)
        target = np.minimum((sel_u * ncand).astype(np.int64), ncand - 1)
        order = np.cumsum(cand, axis=1) - 1
        best = np.argmax(cand & (order == target[:, None]), axis=1)
    else:
        best = np.argmax(np.where(cand, lr_all, -np.inf), axis=1)
    best_lr = lr_all[rows, best]
    zs = z[rows, best]
    zp = zsp[rows, best]
    is_busy = busy[rows, best]

    lt = np.where(idle_mode, lt2, lt1)
    mu = np.where(idle_mode, mu2, mu1)
    on = (zs > 0.0) & ((lt == -np.inf) | ((lt != np.inf) & (best_lr >= lt)))
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        P = np.where(on, mu / zs * np.expm1((best_lr - lt) * inv_c1), 0.0)
    P = np.minimum(P, p_max)

    noisy = Bc * (sn2 + ssp2)
    clean = Bc * sn2
    r1 = Bc * np.log2(1.0 + P * zs / noisy)
    r2 = Bc * np.log2(1.0 + P * zs / clean)

    s = np.where(idle_mode,
                 np.where(is_busy, SCEN_MISS, SCEN_IDLE_HIT),
                 np.where(is_busy, SCEN_BUSY_HIT, SCEN_BUSY_FALSE))
    scen[:] = s
    service[:] = np.where(idle_mode, np.where(is_busy, 0.0, tn * r2), tn * r1)
    interference[:] = np.where(is_busy, P * zp, 0.0)
    k_idle[:] = k
    lrsel[:] = best_lr
    zsel[:] = zs
    zspsel[:] = zp
    power[:] = P


@njit(cache=True, nogil=True)
def _lindley_nb(q0, arrival, service, out):
    q = q0
    for i in range(service.shape[0]):
        q = q + arrival - service[i]
        if q < 0.0:
            q = 0.0
        out[i] = q
    return q


def _lindley_np(q0, arrival, service, out):
    # reflected random walk: Q_n = W_n - min(-q0, min_{j<=n} W_j)
    if service.shape[0] == 0:
        return q0
    walk = np.cumsum(arrival - service)
    floor = np.minimum(np.minimum.accumulate(walk), -q0)
    np.maximum(walk - floor, 0.0, out=out)
    return float(out[-1])


if USE_NUMBA:
    frame_kernel = _frame_kernel_nb
    lindley_kernel = _lindley_nb
else:
    frame_kernel = _frame_kernel_np
    lindley_kernel = _lindley_np
