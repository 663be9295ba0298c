"""Hot numeric kernels: Kepler solves, batch propagation, Lambert arcs.

The search spends almost all of its time in three inner loops: solving
Kepler's equation for every asteroid in the catalog, converting orbital
elements to Cartesian states, and iterating Lambert's problem tens of
thousands of times per run. These kernels are JIT-compiled with numba by
default. Setting the environment variable ``ASTROBEAM_NO_NUMBA=1`` (or
running without numba installed) selects a pure-numpy fallback path that
produces the same results. ``benchmarks/bench_kernels.py`` compares the
two paths.
"""

import math
import os

import numpy as np

NO_NUMBA_ENV = "ASTROBEAM_NO_NUMBA"

JIT_ENABLED = os.environ.get(NO_NUMBA_ENV, "0") not in ("1", "true", "yes")
if JIT_ENABLED:
    try:
        from numba import njit
    except ImportError:
        JIT_ENABLED = False

if not JIT_ENABLED:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn


def jit_enabled() -> bool:
    """True when the numba-compiled kernel path is active."""
    return JIT_ENABLED


TWO_PI = 2.0 * math.pi

# Kepler iteration: Newton until the residual clears _KEPLER_TOL, bisection
# as a guaranteed fallback. Both backends apply the identical per-element
# schedule so results agree to the last bit on a given platform.
_KEPLER_TOL = 1e-14
_KEPLER_NEWTON_MAX = 50


def _kepler_scalar(mean_anom, ecc):
    m = mean_anom % TWO_PI
    ecc_anom = m if ecc < 0.8 else math.pi
    converged = False
    for _ in range(_KEPLER_NEWTON_MAX):
        f = ecc_anom - ecc * math.sin(ecc_anom) - m
        if abs(f) <= _KEPLER_TOL:
            converged = True
            break
        ecc_anom = ecc_anom - f / (1.0 - ecc * math.cos(ecc_anom))
    if not converged:
        # f(E) = E - e sin E - m is strictly increasing on [0, 2pi] with
        # f(0) <= 0 <= f(2pi), so bisection always lands on the root.
        lo = 0.0
        hi = TWO_PI
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            if mid - ecc * math.sin(mid) - m > 0.0:
                hi = mid
            else:
                lo = mid
        ecc_anom = 0.5 * (lo + hi)
        ecc_anom = ecc_anom - (ecc_anom - ecc * math.sin(ecc_anom) - m) / (
            1.0 - ecc * math.cos(ecc_anom)
        )
    return ecc_anom + (mean_anom - m)


def _kepler_batch_loop(mean_anom, ecc):
    out = np.empty_like(mean_anom)
    for i in range(mean_anom.shape[0]):
        out[i] = _kepler_scalar(mean_anom[i], ecc[i])
    return out


def _kepler_batch_numpy(mean_anom, ecc):
    m = np.mod(mean_anom, TWO_PI)
    ecc_anom = np.where(ecc < 0.8, m, math.pi)
    active = np.ones(m.shape, dtype=bool)
    for _ in range(_KEPLER_NEWTON_MAX):
        f = ecc_anom - ecc * np.sin(ecc_anom) - m
        active &= np.abs(f) > _KEPLER_TOL
        if not active.any():
            break
        step = np.where(active, f / (1.0 - ecc * np.cos(ecc_anom)), 0.0)
        ecc_anom = ecc_anom - step
    if active.any():
        f = ecc_anom - ecc * np.sin(ecc_anom) - m
        active &= np.abs(f) > _KEPLER_TOL
        idx = np.nonzero(active)[0]
        for i in idx:
            mi, ei = m[i], ecc[i]
            lo, hi = 0.0, TWO_PI
            for _ in range(90):
                mid = 0.5 * (lo + hi)
                if mid - ei * math.sin(mid) - mi > 0.0:
                    hi = mid
                else:
                    lo = mid
            e_i = 0.5 * (lo + hi)
            ecc_anom[i] = e_i - (e_i - ei * math.sin(e_i) - mi) / (
                1.0 - ei * math.cos(e_i)
            )
    return ecc_anom + (mean_anom - m)


def _elements_to_rv_loop(a, ecc, inc, raan, argp, mean_anom, mu):
    n = a.shape[0]
    r = np.empty((n, 3))
    v = np.empty((n, 3))
    for i in range(n):
        ecc_anom = _kepler_scalar(mean_anom[i], ecc[i])
        ce = math.cos(ecc_anom)
        se = math.sin(ecc_anom)
        b_fac = math.sqrt(1.0 - ecc[i] * ecc[i])
        x_pf = a[i] * (ce - ecc[i])
        y_pf = a[i] * b_fac * se
        radius = a[i] * (1.0 - ecc[i] * ce)
        vfac = math.sqrt(mu * a[i]) / radius
        vx_pf = -vfac * se
        vy_pf = vfac * b_fac * ce

        co, so = math.cos(raan[i]), math.sin(raan[i])
        ci, si = math.cos(inc[i]), math.sin(inc[i])
        cw, sw = math.cos(argp[i]), math.sin(argp[i])
        r11 = co * cw - so * sw * ci
        r12 = -co * sw - so * cw * ci
        r21 = so * cw + co * sw * ci
        r22 = -so * sw + co * cw * ci
        r31 = sw * si
        r32 = cw * si

        r[i, 0] = r11 * x_pf + r12 * y_pf
        r[i, 1] = r21 * x_pf + r22 * y_pf
        r[i, 2] = r31 * x_pf + r32 * y_pf
        v[i, 0] = r11 * vx_pf + r12 * vy_pf
        v[i, 1] = r21 * vx_pf + r22 * vy_pf
        v[i, 2] = r31 * vx_pf + r32 * vy_pf
    return r, v


def _elements_to_rv_numpy(a, ecc, inc, raan, argp, mean_anom, mu):
    ecc_anom = _kepler_batch_numpy(mean_anom, ecc)
    ce = np.cos(ecc_anom)
    se = np.sin(ecc_anom)
    b_fac = np.sqrt(1.0 - ecc * ecc)
    x_pf = a * (ce - ecc)
    y_pf = a * b_fac * se
    radius = a * (1.0 - ecc * ce)
    vfac = np.sqrt(mu * a) / radius
    vx_pf = -vfac * se
    vy_pf = vfac * b_fac * ce

    co, so = np.cos(raan), np.sin(raan)
    ci, si = np.cos(inc), np.sin(inc)
    cw, sw = np.cos(argp), np.sin(argp)
    r11 = co * cw - so * sw * ci
    r12 = -co * sw - so * cw * ci
    r21 = so * cw + co * sw * ci
    r22 = -so * sw + co * cw * ci
    r31 = sw * si
    r32 = cw * si

    r = np.stack(
        (r11 * x_pf + r12 * y_pf, r21 * x_pf + r22 * y_pf, r31 * x_pf + r32 * y_pf),
        axis=1,
    )
    v = np.stack(
        (
            r11 * vx_pf + r12 * vy_pf,
            r21 * vx_pf + r22 * vy_pf,
            r31 * vx_pf + r32 * vy_pf,
        ),
        axis=1,
    )
    return r, v


# ---------------------------------------------------------------------------
# Lambert arc iteration (Izzo-style universal formulation).
#
# Nondimensional time T = tof * sqrt(2 mu / s^3); each conic is parameterized
# by x with y = sqrt(1 - lam^2 (1 - x^2)). The scalar root solve below is
# identical on both backends; numba removes the interpreter overhead.
# ---------------------------------------------------------------------------

def _tof_derivatives(x, tof_nd, lam):
    lam2 = lam * lam
    lam3 = lam2 * lam
    umx2 = 1.0 - x * x
    y = math.sqrt(1.0 - lam2 * umx2)
    y3 = y * y * y
    y5 = y3 * y * y
    dt = (3.0 * tof_nd * x - 2.0 + 2.0 * lam3 * x / y) / umx2
    ddt = (3.0 * tof_nd + 5.0 * x * dt + 2.0 * (1.0 - lam2) * lam3 / y3) / umx2
    dddt = (7.0 * x * ddt + 8.0 * dt - 6.0 * (1.0 - lam2) * lam2 * lam3 * x / y5) / umx2
    return dt, ddt, dddt


def _hyper_f(z):
    # Gauss hypergeometric 2F1(3, 1; 5/2; z) series, tol 1e-11.
    sj = 1.0
    cj = 1.0
    for j in range(13):
        cj = cj * (3.0 + j) * (1.0 + j) / (2.5 + j) * z / (j + 1.0)
        sj = sj + cj
        if abs(cj) < 1e-11:
            break
    return sj


def _x_to_tof_lagrange(x, revs, lam):
    a = 1.0 / (1.0 - x * x)
    if a > 0.0:
        alfa = 2.0 * math.acos(x)
        beta = 2.0 * math.asin(math.sqrt(lam * lam / a))
        if lam < 0.0:
            beta = -beta
        return (
            a
            * math.sqrt(a)
            * ((alfa - math.sin(alfa)) - (beta - math.sin(beta)) + TWO_PI * revs)
            / 2.0
        )
    alfa = 2.0 * math.acosh(x)
    beta = 2.0 * math.asinh(math.sqrt(-lam * lam / a))
    if lam < 0.0:
        beta = -beta
    return -a * math.sqrt(-a) * ((beta - math.sinh(beta)) - (alfa - math.sinh(alfa))) / 2.0


def _x_to_tof(x, revs, lam):
    battin = 0.01
    lagrange = 0.2
    dist = abs(x - 1.0)
    if battin < dist < lagrange:
        return _x_to_tof_lagrange(x, revs, lam)
    lam2 = lam * lam
    ecc_term = x * x - 1.0
    rho = abs(ecc_term)
    z = math.sqrt(1.0 + lam2 * ecc_term)
    if dist < battin:
        eta = z - lam * x
        s1 = 0.5 * (1.0 - lam - x * eta)
        q = 4.0 / 3.0 * _hyper_f(s1)
        return (eta * eta * eta * q + 4.0 * lam * eta) / 2.0 + revs * math.pi / rho**1.5
    y = math.sqrt(rho)
    g = x * z - lam * ecc_term
    if ecc_term < 0.0:
        d = revs * math.pi + math.acos(g)
    else:
        d = math.log(y * (z - lam * x) + g)
    return (x - lam * z - d / y) / ecc_term


def _householder(tof_nd, x0, revs, lam, eps, iter_max):
    it = 0
    err = 1.0
    while err > eps and it < iter_max:
        tof = _x_to_tof(x0, revs, lam)
        dt, ddt, dddt = _tof_derivatives(x0, tof, lam)
        delta = tof - tof_nd
        dt2 = dt * dt
        xnew = x0 - delta * (dt2 - delta * ddt / 2.0) / (
            dt * (dt2 - delta * ddt) + dddt * delta * delta / 6.0
        )
        err = abs(x0 - xnew)
        x0 = xnew
        it += 1
    return x0


def _lambert_raw(r1, r2, tof, mu, max_revs, long_way):
    """Solve the two-point boundary value problem for all feasible arcs.

    The sweep plane normal is r1 x r2, an intrinsic choice, so solutions
    rotate with their inputs. ``long_way`` selects the transfer angle above
    pi instead of below. Returns (status, count, v1, v2, revs, branch)
    where status is 0 on success and 1 for degenerate (near-collinear)
    geometry. Rows [0, count) of the output arrays are valid; branch is 0
    for the single-revolution arc, -1/+1 for the left/right
    multi-revolution branches.
    """
    max_sol = 2 * max_revs + 1
    v1 = np.zeros((max_sol, 3))
    v2 = np.zeros((max_sol, 3))
    revs_out = np.zeros(max_sol, np.int64)
    branch = np.zeros(max_sol, np.int64)

    c0 = r2[0] - r1[0]
    c1 = r2[1] - r1[1]
    c2 = r2[2] - r1[2]
    chord = math.sqrt(c0 * c0 + c1 * c1 + c2 * c2)
    rad1 = math.sqrt(r1[0] * r1[0] + r1[1] * r1[1] + r1[2] * r1[2])
    rad2 = math.sqrt(r2[0] * r2[0] + r2[1] * r2[1] + r2[2] * r2[2])
    semi_per = 0.5 * (rad1 + rad2 + chord)

    ir1x, ir1y, ir1z = r1[0] / rad1, r1[1] / rad1, r1[2] / rad1
    ir2x, ir2y, ir2z = r2[0] / rad2, r2[1] / rad2, r2[2] / rad2
    ihx = ir1y * ir2z - ir1z * ir2y
    ihy = ir1z * ir2x - ir1x * ir2z
    ihz = ir1x * ir2y - ir1y * ir2x
    ihn = math.sqrt(ihx * ihx + ihy * ihy + ihz * ihz)

    # transfer angle in [0, pi]; the orbital plane is undefined within
    # 1e-6 rad of 0 or pi.
    cos_theta = ir1x * ir2x + ir1y * ir2y + ir1z * ir2z
    theta = math.atan2(ihn, cos_theta)
    if theta < 1e-6 or theta > math.pi - 1e-6:
        return 1, 0, v1, v2, revs_out, branch

    ihx /= ihn
    ihy /= ihn
    ihz /= ihn

    lam2 = 1.0 - chord / semi_per
    lam = math.sqrt(lam2)
    if long_way:
        # sweep through 2 pi - theta: flip lambda and the tangential axes
        lam = -lam
        it1x = ir1y * ihz - ir1z * ihy
        it1y = ir1z * ihx - ir1x * ihz
        it1z = ir1x * ihy - ir1y * ihx
        it2x = ir2y * ihz - ir2z * ihy
        it2y = ir2z * ihx - ir2x * ihz
        it2z = ir2x * ihy - ir2y * ihx
    else:
        it1x = ihy * ir1z - ihz * ir1y
        it1y = ihz * ir1x - ihx * ir1z
        it1z = ihx * ir1y - ihy * ir1x
        it2x = ihy * ir2z - ihz * ir2y
        it2y = ihz * ir2x - ihx * ir2z
        it2z = ihx * ir2y - ihy * ir2x

    tof_nd = tof * math.sqrt(2.0 * mu / (semi_per * semi_per * semi_per))

    m_max = int(tof_nd / math.pi)
    t00 = math.acos(lam) + lam * math.sqrt(1.0 - lam2)
    t0 = t00 + m_max * math.pi
    t1 = 2.0 / 3.0 * (1.0 - lam2 * lam)
    if m_max > 0 and tof_nd < t0:
        # Halley refinement of the minimum multi-rev time at m_max
        t_min = t0
        x_old = 0.0
        for _ in range(13):
            dt, ddt, dddt = _tof_derivatives(x_old, t_min, lam)
            if dt != 0.0:
                x_new = x_old - dt * ddt / (ddt * ddt - dt * dddt / 2.0)
            else:
                x_new = x_old
            if abs(x_old - x_new) < 1e-13:
                x_old = x_new
                break
            t_min = _x_to_tof(x_new, m_max, lam)
            x_old = x_new
        if t_min > tof_nd:
            m_max -= 1
    if m_max > max_revs:
        m_max = max_revs

    count = 0
    xs = np.zeros(max_sol)

    # single-revolution arc always exists
    if tof_nd >= t00:
        x0 = -(tof_nd - t00) / (tof_nd - t00 + 4.0)
    elif tof_nd <= t1:
        x0 = t1 * (t1 - tof_nd) / (0.4 * (1.0 - lam2 * lam2 * lam) * tof_nd) + 1.0
    else:
        x0 = (tof_nd / t00) ** (0.6931471805599453 / math.log(t1 / t00)) - 1.0
    xs[count] = _householder(tof_nd, x0, 0, lam, 1e-13, 25)
    revs_out[count] = 0
    branch[count] = 0
    count += 1

    for m in range(1, m_max + 1):
        tmp = ((m * math.pi + math.pi) / (8.0 * tof_nd)) ** (2.0 / 3.0)
        x0 = (tmp - 1.0) / (tmp + 1.0)
        xs[count] = _householder(tof_nd, x0, m, lam, 1e-13, 25)
        revs_out[count] = m
        branch[count] = -1
        count += 1

        tmp = ((8.0 * tof_nd) / (m * math.pi)) ** (2.0 / 3.0)
        x0 = (tmp - 1.0) / (tmp + 1.0)
        xs[count] = _householder(tof_nd, x0, m, lam, 1e-13, 25)
        revs_out[count] = m
        branch[count] = 1
        count += 1

    gamma = math.sqrt(mu * semi_per / 2.0)
    rho = (rad1 - rad2) / chord
    sigma = math.sqrt(1.0 - rho * rho)
    for i in range(count):
        x = xs[i]
        y = math.sqrt(1.0 - lam2 * (1.0 - x * x))
        vr1 = gamma * ((lam * y - x) - rho * (lam * y + x)) / rad1
        vr2 = -gamma * ((lam * y - x) + rho * (lam * y + x)) / rad2
        vt = gamma * sigma * (y + lam * x)
        vt1 = vt / rad1
        vt2 = vt / rad2
        v1[i, 0] = vr1 * ir1x + vt1 * it1x
        v1[i, 1] = vr1 * ir1y + vt1 * it1y
        v1[i, 2] = vr1 * ir1z + vt1 * it1z
        v2[i, 0] = vr2 * ir2x + vt2 * it2x
        v2[i, 1] = vr2 * ir2y + vt2 * it2y
        v2[i, 2] = vr2 * ir2z + vt2 * it2z

    return 0, count, v1, v2, revs_out, branch


def _barker_tof(r1, r2, mu, long_way):
    c0 = r2[0] - r1[0]
    c1 = r2[1] - r1[1]
    c2 = r2[2] - r1[2]
    chord = math.sqrt(c0 * c0 + c1 * c1 + c2 * c2)
    rad1 = math.sqrt(r1[0] * r1[0] + r1[1] * r1[1] + r1[2] * r1[2])
    rad2 = math.sqrt(r2[0] * r2[0] + r2[1] * r2[1] + r2[2] * r2[2])
    s = 0.5 * (rad1 + rad2 + chord)
    sigma = -1.0 if long_way else 1.0
    smc = s - chord
    if smc < 0.0:
        smc = 0.0
    return (math.sqrt(2.0) / 3.0) / math.sqrt(mu) * (s**1.5 - sigma * smc**1.5)


def _rendezvous_grid(r1, v1, r2s, v2s, tofs, mu, max_revs, accel_bound):
    """Scan a transfer-time grid and keep the lowest-cost feasible arc.

    Per grid point, both sweep directions are tried: skip times at or below
    the direction's parabolic bound, solve the boundary value problem, take
    the cheapest arc, and drop the grid point when the implied constant
    acceleration dv/tof exceeds ``accel_bound``. Returns (index, dv, v_dep,
    v_arr, revolutions, branch); index is -1 when no grid point is feasible.
    """
    best_idx = -1
    best_dv = np.inf
    best_v1 = np.zeros(3)
    best_v2 = np.zeros(3)
    best_rev = 0
    best_branch = 0
    for g in range(tofs.shape[0]):
        tof = tofs[g]
        r2 = r2s[g]
        point_dv = np.inf
        point_rev = 0
        point_branch = 0
        point_v1 = np.zeros(3)
        point_v2 = np.zeros(3)
        for direction in range(2):
            long_way = direction == 1
            if tof <= _barker_tof(r1, r2, mu, long_way):
                continue
            status, count, v1s, v2s_sol, revs, branch = _lambert_raw(
                r1, r2, tof, mu, max_revs, long_way
            )
            if status != 0:
                break
            for i in range(count):
                d0 = v1s[i, 0] - v1[0]
                d1 = v1s[i, 1] - v1[1]
                d2 = v1s[i, 2] - v1[2]
                a0 = v2s[g, 0] - v2s_sol[i, 0]
                a1 = v2s[g, 1] - v2s_sol[i, 1]
                a2 = v2s[g, 2] - v2s_sol[i, 2]
                dv = math.sqrt(d0 * d0 + d1 * d1 + d2 * d2) + math.sqrt(
                    a0 * a0 + a1 * a1 + a2 * a2
                )
                if dv < point_dv or (dv == point_dv and revs[i] < point_rev):
                    point_dv = dv
                    point_rev = revs[i]
                    point_branch = branch[i]
                    for j in range(3):
                        point_v1[j] = v1s[i, j]
                        point_v2[j] = v2s_sol[i, j]
        if not np.isfinite(point_dv):
            continue
        if point_dv / tof > accel_bound:
            continue
        if point_dv < best_dv:
            best_dv = point_dv
            best_idx = g
            best_rev = point_rev
            best_branch = point_branch
            for j in range(3):
                best_v1[j] = point_v1[j]
                best_v2[j] = point_v2[j]
    return best_idx, best_dv, best_v1, best_v2, best_rev, best_branch


# Keep undecorated references for the benchmark, then JIT-compile the
# selected path. The numpy implementations stay as the fallback.
lambert_raw_py = _lambert_raw
kepler_batch_numpy = _kepler_batch_numpy
elements_to_rv_numpy = _elements_to_rv_numpy

if JIT_ENABLED:
    _kepler_scalar = njit(cache=True)(_kepler_scalar)
    _kepler_batch_loop = njit(cache=True)(_kepler_batch_loop)
    _elements_to_rv_loop = njit(cache=True)(_elements_to_rv_loop)
    _tof_derivatives = njit(cache=True)(_tof_derivatives)
    _hyper_f = njit(cache=True)(_hyper_f)
    _x_to_tof_lagrange = njit(cache=True)(_x_to_tof_lagrange)
    _x_to_tof = njit(cache=True)(_x_to_tof)
    _householder = njit(cache=True)(_householder)
    _lambert_raw = njit(cache=True)(_lambert_raw)
    _barker_tof = njit(cache=True)(_barker_tof)
    _rendezvous_grid = njit(cache=True)(_rendezvous_grid)

    kepler_batch = _kepler_batch_loop
    elements_to_rv = _elements_to_rv_loop
else:
    kepler_batch = _kepler_batch_numpy
    elements_to_rv = _elements_to_rv_numpy

lambert_raw = _lambert_raw
kepler_scalar = _kepler_scalar
barker_tof = _barker_tof
rendezvous_grid = _rendezvous_grid
