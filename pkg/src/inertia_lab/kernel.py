"""Compiled integrator core.

A single Dormand-Prince 5(4) loop specialized to the second-order dynamic

    xdd + gamma(t) xd + beta(t) Hess f(x) xd + b(t) grad f(x) = 0

written in first-order form over y = (x, v). Coefficient schedules arrive as
small term tables so the hot loop never calls back into Python; objectives are
dispatched by an integer code (quadratic / log-barrier). Anything not
expressible that way runs through the pure-Python stepper in dynamics instead.

Step size control is the usual PI controller; on top of it the step is capped
by an explicit-stability bound using a running curvature estimate, which is
what keeps the strongly damped exponential regimes from rejecting their way
forward one step at a time.
"""

import math

import numpy as np
from numba import njit

from .errors import ConfigError
from .schedules import AlphaOverT, Const, ExpPower, Power, Sum

# status codes shared with dynamics
OK = 0
STEP_FLOOR = 1
MAX_STEPS = 2
DOMAIN_REJECTED = 3

OBJ_QUADRATIC = 0
OBJ_LOG_BARRIER = 1

# Dormand-Prince 5(4): stage times, stage weights, 4th-order error weights,
# and the quartic dense-output polynomial in the step fraction.
C_STAGES = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])

A_STAGES = np.zeros((7, 7))
A_STAGES[1, 0] = 1 / 5
A_STAGES[2, :2] = (3 / 40, 9 / 40)
A_STAGES[3, :3] = (44 / 45, -56 / 15, 32 / 9)
A_STAGES[4, :4] = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
A_STAGES[5, :5] = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
A_STAGES[6, :6] = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)

B_SOL = A_STAGES[6].copy()

E_ERR = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
                  -17253 / 339200, 22 / 525, -1 / 40])

P_DENSE = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
PI_BETA = 0.04
PI_EXPO1 = 0.2 - 0.75 * PI_BETA
FAC_MIN = 0.2
FAC_MAX = 5.0
STAB = 2.5

TERM_CONST = 0.0
TERM_POWER = 1.0
TERM_EXPPOW = 2.0


def encode_schedule(s):
    """Flatten a schedule into an (n, 4) term table, or None if not possible.

    Rows are (kind, k, p_or_mu, q): kind 0 constant k, kind 1 power k*t^p,
    kind 2 exponential k*exp(mu*t^q). Sums concatenate.
    """
    if isinstance(s, Sum):
        rows = []
        for term in s.terms:
            sub = encode_schedule(term)
            if sub is None:
                return None
            rows.append(sub)
        return np.vstack(rows) if rows else np.zeros((0, 4))
    if isinstance(s, Const):
        return np.array([[TERM_CONST, s.k, 0.0, 0.0]])
    if isinstance(s, AlphaOverT):
        return np.array([[TERM_POWER, s.alpha, s.q - 1.0, 0.0]])
    if isinstance(s, Power):
        if s.p == 0.0:
            return np.array([[TERM_CONST, s.k, 0.0, 0.0]])
        return np.array([[TERM_POWER, s.k, s.p, 0.0]])
    if isinstance(s, ExpPower):
        return np.array([[TERM_EXPPOW, s.k, s.mu, s.q]])
    return None


def encode_objective(obj):
    """Return (code, A, ell) for kernel dispatch, or None for Python fallback."""
    kind = getattr(obj, "kernel_kind", None)
    if kind == "quadratic":
        data = obj.kernel_data
        return OBJ_QUADRATIC, np.asarray(data["A"], dtype=float), \
            np.asarray(data["ell"], dtype=float)
    if kind == "log-barrier":
        d = obj.dim
        return OBJ_LOG_BARRIER, np.zeros((d, d)), np.zeros(d)
    return None


@njit(cache=True, inline="always")
def _sched_val(terms, t):
    s = 0.0
    for i in range(terms.shape[0]):
        kind = terms[i, 0]
        if kind == TERM_CONST:
            s += terms[i, 1]
        elif kind == TERM_POWER:
            s += terms[i, 1] * t ** terms[i, 2]
        else:
            s += terms[i, 1] * math.exp(terms[i, 2] * t ** terms[i, 3])
    return s


@njit(cache=True, inline="always")
def _eval_rhs(t, y, dy, d, obj_code, A, ell, gam_terms, bet_terms, b_terms):
    """Fill dy; returns False if the state left the objective's domain."""
    ga = _sched_val(gam_terms, t)
    be = _sched_val(bet_terms, t)
    bb = _sched_val(b_terms, t)
    if obj_code == OBJ_LOG_BARRIER:
        for i in range(d):
            if y[i] <= 0.0:
                return False
    for i in range(d):
        dy[i] = y[d + i]
    if obj_code == OBJ_QUADRATIC:
        for i in range(d):
            acc = 0.0
            hv = 0.0
            for j in range(d):
                acc += A[i, j] * y[j]
                hv += A[i, j] * y[d + j]
            gi = acc - ell[i]
            dy[d + i] = -ga * y[d + i] - be * hv - bb * gi
    else:
        for i in range(d):
            xi = y[i]
            vi = y[d + i]
            gi = xi - 1.0 / xi
            hvi = (1.0 + 1.0 / (xi * xi)) * vi
            dy[d + i] = -ga * vi - be * hvi - bb * gi
    return True


@njit(cache=True)
def _curvature(y, d, obj_code, L_quad):
    if obj_code == OBJ_QUADRATIC:
        return L_quad
    xmin = y[0]
    for i in range(1, d):
        if y[i] < xmin:
            xmin = y[i]
    if xmin <= 0.0:
        return L_quad
    L = 1.0 + 1.0 / (xmin * xmin)
    return L if L > L_quad else L_quad


@njit(cache=True, nogil=True)
def integrate_kernel(t0, t_end, y0, obj_code, A, ell,
                     gam_terms, bet_terms, b_terms,
                     rtol, atol, hmin, hmax, max_steps,
                     L_quad, checkpoints, out_y):
    """March y' = F(t, y) from t0 to t_end, writing dense-output states at
    the checkpoint times. Returns (status, t_reached, n_steps, n_rejected, y).
    """
    n = y0.shape[0]
    d = n // 2
    y = y0.copy()
    K = np.zeros((7, n))
    y_stage = np.zeros(n)
    y_new = np.zeros(n)
    dy = np.zeros(n)

    fixed_step = hmin == hmax and hmax > 0.0

    m = checkpoints.shape[0]
    cp = 0
    while cp < m and checkpoints[cp] <= t0:
        for i in range(n):
            out_y[cp, i] = y[i]
        cp += 1

    ok = _eval_rhs(t0, y, dy, d, obj_code, A, ell, gam_terms, bet_terms, b_terms)
    if not ok:
        return DOMAIN_REJECTED, t0, 0, 0, y
    for i in range(n):
        K[0, i] = dy[i]

    t = t0
    if fixed_step:
        h = hmax
    else:
        Lc = _curvature(y, d, obj_code, L_quad)
        bb0 = _sched_val(b_terms, t0)
        ga0 = _sched_val(gam_terms, t0)
        be0 = _sched_val(bet_terms, t0)
        h = 1e-2 * max(1.0, abs(t0))
        cap = STAB / max(1e-300, math.sqrt(max(bb0 * Lc, 0.0)))
        if cap < h:
            h = cap
        cap = STAB / max(1e-300, ga0 + be0 * Lc)
        if cap < h:
            h = cap
        if hmax > 0.0 and h > hmax:
            h = hmax
        if h > t_end - t0:
            h = t_end - t0

    facold = 1e-4
    n_steps = 0
    n_rejected = 0
    last_rejected = False

    while t < t_end:
        if n_steps >= max_steps:
            return MAX_STEPS, t, n_steps, n_rejected, y

        if fixed_step:
            h = hmax
        else:
            Lc = _curvature(y, d, obj_code, L_quad)
            bb0 = _sched_val(b_terms, t)
            ga0 = _sched_val(gam_terms, t)
            be0 = _sched_val(bet_terms, t)
            cap = STAB / max(1e-300, math.sqrt(max(bb0 * Lc, 0.0)))
            if cap < h:
                h = cap
            cap = STAB / max(1e-300, ga0 + be0 * Lc)
            if cap < h:
                h = cap
            if hmax > 0.0 and h > hmax:
                h = hmax
            floor = hmin if hmin > 0.0 else 1e-14 * max(1.0, abs(t))
            if h < floor:
                return STEP_FLOOR, t, n_steps, n_rejected, y

        if t + h >= t_end:
            h = t_end - t

        # stages 1..6 (stage 0 is FSAL from the previous step)
        domain_bad = False
        for s in range(1, 7):
            ts = t + C_STAGES[s] * h
            for i in range(n):
                acc = 0.0
                for j in range(s):
                    acc += A_STAGES[s, j] * K[j, i]
                y_stage[i] = y[i] + h * acc
            ok = _eval_rhs(ts, y_stage, dy, d, obj_code, A, ell,
                           gam_terms, bet_terms, b_terms)
            if not ok:
                domain_bad = True
                break
            for i in range(n):
                K[s, i] = dy[i]

        if domain_bad:
            if fixed_step:
                return DOMAIN_REJECTED, t, n_steps, n_rejected, y
            n_rejected += 1
            last_rejected = True
            h *= 0.5
            floor = hmin if hmin > 0.0 else 1e-14 * max(1.0, abs(t))
            if h < floor:
                return DOMAIN_REJECTED, t, n_steps, n_rejected, y
            continue

        for i in range(n):
            y_new[i] = y_stage[i]          # stage 6 state is the 5th-order solution

        if fixed_step:
            err = 0.0
        else:
            err_acc = 0.0
            for i in range(n):
                ei = 0.0
                for s in range(7):
                    ei += E_ERR[s] * K[s, i]
                ei *= h
                ay = abs(y[i])
                ayn = abs(y_new[i])
                sc = atol + rtol * (ay if ay > ayn else ayn)
                r = ei / sc
                err_acc += r * r
            err = math.sqrt(err_acc / n)

        if not math.isfinite(err):
            if fixed_step:
                return STEP_FLOOR, t, n_steps, n_rejected, y
            n_rejected += 1
            last_rejected = True
            h *= 0.2
            floor = hmin if hmin > 0.0 else 1e-14 * max(1.0, abs(t))
            if h < floor:
                return STEP_FLOOR, t, n_steps, n_rejected, y
            continue

        if err <= 1.0 or fixed_step:
            t_new = t + h
            # dense output over (t, t_new]
            if cp < m and checkpoints[cp] <= t_new:
                while cp < m and checkpoints[cp] <= t_new + 1e-14 * max(1.0, abs(t_new)):
                    th = (checkpoints[cp] - t) / h
                    th2 = th * th
                    for i in range(n):
                        acc = 0.0
                        for s in range(7):
                            ps = (P_DENSE[s, 0] * th + P_DENSE[s, 1] * th2
                                  + P_DENSE[s, 2] * th2 * th
                                  + P_DENSE[s, 3] * th2 * th2)
                            acc += K[s, i] * ps
                        out_y[cp, i] = y[i] + h * acc
                    cp += 1
            for i in range(n):
                y[i] = y_new[i]
                K[0, i] = K[6, i]
            t = t_new
            n_steps += 1
            if not fixed_step:
                if err == 0.0:
                    fac = FAC_MAX
                else:
                    fac = SAFETY * err ** (-PI_EXPO1) * facold ** PI_BETA
                if fac < FAC_MIN:
                    fac = FAC_MIN
                if fac > FAC_MAX:
                    fac = FAC_MAX
                if last_rejected and fac > 1.0:
                    fac = 1.0
                h *= fac
                facold = err if err > 1e-4 else 1e-4
            last_rejected = False
        else:
            n_rejected += 1
            last_rejected = True
            fac = SAFETY * err ** (-0.2)
            if fac < FAC_MIN:
                fac = FAC_MIN
            if fac > 1.0:
                fac = 1.0
            h *= fac
            floor = hmin if hmin > 0.0 else 1e-14 * max(1.0, abs(t))
            if h < floor:
                return STEP_FLOOR, t, n_steps, n_rejected, y

    while cp < m and checkpoints[cp] <= t + 1e-12 * max(1.0, abs(t)):
        for i in range(n):
            out_y[cp, i] = y[i]
        cp += 1
    return OK, t, n_steps, n_rejected, y
