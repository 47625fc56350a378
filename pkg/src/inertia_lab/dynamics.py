"""Trajectory integration for the damped inertial gradient dynamic.

The second-order equation

    xdd + gamma(t) xd + beta(t) Hess f(x) xd + b(t) grad f(x) = 0

is integrated as a first-order system in (x, v) by an adaptive Dormand-Prince
5(4) pair with PI step control. Runs whose coefficients and objective fit the
compiled kernel go through it; anything else (custom oracles, spline
schedules) uses the pure-Python stepper below, which implements the same
algorithm and is cross-checked against the kernel in the tests.

Checkpoints are dense-output samples on a log-spaced grid, decoupled from the
internal steps. When a certificate is supplied the run also records the
certificate energy and the two running integral estimates
int values_weight*fgap dt and int q*|grad f|^2 dt (trapezoid on checkpoints).
"""

import math

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import certificates as certs
from . import kernel as K
from .errors import ConfigError, DomainError, MissingArgminError
from .problems import hvp_fd
from .schedules import schedule_is_zero

_STATUS = {K.OK: "completed", K.STEP_FLOOR: "step_floor_hit",
           K.MAX_STEPS: "max_steps_hit", K.DOMAIN_REJECTED: "domain_rejected"}


class DynamicsSpec:
    """Coefficient triple of the dynamic plus its start time."""

    def __init__(self, gamma, beta, b, t0):
        self.gamma = gamma
        self.beta = beta
        self.b = b
        self.t0 = float(t0)

    def validate(self, horizon, n=100):
        """Sampled sign checks: gamma, beta >= 0 and b > 0 on [t0, horizon]."""
        if self.t0 > 0:
            ts = np.geomspace(self.t0, horizon, n)
        else:
            ts = np.linspace(self.t0, horizon, n)
        ga = self.gamma.value(ts)
        be = self.beta.value(ts)
        bb = self.b.value(ts)
        if np.any(ga < -1e-12):
            raise ConfigError("gamma must be nonnegative on the horizon")
        if np.any(be < -1e-12):
            raise ConfigError("beta must be nonnegative on the horizon")
        if np.any(bb <= 0.0):
            raise ConfigError("b must be positive on the horizon")


class IntegratorConfig:
    def __init__(self, rtol=1e-9, atol=1e-12, hmin=1e-13, hmax=math.inf,
                 max_steps=20_000_000, checkpoint_grid=None,
                 checkpoints_per_decade=200, backend="auto"):
        self.rtol = float(rtol)
        self.atol = float(atol)
        self.hmin = float(hmin)
        self.hmax = float(hmax)
        self.max_steps = int(max_steps)
        self.checkpoint_grid = checkpoint_grid
        self.checkpoints_per_decade = int(checkpoints_per_decade)
        self.backend = backend
        if not (self.rtol > 0 and self.atol > 0):
            raise ConfigError("rtol and atol must be positive")
        if not (0 < self.hmin <= self.hmax):
            raise ConfigError("need 0 < hmin <= hmax")
        if self.max_steps < 1:
            raise ConfigError("max_steps must be at least 1")
        if backend not in ("auto", "python"):
            raise ConfigError(f"unknown backend {backend!r}")

    @property
    def fixed_step(self):
        return math.isfinite(self.hmax) and self.hmin == self.hmax


class Trajectory:
    """Checkpoint samples of one integration, with derived series."""

    def __init__(self, ts, xs, vs, fgap, grad_norm_sq, energy,
                 int_values, int_grads, status, meta):
        self.ts = ts
        self.xs = xs
        self.vs = vs
        self.fgap = fgap
        self.grad_norm_sq = grad_norm_sq
        self.energy = energy            # None when no certificate was given
        self.int_values = int_values
        self.int_grads = int_grads
        self.status = status
        self.meta = meta

    @property
    def dim(self):
        return self.xs.shape[1]

    def to_csv(self, path):
        d = self.dim
        cols = (["t"] + [f"x_{i+1}" for i in range(d)]
                + [f"v_{i+1}" for i in range(d)]
                + ["fgap", "grad_norm_sq", "energy", "int_values", "int_grads"])
        en = self.energy if self.energy is not None else np.full(self.ts.size, np.nan)
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for i in range(self.ts.size):
                row = [self.ts[i], *self.xs[i], *self.vs[i], self.fgap[i],
                       self.grad_norm_sq[i], en[i], self.int_values[i],
                       self.int_grads[i]]
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    def summary(self):
        out = {
            "status": self.status,
            "t0": float(self.ts[0]),
            "t_end": float(self.ts[-1]),
            "n_samples": int(self.ts.size),
            "terminal_fgap": float(self.fgap[-1]),
            "int_values_total": float(self.int_values[-1]),
            "int_grads_total": float(self.int_grads[-1]),
            **self.meta,
        }
        if self.energy is not None:
            out["energy_t0"] = float(self.energy[0])
            out["energy_end"] = float(self.energy[-1])
        return out


def rhs(spec, obj, t, x, v):
    """First-order right-hand side: dx = v,
    dv = -gamma v - beta hvp(x, v) - b grad(x)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    t = float(t)
    ga = float(spec.gamma.value(t))
    be = float(spec.beta.value(t))
    bb = float(spec.b.value(t))
    g = obj.grad(x)
    dv = -ga * v - bb * g
    if be != 0.0:
        hv = obj.hvp(x, v) if obj.hvp is not None else hvp_fd(obj, x, v)
        dv = dv - be * hv
    return v, dv


def _checkpoint_grid(t0, horizon, cfg):
    if cfg.checkpoint_grid is not None:
        ts = np.asarray(cfg.checkpoint_grid, dtype=float)
        if ts.ndim != 1 or ts.size < 2 or np.any(np.diff(ts) <= 0):
            raise ConfigError("checkpoint_grid must be strictly increasing, >= 2 points")
        if ts[0] < t0 - 1e-12 or ts[-1] > horizon * (1 + 1e-12) + 1e-12:
            raise ConfigError("checkpoint_grid must lie within [t0, horizon]")
        return ts
    if t0 > 0:
        decades = math.log10(horizon / t0)
        n = max(129, int(cfg.checkpoints_per_decade * decades) + 1)
        ts = np.geomspace(t0, horizon, n)
    else:
        ts = np.linspace(t0, horizon, 2001)
    ts[0] = t0
    ts[-1] = horizon
    return ts


def _resolve_z(obj, x0, z):
    if z is not None:
        return np.asarray(z, dtype=float)
    if obj.argmin_projector is not None:
        return np.asarray(obj.argmin_projector(np.asarray(x0, dtype=float)), dtype=float)
    if obj.known_argmin is not None:
        return np.asarray(obj.known_argmin, dtype=float)
    raise MissingArgminError(
        "certificate energy needs a minimizer: pass z or use an objective "
        "with known_argmin")


def integrate(spec, obj, x0, v0, horizon, cfg=None, cert=None, z=None):
    """Integrate the dynamic from (x0, v0) at spec.t0 up to the horizon.

    Returns a Trajectory; early stops are reported through its status field,
    never as exceptions, so partial data stays usable.
    """
    cfg = cfg or IntegratorConfig()
    horizon = float(horizon)
    t0 = spec.t0
    if not horizon > t0:
        raise ConfigError(f"horizon must exceed t0={t0}, got {horizon}")
    x0 = np.asarray(x0, dtype=float).copy()
    v0 = np.asarray(v0, dtype=float).copy()
    if x0.shape != (obj.dim,) or v0.shape != (obj.dim,):
        raise ConfigError(f"x0 and v0 must have shape ({obj.dim},)")
    if not obj.in_domain(x0):
        raise DomainError("x0 lies outside the objective's domain")
    spec.validate(horizon)

    checkpoints = _checkpoint_grid(t0, horizon, cfg)
    d = obj.dim
    y0 = np.concatenate([x0, v0])
    out_y = np.full((checkpoints.size, 2 * d), np.nan)

    enc = None
    if cfg.backend == "auto":
        obj_enc = K.encode_objective(obj)
        g_enc = K.encode_schedule(spec.gamma)
        be_enc = K.encode_schedule(spec.beta)
        b_enc = K.encode_schedule(spec.b)
        if obj_enc is not None and g_enc is not None and be_enc is not None \
                and b_enc is not None:
            enc = (obj_enc, g_enc, be_enc, b_enc)

    hmax = 0.0 if math.isinf(cfg.hmax) else cfg.hmax
    if enc is not None:
        (obj_code, A, ell), g_enc, be_enc, b_enc = enc
        L_quad = float(obj.kernel_data.get("L", 1.0)) if obj.kernel_kind == "quadratic" else 2.0
        status, t_reached, n_steps, n_rejected, y_fin = K.integrate_kernel(
            t0, horizon, y0, obj_code, A, ell, g_enc, be_enc, b_enc,
            cfg.rtol, cfg.atol, cfg.hmin, hmax, cfg.max_steps, L_quad,
            checkpoints, out_y)
        backend = "kernel"
    else:
        status, t_reached, n_steps, n_rejected, y_fin = _integrate_python(
            spec, obj, t0, horizon, y0, cfg, hmax, checkpoints, out_y)
        backend = "python"

    filled = ~np.isnan(out_y[:, 0])
    ts = checkpoints[filled]
    ys = out_y[filled]
    if ts.size == 0 or t_reached > ts[-1] + 1e-12 * max(1.0, abs(t_reached)):
        ts = np.append(ts, t_reached)
        ys = np.vstack([ys, y_fin]) if ys.size else y_fin[None, :]
    xs = ys[:, :d].copy()
    vs = ys[:, d:].copy()

    fvals = obj.value_batch(xs)
    if obj.known_min is not None:
        fref = obj.known_min
        fgap_ref = "known_min"
    else:
        fref = float(np.min(fvals))          # second pass is relative to the best
        fgap_ref = "best_observed"
    fgap = np.maximum(fvals - fref, 0.0)
    gs = obj.grad_batch(xs)
    grad_norm_sq = np.sum(gs ** 2, axis=1)

    energy = None
    int_values = np.zeros(ts.size)
    int_grads = np.zeros(ts.size)
    zz = None
    if cert is not None:
        zz = _resolve_z(obj, x0, z)
        energy = certs.energy_batch(cert, obj, zz, ts, xs, vs)
        vw = certs.values_weight(cert, ts)
        qw = certs.weight_q(cert, ts)
        int_values = cumulative_trapezoid(vw * fgap, ts, initial=0.0)
        int_grads = cumulative_trapezoid(qw * grad_norm_sq, ts, initial=0.0)
    else:
        int_values = np.full(ts.size, np.nan)
        int_grads = np.full(ts.size, np.nan)

    meta = {
        "backend": backend,
        "n_steps": int(n_steps),
        "n_rejected": int(n_rejected),
        "t_reached": float(t_reached),
        "rtol": cfg.rtol,
        "atol": cfg.atol,
        "fgap_reference": fgap_ref,
        "fgap_floor": obj.fgap_floor(),
    }
    if zz is not None:
        meta["z"] = [float(c) for c in zz]
    return Trajectory(ts, xs, vs, fgap, grad_norm_sq, energy,
                      int_values, int_grads, _STATUS[status], meta)


def energy(cert, spec, obj, z, t, x, v):
    """Certificate energy at one state; spec is accepted for signature
    symmetry with rhs, the coefficients come from the certificate."""
    del spec
    if z is None:
        z = _resolve_z(obj, np.asarray(x, dtype=float), None)
    return certs.energy(cert, obj, z, t, x, v)


# -- pure-Python stepper -------------------------------------------------------

def _rhs_flat(spec, obj, t, y, d):
    x = y[:d]
    if not obj.in_domain(x):
        return None
    v = y[d:]
    ga = float(spec.gamma.value(t))
    be = float(spec.beta.value(t))
    bb = float(spec.b.value(t))
    g = obj.grad(x)
    dv = -ga * v - bb * g
    if be != 0.0:
        hv = obj.hvp(x, v) if obj.hvp is not None else hvp_fd(obj, x, v)
        dv = dv - be * hv
    return np.concatenate([v, dv])


def _curvature_py(obj, y, d, L_floor):
    if obj.kernel_kind == "quadratic":
        return float(obj.kernel_data["L"])
    if obj.kernel_kind == "log-barrier":
        xmin = float(np.min(y[:d]))
        if xmin <= 0:
            return L_floor
        return max(L_floor, 1.0 + 1.0 / xmin ** 2)
    return L_floor


def _integrate_python(spec, obj, t0, t_end, y0, cfg, hmax, checkpoints, out_y):
    """Same scheme as the compiled kernel, over arbitrary Python oracles."""
    n = y0.size
    d = n // 2
    y = y0.copy()
    Kst = np.zeros((7, n))
    fixed_step = cfg.fixed_step
    L_floor = 1.0

    m = checkpoints.size
    cp = 0
    while cp < m and checkpoints[cp] <= t0:
        out_y[cp] = y
        cp += 1

    dy = _rhs_flat(spec, obj, t0, y, d)
    if dy is None:
        return K.DOMAIN_REJECTED, t0, 0, 0, y
    Kst[0] = dy

    t = t0
    if fixed_step:
        h = cfg.hmax
    else:
        Lc = _curvature_py(obj, y, d, L_floor)
        bb0 = float(spec.b.value(t0))
        ga0 = float(spec.gamma.value(t0))
        be0 = float(spec.beta.value(t0))
        h = 1e-2 * max(1.0, abs(t0))
        h = min(h, K.STAB / max(1e-300, math.sqrt(max(bb0 * Lc, 0.0))))
        h = min(h, K.STAB / max(1e-300, ga0 + be0 * Lc))
        if hmax > 0.0:
            h = min(h, hmax)
        h = min(h, t_end - t0)

    facold = 1e-4
    n_steps = 0
    n_rejected = 0
    last_rejected = False

    while t < t_end:
        if n_steps >= cfg.max_steps:
            return K.MAX_STEPS, t, n_steps, n_rejected, y
        if fixed_step:
            h = cfg.hmax
        else:
            Lc = _curvature_py(obj, y, d, L_floor)
            h = min(h, K.STAB / max(1e-300, math.sqrt(max(float(spec.b.value(t)) * Lc, 0.0))))
            h = min(h, K.STAB / max(1e-300, float(spec.gamma.value(t))
                                    + float(spec.beta.value(t)) * Lc))
            if hmax > 0.0:
                h = min(h, hmax)
            floor = cfg.hmin if cfg.hmin > 0.0 else 1e-14 * max(1.0, abs(t))
            if h < floor:
                return K.STEP_FLOOR, t, n_steps, n_rejected, y
        if t + h >= t_end:
            h = t_end - t

        domain_bad = False
        for s in range(1, 7):
            y_stage = y + h * (K.A_STAGES[s, :s] @ Kst[:s])
            dy = _rhs_flat(spec, obj, t + K.C_STAGES[s] * h, y_stage, d)
            if dy is None:
                domain_bad = True
                break
            Kst[s] = dy
        if domain_bad:
            if fixed_step:
                return K.DOMAIN_REJECTED, t, n_steps, n_rejected, y
            n_rejected += 1
            last_rejected = True
            h *= 0.5
            floor = cfg.hmin if cfg.hmin > 0.0 else 1e-14 * max(1.0, abs(t))
            if h < floor:
                return K.DOMAIN_REJECTED, t, n_steps, n_rejected, y
            continue

        y_new = y_stage                      # stage 6 state is the accepted solution
        if fixed_step:
            err = 0.0
        else:
            ei = h * (K.E_ERR @ Kst)
            sc = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y_new))
            err = math.sqrt(float(np.mean((ei / sc) ** 2)))
        if not math.isfinite(err):
            if fixed_step:
                return K.STEP_FLOOR, t, n_steps, n_rejected, y
            n_rejected += 1
            last_rejected = True
            h *= 0.2
            floor = cfg.hmin if cfg.hmin > 0.0 else 1e-14 * max(1.0, abs(t))
            if h < floor:
                return K.STEP_FLOOR, t, n_steps, n_rejected, y
            continue

        if err <= 1.0 or fixed_step:
            t_new = t + h
            while cp < m and checkpoints[cp] <= t_new + 1e-14 * max(1.0, abs(t_new)):
                th = (checkpoints[cp] - t) / h
                poly = np.array([th, th ** 2, th ** 3, th ** 4])
                out_y[cp] = y + h * (Kst.T @ (K.P_DENSE @ poly))
                cp += 1
            y = y_new.copy()
            Kst[0] = Kst[6]
            t = t_new
            n_steps += 1
            if not fixed_step:
                fac = K.FAC_MAX if err == 0.0 else \
                    K.SAFETY * err ** (-K.PI_EXPO1) * facold ** K.PI_BETA
                fac = min(K.FAC_MAX, max(K.FAC_MIN, fac))
                if last_rejected:
                    fac = min(fac, 1.0)
                h *= fac
                facold = max(err, 1e-4)
            last_rejected = False
        else:
            n_rejected += 1
            last_rejected = True
            h *= min(1.0, max(K.FAC_MIN, K.SAFETY * err ** -0.2))
            floor = cfg.hmin if cfg.hmin > 0.0 else 1e-14 * max(1.0, abs(t))
            if h < floor:
                return K.STEP_FLOOR, t, n_steps, n_rejected, y

    while cp < m and checkpoints[cp] <= t + 1e-12 * max(1.0, abs(t)):
        out_y[cp] = y
        cp += 1
    return K.OK, t, n_steps, n_rejected, y
