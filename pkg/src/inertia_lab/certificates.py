"""Lyapunov certificates for the damped inertial gradient dynamic.

A certificate is a quadruple of weight schedules (c^2 b, theta, sigma, xi)
making

    E(t) = c^2 b (f(x)-f(z)) + (theta sigma^2 / 2) |x - z + (xdot + beta grad f)/sigma|^2
         + (xi/2) |x - z|^2

nonincreasing along solutions of  xdd + gamma xd + beta Hess f xd + b grad f = 0.
Three construction recipes are provided (tail-integral, tail-integral with
Hessian damping, accumulated-damping), plus a general two-parameter family
(r, m). ``check_conditions`` evaluates the named inequality systems on a grid
and reports per-condition margins with scale-aware tolerances.

Margins for systems whose stated form carries the factor theta (which spans
hundreds of orders of magnitude in exponential regimes) are reported divided
by theta; the division is sign-preserving since theta > 0.
"""

import math

import numpy as np

from . import schedules as sch
from .errors import (ConfigError, GridError, MissingCertificateError,
                     NonmonotoneBError, ParamError, UnsupportedRecipeError)
from .schedules import (AlphaOverT, Const, ExpOf, GammaSched, IntegralProfile,
                        IntegralSched, LnT, LogOf, Power, Prod, Quot, Sum,
                        schedule_is_zero)

TOL_REL = 1e-9

CONDITION_SETS = ("SystemA", "SystemB", "GammaGrowth", "ModelGrowth", "G2G3",
                  "H1toH4", "H2plus", "Eq61", "HrGamma")

# conditions scanned for the boundary band, per set: the value-decay growth
# condition is the one that flips with the parameters; identities that recipes
# satisfy with equality by construction must not read as "boundary"
_BINDING = {
    "SystemA": ("ii",),
    "SystemB": ("ii",),
    "GammaGrowth": ("growth",),
    "ModelGrowth": ("growth",),
    "G2G3": ("G2", "G3"),
    "H1toH4": (),
    "H2plus": (),
    "Eq61": (),
    "HrGamma": (),
}

_EQUALITIES = {"SystemA": ("iii", "iv")}


class Certificate:
    """Weight schedules certifying energy decay for one coefficient triple."""

    def __init__(self, recipe, gamma, beta, b, theta, log_theta, sigma, xi0,
                 w, params=None, profile=None):
        self.recipe = recipe
        self.gamma = gamma          # effective damping the certificate covers
        self.beta = beta
        self.b = b
        self.theta = theta
        self.log_theta = log_theta  # exact log form; margins use its derivatives
        self.sigma = sigma
        self.xi0 = xi0              # xi = theta * xi0
        self.w = w                  # c^2 b = theta * w
        self.params = dict(params or {})
        self.profile = profile

    @property
    def xi(self):
        if isinstance(self.xi0, Const) and self.xi0.k == 0.0:
            return Const(0.0)
        return Prod([self.theta, self.xi0])

    @property
    def c2b(self):
        return Prod([self.theta, self.w])

    def summary(self):
        return {"recipe": self.recipe, "params": self.params}


def _validate_t0(t0):
    t0 = float(t0)
    if not np.isfinite(t0):
        raise ConfigError(f"t0 must be finite, got {t0}")
    return t0


def derive_gamma_certificate(gamma, beta, b, t0):
    """Tail-integral recipe.

    Without Hessian damping: theta = G^2, sigma = 1/G, xi = 0, c^2 b = G^2 b
    where G is the tail integral of the damping weight. With Hessian damping
    the recipe needs gamma = alpha/t with alpha > 1, G = t/(alpha-1), and the
    effective coefficient becomes w = b - betadot - beta/t.
    """
    t0 = _validate_t0(t0)
    if schedule_is_zero(beta):
        profile = IntegralProfile(gamma, t0)
        if not (isinstance(gamma, AlphaOverT) and gamma.q == 0.0 and gamma.alpha > 1.0):
            verdict = profile.check_H0()
            if verdict != "converges":
                raise sch.DivergentTailError(
                    f"tail-integral recipe needs a finite tail; H0 check: {verdict!r}")
        G = GammaSched(profile)
        theta = Prod([G, G])
        log_theta = Prod([Const(2.0), LogOf(G)])
        sigma = Quot(Const(1.0), G)
        return Certificate("gamma", gamma, beta, b, theta, log_theta, sigma,
                           Const(0.0), b, params={}, profile=profile)
    if not (isinstance(gamma, AlphaOverT) and gamma.q == 0.0):
        raise UnsupportedRecipeError(
            "Hessian-damped tail-integral recipe needs gamma of the alpha/t family")
    alpha = gamma.alpha
    if alpha <= 1.0:
        raise UnsupportedRecipeError(f"alpha/t damping needs alpha > 1, got {alpha}")
    am1 = alpha - 1.0
    theta = Power(1.0 / am1 ** 2, 2.0)          # (t/(alpha-1))^2
    log_theta = Sum([Const(-2.0 * math.log(am1)), LnT(2.0)])
    sigma = Power(am1, -1.0)                    # (alpha-1)/t
    w = Sum([b, Prod([Const(-1.0), beta.derivative()]),
             Prod([Const(-1.0), beta, Power(1.0, -1.0)])])
    cert = Certificate("gamma-hessian", gamma, beta, b, theta, log_theta,
                       sigma, Const(0.0), w, params={"alpha": alpha},
                       profile=IntegralProfile(gamma, t0))
    return cert


def derive_model_certificate(gamma0, b, t0):
    """Accumulated-damping recipe with beta = 0.

    The certified dynamic uses the composite damping gamma0 + 1/p0 where
    p0 = exp(int gamma0); the recipe sets theta = p0^2, sigma = 1/p0, xi = 0.
    """
    t0 = _validate_t0(t0)
    profile = IntegralProfile(gamma0, t0)
    L = IntegralSched(profile)
    log_theta = Prod([Const(2.0), L])
    theta = ExpOf(log_theta)
    sigma = ExpOf(Prod([Const(-1.0), L]))
    gamma_eff = Sum([gamma0, ExpOf(Prod([Const(-1.0), L]))])
    cert = Certificate("p-model", gamma_eff, Const(0.0), b, theta, log_theta,
                       sigma, Const(0.0), b,
                       params={"gamma0_family": gamma0.family}, profile=profile)
    cert.gamma0 = gamma0
    return cert


def _p_parts(gamma, beta, b, r, m, profile):
    """Schedules shared by the (r, m) recipe and its condition systems."""
    L = IntegralSched(profile)
    lnb = b.log()
    log_theta = Sum([Prod([Const(2.0 * r), L]), Prod([Const(-2.0 / 3.0), lnb])])
    sigma = Sum([Prod([Const(m), gamma]),
                 Prod([Const(1.0 / 3.0), lnb.derivative()])])
    coef = 1.0 - 2.0 * (r + m)
    xi0 = Sum([Prod([Sum([Prod([Const(coef), gamma]), sigma]), sigma]),
               Prod([Const(-1.0), sigma.derivative()])])
    w = Sum([b, Prod([Const(-1.0), beta.derivative()]), Prod([beta, sigma]),
             Prod([Const(coef), gamma, beta])])
    return log_theta, sigma, xi0, w


def derive_p_certificate(gamma, beta, b, r, m, t0):
    """General damping-integral recipe with exponents (r, m).

    theta = p^(2r) b^(-2/3), sigma = m gamma + bdot/(3b),
    xi = theta*(((1-2(r+m)) gamma + sigma) sigma - sigmadot),
    c^2 b = theta * (b - betadot + beta sigma + (1-2r-2m) gamma beta).
    Requires 0 < r <= 1/3, 2r <= m <= 1-r, and nondecreasing b.
    """
    t0 = _validate_t0(t0)
    r = float(r)
    m = float(m)
    tol = 1e-12
    if not (0.0 < r <= 1.0 / 3.0 + tol):
        raise ParamError(f"r must lie in (0, 1/3], got {r}")
    if not (2.0 * r - tol <= m <= 1.0 - r + tol):
        raise ParamError(f"m must lie in [2r, 1-r] = [{2*r}, {1-r}], got {m}")
    ts_probe = np.geomspace(max(t0, 1e-6), 1e3 * max(t0, 1.0), 400)
    lnb1 = b.log().derivative().value(ts_probe)   # b > 0, so sign of bdot
    if not np.all(lnb1 >= -1e-12 * (1.0 + np.max(np.abs(lnb1)))):
        raise NonmonotoneBError("this recipe requires nondecreasing b")
    profile = IntegralProfile(gamma, t0)
    log_theta, sigma, xi0, w = _p_parts(gamma, beta, b, r, m, profile)
    theta = ExpOf(log_theta)
    return Certificate("p-general", gamma, beta, b, theta, log_theta, sigma,
                       xi0, w, params={"r": r, "m": m}, profile=profile)


# -- weights -----------------------------------------------------------------

def _theta_of(cert, ts):
    return np.exp(cert.log_theta.value(ts))


def values_weight(cert, ts):
    """Integrand weight on f(x)-min f:  theta*b*sigma - d/dt(c^2 b + beta theta sigma)."""
    ts = np.asarray(ts, dtype=float)
    th = _theta_of(cert, ts)
    uu = cert.log_theta.derivative().value(ts)
    S, S1, _ = cert.sigma.value(ts), cert.sigma.derivative().value(ts), None
    W = cert.w.value(ts)
    W1 = cert.w.derivative().value(ts)
    be = cert.beta.value(ts)
    be1 = cert.beta.derivative().value(ts)
    bb = cert.b.value(ts)
    return th * (bb * S - (W1 + uu * W) - (be1 * S + be * S1 + be * S * uu))


def weight_q(cert, ts):
    """Integrand weight on |grad f(x)|^2:  b*theta*beta - (1/2) d/dt(theta beta^2)."""
    ts = np.asarray(ts, dtype=float)
    th = _theta_of(cert, ts)
    uu = cert.log_theta.derivative().value(ts)
    be = cert.beta.value(ts)
    be1 = cert.beta.derivative().value(ts)
    bb = cert.b.value(ts)
    return th * (bb * be - 0.5 * (uu * be ** 2 + 2.0 * be * be1))


def upsilon(gamma, beta, b, r, m, ts, t0=None):
    """The (r, m)-system integrand factor in its stated form:
    (3 sigma - 2(r+m) gamma) w - wdot - 2(1-r-m) gamma.

    The trailing term is dimensionally odd relative to the rest; this function
    computes the expression verbatim, while values_weight gives the
    recipe-generic integrand. Both are reported side by side.
    """
    ts = np.asarray(ts, dtype=float)
    if t0 is None:
        t0 = float(ts[0])
    profile = IntegralProfile(gamma, t0)
    _, sigma, _, w = _p_parts(gamma, beta, b, r, m, profile)
    S = sigma.value(ts)
    W = w.value(ts)
    W1 = w.derivative().value(ts)
    ga = gamma.value(ts)
    return (3.0 * S - 2.0 * (r + m) * ga) * W - W1 - 2.0 * (1.0 - r - m) * ga


# -- energy -------------------------------------------------------------------

def energy(cert, obj, z, t, x, v):
    """Certificate energy at a single state."""
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    t = float(t)
    fz = obj.value(z)
    fgap = obj.value(x) - fz
    th = float(np.exp(cert.log_theta.value(t)))
    S = float(cert.sigma.value(t))
    X0 = float(cert.xi0.value(t))
    W = float(cert.w.value(t))
    be = float(cert.beta.value(t))
    g = obj.grad(x)
    vvec = (x - z) + (v + be * g) / S
    return (th * W * fgap + 0.5 * th * S ** 2 * float(vvec @ vvec)
            + 0.5 * th * X0 * float((x - z) @ (x - z)))


def energy_batch(cert, obj, z, ts, xs, vs):
    """Vectorized certificate energy along checkpoint samples."""
    ts = np.asarray(ts, dtype=float)
    xs = np.asarray(xs, dtype=float)
    vs = np.asarray(vs, dtype=float)
    z = np.asarray(z, dtype=float)
    fz = obj.value(z)
    fgap = obj.value_batch(xs) - fz
    th = np.exp(cert.log_theta.value(ts))
    S = cert.sigma.value(ts)
    X0 = cert.xi0.value(ts)
    W = cert.w.value(ts)
    be = cert.beta.value(ts)
    gs = obj.grad_batch(xs)
    diff = xs - z[None, :]
    vvec = diff + (vs + be[:, None] * gs) / S[:, None]
    return (th * W * fgap + 0.5 * th * S ** 2 * np.sum(vvec ** 2, axis=1)
            + 0.5 * th * X0 * np.sum(diff ** 2, axis=1))


# -- recovery identities ------------------------------------------------------

def recovery_residuals(cert, ts):
    """Residuals of the two elimination identities:

    xi   = -d/dt(theta sigma) - theta sigma (sigma - gamma)
    c^2b =  b theta - beta theta (sigma - gamma) - d/dt(beta theta)

    Returns {name: (residual, scale)} with scale = sum of |term| magnitudes.
    """
    ts = np.asarray(ts, dtype=float)
    th = _theta_of(cert, ts)
    uu = cert.log_theta.derivative().value(ts)
    S = cert.sigma.value(ts)
    S1 = cert.sigma.derivative().value(ts)
    X0 = cert.xi0.value(ts)
    W = cert.w.value(ts)
    ga = cert.gamma.value(ts)
    be = cert.beta.value(ts)
    be1 = cert.beta.derivative().value(ts)
    bb = cert.b.value(ts)

    t1 = th * X0
    t2 = th * (S1 + S * uu)          # d/dt(theta sigma)
    t3 = th * S * (S - ga)
    res_xi = t1 + t2 + t3
    scale_xi = np.abs(t1) + np.abs(t2) + np.abs(t3)

    u1 = th * W                       # c^2 b
    u2 = th * bb
    u3 = th * be * (S - ga)
    u4 = th * (be1 + be * uu)         # d/dt(beta theta)
    res_c2b = u1 - u2 + u3 + u4
    scale_c2b = np.abs(u1) + np.abs(u2) + np.abs(u3) + np.abs(u4)
    return {"xi": (res_xi, scale_xi), "c2b": (res_c2b, scale_c2b)}


# -- condition systems ---------------------------------------------------------

def make_grid(t0, t_end=None, n=400):
    t0 = float(t0)
    if t_end is None:
        t_end = 1e3 * t0
    t_end = float(t_end)
    n = int(n)
    if not (np.isfinite(t0) and np.isfinite(t_end)):
        raise GridError("grid endpoints must be finite")
    if t0 <= 0:
        raise GridError("log-spaced grid needs t0 > 0")
    if t_end <= t0:
        raise GridError(f"grid needs t_end > t0, got [{t0}, {t_end}]")
    if n < 2:
        raise GridError(f"grid needs at least 2 points, got {n}")
    return np.geomspace(t0, t_end, n)


def _resolve_grid(grid, gamma, beta, b):
    if grid is None:
        t0 = max(gamma.t0, beta.t0, b.t0)
        if t0 <= 0:
            t0 = 1.0
        return make_grid(t0)
    if isinstance(grid, dict):
        extra = set(grid) - {"t0", "t_end", "n"}
        if extra:
            raise GridError(f"unknown grid keys {sorted(extra)}")
        if "t0" not in grid:
            raise GridError("grid mapping needs 't0'")
        return make_grid(grid["t0"], grid.get("t_end"), grid.get("n", 400))
    ts = np.asarray(grid, dtype=float)
    if ts.ndim != 1 or ts.size < 2 or np.any(np.diff(ts) <= 0) or not np.all(np.isfinite(ts)):
        raise GridError("explicit grid must be a finite strictly increasing 1-d array")
    return ts


class ConditionReport:
    """Per-condition margins of one inequality system on one grid."""

    def __init__(self, condition_set, ts, margins, scales, verdict, worst,
                 tol_rel=TOL_REL, equalities=(), extras=None):
        self.condition_set = condition_set
        self.ts = ts
        self.margins = margins          # {name: array}; margin >= 0 iff satisfied
        self.scales = scales            # {name: array}; tolerance scale per point
        self.verdict = verdict          # satisfied | violated | boundary
        self.worst = worst              # (condition, t, margin)
        self.tol_rel = tol_rel
        self.equalities = tuple(equalities)
        self.extras = dict(extras or {})

    def tol(self, name):
        return self.tol_rel * (1.0 + self.scales[name])

    def summary(self):
        name, t, margin = self.worst
        return {
            "condition_set": self.condition_set,
            "verdict": self.verdict,
            "tol_rel": self.tol_rel,
            "worst": {"condition": name, "t": t, "margin": margin},
            "grid": {"t0": float(self.ts[0]), "t_end": float(self.ts[-1]),
                     "n": int(self.ts.size)},
            **({"extras": self.extras} if self.extras else {}),
        }

    def to_csv(self, path):
        names = list(self.margins)
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(["t"] + [f"margin_{n}" for n in names]) + "\n")
            for i, t in enumerate(self.ts):
                row = [f"{t:.17g}"] + [f"{self.margins[n][i]:.17g}" for n in names]
                fh.write(",".join(row) + "\n")


def _finish_report(set_name, ts, margins, scales, extras=None):
    equalities = _EQUALITIES.get(set_name, ())
    binding = _BINDING[set_name]
    violated = False
    boundary = False
    worst = None
    worst_ratio = math.inf
    for name, margin in margins.items():
        tol = TOL_REL * (1.0 + scales[name])
        eff = -np.abs(margin) if name in equalities else margin
        if np.any(eff < -tol):
            violated = True
        ratio = eff / (1.0 + scales[name])
        i = int(np.argmin(ratio))
        if ratio[i] < worst_ratio:
            worst_ratio = float(ratio[i])
            worst = (name, float(ts[i]), float(eff[i]))
        if name in binding:
            j = int(np.argmin(margin))
            if abs(margin[j]) <= tol[j]:
                boundary = True
    if violated:
        verdict = "violated"
    elif boundary:
        verdict = "boundary"
    else:
        verdict = "satisfied"
    return ConditionReport(set_name, ts, margins, scales, verdict, worst,
                           equalities=equalities, extras=extras)


def _system_arrays(gamma, beta, b, cert, ts, second_order=False):
    th_u = cert.log_theta.derivative()
    out = {
        "ga": gamma.value(ts),
        "ga1": gamma.derivative().value(ts),
        "be": beta.value(ts),
        "be1": beta.derivative().value(ts),
        "bb": b.value(ts),
        "bb1": b.derivative().value(ts),
        "uu": th_u.value(ts),
        "S": cert.sigma.value(ts),
        "S1": cert.sigma.derivative().value(ts),
        "X0": cert.xi0.value(ts),
        "X01": cert.xi0.derivative().value(ts),
        "W": cert.w.value(ts),
        "W1": cert.w.derivative().value(ts),
    }
    if second_order:
        out["be2"] = beta.d(2).value(ts)
        out["u1"] = th_u.derivative().value(ts)
        out["S2"] = cert.sigma.d(2).value(ts)
    return out


def _margins_system_a(gamma, beta, b, cert, ts):
    a = _system_arrays(gamma, beta, b, cert, ts)
    ga, be, be1, bb = a["ga"], a["be"], a["be1"], a["bb"]
    uu, S, S1, X0, X01, W, W1 = (a["uu"], a["S"], a["S1"], a["X0"], a["X01"],
                                 a["W"], a["W1"])
    margins, scales = {}, {}

    def put(name, terms_pos, terms_neg):
        margins[name] = sum(terms_pos) - sum(terms_neg)
        scales[name] = sum(np.abs(t) for t in terms_pos + terms_neg)

    dbts = be1 * S + be * S1 + be * S * uu        # d/dt(beta theta sigma)/theta
    put("i", [bb * S], [dbts])
    put("ii", [bb * S], [W1 + uu * W, dbts])
    put("iii", [W, be * (S - ga), be1 + be * uu], [bb])
    put("iv", [S1 + S * uu, S * (S - ga), X0], [])
    put("v", [], [uu * (S ** 2 + X0) + 2.0 * S * S1 + X01])
    put("vi", [], [uu + 2.0 * (S - ga)])
    put("vii", [], [be * (be * uu + 2.0 * (be1 - bb))])
    return margins, scales


def _margins_system_b(gamma, beta, b, cert, ts):
    a = _system_arrays(gamma, beta, b, cert, ts, second_order=True)
    ga, ga1, be, be1, be2 = a["ga"], a["ga1"], a["be"], a["be1"], a["be2"]
    bb, bb1 = a["bb"], a["bb1"]
    uu, u1, S, S1, S2 = a["uu"], a["u1"], a["S"], a["S1"], a["S2"]

    margins, scales = {}, {}

    def put(name, terms_pos, terms_neg):
        margins[name] = sum(terms_pos) - sum(terms_neg)
        scales[name] = sum(np.abs(t) for t in terms_pos + terms_neg)

    dbts = be1 * S + be * S1 + be * S * uu
    put("i", [bb * S], [dbts])
    # d/dt(b theta + beta theta gamma)/theta - d^2/dt^2(beta theta)/theta
    put("ii", [bb * S, be2 + 2.0 * be1 * uu + be * (u1 + uu ** 2)],
        [bb1 + bb * uu, be1 * ga + be * ga1 + be * ga * uu])
    put("iii", [bb], [be * (S - ga), be1 + be * uu])
    put("iv", [], [S1 + S * uu + S * (S - ga)])
    put("v", [S2 + 2.0 * S1 * uu + S * (uu ** 2 + u1)],
        [S1 * ga + S * ga1 + S * ga * uu])
    put("vi", [], [uu + 2.0 * (S - ga)])
    put("vii", [], [be * (be * uu + 2.0 * (be1 - bb))])
    return margins, scales


def check_conditions(set_name, gamma, beta, b, cert=None, extra=None, grid=None):
    """Evaluate a named inequality system on a grid.

    Returns a ConditionReport with one margin array per condition
    (margin >= 0 means the inequality holds at that point). Verdicts:
    'violated' if any margin dips below -tol; 'boundary' when a value-decay
    condition rides zero within tolerance; 'satisfied' otherwise.
    """
    if set_name not in CONDITION_SETS:
        raise ConfigError(f"unknown condition set {set_name!r}; "
                          f"known: {', '.join(CONDITION_SETS)}")
    extra = dict(extra or {})
    ts = _resolve_grid(grid, gamma, beta, b)
    extras_out = {}

    if set_name in ("SystemA", "SystemB"):
        if extra:
            raise ConfigError(f"{set_name} takes no extra params, got {sorted(extra)}")
        if cert is None:
            raise MissingCertificateError(f"{set_name} needs a certificate")
        fn = _margins_system_a if set_name == "SystemA" else _margins_system_b
        margins, scales = fn(gamma, beta, b, cert, ts)

    elif set_name == "GammaGrowth":
        if extra:
            raise ConfigError(f"GammaGrowth takes no extra params, got {sorted(extra)}")
        profile = cert.profile if (cert is not None and cert.profile is not None) \
            else IntegralProfile(gamma, float(ts[0]))
        G = profile.big_gamma(ts)
        bb = b.value(ts)
        bb1 = b.derivative().value(ts)
        ga = gamma.value(ts)
        t1, t2, t3 = 3.0 * bb, 2.0 * ga * G * bb, G * bb1
        margins = {"growth": t1 - t2 - t3}
        scales = {"growth": np.abs(t1) + np.abs(t2) + np.abs(t3)}

    elif set_name == "ModelGrowth":
        if extra:
            raise ConfigError(f"ModelGrowth takes no extra params, got {sorted(extra)}")
        profile = IntegralProfile(gamma, float(ts[0]))
        L = profile.log_integral(ts)
        invp = np.exp(-L)                      # underflow to 0 is harmless
        bb = b.value(ts)
        bb1 = b.derivative().value(ts)
        ga = gamma.value(ts)
        t1, t2, t3 = bb1, 2.0 * ga * bb, invp * bb
        margins = {"growth": t3 - t1 - t2}     # p0-normalized statement
        scales = {"growth": np.abs(t1) + np.abs(t2) + np.abs(t3)}

    elif set_name == "G2G3":
        alpha = extra.pop("alpha", None)
        if extra:
            raise ConfigError(f"unknown extra params {sorted(extra)} for G2G3")
        if alpha is None:
            if isinstance(gamma, AlphaOverT) and gamma.q == 0.0:
                alpha = gamma.alpha
            else:
                raise UnsupportedRecipeError(
                    "G2G3 needs gamma of the alpha/t family or an explicit alpha")
        alpha = float(alpha)
        w_sched = Sum([b, Prod([Const(-1.0), beta.derivative()]),
                       Prod([Const(-1.0), beta, Power(1.0, -1.0)])])
        W = w_sched.value(ts)
        W1 = w_sched.derivative().value(ts)
        margins = {"G2": W, "G3": (alpha - 3.0) * W - ts * W1}
        scales = {"G2": np.abs(b.value(ts)) + np.abs(beta.derivative().value(ts))
                  + np.abs(beta.value(ts) / ts),
                  "G3": np.abs((alpha - 3.0) * W) + np.abs(ts * W1)}

    elif set_name in ("H1toH4", "H2plus"):
        try:
            r = float(extra.pop("r"))
            m = float(extra.pop("m"))
        except KeyError as exc:
            raise ParamError(f"{set_name} needs extra params 'r' and 'm'") from exc
        if extra:
            raise ConfigError(f"unknown extra params {sorted(extra)} for {set_name}")
        if not (0.0 < r <= 1.0 / 3.0 + 1e-12):
            raise ParamError(f"r must lie in (0, 1/3], got {r}")
        if not (2.0 * r - 1e-12 <= m <= 1.0 - r + 1e-12):
            raise ParamError(f"m must lie in [2r, 1-r], got {m}")
        profile = IntegralProfile(gamma, float(ts[0]))
        log_theta, sigma, xi0, w = _p_parts(gamma, beta, b, r, m, profile)
        ga = gamma.value(ts)
        ga1 = gamma.derivative().value(ts)
        be = beta.value(ts)
        be1 = beta.derivative().value(ts)
        bb = b.value(ts)
        bb1 = b.derivative().value(ts)
        S = sigma.value(ts)
        S1 = sigma.derivative().value(ts)
        margins, scales = {}, {}
        if set_name == "H1toH4":
            X0 = xi0.value(ts)
            X01 = xi0.derivative().value(ts)
            uu = log_theta.derivative().value(ts)
            W = w.value(ts)
            W1 = w.derivative().value(ts)
            margins["H1"] = X0
            scales["H1"] = np.abs(X0)
            t1 = X0 * (2.0 * S - (m + r) * ga)
            t2 = 0.5 * X01
            t3 = (m - (1.0 - r)) * ga * S ** 2
            margins["H2"] = t1 - t2 + t3
            scales["H2"] = np.abs(t1) + np.abs(t2) + np.abs(t3)
            t1, t2, t3 = bb, be1, be * (S - ga)
            margins["H3"] = t1 - t2 + t3
            scales["H3"] = np.abs(t1) + np.abs(t2) + np.abs(t3)
            # theta-normalized: theta*b*sigma - d/dt(theta*(w + beta*sigma))
            t1 = bb * S
            t2 = uu * (W + be * S)
            t3 = W1 + be1 * S + be * S1
            margins["H4"] = t1 - t2 - t3
            scales["H4"] = np.abs(t1) + np.abs(t2) + np.abs(t3)
            ups = upsilon(gamma, beta, b, r, m, ts, t0=float(ts[0]))
            vw_over_theta = bb * S - (W1 + uu * W) - (be1 * S + be * S1 + be * S * uu)
            i_u = int(np.argmin(ups))
            i_v = int(np.argmin(vw_over_theta))
            extras_out = {
                "upsilon_min": float(ups[i_u]),
                "upsilon_argmin_t": float(ts[i_u]),
                "values_weight_over_theta_min": float(vw_over_theta[i_v]),
                "values_weight_argmin_t": float(ts[i_v]),
            }
        else:
            S2 = sigma.d(2).value(ts)
            t1 = S * (S - (m + r) * ga) * (2.0 * S + (1.0 - 2.0 * (m + r)) * ga)
            t2 = 0.5 * S2
            margins["H2plus"] = t1 + t2
            scales["H2plus"] = np.abs(t1) + np.abs(t2)
            lnb2 = b.log().d(2).value(ts)
            margins["log-concave-b"] = -lnb2
            scales["log-concave-b"] = np.abs(lnb2)
            margins["b-nondecreasing"] = bb1
            scales["b-nondecreasing"] = np.abs(bb1)
            margins["gamma-nonincreasing"] = -ga1
            scales["gamma-nonincreasing"] = np.abs(ga1)

    elif set_name in ("Eq61", "HrGamma"):
        r = extra.pop("r", None)
        p0 = extra.pop("p0", None) if set_name == "Eq61" else None
        if extra:
            raise ConfigError(f"unknown extra params {sorted(extra)} for {set_name}")
        if r is None or (set_name == "Eq61" and p0 is None):
            raise ParamError(f"{set_name} needs extra param 'r'"
                             + (" and 'p0'" if set_name == "Eq61" else ""))
        r = float(r)
        ga = gamma.value(ts)
        ga1 = gamma.derivative().value(ts)
        ga2 = gamma.d(2).value(ts)
        if set_name == "Eq61":
            coef = 2.0 * min(0.0, float(p0) - r) ** 2
            key = "eq61"
        else:
            coef = 2.0 * r ** 2
            key = "Hr"
        t1, t2 = ga2, coef * ga ** 3
        margins = {key: t1 - t2, "gamma-nonincreasing": -ga1}
        scales = {key: np.abs(t1) + np.abs(t2),
                  "gamma-nonincreasing": np.abs(ga1)}

    return _finish_report(set_name, ts, margins, scales, extras=extras_out)
