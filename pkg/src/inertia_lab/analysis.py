"""Verdicts over trajectories and iterate sequences.

Rate claims are tested as boundedness of D(t)*fgap(t), not as fitted-exponent
equality: the underlying statements are upper bounds and trajectories on nice
problems routinely decay faster. The product is handled in log space so
exponential denominators cannot overflow, and its trend is measured on block
maxima rather than raw samples, since oscillatory trajectories swing the raw
log-product by orders of magnitude within one period.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InsufficientDataError, WindowError

SLOPE_TOL = 0.05
FGAP_FLOOR = 100.0 * np.finfo(float).eps


def _series(traj):
    """Accept a Trajectory, any object with ts/fgap, or a (ts, values) pair."""
    if isinstance(traj, tuple):
        ts, vals = traj
        return np.asarray(ts, dtype=float), np.asarray(vals, dtype=float), FGAP_FLOOR
    floor = FGAP_FLOOR
    meta = getattr(traj, "meta", None)
    if isinstance(meta, dict):
        floor = float(meta.get("fgap_floor", FGAP_FLOOR))
    return np.asarray(traj.ts, dtype=float), np.asarray(traj.fgap, dtype=float), floor


class RateClaim:
    """A claimed decay rate: fgap = O(1/D(t)) for a denominator D."""

    def __init__(self, kind, power=None, coeff=None, q=None, denominator=None,
                 window=None):
        self.kind = kind
        self.power = power
        self.coeff = coeff
        self.q = q
        self.denominator = denominator
        self.window = None if window is None else (float(window[0]), float(window[1]))
        if kind == "power":
            if power is None or power <= 0:
                raise ConfigError("power claim needs s > 0")
        elif kind == "exp_power":
            if coeff is None or q is None or coeff <= 0 or q <= 0:
                raise ConfigError("exp_power claim needs c > 0 and q > 0")
        elif kind == "denominator":
            if denominator is None:
                raise ConfigError("denominator claim needs a schedule")
        else:
            raise ConfigError(f"unknown claim kind {kind!r}")
        if self.window is not None and not self.window[0] < self.window[1]:
            raise ConfigError("claim window needs t_lo < t_hi")

    def log_D(self, ts):
        ts = np.asarray(ts, dtype=float)
        if self.kind == "power":
            return self.power * np.log(ts)
        if self.kind == "exp_power":
            return self.coeff * ts ** self.q
        return self.denominator.log().value(ts)

    def describe(self):
        out = {"kind": self.kind}
        if self.kind == "power":
            out["s"] = self.power
        elif self.kind == "exp_power":
            out["c"] = self.coeff
            out["q"] = self.q
        else:
            out["denominator"] = getattr(self.denominator, "family", "schedule")
        if self.window is not None:
            out["window"] = list(self.window)
        return out


@dataclass
class RateVerdict:
    sup_product: float
    trend_slope: float
    verdict: str                      # bounded | growing | inconclusive
    fitted_exponent: float = None
    excluded_points: int = 0
    flags: list = field(default_factory=list)
    claim: dict = field(default_factory=dict)
    window: tuple = None

    def summary(self):
        return {
            "claim": self.claim,
            "sup_product": self.sup_product,
            "trend_slope": self.trend_slope,
            "fitted_exponent": self.fitted_exponent,
            "verdict": self.verdict,
            "excluded_points": self.excluded_points,
            "flags": list(self.flags),
            "window": None if self.window is None else list(self.window),
        }


def default_window(ts):
    """Last decade of time, never reaching into the first 20% of the span."""
    t_hi = float(ts[-1])
    t_lo = max(t_hi / 10.0, float(ts[0]) + 0.2 * (t_hi - float(ts[0])))
    return (t_lo, t_hi)


def _window_mask(ts, window):
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise WindowError(f"window needs t_lo < t_hi, got [{t_lo}, {t_hi}]")
    span_tol = 1e-9 * max(1.0, abs(ts[-1]))
    if t_lo < ts[0] - span_tol or t_hi > ts[-1] + span_tol:
        raise WindowError(
            f"window [{t_lo}, {t_hi}] outside trajectory span [{ts[0]}, {ts[-1]}]")
    mask = (ts >= t_lo) & (ts <= t_hi)
    if int(mask.sum()) < 2:
        raise WindowError("window contains fewer than 2 samples")
    return mask


def check_monotone(series, eps_rel, eps_abs):
    """True iff v_{k+1} <= v_k*(1+eps_rel) + eps_abs throughout.

    Returns (ok, first_violation_index). The series may be a value array or
    (t, value) pairs; ordering is taken as given.
    """
    arr = np.asarray(series, dtype=float)
    if arr.ndim == 2:
        vals = arr[:, 1] if arr.shape[1] == 2 else arr[1]
    elif isinstance(series, tuple):
        vals = np.asarray(series[1], dtype=float)
    else:
        vals = arr
    if vals.size < 2:
        raise InsufficientDataError("monotonicity needs at least 2 points")
    bad = vals[1:] > vals[:-1] * (1.0 + eps_rel) + eps_abs
    if np.any(bad):
        return False, int(np.argmax(bad)) + 1
    return True, None


def _block_maxima_slope(log_t, log_p):
    """OLS slope of per-block maxima of log_p against log t, one block per
    ~32 samples (at least 4 blocks)."""
    n = log_t.size
    nb = max(4, n // 32)
    if n < 2 * nb:
        nb = max(2, n // 2)
    edges = np.linspace(0, n, nb + 1).astype(int)
    bt, bp = [], []
    for i in range(nb):
        lo, hi = edges[i], edges[i + 1]
        if hi <= lo:
            continue
        j = lo + int(np.argmax(log_p[lo:hi]))
        bt.append(log_t[j])
        bp.append(log_p[j])
    bt = np.asarray(bt)
    bp = np.asarray(bp)
    if bt.size < 2 or np.ptp(bt) == 0:
        return 0.0
    return float(np.polyfit(bt, bp, 1)[0])


def bound_check(traj, claim, slope_tol=SLOPE_TOL):
    """Is D(t)*fgap(t) bounded over the claim window?

    bounded: block-maxima trend <= slope_tol and the sup sits in the first
    half of the log-window or the tail is flat. growing: trend above
    tolerance. Everything else is inconclusive. Points with fgap at the
    numerical floor are excluded and counted; if all of them are, the claim
    is vacuously bounded and flagged.
    """
    ts, fgap, floor = _series(traj)
    window = claim.window if claim.window is not None else default_window(ts)
    mask = _window_mask(ts, window)
    tw = ts[mask]
    fw = fgap[mask]
    keep = fw > floor
    excluded = int((~keep).sum())
    base = dict(claim=claim.describe(), window=window)
    if not np.any(keep):
        return RateVerdict(sup_product=0.0, trend_slope=0.0, verdict="bounded",
                           excluded_points=excluded,
                           flags=["all_below_floor"], **base)
    tk = tw[keep]
    log_p = claim.log_D(tk) + np.log(fw[keep])
    log_t = np.log(tk)
    sup_log = float(np.max(log_p))
    sup_product = math.exp(sup_log) if sup_log < 709.0 else math.inf
    trend = _block_maxima_slope(log_t, log_p)

    i_sup = int(np.argmax(log_p))
    half = 0.5 * (log_t[0] + log_t[-1])
    first_half_ok = log_t[i_sup] <= half
    tail = log_t >= log_t[0] + 0.75 * (log_t[-1] - log_t[0])
    head = log_t <= half
    spread = float(np.ptp(log_p))
    flat_tail = bool(np.any(tail)) and bool(np.any(head)) and \
        float(np.max(log_p[tail])) <= float(np.max(log_p[head])) \
        + max(0.05 * spread, 0.05)

    flags = []
    if trend > slope_tol:
        verdict = "growing"
    elif first_half_ok or flat_tail:
        verdict = "bounded"
    else:
        verdict = "inconclusive"
        flags.append("sup_in_tail")
    return RateVerdict(sup_product=sup_product, trend_slope=trend,
                       verdict=verdict, excluded_points=excluded,
                       flags=flags, **base)


@dataclass
class FitResult:
    exponent: float
    residual: float
    n_used: int
    intercept: float

    def summary(self):
        return {"exponent": self.exponent, "residual": self.residual,
                "n_used": self.n_used}


def _fit_points(traj, window, min_points=10):
    ts, fgap, floor = _series(traj)
    window = window if window is not None else default_window(ts)
    mask = _window_mask(ts, window)
    keep = mask & (fgap > floor)
    if int(keep.sum()) < min_points:
        raise InsufficientDataError(
            f"rate fit needs >= {min_points} above-floor samples in the window, "
            f"got {int(keep.sum())}")
    return ts[keep], fgap[keep]


def fit_power_rate(traj, window=None):
    """Least-squares exponent s in fgap ~ C * t^(-s) over the window."""
    tk, fk = _fit_points(traj, window)
    x = np.log(tk)
    y = np.log(fk)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return FitResult(exponent=float(-slope), residual=resid, n_used=tk.size,
                     intercept=float(intercept))


def fit_exp_rate(traj, q, window=None):
    """Least-squares coefficient c in fgap ~ C * exp(-c * t^q)."""
    q = float(q)
    if q <= 0:
        raise ConfigError("exp rate fit needs q > 0")
    tk, fk = _fit_points(traj, window)
    x = tk ** q
    y = -np.log(fk)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return FitResult(exponent=float(slope), residual=resid, n_used=tk.size,
                     intercept=float(intercept))


def oscillation_count(traj):
    """Sign changes of the difference sequence of fgap, with a falling
    sentinel at both ends: a monotone decay counts 0, each rise-and-fall
    episode adds 2."""
    _, fgap, _ = _series(traj)
    if fgap.size < 3:
        raise InsufficientDataError("oscillation count needs at least 3 samples")
    s = np.sign(np.diff(fgap))
    s = s[s != 0.0]
    padded = np.concatenate([[-1.0], s, [-1.0]])
    return int(np.sum(padded[1:] != padded[:-1]))
