"""Discrete inertial proximal iteration and its value-rate diagnostics.

    y_k = x_k + alpha_k (x_k - x_{k-1})
    x_{k+1} = prox_{lambda_k f}(y_k)

The update runs for k = 0..K-1 with the previous iterate seeded by cfg.x1
(default x0, the zero-initial-velocity analogue), so x_1 is already a prox
step: on the 1D unit quadratic with alpha = 0, lambda = 1 the iterates are
exactly x_k = 2^{-k}. Rules where alpha_k would be negative (1 - alpha/k for
small k) are clamped at 0, which keeps the alpha_k >= 0 invariant without
changing the tail behavior the diagnostics measure.
"""

import numpy as np

from .errors import ConfigError, MissingProxError


class Rule:
    """A named k -> coefficient map, carrying its family for config echo."""

    def __init__(self, fn, family, params):
        self._fn = fn
        self.family = family
        self.params = dict(params)

    def __call__(self, k):
        return self._fn(k)

    def describe(self):
        return {"family": self.family, **self.params}


def alpha_constant(a):
    a = float(a)
    if a < 0:
        raise ConfigError("constant alpha rule needs a >= 0")
    return Rule(lambda k: a, "constant", {"a": a})


def alpha_one_minus_over_k(alpha):
    alpha = float(alpha)
    if alpha < 0:
        raise ConfigError("1 - alpha/k rule needs alpha >= 0")
    return Rule(lambda k: max(0.0, 1.0 - alpha / k) if k > 0 else 0.0,
                "one-minus-over-k", {"alpha": alpha})


def lambda_constant(l):
    l = float(l)
    if l <= 0:
        raise ConfigError("constant lambda rule needs l > 0")
    return Rule(lambda k: l, "constant", {"l": l})


def lambda_power(delta, scale=1.0):
    delta = float(delta)
    scale = float(scale)
    if scale <= 0:
        raise ConfigError("power lambda rule needs scale > 0")
    return Rule(lambda k: scale * float(max(k, 1)) ** delta, "power",
                {"delta": delta, "scale": scale})


class IPConfig:
    def __init__(self, alpha_rule, lambda_rule, K, x0, x1=None):
        self.alpha_rule = alpha_rule
        self.lambda_rule = lambda_rule
        self.K = int(K)
        self.x0 = np.asarray(x0, dtype=float)
        self.x1 = self.x0 if x1 is None else np.asarray(x1, dtype=float)
        if self.K < 1:
            raise ConfigError("iteration budget K must be >= 1")
        if self.x1.shape != self.x0.shape:
            raise ConfigError("x1 must have the same shape as x0")


class IterateSequence:
    """Iterates x_0..x_K with value gaps and sup-weighted diagnostics."""

    def __init__(self, ks, xs, fgap, diag):
        self.ks = ks
        self.xs = xs
        self.fgap = fgap
        self.diag = diag

    @property
    def ts(self):
        """Iteration counter as float time, for the analysis helpers."""
        return self.ks.astype(float)

    def to_csv(self, path):
        d = self.xs.shape[1]
        cols = ["k"] + [f"x_{i+1}" for i in range(d)] + ["fgap", "k2_fgap"]
        k2 = self.ks.astype(float) ** 2 * self.fgap
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for i in range(self.ks.size):
                row = [float(self.ks[i]), *self.xs[i], self.fgap[i], k2[i]]
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    def summary(self):
        return {"K": int(self.ks[-1]), "terminal_fgap": float(self.fgap[-1]),
                **self.diag}


def prox_step(obj, y, lam):
    """Proximal map of lam*f at y; exact oracle required."""
    if lam <= 0:
        raise ConfigError(f"prox needs lambda > 0, got {lam}")
    return obj.prox(np.asarray(y, dtype=float), float(lam))


def inertial_proximal(obj, cfg):
    """Run the two-line recursion for K prox steps; iterates k = 0..K."""
    if not obj.has_prox:
        raise MissingProxError(f"objective {obj.name!r} has no prox oracle")
    d = cfg.x0.size
    xs = np.zeros((cfg.K + 1, d))
    xs[0] = cfg.x0
    x_prev = cfg.x1.copy()
    x_cur = cfg.x0.copy()
    for k in range(cfg.K):
        ak = float(cfg.alpha_rule(k))
        lk = float(cfg.lambda_rule(k))
        if ak < 0:
            raise ConfigError(f"alpha_{k} = {ak} violates alpha_k >= 0")
        if lk <= 0:
            raise ConfigError(f"lambda_{k} = {lk} violates lambda_k > 0")
        y = x_cur + ak * (x_cur - x_prev)
        x_next = prox_step(obj, y, lk)
        x_prev = x_cur
        x_cur = x_next
        xs[k + 1] = x_next

    ks = np.arange(cfg.K + 1)
    fvals = obj.value_batch(xs)
    if obj.known_min is not None:
        fgap = np.maximum(fvals - obj.known_min, 0.0)
    else:
        fgap = np.maximum(fvals - np.min(fvals), 0.0)

    kf = ks.astype(float)
    tail = ks >= min(20, cfg.K)
    delta = cfg.lambda_rule.params.get("delta", 0.0) \
        if cfg.lambda_rule.family == "power" else 0.0
    diag = {
        "sup_k2_fgap": float(np.max(kf[tail] ** 2 * fgap[tail])),
        "sup_k2_delta_fgap": float(np.max(kf[tail] ** (2.0 + delta) * fgap[tail])),
        "delta": delta,
        "alpha_rule": cfg.alpha_rule.describe(),
        "lambda_rule": cfg.lambda_rule.describe(),
    }
    return IterateSequence(ks, xs, fgap, diag)


def t_sequence(alpha_rule, k_max, cutoff=1e-16):
    """Numerical t_k = 1 + sum_{i>=k} prod_{j=k}^{i} alpha_j, truncating once
    the running product drops below the cutoff. Requires the products to
    decay; diverging rules will hit the iteration guard."""
    out = np.ones(int(k_max) + 1)
    for k in range(1, int(k_max) + 1):
        total = 1.0
        prod = 1.0
        i = k
        guard = 0
        while True:
            prod *= float(alpha_rule(i))
            if prod <= cutoff:
                break
            total += prod
            i += 1
            guard += 1
            if guard > 10_000_000:
                raise ConfigError(
                    "t_sequence did not converge; the alpha products do not decay")
        out[k] = total
    return out
