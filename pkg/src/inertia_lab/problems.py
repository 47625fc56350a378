"""Test objectives with first/second-order oracles.

Each objective bundles value/gradient callables with optional exact
Hessian-vector products, a proximal map, a known minimum value and minimizer
(or a projector onto the minimizing set when it is not a single point), and a
domain guard for barrier-type functions. ``hvp_fd`` supplies a central
finite-difference fallback for Hessian-vector products.
"""

import math

import numpy as np

from .errors import ConfigError, DomainError, MissingProxError, NotPSDError

_EPS = float(np.finfo(float).eps)


class Objective:
    """Oracle bundle for a single objective function."""

    def __init__(self, name, dim, value, grad, hvp=None, hess=None, prox=None,
                 known_min=None, known_argmin=None, argmin_projector=None,
                 domain_ok=None, value_batch=None, grad_batch=None,
                 kernel_kind=None, kernel_data=None):
        self.name = name
        self.dim = int(dim)
        self.value = value
        self.grad = grad
        self.hvp = hvp
        self.hess = hess
        self._prox = prox
        self.known_min = known_min
        self.known_argmin = None if known_argmin is None else np.asarray(known_argmin, float)
        self.argmin_projector = argmin_projector
        self.domain_ok = domain_ok
        self._value_batch = value_batch
        self._grad_batch = grad_batch
        # fast-path encoding for the compiled integrator ("quadratic"/"log-barrier")
        self.kernel_kind = kernel_kind
        self.kernel_data = kernel_data

    def prox(self, y, lam):
        if self._prox is None:
            raise MissingProxError(f"objective {self.name!r} has no proximal oracle")
        if lam <= 0:
            raise ConfigError(f"prox step size must be positive, got {lam}")
        return self._prox(np.asarray(y, float), float(lam))

    @property
    def has_prox(self):
        return self._prox is not None

    def in_domain(self, x):
        return True if self.domain_ok is None else bool(self.domain_ok(np.asarray(x, float)))

    def value_batch(self, xs):
        xs = np.asarray(xs, float)
        if self._value_batch is not None:
            return self._value_batch(xs)
        return np.array([self.value(x) for x in xs])

    def grad_batch(self, xs):
        xs = np.asarray(xs, float)
        if self._grad_batch is not None:
            return self._grad_batch(xs)
        return np.array([self.grad(x) for x in xs])

    def fgap_floor(self):
        """Gap magnitudes below this are numerically indistinguishable from 0."""
        ref = 0.0 if self.known_min is None else abs(self.known_min)
        return 100.0 * _EPS * (1.0 + ref)


def make_quadratic(A, ell=None, name="quadratic"):
    """f(x) = (1/2) x'Ax - ell'x for symmetric positive semidefinite A.

    Raises NotPSDError (with the offending eigenvalue as witness) when A has a
    negative eigenvalue beyond round-off. The known minimum exists when A is
    positive definite or ell lies in the range of A; for a singular A the
    minimizing set is the affine solution set of Ax = ell and a projector
    onto it is provided.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError(f"quadratic matrix must be square, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=1e-12, atol=1e-12):
        raise ConfigError("quadratic matrix must be symmetric")
    d = A.shape[0]
    ell = np.zeros(d) if ell is None else np.asarray(ell, dtype=float)
    if ell.shape != (d,):
        raise ConfigError(f"linear term must have shape ({d},), got {ell.shape}")
    evals = np.linalg.eigvalsh(A)
    scale = max(1.0, float(np.max(np.abs(evals))))
    if evals[0] < -1e-10 * scale:
        raise NotPSDError(
            f"matrix has negative eigenvalue {evals[0]:.6e}", eigenvalue=float(evals[0]))

    pinvA = np.linalg.pinv(A, rcond=1e-12)
    xstar = pinvA @ ell
    consistent = bool(np.linalg.norm(A @ xstar - ell) <= 1e-9 * (1.0 + np.linalg.norm(ell)))
    known_min = float(0.5 * xstar @ (A @ xstar) - ell @ xstar) if consistent else None
    known_argmin = xstar if consistent else None
    nonsingular = evals[0] > 1e-10 * scale

    def value(x):
        x = np.asarray(x, float)
        return float(0.5 * x @ (A @ x) - ell @ x)

    def grad(x):
        return A @ np.asarray(x, float) - ell

    def hvp(x, v):
        return A @ np.asarray(v, float)

    def hess(x):
        return A

    def prox(y, lam):
        return np.linalg.solve(np.eye(d) + lam * A, y + lam * ell)

    def projector(x):
        x = np.asarray(x, float)
        return x - pinvA @ (A @ x - ell)

    def value_batch(xs):
        return 0.5 * np.einsum("ij,ij->i", xs, xs @ A) - xs @ ell

    def grad_batch(xs):
        return xs @ A - ell[None, :]

    return Objective(
        name, d, value, grad, hvp=hvp, hess=hess, prox=prox,
        known_min=known_min, known_argmin=known_argmin,
        argmin_projector=projector if consistent else None,
        value_batch=value_batch, grad_batch=grad_batch,
        kernel_kind="quadratic",
        kernel_data={"A": A, "ell": ell, "L": float(evals[-1]),
                     "nonsingular": nonsingular})


def make_log_barrier(name="log-barrier"):
    """f(x) = (1/2)(x1^2 + x2^2) - ln(x1 x2) on the open positive quadrant.

    Strongly convex; minimum value 1 at (1, 1). The proximal map solves the
    separable optimality condition exactly via its positive quadratic root.
    """
    d = 2

    def domain_ok(x):
        return bool(np.all(x > 0.0))

    def value(x):
        x = np.asarray(x, float)
        if not domain_ok(x):
            raise DomainError(f"log-barrier evaluated outside the positive quadrant: {x}")
        return float(0.5 * (x @ x) - math.log(x[0] * x[1]))

    def grad(x):
        x = np.asarray(x, float)
        if not domain_ok(x):
            raise DomainError(f"log-barrier gradient outside the positive quadrant: {x}")
        return x - 1.0 / x

    def hvp(x, v):
        x = np.asarray(x, float)
        return (1.0 + 1.0 / x ** 2) * np.asarray(v, float)

    def hess(x):
        x = np.asarray(x, float)
        return np.diag(1.0 + 1.0 / x ** 2)

    def prox(y, lam):
        # componentwise: (1 + 1/lam) xi^2 - (y/lam) xi - 1 = 0, positive root
        a = 1.0 + 1.0 / lam
        b = y / lam
        return (b + np.sqrt(b * b + 4.0 * a)) / (2.0 * a)

    def value_batch(xs):
        return 0.5 * np.sum(xs ** 2, axis=1) - np.log(xs[:, 0] * xs[:, 1])

    def grad_batch(xs):
        return xs - 1.0 / xs

    return Objective(
        name, d, value, grad, hvp=hvp, hess=hess, prox=prox,
        known_min=1.0, known_argmin=np.array([1.0, 1.0]),
        domain_ok=domain_ok, value_batch=value_batch, grad_batch=grad_batch,
        kernel_kind="log-barrier", kernel_data={})


def make_custom(value, grad, dim, hvp=None, prox=None, known_min=None,
                known_argmin=None, domain_ok=None, name="custom"):
    """Wrap user-supplied oracles; integration uses the interpreted path."""
    return Objective(name, dim, value, grad, hvp=hvp, prox=prox,
                     known_min=known_min, known_argmin=known_argmin,
                     domain_ok=domain_ok)


def hvp_fd(obj, x, v, h=None):
    """Central-difference Hessian-vector product from the gradient oracle.

    Step defaults to sqrt(machine eps) * (1 + |x|) / |v|, the usual balance of
    truncation against gradient round-off. Raises DomainError when the probe
    points leave the objective's domain.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return np.zeros_like(x)
    if h is None:
        h = math.sqrt(_EPS) * (1.0 + float(np.linalg.norm(x))) / nv
    xp, xm = x + h * v, x - h * v
    if not (obj.in_domain(xp) and obj.in_domain(xm)):
        raise DomainError("finite-difference probe left the objective domain")
    return (obj.grad(xp) - obj.grad(xm)) / (2.0 * h)


_PRESETS = {
    "quad-diag": lambda: make_quadratic(np.diag([1.0, 1000.0]), name="quad-diag"),
    "quad-rank1": lambda: make_quadratic(
        np.array([[1.0, 1000.0], [1000.0, 1000000.0]]), name="quad-rank1"),
    "log-barrier": lambda: make_log_barrier(),
}


def objective_from_config(cfg):
    """Objective from config: a named preset or an explicit quadratic."""
    if not isinstance(cfg, dict):
        raise ConfigError("objective config must be a mapping")
    extra = set(cfg) - {"preset", "A", "ell", "name"}
    if extra:
        raise ConfigError(f"unknown objective keys {sorted(extra)}")
    preset = cfg.get("preset")
    if preset is not None:
        if preset == "quad-custom":
            if "A" not in cfg:
                raise ConfigError("quad-custom objective needs a matrix 'A'")
            return make_quadratic(cfg["A"], cfg.get("ell"),
                                  name=cfg.get("name", "quad-custom"))
        if preset not in _PRESETS:
            raise ConfigError(f"unknown objective preset {preset!r}")
        if "A" in cfg or "ell" in cfg:
            raise ConfigError(f"preset {preset!r} does not take A/ell overrides")
        return _PRESETS[preset]()
    if "A" in cfg:
        return make_quadratic(cfg["A"], cfg.get("ell"), name=cfg.get("name", "quadratic"))
    raise ConfigError("objective config needs 'preset' or 'A'")
