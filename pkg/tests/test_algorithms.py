"""Inertial proximal recursion: exact iterate pins and diagnostics.

On the 1D unit quadratic with lambda = 1 the prox is y/2, so any rule with
alpha_k = 0 for small k gives x_k = 2^(-k) in exact binary arithmetic. Those
pins are asserted with ==.
"""

import numpy as np
import pytest

from inertia_lab import algorithms as alg
from inertia_lab import analysis as an
from inertia_lab.errors import ConfigError, MissingProxError
from inertia_lab.problems import make_custom, make_quadratic, objective_from_config


def unit_quad():
    return make_quadratic([[1.0]])


# ---------------------------------------------------------------- rules

def test_rule_families():
    a = alg.alpha_one_minus_over_k(4.0)
    assert a(0) == 0.0
    assert a(2) == 0.0          # clamped, 1 - 4/2 < 0
    assert a(4) == 0.0
    assert a(8) == 0.5
    assert a.describe() == {"family": "one-minus-over-k", "alpha": 4.0}

    c = alg.alpha_constant(0.3)
    assert c(0) == c(17) == 0.3

    lp = alg.lambda_power(0.5, scale=2.0)
    assert lp(0) == 2.0         # k floored at 1
    assert lp(9) == pytest.approx(6.0)
    assert lp.describe() == {"family": "power", "delta": 0.5, "scale": 2.0}

    assert alg.lambda_constant(0.25)(3) == 0.25


def test_rule_validation():
    with pytest.raises(ConfigError):
        alg.alpha_constant(-0.1)
    with pytest.raises(ConfigError):
        alg.alpha_one_minus_over_k(-1.0)
    with pytest.raises(ConfigError):
        alg.lambda_constant(0.0)
    with pytest.raises(ConfigError):
        alg.lambda_power(1.0, scale=0.0)


def test_ip_config_validation():
    a, l = alg.alpha_constant(0.0), alg.lambda_constant(1.0)
    with pytest.raises(ConfigError):
        alg.IPConfig(a, l, K=0, x0=[1.0])
    with pytest.raises(ConfigError):
        alg.IPConfig(a, l, K=5, x0=[1.0, 2.0], x1=[1.0])
    cfg = alg.IPConfig(a, l, K=5, x0=[1.0, 2.0])
    assert np.array_equal(cfg.x1, cfg.x0)


# ---------------------------------------------------------------- recursion

def test_prox_step_matches_objective_prox():
    obj = unit_quad()
    y = np.array([3.0])
    assert alg.prox_step(obj, y, 1.0) == pytest.approx(1.5)
    assert alg.prox_step(obj, y, 3.0) == pytest.approx(0.75)
    with pytest.raises(ConfigError):
        alg.prox_step(obj, y, 0.0)


def test_halving_pin_is_bit_exact():
    obj = unit_quad()
    cfg = alg.IPConfig(alg.alpha_one_minus_over_k(4.0), alg.lambda_constant(1.0),
                       K=8, x0=[1.0])
    seq = alg.inertial_proximal(obj, cfg)
    # alpha_k = 0 through k = 4, so the first iterates are pure halving
    assert seq.xs[1, 0] == 0.5
    assert seq.xs[2, 0] == 0.25
    assert seq.xs[3, 0] == 0.125
    assert seq.xs[4, 0] == 0.0625
    assert seq.ks[-1] == 8 and seq.xs.shape == (9, 1)


def test_momentum_seeding_through_x1():
    # y_0 = x_0 + a*(x_0 - x_1) with a = 0.5: y_0 = 1, prox gives 0.5
    obj = unit_quad()
    cfg = alg.IPConfig(alg.alpha_constant(0.5), alg.lambda_constant(1.0),
                       K=1, x0=[0.0], x1=[-2.0])
    seq = alg.inertial_proximal(obj, cfg)
    assert seq.xs[1, 0] == 0.5


def test_pure_prox_is_strictly_decreasing():
    obj = unit_quad()
    cfg = alg.IPConfig(alg.alpha_constant(0.0), alg.lambda_constant(1.0),
                       K=60, x0=[1.0])
    seq = alg.inertial_proximal(obj, cfg)
    assert np.all(np.diff(seq.fgap) < 0.0)
    ok, _ = an.check_monotone(seq.fgap, 0.0, 0.0)
    assert ok


def test_rules_are_revalidated_per_iteration():
    obj = unit_quad()
    bad_alpha = alg.Rule(lambda k: -0.5, "constant", {"a": -0.5})
    cfg = alg.IPConfig(bad_alpha, alg.lambda_constant(1.0), K=3, x0=[1.0])
    with pytest.raises(ConfigError):
        alg.inertial_proximal(obj, cfg)
    bad_lambda = alg.Rule(lambda k: 0.0, "constant", {"l": 0.0})
    cfg = alg.IPConfig(alg.alpha_constant(0.0), bad_lambda, K=3, x0=[1.0])
    with pytest.raises(ConfigError):
        alg.inertial_proximal(obj, cfg)


def test_objective_without_prox_is_rejected():
    obj = make_custom(lambda x: float(np.sum(x ** 4)),
                      lambda x: 4.0 * x ** 3, dim=1, name="quartic")
    cfg = alg.IPConfig(alg.alpha_constant(0.0), alg.lambda_constant(1.0),
                       K=2, x0=[1.0])
    with pytest.raises(MissingProxError):
        alg.inertial_proximal(obj, cfg)


def test_unknown_minimum_falls_back_to_running_best():
    # rank-deficient consistent system still has known_min; force the
    # fallback with an inconsistent one
    obj = make_quadratic([[1.0, 0.0], [0.0, 0.0]], ell=[0.0, 1.0])
    assert obj.known_min is None
    cfg = alg.IPConfig(alg.alpha_constant(0.0), alg.lambda_constant(1.0),
                       K=10, x0=[1.0, 0.0])
    seq = alg.inertial_proximal(obj, cfg)
    assert np.all(seq.fgap >= 0.0)
    assert seq.fgap[-1] == 0.0  # best iterate defines the reference


# ---------------------------------------------------------------- diagnostics

def test_nesterov_rule_diagnostics_on_anisotropic_quadratic():
    obj = objective_from_config({"preset": "quad-diag"})
    cfg = alg.IPConfig(alg.alpha_one_minus_over_k(4.0), alg.lambda_constant(1.0),
                       K=2000, x0=[1.0, 1.0])
    seq = alg.inertial_proximal(obj, cfg)
    assert np.isfinite(seq.diag["sup_k2_fgap"])
    assert seq.diag["delta"] == 0.0
    v = an.bound_check((seq.ts, seq.fgap),
                       an.RateClaim("power", power=2.0, window=(20.0, 2000.0)))
    assert v.verdict == "bounded"
    assert v.trend_slope <= 0.0 or "all_below_floor" in v.flags


def test_growing_step_diagnostics_track_the_extra_power():
    obj = unit_quad()
    cfg = alg.IPConfig(alg.alpha_one_minus_over_k(5.0),
                       alg.lambda_power(1.0, scale=1.0), K=400, x0=[1.0])
    seq = alg.inertial_proximal(obj, cfg)
    assert seq.diag["delta"] == 1.0
    assert np.isfinite(seq.diag["sup_k2_delta_fgap"])
    tail = seq.ks >= 20
    kf = seq.ks.astype(float)
    assert seq.diag["sup_k2_delta_fgap"] == pytest.approx(
        np.max(kf[tail] ** 3 * seq.fgap[tail]))
    assert seq.diag["lambda_rule"] == {"family": "power", "delta": 1.0, "scale": 1.0}


def test_summary_and_ts():
    obj = unit_quad()
    cfg = alg.IPConfig(alg.alpha_constant(0.0), alg.lambda_constant(1.0),
                       K=25, x0=[1.0])
    seq = alg.inertial_proximal(obj, cfg)
    s = seq.summary()
    assert s["K"] == 25
    assert s["terminal_fgap"] == pytest.approx(0.5 * 4.0 ** -25, rel=1e-12)
    assert s["alpha_rule"] == {"family": "constant", "a": 0.0}
    assert seq.ts.dtype == float
    assert np.array_equal(seq.ts, np.arange(26.0))


def test_iterates_csv_roundtrip(tmp_path):
    obj = objective_from_config({"preset": "quad-diag"})
    cfg = alg.IPConfig(alg.alpha_one_minus_over_k(3.0), alg.lambda_constant(1.0),
                       K=12, x0=[1.0, 1.0])
    seq = alg.inertial_proximal(obj, cfg)
    path = tmp_path / "iterates.csv"
    seq.to_csv(path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode().splitlines()[0] == "k,x_1,x_2,fgap,k2_fgap"
    back = np.genfromtxt(path, delimiter=",", names=True)
    assert back.shape == (13,)
    assert np.array_equal(back["x_1"], seq.xs[:, 0])
    assert np.array_equal(back["k2_fgap"], seq.ks.astype(float) ** 2 * seq.fgap)


# ---------------------------------------------------------------- t_sequence

def test_t_sequence_closed_form_for_one_minus_over_k():
    # alpha_j = 1 - 4/j telescopes: t_k = (k - 1) / 3 for k >= 4
    ts = alg.t_sequence(alg.alpha_one_minus_over_k(4.0), 50)
    assert ts[0] == 1.0
    assert ts[4] == 1.0                     # alpha_4 = 0 kills every product
    assert ts[5] == pytest.approx(4.0 / 3.0, rel=1e-10)
    assert ts[50] == pytest.approx(49.0 / 3.0, rel=1e-10)


def test_t_sequence_geometric_pin():
    # constant alpha = 0.5: sum of 0.5^m for m >= 1 is 1, so t_k = 2
    ts = alg.t_sequence(alg.alpha_constant(0.5), 6)
    assert np.allclose(ts[1:], 2.0, rtol=1e-12)


def test_t_sequence_divergence_guard():
    with pytest.raises(ConfigError):
        alg.t_sequence(alg.alpha_constant(1.0), 1)
