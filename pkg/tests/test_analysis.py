"""Rate verdicts, monotonicity and oscillation probes, rate fits.

All series here are synthetic with hand-computable products, so every sup,
slope, and verdict is pinned against arithmetic rather than an integrator.
"""

import math

import numpy as np
import pytest

from inertia_lab import analysis as an
from inertia_lab import schedules as sch
from inertia_lab.errors import ConfigError, InsufficientDataError, WindowError


class FakeTraj:
    """Minimal ts/fgap/meta carrier, standing in for a Trajectory."""

    def __init__(self, ts, fgap, floor=None):
        self.ts = np.asarray(ts, dtype=float)
        self.fgap = np.asarray(fgap, dtype=float)
        self.meta = {} if floor is None else {"fgap_floor": float(floor)}


# ---------------------------------------------------------------- claims

def test_rate_claim_validation():
    with pytest.raises(ConfigError):
        an.RateClaim("power")
    with pytest.raises(ConfigError):
        an.RateClaim("power", power=0.0)
    with pytest.raises(ConfigError):
        an.RateClaim("exp_power", coeff=1.0)
    with pytest.raises(ConfigError):
        an.RateClaim("exp_power", coeff=1.0, q=0.0)
    with pytest.raises(ConfigError):
        an.RateClaim("exp_power", coeff=-1.0, q=1.0)
    with pytest.raises(ConfigError):
        an.RateClaim("denominator")
    with pytest.raises(ConfigError):
        an.RateClaim("polylog", power=2.0)
    with pytest.raises(ConfigError):
        an.RateClaim("power", power=2.0, window=(5.0, 5.0))


def test_rate_claim_log_denominators():
    ts = np.array([1.0, 10.0, 100.0])
    c = an.RateClaim("power", power=2.0)
    assert np.allclose(c.log_D(ts), 2.0 * np.log(ts))
    c = an.RateClaim("exp_power", coeff=0.5, q=0.5)
    assert np.allclose(c.log_D(ts), 0.5 * np.sqrt(ts))
    c = an.RateClaim("denominator", denominator=sch.exp_power(1.0, 2.0, 1.0))
    assert np.allclose(c.log_D(ts), 2.0 * ts)


def test_rate_claim_describe():
    assert an.RateClaim("power", power=2.0).describe() == {"kind": "power", "s": 2.0}
    d = an.RateClaim("exp_power", coeff=1.0, q=0.5, window=(1, 9)).describe()
    assert d == {"kind": "exp_power", "c": 1.0, "q": 0.5, "window": [1.0, 9.0]}
    d = an.RateClaim("denominator", denominator=sch.exp_power(1, 1, 1)).describe()
    assert d["denominator"] == "exp-power"


# ---------------------------------------------------------------- windows

def test_default_window_never_enters_first_fifth():
    ts = np.geomspace(1.0, 500.0, 100)
    lo, hi = an.default_window(ts)
    assert hi == 500.0
    assert lo == pytest.approx(1.0 + 0.2 * 499.0)


def test_window_errors():
    ts = np.geomspace(1.0, 1000.0, 50)
    fgap = ts ** -2
    claim = an.RateClaim("power", power=2.0, window=(500.0, 2000.0))
    with pytest.raises(WindowError):
        an.bound_check((ts, fgap), claim)
    # inverted windows are caught at the mask, not just at claim construction
    with pytest.raises(WindowError):
        an.fit_power_rate((ts, fgap), window=(7.0, 3.0))
    with pytest.raises(WindowError):
        an.fit_power_rate((ts, fgap), window=(500.0, 501.0))  # no samples inside


# ---------------------------------------------------------------- bound_check

def test_bounded_oscillating_product_sups_at_peak():
    # oscillation period is short against the block width, so block maxima
    # all sit near the envelope and the trend stays flat
    ts = np.geomspace(1.0, 1000.0, 2400)
    fgap = ts ** -2 * (1.1 + np.cos(20.0 * np.pi * np.log(ts)))
    claim = an.RateClaim("power", power=2.0, window=(10.0, 1000.0))
    v = an.bound_check((ts, fgap), claim)
    assert v.verdict == "bounded"
    assert v.sup_product == pytest.approx(2.1, rel=1e-2)
    assert abs(v.trend_slope) < 0.02
    assert v.flags == []
    assert v.window == (10.0, 1000.0)


def test_growing_when_claim_is_one_power_too_strong():
    ts = np.geomspace(1.0, 1000.0, 900)
    fgap = ts ** -2
    v = an.bound_check((ts, fgap), an.RateClaim("power", power=3.0))
    assert v.verdict == "growing"
    assert v.trend_slope == pytest.approx(1.0, abs=0.05)


def test_bounded_via_flat_tail_when_sup_sits_at_the_end():
    # product t^0.02 increases monotonically: sup is at t_hi, but the tail
    # rise stays inside the flatness allowance
    ts = np.geomspace(1.0, 1000.0, 900)
    fgap = ts ** -2
    v = an.bound_check((ts, fgap), an.RateClaim("power", power=2.02))
    assert v.verdict == "bounded"
    assert v.flags == []
    assert v.trend_slope == pytest.approx(0.02, abs=5e-3)


def test_inconclusive_on_late_step_jump():
    # flat product with a +0.15 log jump on the last few samples: trend is
    # diluted below tolerance but the sup lands in a non-flat tail
    ts = np.geomspace(100.0, 1000.0, 320)
    log_fgap = -2.0 * np.log(ts)
    log_fgap[-16:] += 0.15
    claim = an.RateClaim("power", power=2.0, window=(100.0, 1000.0))
    v = an.bound_check((ts, np.exp(log_fgap)), claim)
    assert v.verdict == "inconclusive"
    assert v.flags == ["sup_in_tail"]
    assert 0.0 < v.trend_slope <= 0.05
    assert v.sup_product == pytest.approx(math.exp(0.15), rel=1e-12)


def test_exp_power_claim_exact_product():
    ts = np.geomspace(1.0, 25.0, 600)
    fgap = np.exp(-ts)
    v = an.bound_check((ts, fgap), an.RateClaim("exp_power", coeff=1.0, q=1.0))
    assert v.verdict == "bounded"
    assert v.sup_product == pytest.approx(1.0, rel=1e-12)


def test_denominator_claim_through_schedule_log():
    ts = np.linspace(1.0, 25.0, 961)
    fgap = np.exp(-ts) * (1.5 + 0.5 * np.sin(ts))
    claim = an.RateClaim("denominator", denominator=sch.exp_power(1.0, 1.0, 1.0))
    v = an.bound_check((ts, fgap), claim)
    assert v.verdict == "bounded"
    assert v.sup_product == pytest.approx(2.0, rel=1e-3)


def test_sup_product_overflows_to_inf():
    ts = np.geomspace(50.0, 1400.0, 256)
    fgap = np.full_like(ts, 0.5)
    claim = an.RateClaim("exp_power", coeff=1.0, q=1.0, window=(50.0, 1400.0))
    v = an.bound_check((ts, fgap), claim)
    assert v.verdict == "growing"
    assert math.isinf(v.sup_product)


def test_floor_points_are_excluded_not_fitted():
    ts = np.geomspace(1.0, 1000.0, 400)
    fgap = ts ** -2
    n_floor = 60
    fgap[-n_floor:] = 1e-18                      # below the default floor
    v = an.bound_check(FakeTraj(ts, fgap), an.RateClaim("power", power=2.0))
    assert v.verdict == "bounded"
    assert v.excluded_points == n_floor
    assert v.sup_product == pytest.approx(1.0, rel=1e-9)


def test_all_points_below_floor_is_vacuously_bounded():
    ts = np.geomspace(1.0, 1000.0, 200)
    traj = FakeTraj(ts, ts ** -2, floor=1e-4)    # every window point < 1e-4
    v = an.bound_check(traj, an.RateClaim("power", power=2.0))
    assert v.verdict == "bounded"
    assert v.flags == ["all_below_floor"]
    assert v.sup_product == 0.0
    assert v.trend_slope == 0.0
    assert v.excluded_points > 0


def test_bound_check_scale_invariance():
    ts = np.geomspace(1.0, 1000.0, 600)
    fgap = ts ** -2 * (1.1 + np.cos(20.0 * np.pi * np.log(ts)))
    claim = an.RateClaim("power", power=2.0, window=(10.0, 1000.0))
    # scales chosen so even the trough values stay above the fgap floor
    lo = an.bound_check((ts, 1e-3 * fgap), claim)
    hi = an.bound_check((ts, 1e8 * fgap), claim)
    assert lo.excluded_points == hi.excluded_points == 0
    assert lo.verdict == hi.verdict == "bounded"
    assert lo.trend_slope == pytest.approx(hi.trend_slope, abs=1e-9)
    assert hi.sup_product == pytest.approx(1e11 * lo.sup_product, rel=1e-9)


def test_verdict_summary_shape():
    ts = np.geomspace(1.0, 1000.0, 300)
    v = an.bound_check((ts, ts ** -2), an.RateClaim("power", power=2.0))
    s = v.summary()
    assert set(s) == {"claim", "sup_product", "trend_slope", "fitted_exponent",
                      "verdict", "excluded_points", "flags", "window"}
    assert s["fitted_exponent"] is None
    assert s["claim"] == {"kind": "power", "s": 2.0}
    assert isinstance(s["window"], list) and len(s["window"]) == 2


# ---------------------------------------------------------------- monotone

def test_check_monotone_pins():
    assert an.check_monotone([1.0, 2.0, 1.5], 0.0, 0.0) == (False, 1)
    assert an.check_monotone([3.0, 2.0, 5.0, 1.0, 7.0], 0.0, 0.0) == (False, 2)
    assert an.check_monotone([4.0, 2.0, 1.0, 0.5], 0.0, 0.0) == (True, None)
    assert an.check_monotone([2.0, 2.0, 2.0], 0.0, 0.0) == (True, None)


def test_check_monotone_tolerances():
    ok, _ = an.check_monotone([1.0, 1.0 + 5e-10], 0.0, 1e-9)
    assert ok
    ok, idx = an.check_monotone([1.0, 1.0 + 5e-9], 0.0, 1e-9)
    assert (ok, idx) == (False, 1)
    ok, _ = an.check_monotone([100.0, 100.0 * (1.0 + 5e-7)], 1e-6, 0.0)
    assert ok
    ok, _ = an.check_monotone([100.0, 100.0 * (1.0 + 5e-7)], 1e-8, 0.0)
    assert not ok


def test_check_monotone_accepts_pairs_and_tuples():
    ts = np.linspace(0.0, 1.0, 5)
    vals = np.array([5.0, 4.0, 3.0, 3.5, 1.0])
    assert an.check_monotone(np.column_stack([ts, vals]), 0.0, 0.0) == (False, 3)
    assert an.check_monotone((ts, vals), 0.0, 0.0) == (False, 3)


def test_check_monotone_needs_two_points():
    with pytest.raises(InsufficientDataError):
        an.check_monotone([1.0], 0.0, 0.0)


# ---------------------------------------------------------------- oscillation

def test_oscillation_count_pins():
    ts = np.linspace(0.0, 4.0 * np.pi, 2001)
    assert an.oscillation_count((ts, np.cos(ts) + 2.0)) == 4
    t = np.linspace(0.0, 5.0, 50)
    assert an.oscillation_count((t, np.exp(-t))) == 0
    three = np.arange(3.0)
    assert an.oscillation_count((three, np.array([1.0, 3.0, 2.0]))) == 2
    four = np.arange(4.0)
    assert an.oscillation_count((four, np.array([3.0, 2.0, 2.0, 1.0]))) == 0
    assert an.oscillation_count((three, np.array([5.0, 5.0, 5.0]))) == 0


def test_oscillation_count_needs_three_points():
    with pytest.raises(InsufficientDataError):
        an.oscillation_count((np.arange(2.0), np.array([1.0, 2.0])))


# ---------------------------------------------------------------- fits

def test_fit_power_rate_recovers_exact_exponent():
    ts = np.geomspace(1.0, 1000.0, 400)
    fgap = 3.0 * ts ** (-5.0 / 3.0)
    fit = an.fit_power_rate((ts, fgap))
    assert fit.exponent == pytest.approx(5.0 / 3.0, abs=1e-12)
    assert fit.intercept == pytest.approx(np.log(3.0), abs=1e-10)
    assert fit.residual < 1e-12
    assert fit.n_used >= 10
    assert set(fit.summary()) == {"exponent", "residual", "n_used"}


def test_fit_exp_rate_recovers_exact_coefficient():
    ts = np.linspace(1.0, 100.0, 500)
    fgap = 2.0 * np.exp(-2.0 * np.sqrt(ts))
    fit = an.fit_exp_rate((ts, fgap), q=0.5)
    assert fit.exponent == pytest.approx(2.0, abs=1e-10)
    assert fit.intercept == pytest.approx(-np.log(2.0), abs=1e-8)
    with pytest.raises(ConfigError):
        an.fit_exp_rate((ts, fgap), q=0.0)


def test_fit_needs_ten_points_above_floor():
    ts = np.geomspace(1.0, 1000.0, 200)
    traj = FakeTraj(ts, ts ** -2, floor=1e-3)
    with pytest.raises(InsufficientDataError):
        an.fit_power_rate(traj, window=(100.0, 1000.0))
