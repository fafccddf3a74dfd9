import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracloss import losses
from fracloss.losses import LossSpec, batch_eval
from fracloss.verify import _fd_grad_p, _vector_with_target

EULER_GAMMA = 0.5772156649015329


def vec(p_y, k=10):
    return _vector_with_target(p_y, k)


# --- cross-entropy ----------------------------------------------------------

def test_ce_values_and_gradient():
    out = losses.ce(vec(0.5), 0)
    assert out.value == pytest.approx(math.log(2.0), rel=1e-12)
    assert out.grad_p[0] == pytest.approx(-2.0, rel=1e-12)
    assert np.all(out.grad_p[1:] == 0.0)
    assert out.grad_mu == 0.0


def test_ce_perfect_prediction_near_zero():
    p = np.zeros(4)
    p[1] = 1.0  # clamps to 1 - eps
    assert losses.ce(p, 1).value == pytest.approx(0.0, abs=1e-6)


# --- mean absolute error ----------------------------------------------------

def test_mae_examples():
    one_hot = np.zeros(5)
    one_hot[2] = 1.0
    assert losses.mae(one_hot, 2).value == pytest.approx(0.0, abs=1e-6)
    assert losses.mae(np.array([0.5, 0.5]), 0).value == pytest.approx(1.0, rel=1e-12)
    assert losses.mae(np.full(10, 0.1), 3).value == pytest.approx(1.8, rel=1e-12)


def test_mae_per_element_signs():
    out = losses.mae(vec(0.4), 0)
    assert out.grad_p[0] == -1.0
    assert np.all(out.grad_p[1:] == 1.0)


# --- generalized cross-entropy ----------------------------------------------

def test_gce_examples():
    assert losses.gce(vec(0.3), 0, q=1.0).value == pytest.approx(0.7, rel=1e-12)
    # frozen from a 30-digit evaluation of (1 - 0.5**0.7) / 0.7
    assert losses.gce(vec(0.5), 0, q=0.7).value == pytest.approx(0.549182561896488, rel=1e-12)
    # Box-Cox limit q -> 0 recovers -log p
    assert losses.gce(vec(0.5), 0, q=1e-6).value == pytest.approx(math.log(2.0), abs=1e-5)


def test_gce_rejects_bad_q():
    with pytest.raises(ValueError):
        losses.gce(vec(0.5), 0, q=0.0)
    with pytest.raises(ValueError):
        losses.gce(vec(0.5), 0, q=1.5)


# --- reverse cross-entropy ---------------------------------------------------

def test_rce_examples():
    one_hot = np.zeros(4)
    one_hot[1] = 1.0
    assert losses.rce(one_hot, 1, -6.0).value == pytest.approx(0.0, abs=1e-5)
    assert losses.rce(vec(0.5), 0, -6.0).value == pytest.approx(3.0, rel=1e-12)
    out = losses.rce(vec(0.5), 0, -6.0)
    assert out.grad_p[0] == 0.0
    assert np.all(out.grad_p[1:] == 6.0)


def test_rce_rejects_nonnegative_constant():
    with pytest.raises(ValueError):
        losses.rce(vec(0.5), 0, 0.0)


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=50, deadline=None)
def test_rce_is_scaled_mae_on_random_simplex(seed):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(6))
    y = int(rng.integers(0, 6))
    a = -6.0
    assert losses.rce(p, y, a).value == pytest.approx(
        (-a / 2.0) * losses.mae(p, y).value, rel=1e-12, abs=1e-12
    )


# --- normalized cross-entropy -------------------------------------------------

def test_nce_examples():
    assert losses.nce(np.full(10, 0.1), 4).value == pytest.approx(0.1, rel=1e-9)
    # frozen from a 30-digit evaluation of log(0.9) / (log(0.9) + log(0.1))
    assert losses.nce(np.array([0.9, 0.1]), 0).value == pytest.approx(
        0.043755355303401, rel=1e-12
    )


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=100, deadline=None)
def test_nce_bounded_on_random_simplex(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 12))
    p = rng.dirichlet(np.ones(k))
    out = losses.nce(p, int(rng.integers(0, k)))
    assert 0.0 <= out.value <= 1.0
    assert np.isfinite(out.grad_p).all()


# --- active-passive combination ----------------------------------------------

def test_apl_weights():
    p = vec(0.35)
    active_only = losses.apl_combine("ce", "mae", 1.0, 0.0, p, 0)
    assert active_only.value == pytest.approx(losses.ce(p, 0).value, rel=1e-14)
    passive_only = losses.apl_combine("ce", "mae", 0.0, 1.0, p, 0)
    assert passive_only.value == pytest.approx(losses.mae(p, 0).value, rel=1e-14)


def test_sce_is_ce_plus_rce():
    # frozen: ln 2 + 3 with alpha = beta = 1 and log-zero constant -6
    out = losses.apl_combine("ce", {"kind": "rce", "log_zero": -6.0}, 1.0, 1.0, vec(0.5), 0)
    assert out.value == pytest.approx(3.693147180559945, rel=1e-12)
    via_spec, _, _ = batch_eval(LossSpec("sce", {"alpha": 1.0, "beta": 1.0, "log_zero": -6.0}), vec(0.5), 0)
    assert via_spec[0] == pytest.approx(out.value, rel=1e-14)


# --- fractional cross-entropy ---------------------------------------------------

def test_fce_reduces_to_ce_at_zero_order():
    for p_y in (0.05, 0.3, 0.8):
        assert losses.fce(vec(p_y), 0, 0.0).value == pytest.approx(
            losses.ce(vec(p_y), 0).value, abs=1e-13
        )


def test_fce_is_constant_one_at_unit_order():
    for p_y in (0.05, 0.3, 0.8, 0.999):
        assert losses.fce(vec(p_y), 0, 1.0).value == 1.0


def test_fce_midpoint_value():
    # frozen from a 30-digit evaluation of (ln 2)**0.5 / gamma(1.5)
    assert losses.fce(vec(0.5), 0, 0.5).value == pytest.approx(0.939437278699651, rel=1e-12)


def test_fce_grad_mu_at_unit_u():
    # u = 1 makes log u vanish, leaving digamma(1) / gamma(1) = -euler_gamma
    p = vec(math.exp(-1.0))
    assert losses.fce(p, 0, 1.0).grad_mu == pytest.approx(-EULER_GAMMA, rel=1e-12)


def test_fce_crossing_property():
    # hard sample: unit order is cheaper; easy sample: unit order is dearer
    hard_0 = losses.fce(vec(0.01), 0, 0.0).value
    hard_1 = losses.fce(vec(0.01), 0, 1.0).value
    easy_0 = losses.fce(vec(0.9), 0, 0.0).value
    easy_1 = losses.fce(vec(0.9), 0, 1.0).value
    assert hard_0 == pytest.approx(4.605170185988091, rel=1e-12)
    assert easy_0 == pytest.approx(0.105360515657826, rel=1e-12)
    assert hard_1 == 1.0 < hard_0
    assert easy_1 == 1.0 > easy_0


def test_fce_rejects_mu_outside_range():
    with pytest.raises(ValueError):
        losses.fce(vec(0.5), 0, -0.1)
    with pytest.raises(ValueError):
        losses.fce(vec(0.5), 0, 1.1)


# --- fractional classification loss ---------------------------------------------

def test_fcl_degenerate_orders():
    for p_y in (0.01, 0.2, 0.5, 0.9, 0.99):
        p = vec(p_y)
        at0 = losses.fcl(p, 0, 0.0).value
        ref0 = losses.ce(p, 0).value + losses.mae(p, 0).value
        assert abs(at0 - ref0) <= 1e-12
        at1 = losses.fcl(p, 0, 1.0).value
        assert abs(at1 - (losses.mae(p, 0).value + 1.0)) <= 1e-12


def test_fcl_target_gradient_at_zero_order():
    assert losses.fcl(vec(0.5), 0, 0.0).grad_p[0] == pytest.approx(-3.0, rel=1e-9)


def test_fcl_gradient_attenuation_on_hard_samples():
    mags = [abs(losses.fcl(vec(0.01), 0, mu).grad_p[0]) for mu in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert all(a > b for a, b in zip(mags, mags[1:]))


def test_fcl_grad_mu_equals_fce_grad_mu():
    p = vec(0.3)
    assert losses.fcl(p, 0, 0.4).grad_mu == pytest.approx(losses.fce(p, 0, 0.4).grad_mu, rel=1e-14)


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=100, deadline=None)
def test_loss_values_nonnegative_and_finite(seed):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(8))
    y = int(rng.integers(0, 8))
    mu = float(rng.uniform(0.0, 1.0))
    for out in (
        losses.ce(p, y),
        losses.mae(p, y),
        losses.gce(p, y, 0.7),
        losses.rce(p, y, -6.0),
        losses.nce(p, y),
        losses.fce(p, y, mu),
        losses.fcl(p, y, mu),
    ):
        assert out.value >= 0.0
        assert math.isfinite(out.value)
        assert np.isfinite(out.grad_p).all()
        assert math.isfinite(out.grad_mu)


# --- finite-difference gradient checks --------------------------------------

GRID_P = (0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99)


@pytest.mark.parametrize("mu", [0.0, 0.25, 0.5, 0.75, 0.95])
def test_fractional_grad_p_matches_finite_differences(mu):
    for p_y in GRID_P:
        p = vec(p_y)
        for fn in (lambda q, t: losses.fce(q, t, mu), lambda q, t: losses.fcl(q, t, mu)):
            analytic = fn(p, 0).grad_p
            fd = _fd_grad_p(fn, p, 0)
            scale = np.maximum(np.maximum(np.abs(analytic), np.abs(fd)), 1e-7)
            assert np.max(np.abs(analytic - fd) / scale) <= 1e-6


@pytest.mark.parametrize("mu", [0.05, 0.25, 0.5, 0.75, 0.95])
def test_grad_mu_matches_finite_differences(mu):
    h = 1e-6
    for p_y in GRID_P:
        p = vec(p_y)
        for fn in (losses.fce, losses.fcl):
            analytic = fn(p, 0, mu).grad_mu
            fd = (fn(p, 0, mu + h).value - fn(p, 0, mu - h).value) / (2.0 * h)
            assert abs(analytic - fd) <= 1e-6 * max(abs(analytic), abs(fd))


# --- beta linkage -----------------------------------------------------------

def test_beta_equivalent_examples():
    assert losses.beta_equivalent(0.0, 0.5, -6.0) == pytest.approx(-1.0 / 3.0, rel=1e-12)
    assert losses.beta_equivalent(0.0, 0.123, -6.0) == pytest.approx(-1.0 / 3.0, rel=1e-12)
    assert losses.beta_equivalent(1.0, math.exp(-1.0), -6.0) == pytest.approx(-1.0 / 3.0, rel=1e-9)


def test_beta_equivalent_matching_identity():
    # substituting the returned coefficient reproduces the CE-side coefficient
    # (returned value carries the opposite sign by its documented convention)
    from fracloss import specialfn

    for mu in np.linspace(0.0, 1.0, 11):
        for p in (0.01, 0.2, 0.5, 0.9):
            beta = losses.beta_equivalent(mu, p, -6.0)
            u = -math.log(p)
            lhs = -2.0 / (-6.0 * beta)
            rhs = 1.0 / (specialfn.gamma(2.0 - mu) * u**mu)
            assert abs(lhs + rhs) <= 1e-12 * abs(rhs)


def test_beta_equivalent_domain():
    with pytest.raises(ValueError):
        losses.beta_equivalent(0.5, 1.0, -6.0)
    with pytest.raises(ValueError):
        losses.beta_equivalent(0.5, 0.5, 2.0)


# --- spec container -----------------------------------------------------------

def test_loss_spec_validation():
    with pytest.raises(ValueError):
        LossSpec("nope").validate()
    with pytest.raises(ValueError):
        LossSpec("gce", {"q": 2.0}).validate()
    with pytest.raises(ValueError):
        LossSpec("sce", {"log_zero": 1.0}).validate()
    with pytest.raises(ValueError):
        LossSpec("fcl", {"mu0": 1.5}).validate()
    with pytest.raises(ValueError):
        LossSpec("apl", {"active": "ce"}).validate()


def test_batch_eval_matches_per_sample():
    rng = np.random.default_rng(3)
    P = rng.dirichlet(np.ones(6), size=32)
    y = rng.integers(0, 6, size=32)
    values, grad_p, grad_mu = batch_eval(LossSpec("fcl", {"mu0": 0.3}), P, y)
    for i in range(len(y)):
        single = losses.fcl(P[i], int(y[i]), 0.3)
        assert values[i] == pytest.approx(single.value, rel=1e-14)
        assert np.allclose(grad_p[i], single.grad_p, rtol=1e-14)
        assert grad_mu[i] == pytest.approx(single.grad_mu, rel=1e-14)
    ce_values, _, ce_grad_mu = batch_eval(LossSpec("ce"), P, y)
    assert ce_grad_mu is None
    assert np.all(ce_values > 0)


def test_batch_eval_mu_override():
    P = np.atleast_2d(vec(0.4))
    with_default, _, _ = batch_eval(LossSpec("fcl", {"mu0": 0.2}), P, [0])
    overridden, _, _ = batch_eval(LossSpec("fcl", {"mu0": 0.2}), P, [0], mu=0.9)
    assert with_default[0] == pytest.approx(losses.fcl(P[0], 0, 0.2).value)
    assert overridden[0] == pytest.approx(losses.fcl(P[0], 0, 0.9).value)


def test_is_mu_parametric():
    assert losses.is_mu_parametric(LossSpec("fcl"))
    assert losses.is_mu_parametric(LossSpec("apl", {"active": "fce", "passive": "mae"}))
    assert not losses.is_mu_parametric(LossSpec("sce"))
    assert not losses.is_mu_parametric(LossSpec("ce"))
