import math

import numpy as np
import pytest

from fracloss import specialfn


def test_gamma_small_integers():
    assert specialfn.gamma(1.0) == pytest.approx(1.0, rel=1e-14)
    assert specialfn.gamma(2.0) == pytest.approx(1.0, rel=1e-14)
    assert specialfn.gamma(6.0) == pytest.approx(120.0, rel=1e-13)


def test_gamma_half_integer_closed_form():
    # gamma(1.5) = sqrt(pi) / 2, known analytically
    assert specialfn.gamma(1.5) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-13)


@pytest.mark.parametrize("z", [0.0, -1.0, -0.5, 21.0, float("nan")])
def test_gamma_domain_errors(z):
    with pytest.raises(ValueError):
        specialfn.gamma(z)
    with pytest.raises(ValueError):
        specialfn.digamma(z)


def test_digamma_known_values():
    assert specialfn.digamma(1.0) == pytest.approx(-specialfn.EULER_GAMMA, abs=1e-12)
    assert specialfn.digamma(2.0) == pytest.approx(1.0 - specialfn.EULER_GAMMA, abs=1e-12)


@pytest.mark.parametrize("z", [1.1, 1.5, 1.9])
def test_digamma_matches_log_gamma_finite_difference(z):
    h = 1e-6
    fd = (math.log(specialfn.gamma(z + h)) - math.log(specialfn.gamma(z - h))) / (2.0 * h)
    assert specialfn.digamma(z) == pytest.approx(fd, abs=1e-6)


def test_gamma_recurrence_on_grid():
    for z in np.arange(0.5, 10.01, 0.25):
        lhs = specialfn.gamma(z + 1.0)
        assert abs(lhs - z * specialfn.gamma(z)) <= 1e-11 * abs(lhs)


def test_digamma_recurrence_on_grid():
    for z in np.arange(0.5, 10.01, 0.25):
        assert specialfn.digamma(z + 1.0) == pytest.approx(
            specialfn.digamma(z) + 1.0 / z, abs=1e-9
        )


def test_weierstrass_product_converges_to_gamma():
    assert specialfn.gamma_weierstrass(1.0, 10**6) == pytest.approx(1.0, abs=1e-6)
    assert specialfn.gamma_weierstrass(1.5, 10**6) == pytest.approx(
        math.sqrt(math.pi) / 2.0, abs=1e-5
    )
    for z in (0.7, 1.3, 1.9):
        assert abs(specialfn.gamma_weierstrass(z, 10**6) - specialfn.gamma(z)) < 1e-5


def test_weierstrass_error_decreases_monotonically():
    target = specialfn.gamma(1.5)
    errs = [abs(specialfn.gamma_weierstrass(1.5, n) - target) for n in (100, 1000, 10000)]
    assert errs[0] > errs[1] > errs[2]


def test_weierstrass_rejects_bad_terms():
    with pytest.raises(ValueError):
        specialfn.gamma_weierstrass(1.5, 0)
    with pytest.raises(ValueError):
        specialfn.gamma_weierstrass(-1.0, 100)


def test_bounded_results_cover_true_value():
    res = specialfn.gamma_weierstrass_bounded(1.5, 10**4)
    assert res.absolute_error_bound >= 0.0
    assert abs(res.value - specialfn.gamma(1.5)) <= res.absolute_error_bound
    for z in (0.5, 1.0, 7.5, 20.0):
        for maker in (specialfn.gamma_bounded, specialfn.digamma_bounded):
            out = maker(z)
            assert math.isfinite(out.value)
            assert out.absolute_error_bound >= 0.0
