import math

import numpy as np
import pytest

from errors import DegenerateDenominatorError, DomainError
from limitlaw.oracles import rv_limit_variance, skew_limit_variance
from limitlaw.samplers import (
    ABS_CUBE_MOMENT,
    abs_cubic_limit_sample,
    draw_auxiliary,
    r_variables,
    skew_limit_sample,
    thm2_limit_sample,
)
from models.limit_law import LimitLawParams
from models.path_record import JumpRecord


def params_with(iq=0.5, jumps=((1.0, 0.5, 0.8), (-0.5, 0.8, 0.5)), abs_cubic_sigma=0.2):
    ledger = tuple(
        JumpRecord(time=0.1 * (position + 1), size=size, sigma_minus=minus, sigma_plus=plus)
        for position, (size, minus, plus) in enumerate(jumps)
    )
    qv = iq + sum(size**2 for size, _, _ in jumps)
    return LimitLawParams(
        iq=iq,
        qv=qv,
        abs_cubic_sigma=abs_cubic_sigma,
        cubic_jump_sum=sum(size**3 for size, _, _ in jumps),
        jumps=ledger,
    )


def test_auxiliary_shapes_and_draw_count():
    auxiliary = draw_auxiliary(params_with(), 10, seed=0)
    assert auxiliary.u0.shape == (10,)
    assert auxiliary.kappa.shape == (10, 2)
    assert ((auxiliary.kappa >= 0.0) & (auxiliary.kappa < 1.0)).all()
    with pytest.raises(DomainError):
        draw_auxiliary(params_with(), 0, seed=0)


def test_components_share_the_same_jump_variables():
    params = params_with()
    draws = thm2_limit_sample(params, "cube", 1000, seed=1)
    r = r_variables(params, draws.auxiliary)
    sizes = params.jump_sizes
    np.testing.assert_allclose(draws.jump, r @ (3.0 * sizes**2))
    np.testing.assert_allclose(draws.continuous, math.sqrt(2.0 * params.iq) * draws.auxiliary.u0 + r @ (2.0 * sizes))


def test_continuous_path_has_no_jump_component():
    params = params_with(jumps=())
    draws = thm2_limit_sample(params, "square", 100, seed=2)
    np.testing.assert_array_equal(draws.jump, 0.0)
    np.testing.assert_allclose(draws.continuous, math.sqrt(1.0) * draws.auxiliary.u0)


def test_rv_limit_variance_matches_the_draws():
    params = params_with()
    draws = thm2_limit_sample(params, "square", 200_000, seed=3)
    assert np.var(draws.continuous) == pytest.approx(rv_limit_variance(params), rel=0.03)


def test_skew_limit_variance_matches_the_draws():
    params = params_with()
    draws = skew_limit_sample(params, 200_000, seed=4)
    assert np.mean(draws) == pytest.approx(0.0, abs=0.02)
    assert np.var(draws) == pytest.approx(skew_limit_variance(params), rel=0.03)


def test_abs_cubic_limit_is_centered_at_the_volatility_term():
    params = params_with()
    draws = abs_cubic_limit_sample(params, 100_000, seed=5)
    assert np.mean(draws) == pytest.approx(ABS_CUBE_MOMENT * 0.2, abs=0.03)


def test_same_key_reproduces_draws():
    first = skew_limit_sample(params_with(), 50, seed=6, key=(2, 3))
    second = skew_limit_sample(params_with(), 50, seed=6, key=(2, 3))
    np.testing.assert_array_equal(first, second)


def test_skew_limit_needs_quadratic_variation():
    params = LimitLawParams(iq=0.0, qv=0.0)
    with pytest.raises(DegenerateDenominatorError):
        skew_limit_sample(params, 10, seed=0)
