import math

import numpy as np
import pytest
from scipy.integrate import quad

from vorstokes.errors import DomainError
from vorstokes.vorticity import (
    ExpDecayVorticity,
    GerstnerVorticity,
    TabulatedVorticity,
    VorticityFunctionals,
    ZeroVorticity,
    check_bifurcation_condition,
    functionals,
    model_from_config,
    model_to_config,
)

G = 9.81


def test_gamma_zero_kind():
    assert ZeroVorticity().gamma(1.7) == 0.0


def test_gamma_expdecay_analytic():
    model = ExpDecayVorticity(amplitude=1.0, rate=1.0)
    assert model.gamma(1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)


def test_gamma_gerstner_m_zero_collapses():
    model = GerstnerVorticity(m=0.0)
    for r in (0.0, 0.3, 5.0):
        assert model.gamma(r) == 0.0


def test_gamma_rejects_negative_argument():
    with pytest.raises(DomainError):
        ZeroVorticity().gamma(-0.1)


def test_big_gamma_zero_kind():
    assert ZeroVorticity().big_gamma(-5.0) == 0.0


def test_big_gamma_expdecay_antiderivative_and_quadrature():
    model = ExpDecayVorticity(amplitude=1.0, rate=1.0)
    # closed form Gamma(p) = e^p - 1
    assert model.big_gamma(-1.0) == pytest.approx(math.exp(-1.0) - 1.0, rel=1e-12)
    # independent quadrature oracle
    ref, _ = quad(lambda pp: model.gamma(-pp), 0.0, -1.0)
    assert model.big_gamma(-1.0) == pytest.approx(ref, rel=1e-10)


def test_big_gamma_expdecay_depth_limit():
    model = ExpDecayVorticity(amplitude=1.0, rate=1.0)
    assert model.gamma_total() == pytest.approx(-1.0, abs=1e-14)
    assert model.big_gamma(-60.0) == pytest.approx(-1.0, abs=1e-12)


def test_big_gamma_rejects_positive_argument():
    with pytest.raises(DomainError):
        ExpDecayVorticity().big_gamma(0.5)


def test_functionals_zero():
    fn = functionals(ZeroVorticity())
    assert (fn.gamma_inf_bound, fn.gamma_sup_bound, fn.gamma_total) == (0.0, 0.0, 0.0)


def test_functionals_expdecay_positive_amplitude():
    fn = functionals(ExpDecayVorticity(amplitude=1.0, rate=1.0))
    assert fn.gamma_inf_bound == pytest.approx(-1.0, abs=1e-10)
    assert fn.gamma_sup_bound == pytest.approx(0.0, abs=1e-10)
    assert fn.gamma_total == pytest.approx(-1.0, abs=1e-12)


def test_functionals_expdecay_negative_amplitude():
    fn = functionals(ExpDecayVorticity(amplitude=-1.0, rate=1.0))
    assert fn.gamma_inf_bound == pytest.approx(0.0, abs=1e-10)
    assert fn.gamma_sup_bound == pytest.approx(1.0, abs=1e-10)
    assert fn.gamma_total == pytest.approx(1.0, abs=1e-12)


def test_functionals_ordering_invariant():
    with pytest.raises(DomainError):
        VorticityFunctionals(gamma_inf_bound=0.5, gamma_sup_bound=1.0, gamma_total=0.7)


def test_bifurcation_condition_zero_vorticity():
    cond = check_bifurcation_condition(ZeroVorticity(), g=G, L=math.pi)
    assert cond.holds
    assert cond.margin == pytest.approx(G, abs=1e-12)
    assert cond.integral == pytest.approx(0.0, abs=1e-12)


def test_bifurcation_condition_expdecay_closed_form():
    # Gamma - Gamma_inf = e^p, so the integrand is
    # 2*(2 e^p)^(3/2) e^(2p) + (pi/L)^2 (2 e^p)^(1/2) e^(2p) with L = pi,
    # integrating to 2^(5/2)*2/7 + 2^(1/2)*2/5.
    expected = 2.0 ** 2.5 * 2.0 / 7.0 + math.sqrt(2.0) * 2.0 / 5.0
    cond = check_bifurcation_condition(ExpDecayVorticity(1.0, 1.0), g=G, L=math.pi)
    assert cond.holds
    assert cond.integral == pytest.approx(expected, rel=1e-7)
    assert cond.margin == pytest.approx(G - expected, rel=1e-6)


def test_bifurcation_condition_fails_for_large_amplitude():
    # The integral grows monotonically with |amplitude|; bisection on the
    # scale locates the crossing, beyond which the condition must fail.
    lo, hi = 1.0, 400.0
    assert check_bifurcation_condition(ExpDecayVorticity(lo, 1.0), G, math.pi).holds
    assert not check_bifurcation_condition(ExpDecayVorticity(hi, 1.0), G, math.pi).holds
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if check_bifurcation_condition(ExpDecayVorticity(mid, 1.0), G, math.pi).holds:
            lo = mid
        else:
            hi = mid
    assert not check_bifurcation_condition(ExpDecayVorticity(hi * 1.01, 1.0), G, math.pi).holds
    assert check_bifurcation_condition(ExpDecayVorticity(lo * 0.99, 1.0), G, math.pi).holds


def test_bifurcation_condition_monotone_under_scaling():
    # Scaling gamma by t in (0, 1] shrinks Gamma - Gamma_inf pointwise, so a
    # holding condition can never flip to failing as t decreases.
    base = 40.0
    previous_holds = False
    for t in np.linspace(1.0, 0.05, 12):
        holds = check_bifurcation_condition(ExpDecayVorticity(base * t, 1.0), G, math.pi).holds
        assert not (previous_holds and not holds)
        previous_holds = holds


def test_gamma_is_an_antiderivative_of_big_gamma():
    rng = np.random.default_rng(7)
    models = [
        ExpDecayVorticity(0.8, 1.3),
        GerstnerVorticity(m=0.5),
        TabulatedVorticity([[0.0, 0.4], [1.0, 0.1], [2.0, 0.02], [3.0, 0.0]]),
    ]
    h = 1e-5
    for model in models:
        p = -rng.uniform(h, 20.0, size=50)
        dgdp = (model.big_gamma(p + h) - model.big_gamma(p - h)) / (2.0 * h)
        target = model.gamma(-p)
        scale = np.maximum(np.abs(target), 1e-3)
        assert np.max(np.abs(dgdp - target) / scale) < 1e-6


def test_big_gamma_between_bounds_random_p():
    rng = np.random.default_rng(11)
    for model in (
        ExpDecayVorticity(1.0, 1.0),
        ExpDecayVorticity(-0.7, 2.0),
        GerstnerVorticity(m=0.7),
    ):
        fn = functionals(model)
        p = -rng.uniform(0.0, 80.0, size=1000)
        g = model.big_gamma(p)
        assert np.all(g >= fn.gamma_inf_bound - 1e-10)
        assert np.all(g <= fn.gamma_sup_bound + 1e-10)


def test_gerstner_sign_pattern():
    model = GerstnerVorticity(m=0.5)
    r = np.linspace(0.0, 30.0, 200)
    assert np.all(model.gamma(r) < 0.0)
    assert np.all(model.gamma_prime(r) > 0.0)
    assert model.gamma_nonpos and model.gamma_prime_nonneg


def test_gerstner_gamma_total_closed_form():
    m = 0.5
    model = GerstnerVorticity(m=m)
    ref, _ = quad(model.gamma, 0.0, 60.0)
    assert model.gamma_total() == pytest.approx(-ref, rel=1e-10)
    assert model.gamma_total() == pytest.approx(-math.log1p(-m**2 * math.exp(-2.0)), rel=1e-12)


def test_gerstner_custom_b_matches_default():
    # A custom callable identical to the default must reproduce the
    # closed-form primitives through the quadrature path.
    default = GerstnerVorticity(m=0.6)
    custom = GerstnerVorticity(m=0.6, b_fn=lambda psi: -1.0 - psi)
    p = -np.linspace(0.0, 25.0, 40)
    assert np.allclose(custom.big_gamma(p), default.big_gamma(p), atol=1e-10)
    assert custom.gamma_total() == pytest.approx(default.gamma_total(), abs=1e-10)


def test_tabulated_requires_terminal_zero():
    with pytest.raises(DomainError):
        TabulatedVorticity([[0.0, 1.0], [1.0, 0.5], [2.0, 0.3]])


def test_tabulated_clamps_beyond_last_knot():
    model = TabulatedVorticity([[0.0, 0.5], [1.0, 0.2], [2.0, 0.0]])
    assert model.gamma(5.0) == 0.0
    assert model.big_gamma(-10.0) == pytest.approx(model.big_gamma(-2.0), abs=1e-14)


def test_decay_envelope_expdecay():
    # |gamma(r)| r^(2+2*rho) must stay bounded; exponential decay makes the
    # weighted tail collapse well before r = 60.
    model = ExpDecayVorticity(1.0, 1.0, rho=1.0)
    r = np.linspace(15.0, 60.0, 50)
    weighted = np.abs(model.gamma(r)) * r ** (2.0 + 2.0 * model.rho)
    assert np.all(weighted < 0.1)
    assert np.all(np.diff(weighted) < 0.0)


def test_config_roundtrip():
    models = [
        ZeroVorticity(rho=2.0),
        ExpDecayVorticity(-0.3, 1.5, rho=0.5),
        GerstnerVorticity(m=0.4, rho=1.0),
        TabulatedVorticity([[0.0, 0.1], [0.5, 0.05], [1.5, 0.0]], rho=1.0),
    ]
    for model in models:
        clone = model_from_config(model_to_config(model))
        r = np.linspace(0.0, 3.0, 17)
        assert np.allclose(clone.gamma(r), model.gamma(r), atol=1e-14)
        assert clone.rho == model.rho


def test_config_rejects_unknown_kind():
    with pytest.raises(DomainError):
        model_from_config({"kind": "mystery"})
