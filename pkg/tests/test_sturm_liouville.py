import math

import numpy as np
import pytest
from scipy.optimize import brentq

from vorstokes.errors import BifurcationAbsentError, DomainError, NoDiscreteEigenvalue
from vorstokes.sturm_liouville import (
    BifurcationPoint,
    SLProblem,
    eigenfunction_decay_rate,
    find_bifurcation_point,
    fitted_tail_rate,
    lowest_eigenvalue,
    rayleigh_quotient,
)
from vorstokes.vorticity import (
    ExpDecayVorticity,
    GerstnerVorticity,
    ZeroVorticity,
    functionals,
)

G = 9.81
L = math.pi


def zero_prob(eps=0.0, **kw):
    return SLProblem(ZeroVorticity(), g=G, L=L, epsilon=eps, **kw)


def cubic_root_oracle(eps, g=G, half_period=L):
    """Independent root of eps*lam^3 + (pi/L)^2 lam^2 = g^2."""
    return brentq(
        lambda lam: eps * lam**3 + (math.pi / half_period) ** 2 * lam**2 - g**2,
        1e-6,
        100.0,
        xtol=1e-14,
    )


# -- Rayleigh quotient ---------------------------------------------------------


def test_rayleigh_quotient_exponential_trial():
    # For gamma = 0 and v = e^p the quotient is lam - 2 g / sqrt(lam).
    rq = rayleigh_quotient(zero_prob(), 4.0, lambda p: np.exp(p))
    assert rq == pytest.approx(4.0 - 2.0 * G / 2.0, rel=5e-3)


def test_rayleigh_quotient_epsilon_term():
    rq = rayleigh_quotient(zero_prob(eps=0.5), 4.0, lambda p: np.exp(p))
    assert rq == pytest.approx(4.0 * 1.5 - 2.0 * G / 2.0, rel=1e-2)


def test_rayleigh_quotient_of_eigenfunction_is_mu():
    prob = zero_prob(eps=0.01)
    bp = find_bifurcation_point(prob)
    fine = SLProblem(
        ZeroVorticity(), g=G, L=L, epsilon=0.01, n=2 * prob.n, depth=bp.p[0] * -1.0
    )
    rq = rayleigh_quotient(fine, bp.lambda_star, bp.phi)
    # the eigenvector is the raw-grid one at the extrapolated root, so the
    # self-consistency holds to the raw grid error, not the polished one
    assert rq == pytest.approx(-((math.pi / L) ** 2), rel=1e-4)


def test_rayleigh_quotient_rejects_zero_trial():
    prob = zero_prob()
    with pytest.raises(DomainError):
        rayleigh_quotient(prob, 4.0, np.zeros(prob.n))


def test_rayleigh_quotient_nondecreasing_in_epsilon():
    vals = [
        rayleigh_quotient(zero_prob(eps=e), 5.0, lambda p: np.exp(0.7 * p))
        for e in (0.0, 0.1, 0.3, 0.6, 0.9)
    ]
    assert np.all(np.diff(vals) > 0.0)


# -- lowest eigenvalue ---------------------------------------------------------


def test_lowest_eigenvalue_dispersion_point():
    # v = e^(kp) with lam^(3/2) k = g; at lam = gL/pi this gives mu = -(pi/L)^2.
    mu = lowest_eigenvalue(zero_prob(), G * L / math.pi)
    assert mu == pytest.approx(-((math.pi / L) ** 2), rel=1e-3)


def test_lowest_eigenvalue_closed_form_lambda4():
    # k = g / lam^(3/2) = 1.22625, mu = -lam k^2.
    mu = lowest_eigenvalue(zero_prob(), 4.0)
    assert mu == pytest.approx(-(G**2) / 16.0, rel=1e-2)


def test_lowest_eigenvalue_no_discrete_signal():
    # For large lam and eps near 1 the minimum exceeds the continuum floor.
    with pytest.raises(NoDiscreteEigenvalue):
        lowest_eigenvalue(zero_prob(eps=0.99), 90.0)


def test_lowest_eigenvalue_monotone_in_lambda():
    prob = zero_prob(eps=0.05)
    lams = np.linspace(3.0, 12.0, 20)
    mus = []
    for lam in lams:
        try:
            mus.append(lowest_eigenvalue(prob, lam))
        except NoDiscreteEigenvalue:
            mus.append(np.nan)
    mus = np.asarray(mus)
    neg = mus[~np.isnan(mus) & (mus < 0.0)]
    assert len(neg) > 5
    assert np.all(np.diff(neg) > 0.0)


# -- bifurcation point ---------------------------------------------------------


def test_bifurcation_point_irrotational_dispersion():
    bp = find_bifurcation_point(zero_prob())
    assert bp.lambda_star == pytest.approx(G * L / math.pi, rel=1e-6)


def test_bifurcation_point_shorter_period():
    bp = find_bifurcation_point(SLProblem(ZeroVorticity(), g=G, L=2.0, epsilon=0.0))
    assert bp.lambda_star == pytest.approx(2.0 * G / math.pi, rel=1e-6)


def test_bifurcation_point_regularized_cubic_root():
    bp = find_bifurcation_point(zero_prob(eps=0.01))
    assert bp.lambda_star == pytest.approx(cubic_root_oracle(0.01), rel=1e-6)


def test_bifurcation_point_interval_membership():
    for model in (ExpDecayVorticity(1.0, 1.0), GerstnerVorticity(m=0.5)):
        fn = functionals(model)
        bp = find_bifurcation_point(SLProblem(model, g=G, L=L, epsilon=0.01))
        lo = -2.0 * fn.gamma_inf_bound
        hi = G * L / math.pi + abs(2.0 * fn.gamma_inf_bound) + 1.0
        assert lo < bp.lambda_star <= hi


def test_bifurcation_point_eigenfunction_positive():
    bp = find_bifurcation_point(zero_prob(eps=0.02))
    assert bp.phi[-1] == 1.0
    assert np.all(bp.phi[:-1] > 0.0)


def test_bifurcation_absent_for_hopeless_caps():
    # Restricting lambda_max below the root leaves no bracket.
    prob = SLProblem(ZeroVorticity(), g=G, L=L, epsilon=0.0, lambda_max=2.0)
    with pytest.raises(BifurcationAbsentError):
        find_bifurcation_point(prob)


def test_epsilon_convergence_first_order():
    lam0 = find_bifurcation_point(zero_prob()).lambda_star
    eps_list = [0.1, 0.05, 0.025, 0.0125, 0.00625]
    errs = []
    for eps in eps_list:
        lam = find_bifurcation_point(zero_prob(eps=eps)).lambda_star
        # each regularized point matches the independent cubic-root oracle
        assert lam == pytest.approx(cubic_root_oracle(eps), rel=1e-6)
        errs.append(abs(lam - lam0))
    errs = np.asarray(errs)
    assert np.all(np.diff(errs) < 0.0)
    # first-order convergence: err <= C * eps with C near |dlam/deps| = lam0^2/2
    assert np.all(errs <= 1.1 * (lam0**2 / 2.0) * np.asarray(eps_list))
    # local order approaches one from below as eps -> 0
    local = np.log2(errs[:-1] / errs[1:])
    assert np.all(np.diff(local) > 0.0)
    assert local[-1] > 0.85


def test_grid_convergence_of_lambda():
    base = zero_prob(eps=0.01)
    refined = SLProblem(
        ZeroVorticity(), g=G, L=L, epsilon=0.01, n=2 * base.n, depth=base.depth * 1.5
    )
    la = find_bifurcation_point(base).lambda_star
    lb = find_bifurcation_point(refined).lambda_star
    assert abs(la - lb) < 1e-6


# -- decay rates ---------------------------------------------------------------


def test_decay_rate_bound_irrotational():
    fn = functionals(ZeroVorticity())
    bp = find_bifurcation_point(zero_prob())
    assert eigenfunction_decay_rate(bp, fn) == pytest.approx(1.0 / 9.81, rel=1e-6)


def test_fitted_tail_rate_exceeds_bound():
    fn = functionals(ZeroVorticity())
    bp = find_bifurcation_point(zero_prob())
    fitted = fitted_tail_rate(bp.p, bp.phi)
    assert fitted == pytest.approx(math.pi / (L * math.sqrt(bp.lambda_star)), rel=1e-2)
    assert fitted >= eigenfunction_decay_rate(bp, fn) - 1e-9


def test_decay_rate_degenerate_limit():
    # As lambda + 2*Gamma_inf -> 0+ with Gamma_sup > Gamma_inf the guaranteed
    # rate collapses to zero.
    fn = functionals(ExpDecayVorticity(1.0, 1.0))  # Gamma_inf = -1, Gamma_sup = 0
    floor = -2.0 * fn.gamma_inf_bound
    rates = []
    for offset in (1e-2, 1e-6, 1e-10):
        bp = BifurcationPoint(
            epsilon=0.0,
            lambda_star=floor + offset,
            mu=-1.0,
            p=np.array([-1.0, 0.0]),
            phi=np.array([0.5, 1.0]),
            g=G,
            L=L,
        )
        rates.append(eigenfunction_decay_rate(bp, fn))
    assert np.all(np.diff(rates) < 0.0)
    assert rates[-1] < 1e-4


def test_eigenfunction_decay_for_rotational_model():
    model = ExpDecayVorticity(1.0, 1.0)
    fn = functionals(model)
    bp = find_bifurcation_point(SLProblem(model, g=G, L=L, epsilon=0.01))
    fitted = fitted_tail_rate(bp.p, bp.phi)
    assert fitted >= eigenfunction_decay_rate(bp, fn) - 1e-9
