import math

import pytest

from vorstokes.continuation import continue_branch, epsilon_homotopy
from vorstokes.strip_solver import StripOperator, default_grid
from vorstokes.sturm_liouville import SLProblem, find_bifurcation_point
from vorstokes.vorticity import GerstnerVorticity, ZeroVorticity, functionals

G = 9.81
L = math.pi
EPS_RUN = 0.01
SCHEDULE = [0.1, 0.05, 0.025, 0.0125, 0.00625]


@pytest.fixture(scope="session")
def zero_setup():
    """(model, functionals, bifurcation point, strip operator) for gamma = 0."""
    model = ZeroVorticity()
    fn = functionals(model)
    bp = find_bifurcation_point(SLProblem(model, g=G, L=L, epsilon=EPS_RUN))
    grid = default_grid(L, bp.lambda_star, EPS_RUN, nq=64)
    op = StripOperator(model, G, grid, epsilon=EPS_RUN)
    return model, fn, bp, op


@pytest.fixture(scope="session")
def gerstner_setup():
    model = GerstnerVorticity(m=0.5)
    fn = functionals(model)
    bp = find_bifurcation_point(SLProblem(model, g=G, L=L, epsilon=EPS_RUN))
    grid = default_grid(L, bp.lambda_star, EPS_RUN, nq=64)
    op = StripOperator(model, G, grid, epsilon=EPS_RUN)
    return model, fn, bp, op


@pytest.fixture(scope="session")
def zero_branch(zero_setup):
    """Thirty accepted points on the irrotational branch."""
    _, _, bp, op = zero_setup
    branch = continue_branch(op, bp, steps=30, ds=0.00075, s0=0.005, tol=1e-11)
    assert len(branch.points) == 30
    return branch


@pytest.fixture(scope="session")
def gerstner_branch(gerstner_setup):
    _, _, bp, op = gerstner_setup
    branch = continue_branch(op, bp, steps=30, ds=0.00075, s0=0.005, tol=1e-11)
    assert len(branch.points) == 30
    return branch


@pytest.fixture(scope="session")
def zero_homotopy(zero_setup):
    model, _, bp, op = zero_setup
    return epsilon_homotopy(model, G, op.grid, SCHEDULE, target_s=0.02, tol=1e-11)
