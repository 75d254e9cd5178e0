"""Singular Sturm-Liouville analysis locating the bifurcation point.

For each regularization strength epsilon in [0, 1) the linearization about
the shear-flow family admits a separated mode Phi(p) cos(pi q / L) exactly
when the half-line eigenvalue problem

    -(a^3(lambda) v')' + eps a^3(lambda) v = mu a(lambda) v   on (-inf, 0),
    lambda^(3/2) v'(0) = g v(0),        v, v' -> 0 at -infinity,

has mu = -(pi/L)^2 as its lowest generalized eigenvalue.  The lowest value
Lambda(lambda) is the infimum of the Rayleigh quotient

    R(v; lambda) = (-g v(0)^2 + int a^3 (v')^2 + eps int a^3 v^2)
                   / int a v^2,

it is a discrete eigenvalue only while it stays below the continuous
spectrum [eps, inf), and it increases monotonically with lambda while
negative.  The unique root of Lambda(lambda) = -(pi/L)^2 is the
bifurcation parameter.

Discretization: the quadratic forms are assembled on a uniform grid with a
Dirichlet cut-off at depth (midpoint stiffness, trapezoid mass), giving a
symmetric tridiagonal pencil whose smallest eigenvalue is second-order
accurate; the root finder removes the leading grid error by Richardson
extrapolation across a grid doubling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import BifurcationAbsentError, DomainError, NoDiscreteEigenvalue
from .vorticity import VorticityFunctionals, VorticityModel, functionals

__all__ = [
    "SLProblem",
    "BifurcationPoint",
    "rayleigh_quotient",
    "lowest_eigenvalue",
    "find_bifurcation_point",
    "eigenfunction_decay_rate",
    "fitted_tail_rate",
]

DEFAULT_NODES = 2000
BRACKET_SEED = 0.1
BISECTION_RTOL = 1e-10


@dataclass
class SLProblem:
    """Half-line eigenvalue problem for one vorticity model and one epsilon.

    The truncation depth defaults to twenty decay lengths of the slowest
    admissible mode, estimated from the largest bracketed lambda.
    """

    model: VorticityModel
    g: float = 9.81
    L: float = math.pi
    epsilon: float = 0.0
    n: int = DEFAULT_NODES
    depth: float = None
    lambda_max: float = None
    fn: VorticityFunctionals = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise DomainError("epsilon must lie in [0, 1)")
        if self.g <= 0 or self.L <= 0:
            raise DomainError("gravity and half-period must be positive")
        if self.n < 8:
            raise DomainError("need at least 8 grid nodes")
        if self.fn is None:
            self.fn = functionals(self.model)
        if self.lambda_max is None:
            self.lambda_max = 10.0 * self.g * self.L / math.pi
        if self.depth is None:
            k_est = math.pi / (self.L * math.sqrt(self.lambda_max))
            self.depth = 20.0 / k_est
        self._gamma_cache = {}

    def p_nodes(self, n=None):
        """Uniform grid from -depth up to 0, n interior-plus-boundary nodes."""
        n = self.n if n is None else n
        return np.linspace(-self.depth, 0.0, n + 1)

    def _big_gamma(self, key, p):
        if key not in self._gamma_cache:
            self._gamma_cache[key] = self.model.big_gamma(p)
        return self._gamma_cache[key]

    def forms(self, lam, n=None):
        """Quadratic-form factors (stiffness diag/offdiag, mass diag) and grid.

        The Dirichlet row at the bottom node is eliminated; arrays refer to
        the remaining nodes p_1 .. p_n with p_n = 0.
        """
        n = self.n if n is None else n
        p = self.p_nodes(n)
        dp = p[1] - p[0]
        pm = 0.5 * (p[:-1] + p[1:])
        gam_mid = self._big_gamma(("mid", n), pm)
        gam_nod = self._big_gamma(("nod", n), p)
        a2_mid = lam + 2.0 * gam_mid
        a2_nod = lam + 2.0 * gam_nod
        if a2_mid.min() <= 0.0 or a2_nod.min() <= 0.0:
            raise DomainError(f"lambda = {lam:.6g} is below the admissible floor")
        a3_mid = a2_mid**1.5
        a1_nod = np.sqrt(a2_nod)
        a3_nod = a2_nod * a1_nod

        w = np.full(n + 1, dp)
        w[0] = w[-1] = 0.5 * dp

        # stiffness: sum a^3_mid (v_{i+1}-v_i)^2 / dp; boundary term -g v(0)^2
        k_off = -a3_mid / dp                      # couples p_i, p_{i+1}
        k_diag = np.zeros(n + 1)
        k_diag[:-1] += a3_mid / dp
        k_diag[1:] += a3_mid / dp
        k_diag += self.epsilon * w * a3_nod
        k_diag[-1] -= self.g
        m_diag = w * a1_nod

        # drop the Dirichlet node at -depth
        return k_diag[1:], k_off[1:], m_diag[1:], p[1:]


def rayleigh_quotient(prob: SLProblem, lam: float, v) -> float:
    """Discrete Rayleigh quotient of a trial function.

    ``v`` may be a callable of p or an array on ``prob.p_nodes()[1:]``.
    Uses the same quadratic forms as the eigensolver, so the quotient of a
    computed eigenfunction reproduces its eigenvalue exactly.
    """
    k_diag, k_off, m_diag, p = prob.forms(lam)
    vv = np.asarray(v(p) if callable(v) else v, dtype=float)
    if vv.shape != p.shape:
        raise DomainError(f"trial function must have {p.shape[0]} samples")
    den = float(vv @ (m_diag * vv))
    if den <= 0.0:
        raise DomainError("trial function is identically zero")
    num = float(vv @ (k_diag * vv) + 2.0 * (vv[:-1] * k_off * vv[1:]).sum())
    return num / den


def _smallest_pair(prob, lam, n=None):
    k_diag, k_off, m_diag, p = prob.forms(lam, n)
    scale = 1.0 / np.sqrt(m_diag)
    d = k_diag * scale**2
    e = k_off * scale[:-1] * scale[1:]
    vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
    v = vecs[:, 0] * scale
    if v[-1] < 0.0:
        v = -v
    return float(vals[0]), v, p


def lowest_eigenvalue(prob: SLProblem, lam: float) -> float:
    """Lowest generalized eigenvalue Lambda(lambda).

    Raises
    ------
    NoDiscreteEigenvalue
        When the minimum does not fall below the continuous spectrum
        [epsilon, inf), i.e. no discrete eigenvalue exists.
    """
    mu, _, _ = _smallest_pair(prob, lam)
    if mu >= prob.epsilon:
        raise NoDiscreteEigenvalue(
            f"lowest Rayleigh value {mu:.6g} is not below the continuous "
            f"spectrum threshold {prob.epsilon:.6g}"
        )
    return mu


def _lambda_floor(prob):
    return -2.0 * prob.fn.gamma_inf_bound


@dataclass
class BifurcationPoint:
    """Bifurcation parameter and sampled eigenfunction for one epsilon."""

    epsilon: float
    lambda_star: float
    mu: float
    p: np.ndarray
    phi: np.ndarray
    g: float
    L: float

    def __post_init__(self):
        if self.phi[np.argmax(self.p)] != 1.0:
            raise DomainError("eigenfunction must be normalized to 1 at the surface")

    def phi_at(self, p):
        """Eigenfunction sampled at arbitrary p <= 0 (monotone interpolation)."""
        from scipy.interpolate import PchipInterpolator

        interp = PchipInterpolator(self.p, self.phi)
        pp = np.asarray(p, dtype=float)
        out = np.where(pp < self.p[0], 0.0, interp(np.maximum(pp, self.p[0])))
        return out if np.ndim(p) else float(out)


def find_bifurcation_point(prob: SLProblem) -> BifurcationPoint:
    """Locate lambda with Lambda(lambda) = -(pi/L)^2 and its eigenfunction.

    Brackets by doubling the offset above the admissible floor, then
    bisects; monotonicity of Lambda in lambda makes the root unique.  The
    returned lambda is Richardson-extrapolated across a grid doubling, and
    the final eigenfunction is re-sampled on a depth-adapted grid so that
    the truncation sits at roughly twenty-five decay lengths of the mode.

    Raises
    ------
    BifurcationAbsentError
        If no sign change occurs below ``prob.lambda_max``.
    """
    target = -((math.pi / prob.L) ** 2)
    floor = _lambda_floor(prob)

    def value(lam, n):
        mu, _, _ = _smallest_pair(prob, lam, n)
        return mu - target

    def richardson(lam, n):
        return (4.0 * value(lam, 2 * n) - value(lam, n)) / 3.0

    # coarse bracket on a cheap grid
    n_coarse = max(256, prob.n // 4)
    offset = BRACKET_SEED
    lo = floor + offset
    f_lo = value(lo, n_coarse)
    if f_lo >= 0.0:
        raise BifurcationAbsentError(
            f"lowest eigenvalue at the floor offset is already above the "
            f"target {target:.6g}; the bifurcation criterion fails"
        )
    hi = None
    while floor + offset <= prob.lambda_max:
        offset *= 2.0
        cand = min(floor + offset, prob.lambda_max)
        if value(cand, n_coarse) >= 0.0:
            hi = cand
            break
        lo = cand
    if hi is None:
        raise BifurcationAbsentError(
            f"no sign change of Lambda + (pi/L)^2 up to lambda_max = "
            f"{prob.lambda_max:.6g}"
        )
    for _ in range(12):  # cheap narrowing
        mid = 0.5 * (lo + hi)
        if value(mid, n_coarse) < 0.0:
            lo = mid
        else:
            hi = mid

    # adapt the depth to the located scale and polish with extrapolation
    lam_rough = 0.5 * (lo + hi)
    k_mode = math.sqrt(
        prob.epsilon + (math.pi / prob.L) ** 2 / (lam_rough + 2.0 * prob.fn.gamma_total)
    )
    depth = max(25.0 / k_mode, prob.model.tail_depth())
    fine = SLProblem(
        model=prob.model,
        g=prob.g,
        L=prob.L,
        epsilon=prob.epsilon,
        n=prob.n,
        depth=depth,
        lambda_max=prob.lambda_max,
        fn=prob.fn,
    )

    def f_fine(lam):
        return (4.0 * (_smallest_pair(fine, lam, 2 * fine.n)[0])
                - _smallest_pair(fine, lam, fine.n)[0]) / 3.0 - target

    # the coarse root can sit a few percent off; expand multiplicatively
    width = max(hi - lo, 0.05 * max(lam_rough - floor, 1e-3))
    lo = max(floor + 1e-12, lam_rough - width)
    hi = min(prob.lambda_max, lam_rough + width)
    f_lo, f_hi = f_fine(lo), f_fine(hi)
    for _ in range(40):
        if f_lo < 0.0 <= f_hi:
            break
        width *= 2.0
        if f_lo >= 0.0:
            lo = max(floor + 1e-12, lam_rough - width)
            f_lo = f_fine(lo)
        if f_hi < 0.0:
            hi = min(prob.lambda_max, lam_rough + width)
            f_hi = f_fine(hi)
        if lo <= floor + 1e-12 and hi >= prob.lambda_max:
            if not (f_lo < 0.0 <= f_hi):
                raise BifurcationAbsentError("could not re-bracket on the refined grid")
    else:
        raise BifurcationAbsentError("could not re-bracket on the refined grid")

    while hi - lo > BISECTION_RTOL * max(1.0, abs(hi)):
        mid = 0.5 * (lo + hi)
        if f_fine(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    lam_star = 0.5 * (lo + hi)

    _, v, p = _smallest_pair(fine, lam_star, 2 * fine.n)
    phi = v / v[-1]
    return BifurcationPoint(
        epsilon=prob.epsilon,
        lambda_star=lam_star,
        mu=target,
        p=p,
        phi=phi,
        g=prob.g,
        L=prob.L,
    )


def eigenfunction_decay_rate(bp: BifurcationPoint, fn: VorticityFunctionals) -> float:
    """Guaranteed lower bound on the eigenfunction decay rate.

    The comparison argument yields
    (lambda + 2*Gamma_inf)^(1/2) / (lambda + 2*Gamma_sup)^(3/2); the fitted
    tail slope of log|phi| must not fall below it.
    """
    num = bp.lambda_star + 2.0 * fn.gamma_inf_bound
    den = bp.lambda_star + 2.0 * fn.gamma_sup_bound
    if num < 0.0 or den <= 0.0:
        raise DomainError("bifurcation point below the admissible floor")
    return math.sqrt(num) / den**1.5


def fitted_tail_rate(p, values, floor=1e-13):
    """Least-squares slope of log|values| over the usable tail window.

    The window spans depths between 20% and 60% of the deepest sample whose
    magnitude stays above ``floor``; returns the decay rate (positive for
    decaying tails).
    """
    p = np.asarray(p, dtype=float)
    vals = np.abs(np.asarray(values, dtype=float))
    usable = vals > floor
    if usable.sum() < 8:
        raise DomainError("tail too short to fit a decay rate")
    deepest = float(p[usable].min())
    window = (p >= 0.6 * deepest) & (p <= 0.2 * deepest) & usable
    if window.sum() < 4:
        raise DomainError("tail window too short to fit a decay rate")
    slope = np.polyfit(p[window], np.log(vals[window]), 1)[0]
    return float(slope)
