"""Exact laminar shear flows under a flat surface.

For every admissible lambda the strip problem has the one-parameter family
of trivial solutions

    h_tr(p; lambda) = int_0^p (lambda + 2*Gamma(p'))^(-1/2) dp' - lambda/(2g),

whose derivative is the reciprocal of the coefficient

    a(p; lambda) = (lambda + 2*Gamma(p))^(1/2).

These flows seed the bifurcation analysis and enter every residual through
``a``.  The wave speed of the corresponding frame is fixed by the bottom
condition grad h -> (0, 1/c), giving c^2 = lambda + 2*Gamma_total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, StagnationDomainError
from .vorticity import (
    ExpDecayVorticity,
    VorticityFunctionals,
    VorticityModel,
    ZeroVorticity,
    functionals,
)

__all__ = ["ShearFlow", "wave_speed", "a_coeff", "h_trivial"]


def wave_speed(lam: float, fn: VorticityFunctionals) -> float:
    """Wave speed c = (lambda + 2*Gamma_total)^(1/2).

    Raises
    ------
    StagnationDomainError
        If the radicand is not positive, i.e. the flow cannot satisfy the
        infinite-bottom condition.
    """
    c_sq = lam + 2.0 * fn.gamma_total
    if c_sq <= 0.0:
        raise StagnationDomainError(
            f"lambda + 2*Gamma_total = {c_sq:.6g} must be positive for a wave speed"
        )
    return math.sqrt(c_sq)


@dataclass
class ShearFlow:
    """A trivial (flat-surface) solution of the strip problem.

    Parameters
    ----------
    model : VorticityModel
        Vorticity distribution.
    lam : float
        Bifurcation parameter, the square of the relative surface speed of
        the laminar flow.  Must exceed -2*Gamma_inf so the coefficient
        a(p; lambda) stays real and positive on the whole half-line.
    g : float
        Gravitational acceleration.
    """

    model: VorticityModel
    lam: float
    g: float = 9.81
    fn: VorticityFunctionals = field(default=None, repr=False)

    def __post_init__(self):
        if self.g <= 0:
            raise DomainError("gravity must be positive")
        if self.fn is None:
            self.fn = functionals(self.model)
        if self.lam + 2.0 * self.fn.gamma_inf_bound <= 0.0:
            raise StagnationDomainError(
                f"lambda = {self.lam:.6g} is not above the critical floor "
                f"{-2.0 * self.fn.gamma_inf_bound:.6g}"
            )
        self._h_spline = None
        self._h_depth = 0.0

    @property
    def c(self) -> float:
        """Wave speed of the flow."""
        return wave_speed(self.lam, self.fn)

    # -- coefficient -----------------------------------------------------------

    def a(self, p):
        """a(p; lambda) = (lambda + 2*Gamma(p))^(1/2), positive on p <= 0."""
        sq = self.a_squared(p)
        return np.sqrt(sq) if np.ndim(p) else float(math.sqrt(sq))

    def a_squared(self, p):
        sq = self.lam + 2.0 * np.asarray(self.model.big_gamma(p))
        if np.any(sq <= 0.0):
            raise StagnationDomainError(
                f"lambda + 2*Gamma(p) dropped to {float(np.min(sq)):.6g}"
            )
        return sq if np.ndim(p) else float(sq)

    # -- height function of the trivial flow ------------------------------------

    def h_tr(self, p):
        """Height h_tr(p) of the laminar flow; h_tr(0) = -lambda/(2g)."""
        offset = -self.lam / (2.0 * self.g)
        if isinstance(self.model, ZeroVorticity):
            return np.asarray(p) / math.sqrt(self.lam) + offset if np.ndim(p) else (
                p / math.sqrt(self.lam) + offset
            )
        if isinstance(self.model, ExpDecayVorticity):
            out = self._h_int_expdecay(np.asarray(p, dtype=float)) + offset
            return out if np.ndim(p) else float(out)
        out = self._h_int_spline(np.asarray(p, dtype=float)) + offset
        return out if np.ndim(p) else float(out)

    def h_tr_p(self, p):
        """First derivative h_tr'(p) = 1/a(p; lambda)."""
        return 1.0 / self.a(p)

    def h_tr_pp(self, p):
        """Second derivative h_tr''(p) = -gamma(-p) / a(p; lambda)^3."""
        pp = np.asarray(p, dtype=float)
        out = -self.model.gamma(-pp) / self.a(pp) ** 3
        return out if np.ndim(p) else float(out)

    # Closed form for the exponential kind: with C = lambda - 2*A*r0,
    # B = 2*A*r0, s(u) = sqrt(C + B*u), u = e^(p/r0), the antiderivative of
    # 1/sqrt(C + B*e^(p/r0)) evaluates, cancellation-free, to
    #   p/sqrt(C) - (2 r0/sqrt(C)) * ln((s(u) + sqrt(C)) / (s(1) + sqrt(C))).
    def _h_int_expdecay(self, p):
        A, r0 = self.model.amplitude, self.model.rate
        B = 2.0 * A * r0
        C = self.lam - B
        if B == 0.0:
            return p / math.sqrt(self.lam)
        if C <= 0.0:
            return self._h_int_spline(p)
        sqC = math.sqrt(C)
        s_u = np.sqrt(C + B * np.exp(p / r0))
        s_1 = math.sqrt(C + B)
        return p / sqC - (2.0 * r0 / sqC) * np.log((s_u + sqC) / (s_1 + sqC))

    def _h_int_spline(self, p):
        depth = max(8.0, float(-np.min(p)) * 1.25)
        if self._h_spline is None or depth > self._h_depth:
            grid = np.linspace(-depth, 0.0, 8193)
            vals = 1.0 / np.sqrt(self.a_squared(grid))
            self._h_spline = CubicSpline(grid, vals).antiderivative()
            self._h_depth = depth
        return self._h_spline(p) - self._h_spline(0.0)


def a_coeff(flow: ShearFlow, p) -> float:
    """Coefficient a(p; lambda) of a shear flow."""
    _check_nonpos(p)
    return flow.a(p)


def h_trivial(flow: ShearFlow, p) -> float:
    """Height h_tr(p) of the trivial flow."""
    _check_nonpos(p)
    return flow.h_tr(p)


def _check_nonpos(p):
    if np.any(np.asarray(p) > 0):
        raise DomainError("p must be nonpositive")
