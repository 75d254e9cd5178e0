"""Vorticity distributions for rotational deep-water waves.

The vorticity of the flow is prescribed as a function gamma(r) of the
stream function, r >= 0.  This module provides the admissible model kinds
together with every derived scalar the solvers consume:

* ``Gamma(p) = int_0^p gamma(-p') dp'`` for p <= 0, with ``Gamma(0) = 0``,
* its infimum/supremum over p <= 0 and its infinite-depth limit,
* the integral criterion deciding whether a small-amplitude wave branch
  bifurcates from the shear-flow family for given gravity and half-period.

Admissible models decay at depth, ``gamma(r) = O(r^(-2-2*rho))`` for some
rho > 0, so that Gamma stays bounded on the half-line.  All models are
immutable and safe to share between concurrent solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline, CubicSpline, PchipInterpolator

from .errors import DomainError, QuadratureError

__all__ = [
    "VorticityModel",
    "ZeroVorticity",
    "ExpDecayVorticity",
    "GerstnerVorticity",
    "TabulatedVorticity",
    "VorticityFunctionals",
    "BifurcationCondition",
    "functionals",
    "check_bifurcation_condition",
    "model_to_config",
    "model_from_config",
]

# Tolerance for locating the depth beyond which Gamma is indistinguishable
# from its limit.
TAIL_TOL = 1e-12


def _as_nonneg_array(r, name="r"):
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise DomainError(f"{name} must be nonnegative, got minimum {arr.min()!r}")
    return arr


def _as_nonpos_array(p, name="p"):
    arr = np.asarray(p, dtype=float)
    if np.any(arr > 0):
        raise DomainError(f"{name} must be nonpositive, got maximum {arr.max()!r}")
    return arr


class VorticityModel:
    """Common interface: gamma(r), gamma'(r), and the antiderivative Gamma(p).

    Subclasses implement ``_gamma_impl``, ``_gamma_prime_impl`` and
    ``_primitive_impl`` (G(r) = int_0^r gamma).  ``big_gamma`` then follows
    from Gamma(p) = -G(-p).
    """

    kind = "abstract"
    rho: float = 1.0

    # -- pointwise evaluation -------------------------------------------------

    def gamma(self, r):
        """Vorticity value gamma(r) for r >= 0; scalar in, scalar out."""
        arr = _as_nonneg_array(r)
        out = self._gamma_impl(arr)
        return float(out) if np.isscalar(r) or np.ndim(r) == 0 else out

    def gamma_prime(self, r):
        """Derivative gamma'(r) for r >= 0."""
        arr = _as_nonneg_array(r)
        out = self._gamma_prime_impl(arr)
        return float(out) if np.isscalar(r) or np.ndim(r) == 0 else out

    def big_gamma(self, p):
        """Gamma(p) = int_0^p gamma(-p') dp' for p <= 0; Gamma(0) = 0 exactly."""
        arr = _as_nonpos_array(p)
        out = -self._primitive_impl(-arr)
        return float(out) if np.isscalar(p) or np.ndim(p) == 0 else out

    def gamma_total(self):
        """Limit of Gamma(p) as p -> -infinity (improper integral)."""
        return -self._primitive_limit()

    # -- sign traits used to route the maximum-principle checks ---------------

    @property
    def gamma_nonneg(self) -> bool:
        raise NotImplementedError

    @property
    def gamma_nonpos(self) -> bool:
        raise NotImplementedError

    @property
    def gamma_prime_nonneg(self) -> bool:
        raise NotImplementedError

    @property
    def gamma_prime_nonpos(self) -> bool:
        raise NotImplementedError

    def gamma_sup_value(self) -> float:
        """sup of gamma over [0, infinity), used in the pressure estimate."""
        raise NotImplementedError

    # -- numeric helpers -------------------------------------------------------

    def tail_depth(self) -> float:
        """Depth P with |Gamma(-P) - Gamma_total| < TAIL_TOL * scale."""
        scale = max(1.0, abs(self.gamma_total()))
        total = self.gamma_total()
        depth = 8.0
        for _ in range(60):
            if abs(self.big_gamma(-depth) - total) < TAIL_TOL * scale:
                return depth
            depth *= 2.0
        raise QuadratureError(
            "Gamma(p) does not settle to its limit; the decay hypothesis "
            "gamma(r) = O(r^(-2-2*rho)) appears to be violated",
            achieved=abs(self.big_gamma(-depth) - total),
        )

    # subclass hooks

    def _gamma_impl(self, r):
        raise NotImplementedError

    def _gamma_prime_impl(self, r):
        raise NotImplementedError

    def _primitive_impl(self, r):
        raise NotImplementedError

    def _primitive_limit(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroVorticity(VorticityModel):
    """Irrotational flow, gamma identically zero."""

    rho: float = 1.0
    kind = "zero"

    def _gamma_impl(self, r):
        return np.zeros_like(r)

    def _gamma_prime_impl(self, r):
        return np.zeros_like(r)

    def _primitive_impl(self, r):
        return np.zeros_like(r)

    def _primitive_limit(self):
        return 0.0

    @property
    def gamma_nonneg(self):
        return True

    @property
    def gamma_nonpos(self):
        return True

    @property
    def gamma_prime_nonneg(self):
        return True

    @property
    def gamma_prime_nonpos(self):
        return True

    def gamma_sup_value(self):
        return 0.0


@dataclass(frozen=True)
class ExpDecayVorticity(VorticityModel):
    """gamma(r) = amplitude * exp(-r / rate).

    Positive amplitude gives a nonnegative vorticity that is monotone with
    depth; negative amplitude gives the nonpositive monotone class.  The
    antiderivative is closed-form, Gamma(p) = amplitude*rate*(e^(p/rate)-1),
    which the quadrature-based paths cross-check in the tests.
    """

    amplitude: float = 1.0
    rate: float = 1.0
    rho: float = 1.0
    kind = "expdecay"

    def __post_init__(self):
        if self.rate <= 0:
            raise DomainError("decay rate must be positive")

    def _gamma_impl(self, r):
        return self.amplitude * np.exp(-r / self.rate)

    def _gamma_prime_impl(self, r):
        return -(self.amplitude / self.rate) * np.exp(-r / self.rate)

    def _primitive_impl(self, r):
        return self.amplitude * self.rate * (1.0 - np.exp(-r / self.rate))

    def _primitive_limit(self):
        return self.amplitude * self.rate

    @property
    def gamma_nonneg(self):
        return self.amplitude >= 0

    @property
    def gamma_nonpos(self):
        return self.amplitude <= 0

    @property
    def gamma_prime_nonneg(self):
        return self.amplitude <= 0

    @property
    def gamma_prime_nonpos(self):
        return self.amplitude >= 0

    def gamma_sup_value(self):
        return max(0.0, self.amplitude)


def _default_gerstner_b(psi):
    # Affine map with b(0) = -1 and slope -1: stays in (-inf, 0), is strictly
    # decreasing, and makes gamma decay exponentially at depth so that Gamma
    # remains bounded.
    return -1.0 - psi


class GerstnerVorticity(VorticityModel):
    """Vorticity of trochoidal-wave type: gamma = -2 m^2 E / (1 - m^2 E).

    Here E = exp(2 b(psi)) with 0 <= m < 1 and a user-supplied strictly
    decreasing map b: [0, inf) -> (-inf, 0).  The sign pattern is what the
    downstream estimates rely on: gamma <= 0 and gamma' >= 0 for decreasing
    b.  The default b(psi) = -1 - psi yields closed-form primitives; a custom
    callable switches to cached spline quadrature.
    """

    kind = "gerstner"

    def __init__(self, m: float, b_fn=None, rho: float = 1.0):
        if not 0.0 <= m < 1.0:
            raise DomainError("Gerstner parameter m must lie in [0, 1)")
        self.m = float(m)
        self.rho = float(rho)
        self._custom_b = b_fn is not None
        self.b_fn = b_fn if b_fn is not None else _default_gerstner_b
        b0 = float(self.b_fn(0.0))
        if b0 >= 0.0:
            raise DomainError("b(psi) must be negative")
        self._spline_cache = None

    def _E(self, r):
        return np.exp(2.0 * np.asarray(self.b_fn(np.asarray(r, dtype=float)), dtype=float))

    def _gamma_impl(self, r):
        E = self._E(r)
        return -2.0 * self.m**2 * E / (1.0 - self.m**2 * E)

    def _gamma_prime_impl(self, r):
        if not self._custom_b:
            E = self._E(r)
            # d/dr with b' = -1: gamma' = 4 m^2 E / (1 - m^2 E)^2
            return 4.0 * self.m**2 * E / (1.0 - self.m**2 * E) ** 2
        h = 1e-6
        rr = np.asarray(r, dtype=float)
        return (self._gamma_impl(rr + h) - self._gamma_impl(np.maximum(rr - h, 0.0))) / (
            h + np.minimum(rr, h)
        )

    def _primitive_impl(self, r):
        if not self._custom_b:
            # G(r) = -[ln(1 - m^2 e^(2b(r))) - ln(1 - m^2 e^(2b(0)))] for slope -1
            m2 = self.m**2
            return -(np.log1p(-m2 * self._E(r)) - math.log1p(-m2 * math.exp(-2.0)))
        return self._spline()(np.minimum(np.asarray(r, dtype=float), self._spline_depth))

    def _primitive_limit(self):
        if not self._custom_b:
            return math.log1p(-self.m**2 * math.exp(-2.0))
        return float(self._spline()(self._spline_depth))

    def _spline(self):
        # Cumulative primitive of gamma on a fine fixed-density grid; the
        # depth doubles until the mass in the last quarter is negligible.
        if self._spline_cache is None:
            depth = 16.0
            for _ in range(20):
                rr = np.linspace(0.0, depth, int(depth * 256) + 1)
                prim = CubicSpline(rr, self._gamma_impl(rr)).antiderivative()
                tail = abs(float(prim(depth)) - float(prim(0.75 * depth)))
                if tail < TAIL_TOL * max(1.0, abs(float(prim(depth)))):
                    self._spline_cache = prim
                    self._spline_depth = depth
                    break
                depth *= 2.0
            else:
                raise QuadratureError("Gerstner primitive did not converge; check b_fn decay")
        return self._spline_cache

    @property
    def gamma_nonneg(self):
        return self.m == 0.0

    @property
    def gamma_nonpos(self):
        return True

    @property
    def gamma_prime_nonneg(self):
        return True

    @property
    def gamma_prime_nonpos(self):
        return self.m == 0.0

    def gamma_sup_value(self):
        return 0.0

    def __repr__(self):
        tag = "custom-b" if self._custom_b else "default-b"
        return f"GerstnerVorticity(m={self.m}, {tag}, rho={self.rho})"


class TabulatedVorticity(VorticityModel):
    """C1 monotone-cubic interpolant through (r, gamma) knots.

    The knots must start at r = 0 and end with gamma = 0; beyond the last
    knot the model is clamped to zero with zero slope, which preserves the
    decay hypothesis.
    """

    kind = "tabulated"

    def __init__(self, knots, rho: float = 1.0):
        pts = np.asarray(knots, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise DomainError("knots must be an (n, 2) array with n >= 3")
        r, g = pts[:, 0], pts[:, 1]
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise DomainError("knot abscissae must start at 0 and increase strictly")
        if g[-1] != 0.0:
            raise DomainError("last knot value must be 0 so the zero clamp stays C1")
        slopes = PchipInterpolator(r, g).derivative()(r)
        slopes[-1] = 0.0
        self._spline = CubicHermiteSpline(r, g, slopes)
        self._prim = self._spline.antiderivative()
        self.r_last = float(r[-1])
        self.knots = pts
        self.rho = float(rho)

    def _gamma_impl(self, r):
        rr = np.asarray(r, dtype=float)
        return np.where(rr > self.r_last, 0.0, self._spline(np.minimum(rr, self.r_last)))

    def _gamma_prime_impl(self, r):
        rr = np.asarray(r, dtype=float)
        d = self._spline.derivative()
        return np.where(rr > self.r_last, 0.0, d(np.minimum(rr, self.r_last)))

    def _primitive_impl(self, r):
        rr = np.asarray(r, dtype=float)
        return self._prim(np.minimum(rr, self.r_last))

    def _primitive_limit(self):
        return float(self._prim(self.r_last))

    def _dense_gamma(self):
        rr = np.linspace(0.0, self.r_last, 2049)
        return rr, self._gamma_impl(rr)

    @property
    def gamma_nonneg(self):
        return bool(np.all(self._dense_gamma()[1] >= -1e-14))

    @property
    def gamma_nonpos(self):
        return bool(np.all(self._dense_gamma()[1] <= 1e-14))

    @property
    def gamma_prime_nonneg(self):
        rr = self._dense_gamma()[0]
        return bool(np.all(self._gamma_prime_impl(rr) >= -1e-12))

    @property
    def gamma_prime_nonpos(self):
        rr = self._dense_gamma()[0]
        return bool(np.all(self._gamma_prime_impl(rr) <= 1e-12))

    def gamma_sup_value(self):
        return max(0.0, float(self._dense_gamma()[1].max()))

    def __repr__(self):
        return f"TabulatedVorticity({len(self.knots)} knots, rho={self.rho})"


@dataclass(frozen=True)
class VorticityFunctionals:
    """Derived scalar functionals of a vorticity model.

    ``gamma_inf_bound``/``gamma_sup_bound`` are the infimum and supremum of
    Gamma over p <= 0; ``gamma_total`` is the infinite-depth limit of Gamma.
    """

    gamma_inf_bound: float
    gamma_sup_bound: float
    gamma_total: float

    def __post_init__(self):
        tol = 1e-10 * max(1.0, abs(self.gamma_total))
        if not (self.gamma_inf_bound <= tol and self.gamma_sup_bound >= -tol):
            raise DomainError("Gamma(0) = 0 must lie between the inf and sup bounds")
        if not (
            self.gamma_inf_bound - tol <= self.gamma_total <= self.gamma_sup_bound + tol
        ):
            raise DomainError("the depth limit of Gamma must lie between its bounds")


def functionals(model: VorticityModel) -> VorticityFunctionals:
    """Compute Gamma_inf, Gamma_sup and the depth limit of Gamma.

    Extrema are taken over a refining grid of p <= 0 together with the
    p -> -infinity limit; refinement stops once both bounds settle below
    1e-10 absolute change.
    """
    total = model.gamma_total()
    depth = model.tail_depth()
    lo = hi = None
    n = 1025
    for _ in range(6):
        p = -np.linspace(0.0, depth, n)
        g = model.big_gamma(p)
        new_lo = min(float(np.min(g)), total)
        new_hi = max(float(np.max(g)), total)
        if lo is not None and abs(new_lo - lo) < 1e-10 and abs(new_hi - hi) < 1e-10:
            lo, hi = new_lo, new_hi
            break
        lo, hi = new_lo, new_hi
        n = 2 * (n - 1) + 1
    return VorticityFunctionals(gamma_inf_bound=lo, gamma_sup_bound=hi, gamma_total=total)


@dataclass(frozen=True)
class BifurcationCondition:
    """Result of the small-amplitude bifurcation criterion.

    ``holds`` is True when the integral falls strictly below gravity;
    ``margin`` is g minus the integral value.
    """

    holds: bool
    margin: float
    integral: float


def check_bifurcation_condition(
    model: VorticityModel, g: float, L: float
) -> BifurcationCondition:
    """Evaluate the sufficient condition for a bifurcation point to exist.

    The criterion integrates
        2*(2*Gamma - 2*Gamma_inf)^(3/2) + (pi/L)^2 * (2*Gamma - 2*Gamma_inf)^(1/2)
    against e^(2p) over p in (-inf, 0] and compares the value with g.
    """
    if g <= 0 or L <= 0:
        raise DomainError("gravity and half-period must be positive")
    fn = functionals(model)
    depth = max(model.tail_depth(), 40.0)
    n = 8193
    p = -np.linspace(0.0, depth, n)[::-1]
    q = 2.0 * model.big_gamma(p) - 2.0 * fn.gamma_inf_bound
    q = np.maximum(q, 0.0)
    integrand = (2.0 * q**1.5 + (math.pi / L) ** 2 * np.sqrt(q)) * np.exp(2.0 * p)
    value = float(simpson(integrand, x=p))
    return BifurcationCondition(holds=value < g, margin=g - value, integral=value)


# -- serialization -------------------------------------------------------------


def model_to_config(model: VorticityModel) -> dict:
    """Serialize a model as a flat key/value block (kind, parameters, rho)."""
    if isinstance(model, ZeroVorticity):
        return {"kind": "zero", "rho": model.rho}
    if isinstance(model, ExpDecayVorticity):
        return {
            "kind": "expdecay",
            "amplitude": model.amplitude,
            "rate": model.rate,
            "rho": model.rho,
        }
    if isinstance(model, GerstnerVorticity):
        if model._custom_b:
            raise DomainError("a Gerstner model with a custom b map is not serializable")
        return {"kind": "gerstner", "m": model.m, "rho": model.rho}
    if isinstance(model, TabulatedVorticity):
        return {
            "kind": "tabulated",
            "knots": [[float(a), float(b)] for a, b in model.knots],
            "rho": model.rho,
        }
    raise DomainError(f"unknown model type {type(model)!r}")


def model_from_config(block: dict) -> VorticityModel:
    """Inverse of :func:`model_to_config`."""
    kind = str(block.get("kind", "")).lower()
    rho = float(block.get("rho", 1.0))
    if rho <= 0:
        raise DomainError("decay exponent rho must be positive")
    if kind == "zero":
        return ZeroVorticity(rho=rho)
    if kind == "expdecay":
        return ExpDecayVorticity(
            amplitude=float(block.get("amplitude", 1.0)),
            rate=float(block.get("rate", 1.0)),
            rho=rho,
        )
    if kind == "gerstner":
        return GerstnerVorticity(m=float(block.get("m", 0.5)), rho=rho)
    if kind == "tabulated":
        return TabulatedVorticity(block["knots"], rho=rho)
    raise DomainError(f"unknown vorticity kind {kind!r}")
