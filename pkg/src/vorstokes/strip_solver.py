"""Quasilinear elliptic solver on the truncated hodograph strip.

The wave problem is posed for the deviation w(q, p) of the height function
from the laminar profile, on the half-period strip q in [-L, 0],
p in [-P, 0].  Evenness in q is built into the stencils by reflecting
across both q-ends, the infinite bottom is truncated with a homogeneous
Dirichlet row (justified by the exponential decay of solutions), and the
free-surface Bernoulli condition occupies the top row with a one-sided
second-order normal derivative.

The interior residual is

    F1 - eps*w = (1 + wq^2) wpp - 2 (a^-1 + wp) wq wpq + (a^-1 + wp)^2 wqq
                 + gamma(-p) (a^-1 + wp)^3 - gamma(-p) a^-3 (1 + wq^2)
                 - eps*w,

which vanishes identically (to rounding) on the laminar branch w = 0, and
the top-row residual is

    F2 = 1 + (2 g w - lambda) (lambda^-1/2 + wp)^2 + wq^2.

Newton's method with analytic linearization and sparse direct factorization
solves F = 0 inside the admissible set O_delta (parameter above the
critical floor, no stagnation, surface Bernoulli inequality).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.optimize import brentq
from scipy.sparse.linalg import splu

from .errors import (
    AdmissibilityError,
    DomainError,
    NewtonDivergenceError,
    SingularJacobianError,
    StagnationDomainError,
)
from .vorticity import VorticityModel, functionals

__all__ = ["StripGrid", "WaveState", "StripOperator", "default_grid", "linear_strip_mode"]

DELTA_DEFAULT = 1e-3


@dataclass(frozen=True)
class StripGrid:
    """Uniform tensor grid on the reduced strip [-L, 0] x [-P, 0]."""

    L: float
    P: float
    nq: int
    np: int

    def __post_init__(self):
        if self.L <= 0 or self.P <= 0:
            raise DomainError("half-period and truncation depth must be positive")
        if self.nq < 8 or self.np < 8:
            raise DomainError("need at least 8 nodes in each direction")

    @property
    def dq(self):
        return self.L / (self.nq - 1)

    @property
    def dp(self):
        return self.P / (self.np - 1)

    @property
    def q_nodes(self):
        return np.linspace(-self.L, 0.0, self.nq)

    @property
    def p_nodes(self):
        return np.linspace(-self.P, 0.0, self.np)

    def to_dict(self):
        return {"L": self.L, "P": self.P, "nq": self.nq, "np": self.np}

    @classmethod
    def from_dict(cls, d):
        return cls(L=float(d["L"]), P=float(d["P"]), nq=int(d["nq"]), np=int(d["np"]))


def default_grid(L, lam_hint, epsilon, nq=64, resolution=0.025):
    """Grid with the truncation at ten decay lengths of the slowest mode.

    ``resolution`` fixes the product of the expected vertical decay rate
    and the spacing dp, which controls the relative discretization error.
    """
    k_est = math.sqrt(max(epsilon, 0.0) + (math.pi / L) ** 2 / lam_hint)
    P = max(4.0 * L, 10.0 / k_est)
    n_p = max(64, int(round(P * k_est / resolution)) + 1)
    return StripGrid(L=L, P=P, nq=nq, np=n_p)


@dataclass
class WaveState:
    """One point on a solution branch in hodograph variables."""

    lam: float
    epsilon: float
    grid: StripGrid
    w: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if self.w.shape != (self.grid.np, self.grid.nq):
            raise DomainError(
                f"w must have shape {(self.grid.np, self.grid.nq)}, got {self.w.shape}"
            )

    def copy_with(self, lam=None, w=None):
        return WaveState(
            lam=self.lam if lam is None else float(lam),
            epsilon=self.epsilon,
            grid=self.grid,
            w=self.w.copy() if w is None else np.asarray(w, dtype=float),
        )

    def to_dict(self):
        return {
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "grid": self.grid.to_dict(),
            "w": [float(v) for v in self.w.ravel()],
        }

    @classmethod
    def from_dict(cls, d):
        grid = StripGrid.from_dict(d["grid"])
        w = np.asarray(d["w"], dtype=float).reshape(grid.np, grid.nq)
        return cls(lam=float(d["lambda"]), epsilon=float(d["epsilon"]), grid=grid, w=w)

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def save_surface_csv(self, path):
        """Write the surface trace w(q, 0) as a two-column CSV."""
        with open(path, "w") as fh:
            fh.write("q,w\n")
            for qv, wv in zip(self.grid.q_nodes, self.w[-1]):
                fh.write(f"{float(qv)!r},{float(wv)!r}\n")


def _pad_reflect_q(w):
    # ghost columns mirror the interior neighbour, enforcing evenness at
    # both q-ends of the reduced domain
    return np.pad(w, ((0, 0), (1, 1)), mode="reflect")


def derivative_fields(grid: StripGrid, w: np.ndarray):
    """All finite-difference fields used by the residual and its checks.

    Centered second-order stencils inside; one-sided second-order wp on the
    top and bottom rows; reflection ghosts across the q-ends.
    """
    dq, dp = grid.dq, grid.dp
    wpad = _pad_reflect_q(w)
    wq = (wpad[:, 2:] - wpad[:, :-2]) / (2.0 * dq)
    wqq = (wpad[:, 2:] - 2.0 * w + wpad[:, :-2]) / dq**2

    wp = np.empty_like(w)
    wp[1:-1] = (w[2:] - w[:-2]) / (2.0 * dp)
    wp[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dp)
    wp[-1] = (3.0 * w[-1] - 4.0 * w[-2] + w[-3]) / (2.0 * dp)

    wpp = np.zeros_like(w)
    wpp[1:-1] = (w[2:] - 2.0 * w[1:-1] + w[:-2]) / dp**2

    wpq = np.zeros_like(w)
    wpq[1:-1] = (wq[2:] - wq[:-2]) / (2.0 * dp)

    return {"wq": wq, "wp": wp, "wqq": wqq, "wpp": wpp, "wpq": wpq}


class StripOperator:
    """Residual, linearization and Newton solver for one model and grid.

    Holds the cached vorticity samples on the grid; immutable after
    construction, so distinct solves can share it across threads.
    """

    def __init__(self, model: VorticityModel, g: float, grid: StripGrid,
                 epsilon: float, delta: float = DELTA_DEFAULT, fn=None):
        if not 0.0 <= epsilon < 1.0:
            raise DomainError("epsilon must lie in [0, 1)")
        if delta <= 0.0:
            raise DomainError("the admissibility margin delta must be positive")
        self.model = model
        self.g = float(g)
        self.grid = grid
        self.epsilon = float(epsilon)
        self.delta = float(delta)
        self.fn = functionals(model) if fn is None else fn
        p = grid.p_nodes
        self.big_gamma_p = np.asarray(model.big_gamma(p))
        self.gamma_p = np.asarray(model.gamma(-p))

    # -- coefficient rows --------------------------------------------------------

    def _ainv_rows(self, lam):
        a_sq = lam + 2.0 * self.big_gamma_p
        if np.any(a_sq <= 0.0):
            raise StagnationDomainError(
                f"lambda + 2*Gamma(p) reaches {float(a_sq.min()):.6g} on the grid"
            )
        return 1.0 / np.sqrt(a_sq)

    # -- admissibility -------------------------------------------------------------

    def check_admissible(self, state: WaveState):
        """Raise AdmissibilityError naming the clause and node on violation."""
        lam, w, g = state.lam, state.w, self.g
        floor = -2.0 * self.fn.gamma_inf_bound + self.delta
        if not lam > floor:
            raise AdmissibilityError(
                "lambda must exceed the critical floor plus delta", value=lam
            )
        ainv = self._ainv_rows(lam)[:, None]
        hp = ainv + derivative_fields(self.grid, w)["wp"]
        if np.any(hp <= self.delta):
            i, j = np.unravel_index(int(np.argmin(hp)), hp.shape)
            raise AdmissibilityError(
                "no-stagnation clause a^-1 + wp > delta", node=(i, j),
                value=float(hp[i, j]),
            )
        cap = (2.0 * lam - self.delta) / (4.0 * g)
        top = w[-1]
        if np.any(top >= cap):
            j = int(np.argmax(top))
            raise AdmissibilityError(
                "surface clause w < (2*lambda - delta)/(4g)",
                node=(self.grid.np - 1, j), value=float(top[j]),
            )

    def is_admissible(self, state: WaveState) -> bool:
        try:
            self.check_admissible(state)
        except AdmissibilityError:
            return False
        return True

    # -- residual -------------------------------------------------------------------

    def residual_f1(self, state: WaveState):
        """Interior residual F1 - eps*w on rows 1 .. np-2 (all columns)."""
        self.check_admissible(state)
        return self._residual_fields(state)[0]

    def residual_f2(self, state: WaveState):
        """Top-row residual F2 (Bernoulli) along the surface."""
        self.check_admissible(state)
        return self._residual_fields(state)[1]

    def _residual_fields(self, state):
        lam, w = state.lam, state.w
        d = derivative_fields(self.grid, w)
        ainv = self._ainv_rows(lam)[:, None]
        gam = self.gamma_p[:, None]

        sl = slice(1, -1)
        hp = ainv[sl] + d["wp"][sl]
        wq, wqq, wpp, wpq = d["wq"][sl], d["wqq"][sl], d["wpp"][sl], d["wpq"][sl]
        f1 = (
            (1.0 + wq**2) * wpp
            - 2.0 * hp * wq * wpq
            + hp**2 * wqq
            + gam[sl] * hp**3
            - gam[sl] * ainv[sl] ** 3 * (1.0 + wq**2)
            - self.epsilon * w[sl]
        )

        hp_top = lam**-0.5 + d["wp"][-1]
        f2 = 1.0 + (2.0 * self.g * w[-1] - lam) * hp_top**2 + d["wq"][-1] ** 2
        return f1, f2

    def residual_vector(self, state: WaveState):
        """Full residual with bottom Dirichlet rows, flattened row-major."""
        f1, f2 = self._residual_fields(state)
        r = np.empty((self.grid.np, self.grid.nq))
        r[0] = state.w[0]
        r[1:-1] = f1
        r[-1] = f2
        return r.ravel()

    def residual_norm(self, state: WaveState) -> float:
        f1, f2 = self._residual_fields(state)
        return max(
            float(np.max(np.abs(f1))),
            float(np.max(np.abs(f2))),
            float(np.max(np.abs(state.w[0]))),
        )

    # -- linearization ----------------------------------------------------------------

    def jacobian(self, state: WaveState):
        """Sparse derivative of the residual vector in w (CSC)."""
        rows, cols, vals = self._jacobian_triplets(state)
        n = self.grid.np * self.grid.nq
        return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()

    def _jacobian_triplets(self, state):
        grid = self.grid
        nq, n_p = grid.nq, grid.np
        dq, dp = grid.dq, grid.dp
        lam, w = state.lam, state.w
        d = derivative_fields(grid, w)
        ainv = self._ainv_rows(lam)[:, None]
        gam = self.gamma_p[:, None]

        rows, cols, vals = [], [], []
        jj = np.arange(nq)

        def fold(j):
            # ghost column indices reflect back into the domain
            return np.where(j < 0, -j, np.where(j >= nq, 2 * nq - 2 - j, j))

        def emit(i_eq, i_nb, j_nb, coeff):
            # J[(i_eq, j), (i_nb, fold(j_nb))] += coeff
            m = i_eq.shape[0]
            rows.append((i_eq * nq + jj[None, :]).ravel())
            cols.append(np.broadcast_to(i_nb * nq + fold(j_nb), (m, nq)).ravel())
            vals.append(np.broadcast_to(coeff, (m, nq)).ravel())

        # interior PDE rows
        ii = np.arange(1, n_p - 1)[:, None]
        sl = slice(1, -1)
        hp = ainv[sl] + d["wp"][sl]
        wq, wqq, wpp, wpq = d["wq"][sl], d["wqq"][sl], d["wpp"][sl], d["wpq"][sl]
        c_pp = 1.0 + wq**2
        c_pq = -2.0 * hp * wq
        c_qq = hp**2
        c_p = -2.0 * wq * wpq + 2.0 * hp * wqq + 3.0 * gam[sl] * hp**2
        c_q = 2.0 * wq * wpp - 2.0 * hp * wpq - 2.0 * gam[sl] * ainv[sl] ** 3 * wq

        emit(ii, ii + 1, jj[None, :], c_pp / dp**2 + c_p / (2.0 * dp))
        emit(ii, ii - 1, jj[None, :], c_pp / dp**2 - c_p / (2.0 * dp))
        emit(ii, ii, jj[None, :] + 1, c_qq / dq**2 + c_q / (2.0 * dq))
        emit(ii, ii, jj[None, :] - 1, c_qq / dq**2 - c_q / (2.0 * dq))
        emit(ii, ii, jj[None, :], -2.0 * c_pp / dp**2 - 2.0 * c_qq / dq**2 - self.epsilon)
        cross = c_pq / (4.0 * dp * dq)
        emit(ii, ii + 1, jj[None, :] + 1, cross)
        emit(ii, ii - 1, jj[None, :] - 1, cross)
        emit(ii, ii + 1, jj[None, :] - 1, -cross)
        emit(ii, ii - 1, jj[None, :] + 1, -cross)

        # top Bernoulli rows
        it = np.array([[n_p - 1]])
        hp_top = lam**-0.5 + d["wp"][-1]
        c_bp = 2.0 * (2.0 * self.g * w[-1] - lam) * hp_top
        c_bq = 2.0 * d["wq"][-1]
        c_b0 = 2.0 * self.g * hp_top**2
        emit(it, it, jj[None, :], c_b0 + c_bp * 3.0 / (2.0 * dp))
        emit(it, it - 1, jj[None, :], -c_bp * 4.0 / (2.0 * dp))
        emit(it, it - 2, jj[None, :], c_bp / (2.0 * dp))
        emit(it, it, jj[None, :] + 1, c_bq / (2.0 * dq))
        emit(it, it, jj[None, :] - 1, -c_bq / (2.0 * dq))

        # bottom Dirichlet rows
        ib = np.array([[0]])
        emit(ib, ib, jj[None, :], np.ones((1, nq)))

        return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)

    def d_residual_d_lambda(self, state: WaveState):
        """Analytic derivative of the residual vector in lambda."""
        grid = self.grid
        lam, w = state.lam, state.w
        d = derivative_fields(grid, w)
        ainv = self._ainv_rows(lam)[:, None]
        gam = self.gamma_p[:, None]
        out = np.zeros((grid.np, grid.nq))

        sl = slice(1, -1)
        hp = ainv[sl] + d["wp"][sl]
        a3 = ainv[sl] ** 3
        dainv = -0.5 * a3
        out[1:-1] = (
            dainv * (-2.0 * d["wq"][sl] * d["wpq"][sl] + 2.0 * hp * d["wqq"][sl]
                     + 3.0 * gam[sl] * hp**2)
            + 1.5 * gam[sl] * ainv[sl] ** 5 * (1.0 + d["wq"][sl] ** 2)
        )
        hp_top = lam**-0.5 + d["wp"][-1]
        out[-1] = -hp_top**2 - (2.0 * self.g * w[-1] - lam) * hp_top * lam**-1.5
        return out.ravel()

    # -- Newton ------------------------------------------------------------------------

    def newton_solve(self, state: WaveState, tol: float = 1e-10,
                     max_iter: int = 25) -> tuple[WaveState, dict]:
        """Solve F(lambda, w) = 0 at fixed lambda starting from ``state``.

        Every iterate is kept inside O_delta by halving the update (at most
        thirty times).  Returns the converged state and an info dict with
        the iteration count and final residual.
        """
        self.check_admissible(state)
        current = state.copy_with()
        res = self.residual_norm(current)
        if res <= tol:
            return current, {"iterations": 0, "residual": res}
        for it in range(1, max_iter + 1):
            J = self.jacobian(current)
            try:
                lu = splu(J)
            except RuntimeError as exc:
                raise SingularJacobianError(f"factorization failed: {exc}") from exc
            step = lu.solve(-self.residual_vector(current))
            trial, alpha = None, 1.0
            for _ in range(30):
                cand = current.copy_with(
                    w=current.w + alpha * step.reshape(current.w.shape)
                )
                if self.is_admissible(cand):
                    trial = cand
                    break
                alpha *= 0.5
            if trial is None:
                raise AdmissibilityError(
                    "no damped Newton step stays inside O_delta"
                )
            current = trial
            res = self.residual_norm(current)
            if res <= tol:
                return current, {"iterations": it, "residual": res}
        raise NewtonDivergenceError(
            f"Newton did not reach tol {tol:.2g} in {max_iter} iterations",
            residual=res, iterations=max_iter,
        )


def linear_strip_mode(op: StripOperator, lam_hint: float):
    """Discrete bifurcation point of the strip operator itself.

    The linearization about w = 0 separates in the first cosine mode; this
    reduces it to a tridiagonal boundary value problem in p whose top-row
    residual vanishes exactly at the discrete bifurcation parameter.
    Returns (lambda, Phi) with Phi sampled on the grid's p nodes and
    normalized to one at the surface.  Used for seeding and as a
    consistency oracle against the half-line eigenvalue solver.
    """
    grid = op.grid
    dp, dq = grid.dp, grid.dq
    n = grid.np - 1
    sigma_q = (2.0 - 2.0 * math.cos(math.pi * dq / grid.L)) / dq**2

    def solve_phi(lam):
        ainv = op._ainv_rows(lam)
        gam = op.gamma_p
        # rows i = 1 .. n-1 for unknowns Phi_1 .. Phi_{n-1}; Phi_0 = 0, Phi_n = 1
        i = np.arange(1, n)
        lower = 1.0 / dp**2 - 3.0 * gam[i] * ainv[i] ** 2 / (2.0 * dp)
        diag = -2.0 / dp**2 - sigma_q * ainv[i] ** 2 - op.epsilon
        upper = 1.0 / dp**2 + 3.0 * gam[i] * ainv[i] ** 2 / (2.0 * dp)
        rhs = np.zeros(n - 1)
        rhs[-1] = -upper[-1]
        ab = np.zeros((3, n - 1))
        ab[0, 1:] = upper[:-1]
        ab[1] = diag
        ab[2, :-1] = lower[1:]
        phi_int = solve_banded((1, 1), ab, rhs)
        phi = np.concatenate([[0.0], phi_int, [1.0]])
        return phi

    def top_residual(lam):
        phi = solve_phi(lam)
        phi_p = (3.0 * phi[-1] - 4.0 * phi[-2] + phi[-3]) / (2.0 * dp)
        return -2.0 * math.sqrt(lam) * phi_p + 2.0 * op.g / lam

    width = 0.05 * lam_hint
    lo, hi = lam_hint - width, lam_hint + width
    f_lo, f_hi = top_residual(lo), top_residual(hi)
    for _ in range(30):
        if f_lo * f_hi < 0.0:
            break
        width *= 2.0
        lo = max(lam_hint - width, -2.0 * op.fn.gamma_inf_bound + 1e-9)
        hi = lam_hint + width
        f_lo, f_hi = top_residual(lo), top_residual(hi)
    else:
        raise DomainError("no sign change for the discrete mode residual")
    lam_d = brentq(top_residual, lo, hi, xtol=1e-12)
    return lam_d, solve_phi(lam_d)
