"""Branch continuation for the regularized strip problem.

From the bifurcation point (lambda_eps, 0) a branch of nontrivial waves
emerges along s * Phi(p) cos(pi q / L) + O(s^2).  This module traces it by
pseudo-arclength continuation with a bordered Newton corrector (which stays
nonsingular across folds), re-converges branches across a decreasing
sequence of regularization strengths at a fixed branch coordinate, and
classifies why a trace stopped.

The branch coordinate s is the signed first-cosine coefficient of the
surface trace; it matches the local parameterization near the bifurcation
point and is grid-independent.  The arclength metric weights the field
component by 1/sqrt(node count) for the same reason.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import (
    AdmissibilityError,
    DomainError,
    NewtonDivergenceError,
    SingularJacobianError,
)
from .shear_flow import wave_speed
from .strip_solver import StripOperator, WaveState, derivative_fields
from .sturm_liouville import BifurcationPoint

__all__ = [
    "Termination",
    "Caps",
    "Branch",
    "HomotopyResult",
    "surface_mode_amplitude",
    "initial_nontrivial_guess",
    "solve_bordered",
    "branch_tangent",
    "arclength_step",
    "classify_termination",
    "continue_branch",
    "solve_at_amplitude",
    "epsilon_homotopy",
]

DS_FLOOR = 1e-6


class Termination(enum.Enum):
    RUNNING = "Running"
    MAX_STEPS = "MaxSteps"
    LAMBDA_BLOWUP = "LambdaBlowup"
    SUP_W_BLOWUP = "SupWBlowup"
    SUP_WP_BLOWUP = "SupWpBlowup"
    LAMBDA_FLOOR = "LambdaFloor"
    STAGNATION_CLAUSE = "StagnationClause"
    SURFACE_CLAUSE = "SurfaceClause"


@dataclass(frozen=True)
class Caps:
    """Desk-scale surrogates for the unbounded-branch alternatives."""

    lambda_cap: float
    w_cap: float = 1e3
    wp_cap: float = 1e3

    @classmethod
    def default(cls, g, L):
        return cls(lambda_cap=100.0 * g * L / math.pi)


def surface_mode_amplitude(state: WaveState) -> float:
    """Signed first-cosine coefficient of the surface trace."""
    grid = state.grid
    q = grid.q_nodes
    mode = np.cos(math.pi * q / grid.L)
    return float((2.0 / grid.L) * np.trapezoid(state.w[-1] * mode, q))


def _mode_weights(grid) -> np.ndarray:
    """Row vector of d(surface_mode_amplitude)/dw on the flattened field."""
    q = grid.q_nodes
    tw = np.full(grid.nq, grid.dq)
    tw[0] = tw[-1] = 0.5 * grid.dq
    row = np.zeros(grid.np * grid.nq)
    row[(grid.np - 1) * grid.nq:] = (2.0 / grid.L) * tw * np.cos(math.pi * q / grid.L)
    return row


def initial_nontrivial_guess(bp: BifurcationPoint, op: StripOperator,
                             s: float) -> WaveState:
    """Local-theory seed w = s * Phi(p) cos(pi q / L) at lambda_eps.

    Raises AdmissibilityError when |s| is too large for the admissible set.
    """
    grid = op.grid
    phi = bp.phi_at(grid.p_nodes)
    w = s * phi[:, None] * np.cos(math.pi * grid.q_nodes / grid.L)[None, :]
    w[0] = 0.0
    state = WaveState(lam=bp.lambda_star, epsilon=op.epsilon, grid=grid, w=w)
    op.check_admissible(state)
    return state


# -- bordered linear algebra -----------------------------------------------------


def solve_bordered(J, f_lam, c_row, c_lam, rhs_top, rhs_bot):
    """Solve the bordered system [[J, f_lam], [c_row, c_lam]] x = rhs.

    ``J`` may be singular on its own (fold points); the border keeps the
    extended matrix invertible along regular branch arcs.  Returns
    (dw, dlam).
    """
    n = J.shape[0]
    M = sp.bmat(
        [
            [sp.csc_matrix(J), sp.csc_matrix(np.asarray(f_lam).reshape(n, 1))],
            [sp.csc_matrix(np.asarray(c_row).reshape(1, n)), sp.csc_matrix([[c_lam]])],
        ],
        format="csc",
    )
    try:
        lu = splu(M)
    except RuntimeError as exc:
        raise SingularJacobianError(f"bordered factorization failed: {exc}") from exc
    sol = lu.solve(np.concatenate([np.asarray(rhs_top), [rhs_bot]]))
    return sol[:-1], sol[-1]


def _branch_ip(dlam1, dw1, dlam2, dw2):
    n = dw1.size
    return dlam1 * dlam2 + float(dw1 @ dw2) / n


def branch_tangent(op: StripOperator, state: WaveState, prev=None):
    """Unit tangent (t_lam, t_w) of the solution curve at ``state``.

    Solves the bordered system with the previous tangent as border row,
    which both regularizes folds and preserves orientation.
    """
    n = state.w.size
    if prev is None:
        raise DomainError("an orientation tangent is required")
    t_lam_prev, t_w_prev = prev
    J = op.jacobian(state)
    f_lam = op.d_residual_d_lambda(state)
    dw, dlam = solve_bordered(
        J, f_lam, t_w_prev / n, t_lam_prev, np.zeros(n), 1.0
    )
    norm = math.sqrt(_branch_ip(dlam, dw, dlam, dw))
    return dlam / norm, dw / norm


def seed_tangent(bp: BifurcationPoint, op: StripOperator, sign=1.0):
    """Tangent at the bifurcation point, along the eigenmode, zero in lambda."""
    grid = op.grid
    phi = bp.phi_at(grid.p_nodes)
    t_w = phi[:, None] * np.cos(math.pi * grid.q_nodes / grid.L)[None, :]
    t_w[0] = 0.0
    t_w = sign * t_w.ravel()
    norm = math.sqrt(_branch_ip(0.0, t_w, 0.0, t_w))
    return 0.0, t_w / norm


def arclength_step(op: StripOperator, state: WaveState, tangent, ds: float,
                   tol: float = 1e-10, max_iter: int = 15):
    """One predictor-corrector step of length ds along the branch.

    Returns (new_state, new_tangent).  Raises on corrector failure so the
    caller can halve the step.
    """
    t_lam, t_w = tangent
    n = state.w.size
    lam = state.lam + ds * t_lam
    w = state.w + ds * t_w.reshape(state.w.shape)
    current = state.copy_with(lam=lam, w=w)
    if not op.is_admissible(current):
        raise AdmissibilityError("predictor left the admissible set")

    for _ in range(max_iter):
        r = op.residual_vector(current)
        constraint = (
            _branch_ip(
                current.lam - state.lam,
                (current.w - state.w).ravel(),
                t_lam,
                t_w,
            )
            - ds
        )
        if max(float(np.max(np.abs(r))), abs(constraint)) <= tol:
            new_tangent = branch_tangent(op, current, prev=tangent)
            return current, new_tangent
        J = op.jacobian(current)
        f_lam = op.d_residual_d_lambda(current)
        dw, dlam = solve_bordered(J, f_lam, t_w / n, t_lam, -r, -constraint)
        moved = None
        alpha = 1.0
        for _ in range(30):
            cand = current.copy_with(
                lam=current.lam + alpha * dlam,
                w=current.w + alpha * dw.reshape(current.w.shape),
            )
            if op.is_admissible(cand):
                moved = cand
                break
            alpha *= 0.5
        if moved is None:
            raise AdmissibilityError("no damped corrector step stays admissible")
        current = moved
    raise NewtonDivergenceError("arclength corrector did not converge",
                                iterations=max_iter)


def classify_termination(op: StripOperator, state: WaveState,
                         caps: Caps) -> Termination:
    """Map a state to the first matching branch-termination clause."""
    if state.lam >= caps.lambda_cap:
        return Termination.LAMBDA_BLOWUP
    if float(np.max(np.abs(state.w))) >= caps.w_cap:
        return Termination.SUP_W_BLOWUP
    wp = derivative_fields(op.grid, state.w)["wp"]
    if float(np.max(wp)) >= caps.wp_cap:
        return Termination.SUP_WP_BLOWUP
    if state.lam + 2.0 * op.fn.gamma_inf_bound <= op.delta:
        return Termination.LAMBDA_FLOOR
    hp = op._ainv_rows(state.lam)[:, None] + wp
    if float(np.min(hp)) <= op.delta:
        return Termination.STAGNATION_CLAUSE
    if float(np.max(state.w[-1])) >= (2.0 * state.lam - op.delta) / (4.0 * op.g):
        return Termination.SURFACE_CLAUSE
    return Termination.RUNNING


@dataclass
class Branch:
    """Ordered trace of accepted solution states for one epsilon."""

    epsilon: float
    points: list = field(default_factory=list)
    tangents: list = field(default_factory=list)
    termination: Termination = Termination.RUNNING
    diagnostics: str = ""

    def append(self, state, tangent, max_gap=None):
        if self.points and max_gap is not None:
            prev = self.points[-1]
            gap = math.sqrt(
                _branch_ip(
                    state.lam - prev.lam,
                    (state.w - prev.w).ravel(),
                    state.lam - prev.lam,
                    (state.w - prev.w).ravel(),
                )
            )
            if gap > 1.5 * max_gap:
                raise DomainError("consecutive branch points exceed the step bound")
        self.points.append(state)
        self.tangents.append(tangent)

    def record_rows(self, op):
        """Summary rows (s, lambda, c, crest, trough, min relative speed)."""
        rows = []
        for state in self.points:
            hp = op._ainv_rows(state.lam)[:, None] + derivative_fields(
                op.grid, state.w
            )["wp"]
            rows.append(
                {
                    "s": surface_mode_amplitude(state),
                    "lambda": state.lam,
                    "c": wave_speed(state.lam, op.fn),
                    "eta_crest": float(state.w[-1, -1]) - state.lam / (2 * op.g),
                    "eta_trough": float(state.w[-1, 0]) - state.lam / (2 * op.g),
                    "min_rel_speed": 1.0 / float(np.max(hp)),
                    "termination": self.termination.value,
                }
            )
        return rows


def continue_branch(op: StripOperator, bp: BifurcationPoint, steps: int,
                    ds: float, caps: Caps = None, s0: float = None,
                    tol: float = 1e-10) -> Branch:
    """Trace the nontrivial branch from the bifurcation point.

    The first point is produced by an amplitude-constrained solve at
    s0 (default ds), subsequent points by pseudo-arclength steps.  The
    trace stops at ``steps`` accepted points, on a termination clause, or
    when step halving hits its floor.
    """
    caps = Caps.default(op.g, op.grid.L) if caps is None else caps
    branch = Branch(epsilon=op.epsilon)

    s_first = ds if s0 is None else s0
    seed = initial_nontrivial_guess(bp, op, s_first)
    first = solve_at_amplitude(op, seed, s_first, tol=tol)
    tangent = branch_tangent(op, first, prev=seed_tangent(bp, op, sign=math.copysign(1.0, s_first)))
    branch.append(first, tangent)

    step = ds
    state = first
    while len(branch.points) < steps:
        term = classify_termination(op, state, caps)
        if term is not Termination.RUNNING:
            branch.termination = term
            return branch
        try:
            state_new, tangent_new = arclength_step(op, state, tangent, step, tol=tol)
        except (AdmissibilityError, NewtonDivergenceError, SingularJacobianError) as exc:
            step *= 0.5
            if step < DS_FLOOR:
                branch.termination = Termination.MAX_STEPS
                branch.diagnostics = f"step floor reached: {exc}"
                return branch
            continue
        state, tangent = state_new, tangent_new
        branch.append(state, tangent, max_gap=step)
    branch.termination = classify_termination(op, state, caps)
    return branch


def solve_at_amplitude(op: StripOperator, state: WaveState, s_target: float,
                       tol: float = 1e-10, max_iter: int = 20) -> WaveState:
    """Solve {F = 0, surface mode amplitude = s_target} for (w, lambda)."""
    c_row = _mode_weights(op.grid)
    current = state.copy_with()
    op.check_admissible(current)
    for _ in range(max_iter):
        r = op.residual_vector(current)
        cons = surface_mode_amplitude(current) - s_target
        if max(float(np.max(np.abs(r))), abs(cons)) <= tol:
            return current
        J = op.jacobian(current)
        f_lam = op.d_residual_d_lambda(current)
        dw, dlam = solve_bordered(J, f_lam, c_row, 0.0, -r, -cons)
        moved = None
        alpha = 1.0
        for _ in range(30):
            cand = current.copy_with(
                lam=current.lam + alpha * dlam,
                w=current.w + alpha * dw.reshape(current.w.shape),
            )
            if op.is_admissible(cand):
                moved = cand
                break
            alpha *= 0.5
        if moved is None:
            raise AdmissibilityError("no damped amplitude-constrained step admissible")
        current = moved
    raise NewtonDivergenceError("amplitude-constrained solve did not converge",
                                iterations=max_iter)


@dataclass
class HomotopyResult:
    """Outcome of the decreasing-epsilon homotopy at fixed amplitude."""

    epsilons: list
    branches: list
    lambdas: list
    sup_diffs: list
    failure_index: int = -1

    @property
    def states(self):
        return [b.points[-1] for b in self.branches]


def epsilon_homotopy(model, g, grid, schedule, target_s, delta=1e-3,
                     bif_factory=None, tol=1e-10) -> HomotopyResult:
    """Re-converge the wave of amplitude ``target_s`` along decreasing epsilon.

    The first entry is seeded from the local eigenmode; each later epsilon
    restarts from the previous solution.  Emits the sup-norm differences of
    consecutive solutions, which contract as the regularization is removed.
    """
    sched = list(schedule)
    if not sched or any(e2 >= e1 for e1, e2 in zip(sched, sched[1:])):
        raise DomainError("epsilon schedule must be strictly decreasing")
    if not all(0.0 <= e < 1.0 for e in sched):
        raise DomainError("epsilon schedule must lie in [0, 1)")

    from .sturm_liouville import SLProblem, find_bifurcation_point

    if bif_factory is None:
        def bif_factory(eps):
            return find_bifurcation_point(
                SLProblem(model, g=g, L=grid.L, epsilon=eps)
            )

    branches, lambdas, diffs = [], [], []
    prev_state = None
    for idx, eps in enumerate(sched):
        op = StripOperator(model, g, grid, epsilon=eps, delta=delta)
        try:
            if prev_state is None:
                bp = bif_factory(eps)
                seed = initial_nontrivial_guess(bp, op, target_s)
            else:
                seed = WaveState(lam=prev_state.lam, epsilon=eps, grid=grid,
                                 w=prev_state.w.copy())
            state = (
                solve_at_amplitude(op, seed, target_s, tol=tol)
                if target_s != 0.0
                else _trivial_resolve(op, seed, bif_factory, eps)
            )
        except (AdmissibilityError, NewtonDivergenceError, SingularJacobianError):
            return HomotopyResult(
                epsilons=sched, branches=branches, lambdas=lambdas,
                sup_diffs=diffs, failure_index=idx,
            )
        branch = Branch(epsilon=eps)
        branch.append(state, None)
        branches.append(branch)
        lambdas.append(state.lam)
        if prev_state is not None:
            diffs.append(float(np.max(np.abs(state.w - prev_state.w))))
        prev_state = state
    return HomotopyResult(epsilons=sched, branches=branches, lambdas=lambdas,
                          sup_diffs=diffs)


def _trivial_resolve(op, seed, bif_factory, eps):
    # target amplitude zero: branches collapse onto the trivial family at
    # the moving bifurcation parameter
    bp = bif_factory(eps)
    return WaveState(lam=bp.lambda_star, epsilon=eps, grid=op.grid,
                     w=np.zeros_like(seed.w))
