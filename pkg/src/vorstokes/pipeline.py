"""Run orchestration: bifurcate, continue, homotopy, verify, report.

A pipeline run writes one directory of deterministic artifacts: per-epsilon
bifurcation points and branch traces, the fixed-amplitude homotopy record,
a verification report for every accepted state, and a manifest tying them
together.  The exit status is nonzero exactly when a mandatory
verification check fails.
"""

from __future__ import annotations

import concurrent.futures as cf
import json
import os

from .config import RunConfig
from .continuation import (
    Caps,
    continue_branch,
    epsilon_homotopy,
)
from .strip_solver import StripOperator, StripGrid, default_grid
from .sturm_liouville import (
    SLProblem,
    eigenfunction_decay_rate,
    find_bifurcation_point,
)
from .vorticity import check_bifurcation_condition, functionals
from .wave_physics import verify_all

__all__ = ["run_pipeline", "bifurcate_record", "branch_to_rows", "grid_for", "write_csv"]


def _dump_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def bifurcate_record(cfg: RunConfig, epsilon: float):
    """Bifurcation point of the configured model at one epsilon, as a dict."""
    model = cfg.model()
    prob = SLProblem(model, g=cfg.g, L=cfg.L, epsilon=epsilon)
    bp = find_bifurcation_point(prob)
    fn = functionals(model)
    return bp, {
        "epsilon": epsilon,
        "lambda_star": bp.lambda_star,
        "mu": bp.mu,
        "decay_rate": eigenfunction_decay_rate(bp, fn),
        "phi": [[float(p), float(v)] for p, v in zip(bp.p[::-1], bp.phi[::-1])],
    }


def grid_for(cfg: RunConfig, lam_hint, epsilon) -> StripGrid:
    if cfg.np and cfg.P > 0.0:
        return StripGrid(L=cfg.L, P=cfg.P, nq=cfg.nq, np=cfg.np)
    grid = default_grid(cfg.L, lam_hint, epsilon, nq=cfg.nq)
    if cfg.P > 0.0:
        grid = StripGrid(L=cfg.L, P=cfg.P, nq=cfg.nq, np=grid.np)
    if cfg.np:
        grid = StripGrid(L=grid.L, P=grid.P, nq=cfg.nq, np=cfg.np)
    return grid


def branch_to_rows(branch, op):
    rows = []
    for rec in branch.record_rows(op):
        rows.append(
            (
                rec["s"],
                rec["lambda"],
                rec["c"],
                rec["eta_crest"],
                rec["eta_trough"],
                rec["min_rel_speed"],
                rec.get("verify_pass_count", ""),
                rec["termination"],
            )
        )
    return rows


BRANCH_HEADER = (
    "s", "lambda", "c", "eta_crest", "eta_trough",
    "min_rel_speed", "verify_pass_count", "termination",
)


def _trace_one_epsilon(cfg, epsilon, steps, out_dir):
    model = cfg.model()
    bp, bp_record = bifurcate_record(cfg, epsilon)
    grid = grid_for(cfg, bp.lambda_star, epsilon)
    op = StripOperator(model, cfg.g, grid, epsilon=epsilon, delta=cfg.delta)
    caps = Caps(lambda_cap=cfg.caps_lambda(), w_cap=cfg.w_cap, wp_cap=cfg.wp_cap)
    branch = continue_branch(op, bp, steps=steps, ds=cfg.step, caps=caps,
                             s0=cfg.s0, tol=cfg.newton_tol)
    reports = [verify_all(op, st, model, solver_tol=cfg.newton_tol)
               for st in branch.points]

    tag = f"eps{epsilon:g}".replace(".", "p")
    _dump_json(os.path.join(out_dir, f"bifurcation_{tag}.json"), bp_record)
    rows = []
    for k, (st, rep) in enumerate(zip(branch.points, reports)):
        st.save(os.path.join(out_dir, f"state_{tag}_{k:03d}.json"))
        _dump_json(os.path.join(out_dir, f"verify_{tag}_{k:03d}.json"), rep.to_dict())
        rec = branch.record_rows(op)[k]
        rows.append(
            (rec["s"], rec["lambda"], rec["c"], rec["eta_crest"], rec["eta_trough"],
             rec["min_rel_speed"], rep.pass_count, rec["termination"])
        )
    write_csv(os.path.join(out_dir, f"branch_{tag}.csv"), BRANCH_HEADER, rows)
    ok = all(rep.passed for rep in reports)
    return ok, branch, reports


def run_pipeline(cfg: RunConfig, out_dir: str, steps: int = 6, jobs: int = 1,
                 seed: int = 0) -> int:
    """Full orchestration; returns the process exit status.

    Writes branch summaries, per-point states and verification reports
    under ``out_dir``.  Nonzero exactly when a mandatory verification
    fails; solver-level failures (no bifurcation, divergence) raise.
    """
    os.makedirs(out_dir, exist_ok=True)
    model = cfg.model()
    cond = check_bifurcation_condition(model, cfg.g, cfg.L)
    manifest = {
        "config": {k: (v if not isinstance(v, float) else float(v))
                   for k, v in cfg.raw.items()},
        "seed": seed,
        "bifurcation_condition": {
            "holds": cond.holds, "margin": cond.margin, "integral": cond.integral,
        },
    }

    schedule = cfg.epsilon_schedule
    results = {}
    if jobs > 1:
        with cf.ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(_trace_one_epsilon, cfg, eps, steps, out_dir): i
                for i, eps in enumerate(schedule)
            }
            for fut in cf.as_completed(futures):
                results[futures[fut]] = fut.result()
    else:
        for i, eps in enumerate(schedule):
            results[i] = _trace_one_epsilon(cfg, eps, steps, out_dir)

    all_ok = all(results[i][0] for i in range(len(schedule)))

    # homotopy at fixed branch coordinate
    bp0, _ = bifurcate_record(cfg, schedule[0])
    grid = grid_for(cfg, bp0.lambda_star, schedule[0])
    hres = epsilon_homotopy(model, cfg.g, grid, schedule, cfg.s0,
                            delta=cfg.delta, tol=cfg.newton_tol)
    manifest["homotopy"] = {
        "epsilons": hres.epsilons,
        "lambdas": hres.lambdas,
        "sup_diffs": hres.sup_diffs,
        "failure_index": hres.failure_index,
        "target_s": cfg.s0,
    }
    if hres.failure_index >= 0:
        all_ok = False

    manifest["branches"] = {
        f"{schedule[i]:g}": {
            "points": len(results[i][1].points),
            "termination": results[i][1].termination.value,
            "verified": results[i][0],
        }
        for i in range(len(schedule))
    }
    manifest["all_verified"] = all_ok
    _dump_json(os.path.join(out_dir, "manifest.json"), manifest)
    return 0 if all_ok else 1
