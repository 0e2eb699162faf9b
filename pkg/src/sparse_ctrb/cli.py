"""Command-line interface.

Subcommands: ``check``, ``bounds``, ``decompose``, ``oracle``, ``steer``.
Each reads a JSON system file, writes a JSON report to stdout and a one-line
human summary to stderr.  Exit codes: 0 the analysis completed (verdicts,
including negative ones, live in the report), 2 input error, 3 the search
budget ran out before a verdict (inconclusive).

Reports are byte-identical across runs for identical inputs and flags; pass
``--timing`` to opt into a wall-clock ``elapsed_ms`` field (which breaks that
guarantee).  ``--rational`` switches rank decisions to exact arithmetic for
``check``, ``bounds``, and ``oracle``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings as _warnings

import numpy as np

from . import bounds as bounds_mod
from . import exact
from .ctrb import (
    common_support_test,
    output_kalman_test,
    output_pbh_necessary,
    sparse_pbh_test,
)
from .decomp import standard_form, verify_standard_form
from .errors import BudgetExceededError, InputError, UncontrollableSystemError
from .io import build_report, load_system, render_report
from .linalg import DEFAULT_TOLERANCE, Tolerance, max_geometric_multiplicity, rank
from .oracle import OracleBudget, exact_min_k, decision_horizon, output_kalman_type_rank_test
from .steer import greedy_support_schedule, solve_inputs, solve_output_inputs

_ARGUMENT_KEYS = (
    "mode",
    "s",
    "variant",
    "k",
    "max_k",
    "max_enumerations",
    "deadline",
    "x_init",
    "x_final",
    "output_target",
    "rational",
)


def _arguments_for(args) -> dict:
    out = {}
    for key in _ARGUMENT_KEYS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            out[key] = value
    return out


def _tolerance_from(args) -> Tolerance:
    value = args.tol
    if value is None:
        env = os.environ.get("SPARSE_CTRB_TOL")
        if env is not None:
            try:
                value = float(env)
            except ValueError:
                raise InputError(f"SPARSE_CTRB_TOL must be a float, got {env!r}")
    if value is None:
        return DEFAULT_TOLERANCE
    try:
        return Tolerance(rank_rel=value)
    except ValueError as exc:
        raise InputError(str(exc))


def _load_vector(path, length, name):
    """Read a JSON file holding a flat array of numbers of the given length."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {name} file {path!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{name} file {path!r} is not valid JSON: {exc}")
    if not isinstance(data, list) or not all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in data
    ):
        raise InputError(f"{name} file must contain a flat JSON array of numbers")
    if len(data) != length:
        raise InputError(f"{name} must have {length} entries, got {len(data)}")
    return np.array(data, dtype=np.float64)


def _reject_rational(args, command):
    if args.rational:
        raise InputError(f"{command} does not support --rational")


def _run_check(system, args, tol):
    s = args.s
    warn = []
    if args.mode == "state":
        if args.rational:
            verdict, rank_ok, slack = exact.sparse_controllable_exact(system, s)
            result = {
                "verdict": verdict,
                "rank_condition_holds": rank_ok,
                "inequality_holds": slack >= 0,
                "slack": slack,
            }
            witnesses = None
        else:
            rep = sparse_pbh_test(system, s, tol)
            result = {
                "verdict": rep.verdict,
                "rank_condition_holds": rep.rank_condition_holds,
                "inequality_holds": rep.inequality_holds,
                "slack": rep.slack,
            }
            witnesses = None
            if rep.witness_lambda is not None:
                witnesses = {"lambda": rep.witness_lambda, "z": rep.witness_z}
        word = "is" if result["verdict"] else "is NOT"
        summary = f"{word} {s}-sparse controllable"
    elif args.mode == "common-support":
        if args.rational:
            verdict, support = exact.common_support_exact(system, s)
            result = {"verdict": verdict, "screen": None}
        else:
            verdict, support = common_support_test(system, s, tol)
            result = {
                "verdict": verdict,
                "screen": {
                    "g_d": max_geometric_multiplicity(system.D, tol),
                    "r_h": rank(system.H, tol),
                    "r_d": rank(system.D, tol),
                },
            }
        witnesses = {"support": support} if support is not None else None
        word = "admits" if verdict else "admits NO"
        summary = f"{word} controllable common support of size {s}"
    else:  # output
        if args.rational:
            kalman = exact.output_kalman_exact(system)
            inequality = exact.output_sparse_rank_holds_exact(system, s)
            sweep = output_pbh_necessary(system, tol)
            warn.append(
                "rational mode: output eigenvalue sweep evaluated in floating point"
            )
        else:
            kalman = output_kalman_test(system, tol)
            sweep = output_pbh_necessary(system, tol)
            inequality = s >= system.n_outputs - rank(system.A @ system.D, tol)
        result = {
            "output_kalman": kalman,
            "eigen_sweep_necessary": sweep,
            "rank_inequality_necessary": inequality,
            "sparse_necessary": bool(sweep and inequality),
        }
        witnesses = None
        word = "holds" if kalman else "fails"
        summary = f"output reachability rank test {word}; necessary sparse conditions "
        summary += "hold" if result["sparse_necessary"] else "fail"
    return result, witnesses, warn, summary


def _run_bounds(system, args, tol):
    variant = args.variant
    s = args.s
    if variant != "unconstrained" and s is None:
        raise InputError(f"--variant {variant} requires -s")
    if args.rational:
        b = _exact_bounds(system, variant, s)
    else:
        if variant == "unconstrained":
            b = bounds_mod.kstar_bounds_unconstrained(system, tol)
        elif variant == "sparse":
            b = bounds_mod.kstar_bounds_sparse(system, s, tol)
        elif variant == "relaxed":
            b = bounds_mod.kstar_bounds_relaxed(system, s, tol)
        elif variant == "output":
            b = bounds_mod.output_kstar_bounds(system, s, tol)
        else:
            b = bounds_mod.common_support_kstar_bounds(system, s, tol)
    result = {
        "variant": b.variant,
        "lower": b.lower,
        "upper": b.upper,
        "lower_exact": b.lower_exact,
        "q": b.q,
        "r_hs_star": b.r_hs_star,
        "s_star": b.s_star,
    }
    summary = f"{b.lower} <= K* <= {b.upper} ({variant})"
    return result, None, [], summary


def _exact_bounds(system, variant, s):
    quantities = exact.bound_quantities_exact(system)
    n, q, r_h, r_d = quantities["n"], quantities["q"], quantities["r_h"], quantities["r_d"]
    if variant == "unconstrained":
        if not exact.controllable_exact(system):
            raise UncontrollableSystemError("K* undefined: system is not controllable")
        return bounds_mod._bounds_from_quantities("unconstrained", n, r_h, q)
    if variant in ("sparse", "relaxed"):
        verdict, _, _ = exact.sparse_controllable_exact(system, s)
        if not verdict:
            raise UncontrollableSystemError(
                "K* undefined: system is not s-sparse controllable"
            )
        if variant == "sparse":
            sstar = exact.s_star_exact(system)
            return bounds_mod._bounds_from_quantities(
                "sparse", n, min(r_h, s), q, s=s, s_star_value=sstar
            )
        return bounds_mod._bounds_from_quantities(
            "relaxed", n, min(r_h, s), q, s=s, r_h=r_h, r_d=r_d
        )
    if variant == "output":
        if quantities["m"] is None:
            raise InputError("output bounds require an output map A")
        return bounds_mod._bounds_from_quantities(
            "output", quantities["m"], min(quantities["r_ah"], s), q, s=s, r_h=r_h
        )
    verdict, _ = exact.common_support_exact(system, s)
    if not verdict:
        raise UncontrollableSystemError(
            "K* undefined: no single size-s support is controllable"
        )
    return bounds_mod._bounds_from_quantities("common_support", n, min(r_h, s), q, s=s)


def _exact_budget(args) -> dict:
    if args.max_enumerations is None:
        return {}
    return {"max_enumerations": args.max_enumerations}


def _run_oracle(system, args, tol):
    s = args.s
    budget_kwargs = {}
    if args.max_enumerations is not None:
        budget_kwargs["max_enumerations"] = args.max_enumerations
    if args.deadline is not None:
        budget_kwargs["deadline_s"] = args.deadline
    if args.mode == "output":
        max_k = args.max_k
        if max_k is None:
            max_k = system.n_states * math.ceil(system.n_inputs / s)
        if args.rational:
            k_star, witness = exact.min_k_exact(
                system, s, max_k, output=True, **_exact_budget(args)
            )
        else:
            budget = OracleBudget(max_k=max_k, **budget_kwargs)
            k_star = None
            witness = None
            for k in range(1, max_k + 1):
                ok, sched = output_kalman_type_rank_test(system, s, k, budget, tol)
                if ok:
                    k_star, witness = k, sched.supports
                    break
    else:
        if args.rational:
            max_k = args.max_k
            if max_k is None:
                max_k = system.n_states * math.ceil(system.n_inputs / s)
            k_star, witness = exact.min_k_exact(system, s, max_k, **_exact_budget(args))
        else:
            budget = OracleBudget(max_k=args.max_k, **budget_kwargs)
            max_k = budget.max_k if budget.max_k is not None else decision_horizon(
                system, s, tol
            )
            k_star, sched = exact_min_k(system, s, budget, tol)
            witness = None if sched is None else sched.supports
    result = {"k_star": k_star, "max_k_searched": max_k, "inconclusive": False}
    witnesses = {"schedule": witness} if witness is not None else None
    if k_star is None:
        summary = f"no rank-achieving schedule up to K={max_k}"
    else:
        summary = f"minimal steering time K*={k_star}"
    return result, witnesses, [], summary


def _run_decompose(system, args, tol):
    _reject_rational(args, "decompose")
    dec = standard_form(system, args.s, tol)
    check = verify_standard_form(system, dec, tol)
    warn = []
    if dec.core_rank_mismatch:
        warn.append(
            "core dimension differs from rank of the controllable block "
            "(zero eigenvalue not semisimple); sparse classification is "
            "conservative"
        )
    result = {
        "R": dec.R,
        "r": dec.r,
        "R_s": dec.R_s,
        "classification": dec.classification,
        "core_rank_mismatch": dec.core_rank_mismatch,
        "U": dec.U,
        "W": dec.W,
        "T": dec.T,
        "D_bar": dec.D_bar,
        "H_bar": dec.H_bar,
        "verification": {
            "similarity_residual": check.similarity_residual,
            "structure_residual": check.structure_residual,
            "nilpotent_residual": check.nilpotent_residual,
            "input_free_residual": check.input_free_residual,
            "subsystem_verdict": None
            if check.subsystem_report is None
            else check.subsystem_report.verdict,
            "ok": check.ok,
        },
    }
    summary = (
        f"R={dec.R}, r={dec.r}, R_s={dec.R_s}; verification "
        + ("ok" if check.ok else "FAILED")
    )
    return result, None, warn, summary


def _run_steer(system, args, tol):
    _reject_rational(args, "steer")
    s = args.s
    k = args.k
    if k < 0:
        raise InputError(f"--k must be a non-negative integer, got {k}")
    x_init = (
        np.zeros(system.n_states)
        if args.x_init is None
        else _load_vector(args.x_init, system.n_states, "--x-init")
    )
    schedule = greedy_support_schedule(system, s, k, tol)
    if args.output_target:
        if system.A is None:
            raise InputError("--output-target requires an output map A")
        target = _load_vector(args.x_final, system.n_outputs, "--x-final")
        plan = solve_output_inputs(system, schedule, x_init, target, tol)
        space = "output"
    else:
        target = _load_vector(args.x_final, system.n_states, "--x-final")
        plan = solve_inputs(system, schedule, x_init, target, tol)
        space = "state"
    feasible = plan.residual <= tol.residual_abs * max(1.0, float(np.linalg.norm(target)))
    result = {
        "k": k,
        "space": space,
        "schedule": plan.schedule.supports,
        "inputs": plan.inputs,
        "trajectory": plan.trajectory,
        "residual": plan.residual,
        "feasible": feasible,
    }
    summary = f"{space} steering residual {plan.residual:.3e} at K={k}"
    return result, None, [], summary


_RUNNERS = {
    "check": _run_check,
    "bounds": _run_bounds,
    "oracle": _run_oracle,
    "decompose": _run_decompose,
    "steer": _run_steer,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="sparse-ctrb",
        description="Controllability analysis for linear systems with sparse inputs",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("system", help="path to a JSON system file")
    common.add_argument(
        "--tol",
        type=float,
        default=None,
        help="relative rank tolerance (default 1e-10; env SPARSE_CTRB_TOL)",
    )
    common.add_argument(
        "--rational",
        action="store_true",
        help="exact rational arithmetic for rank decisions",
    )
    common.add_argument(
        "--timing",
        action="store_true",
        help="include wall-clock elapsed_ms in the report (non-deterministic)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def sparsity(p, required=True):
        p.add_argument(
            "-s",
            "--sparsity",
            dest="s",
            type=int,
            required=required,
            default=None,
            help="per-step sparsity budget",
        )

    p = sub.add_parser("check", parents=[common], help="controllability tests")
    sparsity(p)
    p.add_argument(
        "--output-mode",
        dest="mode",
        choices=["state", "output", "common-support"],
        default="state",
        help="which controllability question to test",
    )

    p = sub.add_parser("bounds", parents=[common], help="steering-time bounds")
    sparsity(p, required=False)
    p.add_argument(
        "--variant",
        choices=["unconstrained", "sparse", "relaxed", "output", "common-support"],
        default="sparse",
    )

    p = sub.add_parser(
        "oracle", parents=[common], help="exhaustive minimal steering time"
    )
    sparsity(p)
    p.add_argument("--mode", choices=["state", "output"], default="state")
    p.add_argument("--max-k", type=int, default=None, dest="max_k")
    p.add_argument(
        "--budget",
        "--max-enumerations",
        type=int,
        default=None,
        dest="max_enumerations",
        help="enumeration budget before the search reports inconclusive",
    )
    p.add_argument("--deadline", type=float, default=None, help="seconds")

    p = sub.add_parser(
        "decompose", parents=[common], help="sparse-controllability standard form"
    )
    sparsity(p)

    p = sub.add_parser("steer", parents=[common], help="plan a sparse input sequence")
    sparsity(p)
    p.add_argument("--k", type=int, required=True, help="number of steps (K >= 0)")
    p.add_argument(
        "--x-init",
        default=None,
        dest="x_init",
        help="JSON file with the initial state (default: origin)",
    )
    p.add_argument(
        "--x-final",
        required=True,
        dest="x_final",
        help="JSON file with the target state (or target output)",
    )
    p.add_argument(
        "--output-target",
        action="store_true",
        dest="output_target",
        help="interpret --x-final as an output-space target y_K = A x_K",
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    variant = getattr(args, "variant", None)
    if variant == "common-support":
        args.variant = "common_support"
    started = time.monotonic()
    try:
        tol = _tolerance_from(args)
        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            system, name = load_system(args.system)
            result, witnesses, extra_warnings, summary = _RUNNERS[command](
                system, args, tol
            )
        warning_strings = [str(w.message) for w in caught] + list(extra_warnings)
    except BudgetExceededError as exc:
        report = build_report(
            command=command,
            system_name=None,
            arguments=_arguments_for(args),
            result={
                "inconclusive": True,
                "reason": str(exc),
                "enumerations": exc.enumerations,
                "k_reached": exc.k_reached,
            },
            tolerance=DEFAULT_TOLERANCE,
            witnesses=None,
            warnings=[],
            exact=bool(args.rational),
        )
        sys.stdout.write(render_report(report))
        print(f"sparse-ctrb {command}: inconclusive ({exc})", file=sys.stderr)
        return 3
    except (InputError, UncontrollableSystemError, ValueError) as exc:
        print(f"sparse-ctrb {command}: error: {exc}", file=sys.stderr)
        return 2
    elapsed_ms = (time.monotonic() - started) * 1e3 if args.timing else None
    report = build_report(
        command=command,
        system_name=name,
        arguments=_arguments_for(args),
        result=result,
        tolerance=tol,
        witnesses=witnesses,
        warnings=warning_strings,
        exact=bool(args.rational),
        elapsed_ms=elapsed_ms,
    )
    sys.stdout.write(render_report(report))
    label = name if name is not None else args.system
    print(f"sparse-ctrb {command} [{label}]: {summary}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
