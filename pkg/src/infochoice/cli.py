"""Command-line front end.

    infochoice solve problem.json [--out PATH] [--csv]
    infochoice reveal|kappa|certify|invert|unique problem.json
    infochoice predict problem.json --submenus all|"a,b;b,c"
    infochoice blackwell problem.json        # uses the "policies" block
    infochoice oracle problem.json [--grid N] [--csv]
    infochoice probe problem.json --kind convexity|consistency|uniqueness

Results go to stdout (or --out) as canonical JSON; --csv switches
SCR-producing commands to CSV. Exit codes: 0 success, 2 validation error,
3 solver non-convergence. Errors are machine readable:
{"error": {"code": ..., "message": ..., "location": ...}}.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import inverse, menus, revealed, solver
from .jsonio import Problem, canonical_dumps, parse_problem, scr_to_csv
from .model import InvalidInputError, Menu, SCR
from .solver import SolveOptions, SolverError


def _load(path: str, strict: bool) -> Problem:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise InvalidInputError(f"cannot open {path}")
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})")
    return parse_problem(data, strict)


def _require(problem: Problem, field: str):
    value = getattr(problem, field)
    if value is None:
        raise InvalidInputError(f"problem file: command needs the {field!r} field")
    return value


def _scr_payload(problem: Problem, result: solver.SolveResult) -> dict:
    return {
        "actions": list(problem.menu.actions),
        "states": list(problem.prior.states),
        "scr": [[float(v) for v in row] for row in result.scr.probs],
        "value": result.value,
        "iterations": result.iterations,
        "residual": result.residual,
        "method": result.method,
    }


def _cmd_solve(problem: Problem, args) -> tuple[dict, SCR | None]:
    result = solver.solve(problem.menu, problem.prior, _require(problem, "cost"),
                          problem.options)
    return _scr_payload(problem, result), result.scr


def _cmd_reveal(problem: Problem, args):
    rp = revealed.reveal(_require(problem, "scr"), problem.prior)
    payload = {
        "marginals": {problem.menu.actions[a]: float(rp.marginals[a])
                      for a in rp.included},
        "posteriors": {problem.menu.actions[a]: [float(v) for v in rp.posteriors[a].weights]
                       for a in rp.included},
        "excluded": [problem.menu.actions[a] for a in rp.excluded],
    }
    return payload, None


def _cmd_kappa(problem: Problem, args):
    value = revealed.kappa(_require(problem, "cost"), _require(problem, "scr"),
                           problem.prior)
    return {"kappa": value}, None


def _cmd_certify(problem: Problem, args):
    cert = inverse.certify(_require(problem, "scr"), problem.menu, problem.prior,
                           _require(problem, "cost"))
    return cert.to_dict(), None


def _cmd_invert(problem: Problem, args):
    menu = inverse.rationalize(_require(problem, "scr"), problem.prior,
                               _require(problem, "cost"),
                               actions=problem.menu.actions)
    payload = {
        "actions": list(menu.actions),
        "states": list(problem.prior.states),
        "utilities": [[float(v) for v in row] for row in menu.utilities],
        "normalization": "identified up to a state-dependent, "
                         "action-independent shift",
    }
    return payload, None


def _cmd_unique(problem: Problem, args):
    report = inverse.unique_check(_require(problem, "scr"), problem.prior)
    payload = {
        "verdict": report.verdict,
        "unique_capable": report.unique_capable,
        "rank": report.rank,
        "n_actions": report.n_actions,
        "singular_values": [float(v) for v in report.singular_values],
        "threshold": report.threshold,
    }
    return payload, None


def _parse_submenus(text: str, menu: Menu):
    if text == "all":
        return None
    groups = []
    for chunk in text.split(";"):
        labels = [t.strip() for t in chunk.split(",") if t.strip()]
        if labels:
            groups.append(labels)
    if not groups:
        raise InvalidInputError("--submenus: empty list")
    return groups


def _cmd_predict(problem: Problem, args):
    groups = _parse_submenus(args.submenus, problem.menu)
    forecast = menus.predict_submenus(_require(problem, "scr"), problem.menu,
                                      problem.prior, _require(problem, "cost"),
                                      submenus=groups, opts=problem.options)
    payload = [
        {
            "submenu": list(p.actions),
            "scr": [[float(v) for v in row] for row in p.scr.probs],
            "value": p.value,
            "unique": p.unique_capable,
            "verdict": p.verdict,
        }
        for p in forecast.predictions
    ]
    return payload, None


def _cmd_blackwell(problem: Problem, args):
    if "p" not in problem.policies or "q" not in problem.policies:
        raise InvalidInputError('blackwell needs policies "p" and "q" in the file')
    res = revealed.blackwell_geq(problem.policies["p"], problem.policies["q"])
    payload = {
        "holds": res.holds,
        "infeasibility": res.infeasibility,
        "witness": ([[float(v) for v in row] for row in res.witness]
                    if res.witness is not None else None),
        "certificate": ([float(v) for v in res.certificate]
                        if res.certificate is not None else None),
    }
    return payload, None


def _cmd_oracle(problem: Problem, args):
    resolution = args.grid if args.grid is not None else problem.grid_resolution
    result = solver.grid_oracle(problem.menu, problem.prior,
                                _require(problem, "cost"),
                                grid_resolution=resolution)
    payload = {
        "value": result.value,
        "scr": [[float(v) for v in row] for row in result.scr.probs],
        "beliefs": [[float(v) for v in b.weights] for b in result.policy.beliefs],
        "weights": [float(w) for w in result.policy.weights],
        "assigned_actions": [problem.menu.actions[a] for a in result.assigned_actions],
    }
    return payload, result.scr


def _cmd_probe(problem: Problem, args):
    seed = problem.options.seed
    if args.kind == "convexity":
        rng = np.random.default_rng(seed)
        other = Menu(problem.menu.actions,
                     rng.normal(0.0, 1.0, size=problem.menu.utilities.shape))
        report = solver.value_convexity_probe(problem.menu, other, problem.prior,
                                              _require(problem, "cost"),
                                              samples=args.trials, seed=seed,
                                              opts=problem.options)
        payload = {
            "kind": "convexity",
            "samples": report.samples,
            "max_violation": report.max_violation,
            "violations": [[b, g] for b, g in report.violations],
            "seed": report.seed,
        }
    elif args.kind == "consistency":
        report = menus.forecast_consistency(problem.menu, problem.prior,
                                            _require(problem, "cost"),
                                            trials=args.trials, seed=seed,
                                            opts=problem.options)
        payload = {
            "kind": "consistency",
            "trials": report.trials,
            "completed": report.completed,
            "skipped_not_interior": report.skipped_not_interior,
            "max_deviation": report.max_deviation,
            "flagged_submenus": [[t, list(a)] for t, a in report.flagged_submenus],
            "seed": report.seed,
        }
    elif args.kind == "uniqueness":
        rng = np.random.default_rng(seed)
        cost = _require(problem, "cost")
        spread = 0.0
        for _ in range(args.trials):
            utilities = rng.normal(0.0, 1.0, size=problem.menu.utilities.shape)
            trial_menu = Menu(problem.menu.actions, utilities)
            baseline = None
            for _ in range(10):
                init = rng.dirichlet(np.ones(problem.menu.n_actions))
                opts = SolveOptions(tol=problem.options.tol,
                                    max_iter=problem.options.max_iter,
                                    seed=seed, init_marginals=init)
                probs = solver.solve(trial_menu, problem.prior, cost, opts).scr.probs
                if baseline is None:
                    baseline = probs
                else:
                    spread = max(spread, float(np.abs(probs - baseline).max()))
        payload = {"kind": "uniqueness", "trials": args.trials,
                   "max_scr_spread": spread, "seed": seed}
    else:
        raise InvalidInputError(f"unknown probe kind {args.kind!r}")
    return payload, None


_COMMANDS = {
    "solve": _cmd_solve,
    "reveal": _cmd_reveal,
    "kappa": _cmd_kappa,
    "certify": _cmd_certify,
    "invert": _cmd_invert,
    "unique": _cmd_unique,
    "predict": _cmd_predict,
    "blackwell": _cmd_blackwell,
    "oracle": _cmd_oracle,
    "probe": _cmd_probe,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infochoice",
        description="Costly information acquisition: solve, certify, invert, predict.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("problem", help="path to the problem JSON file")
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        p.add_argument("--csv", action="store_true",
                       help="emit the resulting SCR as CSV (solve and oracle)")
        p.add_argument("--strict", action="store_true",
                       help="reject unknown fields in the problem file")
        if name == "predict":
            p.add_argument("--submenus", default="all",
                           help='"all" or semicolon-separated label groups, '
                                'e.g. "a,b;b,c"')
        if name == "oracle":
            p.add_argument("--grid", type=int, default=None,
                           help="lattice points per simplex edge")
        if name == "probe":
            p.add_argument("--kind", default="convexity",
                           choices=["convexity", "consistency", "uniqueness"])
            p.add_argument("--trials", type=int, default=20)
    return parser


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        problem = _load(args.problem, args.strict)
        payload, scr = _COMMANDS[args.command](problem, args)
    except InvalidInputError as exc:
        _emit(canonical_dumps({"error": {"code": 2, "message": str(exc),
                                         "location": args.problem}}), args.out)
        return 2
    except SolverError as exc:
        _emit(canonical_dumps({"error": {"code": 3, "message": str(exc),
                                         "location": args.problem}}), args.out)
        return 3
    if args.csv:
        if scr is None:
            _emit(canonical_dumps({"error": {"code": 2,
                                             "message": "--csv needs an SCR-producing command",
                                             "location": args.command}}), args.out)
            return 2
        _emit(scr_to_csv(scr, problem.menu.actions, problem.prior.states), args.out)
    else:
        _emit(canonical_dumps(payload), args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
