"""Command-line interface.

Exit codes: 0 success, 1 infeasible production set, 2 input error,
3 solver failure (iteration or node limit).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import io, kernels
from .adv_continuous import adv_general_bb, adv_nonoverlap_dp, subset_sum_instance
from .adv_discrete import adv_general_dp, adv_nonoverlap
from .core import Discrete, is_non_overlapping, plan_cost, validate
from .errors import FormatError, InfeasibleError, LotSizingError, NumericalError
from .minmax_continuous import decompose
from .minmax_continuous import minmax_nonoverlap_lp as minmax_dag_lp
from .minmax_discrete import minmax_general_lp, minmax_nonoverlap_lp
from .oracle import OracleReport, brute_adv_continuous, brute_adv_discrete, det_lp_optimum, random_instance

log = logging.getLogger("robust_lotsize")

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3
LOG_LEVELS = {"off": None, "info": logging.INFO, "debug": logging.DEBUG}
# pseudopolynomial minmax LP is skipped beyond this many DAG arcs
DAG_LP_ARC_LIMIT = 1500

ADV_METHODS = {
    "selection": adv_nonoverlap,
    "rlp-dp": adv_general_dp,
    "dag-dp": adv_nonoverlap_dp,
    "branch-and-bound": adv_general_bb,
    "brute": None,
}
MINMAX_METHODS = ("nonoverlap-lp", "split-graph-lp", "dag-lp", "decomposition")


def configure_logging():
    level = os.environ.get("ROBUST_LOTSIZE_LOG", "off").lower()
    if level not in LOG_LEVELS:
        print(f"warning: ROBUST_LOTSIZE_LOG={level!r} not in off|info|debug; logging off", file=sys.stderr)
        level = "off"
    root = logging.getLogger("robust_lotsize")
    root.handlers.clear()
    if LOG_LEVELS[level] is None:
        root.setLevel(logging.CRITICAL + 1)
        return
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(LOG_LEVELS[level])


def _dag_arcs(instance):
    G = int(round(instance.budget.gamma))
    caps = np.minimum(np.round(instance.delta).astype(int), G)
    return int((G + 1) * (caps + 1).sum())


def choose_adv_method(instance):
    if isinstance(instance.budget, Discrete):
        return "selection" if is_non_overlapping(instance) else "rlp-dp"
    if is_non_overlapping(instance) and instance.is_integral():
        return "dag-dp"
    return "branch-and-bound"


def choose_minmax_method(instance):
    if isinstance(instance.budget, Discrete):
        return "nonoverlap-lp" if is_non_overlapping(instance) else "split-graph-lp"
    if is_non_overlapping(instance) and instance.is_integral() and _dag_arcs(instance) <= DAG_LP_ARC_LIMIT:
        return "dag-lp"
    return "decomposition"


def run_adv(plan, instance, method):
    if method == "brute":
        if isinstance(instance.budget, Discrete):
            return brute_adv_discrete(plan, instance)
        return brute_adv_continuous(plan, instance, "general")
    return ADV_METHODS[method](plan, instance)


def _report(args, instance, result, started, **diagnostics):
    return {
        "command": {"name": args.command, "argv": sys.argv[1:]},
        "instance_digest": io.instance_digest(instance) if instance is not None else None,
        "result": result,
        "timing": {"seconds": time.perf_counter() - started},
        "diagnostics": {"kernel_backend": kernels.BACKEND, **diagnostics},
    }


def _emit(report):
    print(io.dumps(report))


def cmd_validate(args):
    started = time.perf_counter()
    instance = io.load_instance(args.instance)
    problems = validate(instance)
    _emit(_report(args, instance, {"valid": not problems, "violations": problems}, started))
    if not problems:
        return EXIT_OK
    if problems == ["feasible production set is empty"]:
        return EXIT_INFEASIBLE
    return EXIT_INPUT


def _load_valid(path):
    instance = io.load_instance(path)
    problems = validate(instance)
    if problems == ["feasible production set is empty"]:
        raise InfeasibleError(problems[0])
    if problems:
        raise FormatError("invalid instance: " + "; ".join(problems))
    return instance


def cmd_solve_det(args):
    started = time.perf_counter()
    instance = _load_valid(args.instance)
    scenario = io.load_scenario(args.scenario) if args.scenario else None
    sol = det_lp_optimum(instance, scenario)
    D = instance.d_hat if scenario is None else scenario.D
    result = {
        "scenario_source": "file" if scenario else "nominal",
        "plan": io.plan_dict(sol.plan),
        "scenario": {"D": D},
        "value": sol.value,
        "inventory": sol.inventory,
        "backorder": sol.backorder,
        "sales": sol.sales,
    }
    _emit(_report(args, instance, result, started, method="deterministic-lp"))
    return EXIT_OK


def cmd_adv(args):
    started = time.perf_counter()
    instance = _load_valid(args.instance)
    plan = io.load_plan(args.plan)
    method = args.force_method or choose_adv_method(instance)
    if method not in ADV_METHODS:
        raise FormatError(f"unknown adversary method {method!r}; choose from {sorted(ADV_METHODS)}")
    res = run_adv(plan, instance, method)
    result = {
        "plan": io.plan_dict(plan),
        "scenario": {"D": res.D, "deviation": res.D - instance.d_hat},
        "value": res.value,
        "method": res.method,
    }
    _emit(_report(args, instance, result, started, method=method, forced=bool(args.force_method), **res.info))
    return EXIT_OK


def cmd_minmax(args):
    started = time.perf_counter()
    instance = _load_valid(args.instance)
    method = args.force_method or choose_minmax_method(instance)
    if method not in MINMAX_METHODS:
        raise FormatError(f"unknown minmax method {method!r}; choose from {list(MINMAX_METHODS)}")
    extra = {}
    if method == "nonoverlap-lp":
        res = minmax_nonoverlap_lp(instance)
    elif method == "split-graph-lp":
        res = minmax_general_lp(instance)
    elif method == "dag-lp":
        res = minmax_dag_lp(instance)
    else:
        res, state = decompose(instance, epsilon=args.epsilon, max_iter=args.max_iter)
        extra = {"LB": state.LB, "UB": state.UB, "iterations": state.iterations,
                 "converged": state.converged, "stop_reason": state.reason,
                 "history": [list(h) for h in state.history]}
    result = {"plan": io.plan_dict(res.plan), "value": res.value, "method": res.method, **extra}
    diag = {k: v for k, v in res.info.items() if k not in extra}
    _emit(_report(args, instance, result, started, method=method, forced=bool(args.force_method), **diag))
    return EXIT_OK


def cmd_gen(args):
    rng = np.random.default_rng(args.seed)
    plan = None
    if args.kind == "subset-sum":
        if not args.a or args.b is None:
            raise FormatError("subset-sum needs --a and --b")
        instance, plan = subset_sum_instance(args.a, args.b)
    else:
        instance = random_instance(
            rng, args.T, budget=args.budget_kind, overlap=args.overlap,
            integral=not args.fractional, gamma=args.gamma,
        )
    text = io.dumps(io.instance_to_dict(instance))
    if args.out:
        io.save_instance(instance, args.out)
    else:
        print(text)
    if args.plan_out:
        if plan is None:
            from .oracle import random_plan

            plan = random_plan(rng, instance)
        io.save_plan(plan, args.plan_out)
    return EXIT_OK


def cmd_oracle(args):
    started = time.perf_counter()
    instance = _load_valid(args.instance)
    plan = io.load_plan(args.plan)
    method = args.force_method or choose_adv_method(instance)
    res = run_adv(plan, instance, method)
    if isinstance(instance.budget, Discrete):
        ref = brute_adv_discrete(plan, instance)
    else:
        mode = args.mode
        if mode == "auto":
            mode = "integral" if (is_non_overlapping(instance) and instance.is_integral()) else "general"
        ref = brute_adv_continuous(plan, instance, mode)
    rep = OracleReport((res.method, ref.method), io.instance_digest(instance))
    rep.record(res.value, ref.value, {"plan": plan.x, "solver_D": res.D, "oracle_D": ref.D})
    result = {
        "methods": list(rep.methods),
        "max_discrepancy": rep.max_discrepancy,
        "agree": rep.ok(args.tolerance),
        "witness": rep.witness,
        "solver_value": res.value,
        "oracle_value": ref.value,
        "oracle_cost_check": plan_cost(plan, ref.scenario, instance),
    }
    _emit(_report(args, instance, result, started, method=method))
    return EXIT_OK


def cmd_bench(args):
    from .bench import run

    started = time.perf_counter()
    rows = run(repeat=args.repeat, seed=args.seed or 0)
    _emit(_report(args, None, {"backends": kernels.available_backends(), "rows": rows}, started))
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, default=1e-6, help="decomposition gap tolerance (default 1e-6)")
    common.add_argument("--max-iter", type=int, default=200, help="decomposition iteration cap (default 200)")
    common.add_argument("--seed", type=int, default=None, help="random seed for generators")
    common.add_argument("--force-method", default=None, help="bypass automatic dispatch")

    p = argparse.ArgumentParser(prog="robust-lotsize", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check an instance file")
    s.add_argument("instance")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve-det", parents=[common], help="deterministic optimum for one scenario")
    s.add_argument("instance")
    s.add_argument("--scenario", help='JSON file {"D": [...]}; nominal demands when omitted')
    s.set_defaults(func=cmd_solve_det)

    s = sub.add_parser("adv", parents=[common], help="worst-case scenario of a plan")
    s.add_argument("instance")
    s.add_argument("plan", help='JSON file {"x": [...]} or {"X": [...]}')
    s.set_defaults(func=cmd_adv)

    s = sub.add_parser("minmax", parents=[common], help="robust plan")
    s.add_argument("instance")
    s.set_defaults(func=cmd_minmax)

    s = sub.add_parser("gen", parents=[common], help="generate an instance file")
    s.add_argument("kind", choices=["random", "subset-sum"])
    s.add_argument("--T", type=int, default=4)
    s.add_argument("--budget-kind", choices=["discrete", "continuous"], default="discrete")
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--overlap", action="store_true", help="allow overlapping demand intervals")
    s.add_argument("--fractional", action="store_true", help="draw non-integral data")
    s.add_argument("--a", type=int, nargs="+", help="subset-sum items")
    s.add_argument("--b", type=int, help="subset-sum target")
    s.add_argument("--out", help="write the instance here instead of standard output")
    s.add_argument("--plan-out", help="also write a plan file (the reduction plan for subset-sum)")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("oracle", parents=[common], help="cross-check the adversary against brute force")
    s.add_argument("instance")
    s.add_argument("plan")
    s.add_argument("--mode", choices=["auto", "integral", "general"], default="auto")
    s.add_argument("--tolerance", type=float, default=1e-6)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("bench", parents=[common], help="compare compiled and numpy kernels")
    s.add_argument("--repeat", type=int, default=3)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (LotSizingError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
