"""Command-line driver.

Exit codes: 0 success, 1 infeasible / fractional / not-TU outcome (details
on stderr), 2 malformed input or usage error.  Every index printed or read
is 0-based.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import fileio
from .bnb import BnbOptions, solve_bnb
from .errors import (InfeasibleInstanceError, IntegralityError, MalformedProblemError,
                     ResourceLimitError)
from .harness import (BenchConfig, format_table, gen_kmedoid_instance, gen_nonexpendable_instance,
                      gen_transport_instance, records_to_json, run_benchmark, summarize,
                      table1_config)
from .lp import INT_TOL, SolverOptions, Status, check_integrality, solve_simplex
from .models import (Allocation, KMedoidInstance, NonExpendableInstance, build_expendable_matrix,
                     build_kmedoid_reduced_matrix, build_model, build_nonexpendable_matrix,
                     extract_allocation, integer_vars)
from .oracle import oracle_kmedoid, oracle_nonexpendable, oracle_transport
from .tu import as_sign_matrix, is_tu_exhaustive, is_tu_ghouila_houri


class _Outcome(Exception):
    """Non-success result: message for stderr plus an optional report for stdout."""

    def __init__(self, message, report=None, code=1):
        super().__init__(message)
        self.report = report
        self.code = code


def _dims(inst):
    return inst.n if isinstance(inst, KMedoidInstance) else (inst.m, inst.n)


def _solve(inst, args):
    tol = args.tolerance
    lp_opts = SolverOptions(max_iterations=args.max_iterations, engine=args.engine)
    kind = inst.kind

    if args.solver == "oracle":
        if kind == "kmedoid":
            obj, medoids = oracle_kmedoid(inst)
            D = inst.distances[list(medoids)]
            assign = tuple(int(medoids[i]) for i in D.argmin(axis=0))
            alloc = Allocation(kind, None, tuple(medoids), assign)
        else:
            fn = oracle_nonexpendable if isinstance(inst, NonExpendableInstance) else oracle_transport
            obj, grid = fn(inst)
            alloc = Allocation(kind, grid)
        return fileio.allocation_report(obj, "Optimal", alloc, None, solver="oracle")

    problem = build_model(inst)
    if args.solver == "bnb":
        sol = solve_bnb(problem, integer_vars(inst), BnbOptions(int_tol=tol, lp=lp_opts))
        if sol.status is not Status.OPTIMAL:
            raise _Outcome(f"integer program is {sol.status.value.lower()}",
                           fileio.allocation_report(None, sol.status.value, None, None, solver="bnb"))
        alloc = extract_allocation(sol, kind, _dims(inst), inst, tol)
        return fileio.allocation_report(sol.objective, "Optimal", alloc, check_integrality(sol.point, tol),
                                        solver="bnb", nodes=sol.nodes_explored)

    sol = solve_simplex(problem, lp_opts)
    if sol.status is not Status.OPTIMAL:
        raise _Outcome(f"LP relaxation is {sol.status.value.lower()}",
                       fileio.allocation_report(None, sol.status.value, None, None, solver="lp"))
    report = check_integrality(sol.point, tol)
    try:
        alloc = extract_allocation(sol, kind, _dims(inst), inst, tol)
    except IntegralityError:
        if kind != "kmedoid":
            raise _Outcome(f"LP vertex is fractional (max deviation {report.max_fractional_deviation:.3g})",
                           fileio.allocation_report(sol.objective, "Fractional", None, report, solver="lp"))
        ip = solve_bnb(problem, integer_vars(inst), BnbOptions(int_tol=tol, lp=lp_opts))
        alloc = extract_allocation(ip, kind, _dims(inst), inst, tol)
        note = (f"simplex vertex was fractional (max deviation {report.max_fractional_deviation:.3g}, "
                f"LP bound {sol.objective:.10g}); solved by branch and bound in {ip.nodes_explored} nodes")
        return fileio.allocation_report(ip.objective, "Optimal", alloc, check_integrality(ip.point, tol),
                                        solver="bnb", fallback=True, note=note,
                                        lp_integrality={"is_integral": False,
                                                        "max_deviation": report.max_fractional_deviation})
    return fileio.allocation_report(sol.objective, "Optimal", alloc, report, solver="lp",
                                    iterations=sol.iterations)


def _format_solution(report) -> str:
    lines = [f"status     {report['status']}", f"solver     {report.get('solver')}"]
    if report["objective"] is not None:
        lines.append(f"objective  {report['objective']:.10g}")
    alloc = report["allocation"]
    if isinstance(alloc, dict):
        lines.append("medoids    " + " ".join(map(str, alloc["medoids"])))
        lines.append("assignment " + " ".join(map(str, alloc["assignment"])))
    elif alloc is not None:
        lines.append("allocation")
        lines.extend("  " + " ".join(f"{v:>4}" for v in row) for row in alloc)
    if report["integrality"]:
        lines.append(f"integral   {report['integrality']['is_integral']} "
                     f"(max deviation {report['integrality']['max_deviation']:.3g})")
    if report.get("note"):
        lines.append(f"note       {report['note']}")
    return "\n".join(lines)


def _emit(report, fmt, out=None):
    text = json.dumps(report, indent=2) if fmt == "json" else _format_solution(report)
    print(text, file=out or sys.stdout)


def cmd_solve(args):
    inst = fileio.load_instance(args.input, getattr(args, "k", None))
    if args.kind_required and inst.kind != args.kind_required:
        raise MalformedProblemError(f"expected a {args.kind_required} instance, got {inst.kind}")
    _emit(_solve(inst, args), args.format)
    return 0


def cmd_check_tu(args):
    with open(args.input) as fh:
        m = as_sign_matrix(fileio.read_matrix_csv(fh.read()))
    if args.method == "exhaustive":
        rep = is_tu_exhaustive(m)
    elif args.method == "ghouila-houri":
        rep = is_tu_ghouila_houri(m, "all")
    else:
        rep = is_tu_ghouila_houri(m, "sampled", seed=args.seed, trials=args.trials)
    verdict = "TU" if rep.is_tu else "NOT TU"
    if rep.is_tu and rep.method.value == "Sampled":
        verdict = "PROBABLY TU"
    payload = {"verdict": verdict, "method": rep.method.value, "examined": rep.examined,
               "witness": None if rep.witness is None else
               {k: list(v) if isinstance(v, tuple) else v for k, v in vars(rep.witness).items()}}
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(verdict)
        if rep.witness is not None:
            w = payload["witness"]
            if "determinant" in w:
                print(f"witness: rows {w['rows']} cols {w['cols']} determinant {w['determinant']}")
            else:
                print(f"witness: columns {w['cols']} admit no signed split")
    if not rep.is_tu:
        print(f"matrix is not totally unimodular ({rep.method.value} witness)", file=sys.stderr)
        return 1
    return 0


def cmd_matrix(args):
    if args.model == "expendable":
        m = build_expendable_matrix(args.m, args.n)
    elif args.model == "non_expendable":
        m = build_nonexpendable_matrix(args.m, args.n)
    else:
        m = build_kmedoid_reduced_matrix(args.n)
    sys.stdout.write(fileio.write_matrix_csv(m.entries))
    return 0


def cmd_gen(args):
    if args.model == "kmedoid":
        inst = gen_kmedoid_instance(args.n, args.seed, args.k)
    elif args.model == "expendable":
        inst = gen_transport_instance(args.m, args.n, args.seed, args.max_units)
    else:
        inst = gen_nonexpendable_instance(args.m, args.n, args.seed, args.max_units)
    print(fileio.dump_instance(inst))
    return 0


def cmd_bench(args):
    if args.preset == "table1":
        cfg = table1_config(args.seed, args.repetitions, args.engine)
    else:
        cfg = BenchConfig("kmedoid", (20, 40), (5,), (args.seed,), args.repetitions, args.engine)
    if args.sizes:
        cfg = BenchConfig(cfg.model, tuple(args.sizes), cfg.ks, cfg.seeds, cfg.repetitions, cfg.engine)

    def progress(rec):
        if args.verbose:
            print(f"n={rec.n} k={rec.k}: lp {rec.lp_time} s, bnb {rec.bnb_time} s", file=sys.stderr)

    records = run_benchmark(cfg, progress)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(records_to_json(records, cfg))
    if args.format == "json":
        print(records_to_json(records, cfg))
    else:
        print(format_table(records))
        s = summarize(records)
        print(f"rows {s.rows}, errors {s.errors}, objectives agree {s.all_agree}, "
              f"LP integral {s.all_integral}, LP faster on every n>=200 row {s.trend}")
    return 0 if all(r.error is None for r in records) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relieflp",
        description="Relief allocation/location models solved at LP vertices. Indices are 0-based.")
    sub = p.add_subparsers(dest="command", required=True)

    def solver_flags(sp):
        sp.add_argument("--input", required=True, help="instance JSON")
        sp.add_argument("--solver", choices=("lp", "bnb", "oracle"), default="lp")
        sp.add_argument("--tolerance", type=float, default=INT_TOL, help="integrality tolerance")
        sp.add_argument("--seed", type=int, default=0, help="unused by deterministic solvers")
        sp.add_argument("--format", choices=("json", "table"), default="json")
        sp.add_argument("--max-iterations", type=int, default=None)
        sp.add_argument("--engine", choices=("tableau", "highs"), default="tableau")

    s = sub.add_parser("solve", help="solve any instance file")
    solver_flags(s)
    s.add_argument("--k", type=int, default=None, help="override k for k-medoid input")
    s.set_defaults(func=cmd_solve, kind_required=None)

    for name, kind in (("solve-expendable", "expendable"), ("solve-nonexpendable", "non_expendable")):
        s = sub.add_parser(name, help=f"solve a {kind} allocation instance")
        solver_flags(s)
        s.set_defaults(func=cmd_solve, kind_required=kind)

    s = sub.add_parser("solve-kmedoid", help="choose k relief centres among the points")
    solver_flags(s)
    s.add_argument("--k", type=int, default=None)
    s.set_defaults(func=cmd_solve, kind_required="kmedoid")

    t = sub.add_parser("check-tu", help="decide total unimodularity of a CSV matrix")
    t.add_argument("--input", required=True)
    t.add_argument("--method", choices=("exhaustive", "ghouila-houri", "sampled"), default="exhaustive")
    t.add_argument("--trials", type=int, default=100_000)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--format", choices=("json", "table"), default="table")
    t.set_defaults(func=cmd_check_tu)

    mx = sub.add_parser("matrix", help="print a model's system matrix as CSV")
    mx.add_argument("--model", choices=("expendable", "non_expendable", "kmedoid-reduced"), required=True)
    mx.add_argument("--m", type=int, default=1)
    mx.add_argument("--n", type=int, required=True)
    mx.set_defaults(func=cmd_matrix)

    g = sub.add_parser("gen", help="write a seeded random instance as JSON")
    g.add_argument("--model", choices=("kmedoid", "expendable", "non_expendable"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-units", type=int, default=5)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="LP versus branch and bound timing table")
    b.add_argument("--preset", choices=("table1", "smoke"), default="table1")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repetitions", type=int, default=3)
    b.add_argument("--engine", choices=("tableau", "highs"), default="highs")
    b.add_argument("--sizes", type=int, nargs="*", help="override the preset's point counts")
    b.add_argument("--out", help="write JSON records here")
    b.add_argument("--format", choices=("json", "table"), default="table")
    b.add_argument("--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)
    return p


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _Outcome as out:
        if out.report is not None:
            _emit(out.report, getattr(args, "format", "json"))
        print(f"error: {out}", file=sys.stderr)
        return out.code
    except MalformedProblemError as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleInstanceError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
