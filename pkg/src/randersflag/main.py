#!/usr/bin/env python3
import argparse
import asyncio
import importlib.resources
import sys
from typing import List, Optional

import numpy as np

from randersflag.algebra import validate
from randersflag.checks import CheckContext, CheckManager
from randersflag.classify import is_perfect
from randersflag.config import parse_overrides
from randersflag.curvature import compatibility_defect, pin_slot_mapping, puttmann_printed, torsion_defect
from randersflag.errors import InputError, RandersFlagError
from randersflag.flag import compare_formulas_async, flag_curvature_printed, make_flag, scan_flags_async
from randersflag.metric import bi_invariance_defect
from randersflag.problem import Problem, fixture_names, load
from randersflag.report import FORMATS, RunReport
from randersflag.ui import format_histogram, gradient_text, log


def get_current_version():
    try:
        ref = importlib.resources.files("randersflag").joinpath("version.txt")
        with importlib.resources.as_file(ref) as path:
            return path.read_text().strip()
    except Exception:
        return "unknown"


def parse_vector(text: str, dim: int, name: str) -> np.ndarray:
    try:
        values = [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise InputError(f"--{name} must be comma-separated numbers, got '{text}'")
    if len(values) != dim:
        raise InputError(f"--{name} needs {dim} components, got {len(values)}")
    return np.array(values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randersflag",
        description="randersflag: curvature of invariant Randers metrics on Lie groups and homogeneous spaces.",
        formatter_class=argparse.RawTextHelpFormatter
    )
    parser.add_argument("--version", action="store_true", help="Display the current version and exit.")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="table",
                        help="Output format: human table or line-delimited JSON records (default: table).")
    common.add_argument("--tol", type=str, default="", metavar='"key1=val1;key2=val2"',
                        help="Tolerance overrides, e.g. \"predicate=1e-8;fd=1e-5\".")

    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("validate", parents=[common], help="Load a problem and report every structural defect.")
    p.add_argument("problem", help=f"Problem file or shipped fixture ({', '.join(fixture_names())}).")

    p = sub.add_parser("flag", parents=[common], help="Flag curvature of one flag, oracle and printed forms.")
    p.add_argument("problem")
    p.add_argument("--y", required=True, metavar="CSV", help="Pole direction, comma-separated components.")
    p.add_argument("--u", required=True, metavar="CSV", help="Second spanning direction.")

    for name, text in (("scan", "Seeded random flag scan with statistics and histogram."),
                       ("compare", "Printed formulas against the oracle over seeded random flags.")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("problem")
        p.add_argument("--n", type=int, default=1000, metavar="NUM", help="Number of flags (default: 1000).")
        p.add_argument("--seed", type=int, default=0, help="Random seed (default: 0).")
        p.add_argument("-w", "--workers", type=int, default=4, metavar="NUM",
                       help="Concurrent evaluation workers (default: 4).")

    p = sub.add_parser("check", parents=[common], help="Run a predicate check. Use 'check --list' to see them.")
    p.add_argument("problem", nargs='?', default=None)
    p.add_argument("predicate", nargs='?', default=None)
    p.add_argument("--list", action="store_true", help="List all available checks and exit.")
    p.add_argument("--k", type=float, default=None, help="Curvature constant for the ys-positive / ys-negative checks.")
    p.add_argument("--x", type=str, default=None, metavar="CSV", help="Vector for the milnor check (default: the drift).")
    p.add_argument("--samples", type=int, default=256, help="Random probes for sampling checks (default: 256).")
    p.add_argument("--seed", type=int, default=0, help="Random seed (default: 0).")

    return parser


def new_report(command: str, problem: Problem) -> RunReport:
    return RunReport(
        command=command,
        problem=problem.name,
        digest=problem.digest,
        tool_version=get_current_version(),
        tolerances=problem.tolerances.as_dict(),
    )


def cmd_validate(problem: Problem) -> RunReport:
    report = new_report("validate", problem)
    tol = problem.tolerances
    alg, metric, randers = problem.algebra, problem.metric, problem.randers

    structure = validate(alg, tol.jacobi)
    report.add("algebra", {
        'dim': alg.dim,
        'basis': list(alg.basis_names),
        'antisymmetry_defect': structure.antisymmetry_defect,
        'jacobi_defect': structure.jacobi_defect,
        'is_perfect': is_perfect(alg, tol.rank),
    }, tol.jacobi, structure.passed)

    bi_defect = bi_invariance_defect(alg, metric.g0)
    report.add("metric", {
        'source': metric.source,
        'min_eigenvalue': float(np.min(np.linalg.eigvalsh(metric.inner_matrix))),
        'bi_invariance_defect_g0': bi_defect,
        'phi_is_identity': metric.is_phi_identity(tol.structural),
    }, tol.positive_definite)

    if problem.split is not None:
        report.add("split", {
            'h_indices': list(problem.split.h_indices),
            'm_dim': int(problem.split.m_basis.shape[0]),
        }, tol.structural)

    report.add("randers", {
        'drift': [float(v) for v in randers.drift],
        'norm_bound': randers.norm_bound,
        'strong_convexity_margin': randers.strong_convexity_margin(),
        'is_riemannian': randers.is_riemannian,
        'parallel_defect': randers.parallel_defect,
        'is_berwald': randers.is_berwald,
    }, tol.predicate)

    symmetry = randers.curvature.symmetry_defects()
    symmetry['torsion_defect'] = torsion_defect(randers.connection, alg)
    symmetry['compatibility_defect'] = compatibility_defect(randers.connection)
    report.add("curvature", symmetry, tol.structural, max(symmetry.values()) <= tol.structural)

    if bi_defect <= tol.structural:
        mapping = pin_slot_mapping()
        basis = np.eye(alg.dim) if problem.split is None else problem.split.m_basis
        gap = 0.0
        for a in basis:
            for b in basis:
                for c in basis:
                    for d in basis:
                        printed = puttmann_printed(a, b, c, d, alg, metric, problem.split, warn=False)
                        gap = max(gap, abs(printed - mapping.sign * randers.curvature.component(a, b, c, d)))
        report.add("puttmann", {'slot_mapping': mapping.description, 'max_gap': gap}, tol.formula, gap <= tol.formula)
    else:
        log("validate", "g0 is not bi-invariant; Puttmann's formula is not compared", "WARNING")

    return report


def cmd_flag(problem: Problem, y_text: str, u_text: str) -> RunReport:
    report = new_report("flag", problem)
    tol = problem.tolerances
    randers = problem.randers
    flag = make_flag(parse_vector(y_text, problem.dim, "y"), parse_vector(u_text, problem.dim, "u"),
                     problem.metric, problem.split, tol.degeneracy)

    result = flag_curvature_printed(flag, randers)
    if not result.is_berwald:
        log("flag", f"drift is not parallel (parallel_defect={randers.parallel_defect:.3g}); k_oracle unavailable", "WARNING")
    report.add("flag", result.as_dict(), tol.formula)

    if result.discrepancy is not None:
        report.discrepancy("k_printed vs k_oracle", result.discrepancy, tol.formula)
        report.discrepancy("k_corrected vs k_oracle", abs(result.k_corrected - result.k_oracle), tol.formula)
    gap = abs(result.det_printed - result.det_direct)
    if gap > tol.formula:
        log("flag", f"printed determinant {result.det_printed:.12g} differs from g_Y determinant {result.det_direct:.12g}", "WARNING")
    report.discrepancy("determinant printed vs g_Y", gap, tol.formula)
    return report


async def cmd_scan(problem: Problem, n: int, seed: int, workers: int) -> RunReport:
    report = new_report("scan", problem)
    stats = await scan_flags_async(problem.randers, n, seed, workers)
    report.add("scan", stats.as_dict(), problem.tolerances.formula,
               lines=format_histogram(stats.histogram, stats.edges), table_hidden=('histogram', 'edges'))
    return report


async def cmd_compare(problem: Problem, n: int, seed: int, workers: int) -> RunReport:
    report = new_report("compare", problem)
    comparison = await compare_formulas_async(problem.randers, n, seed, workers)
    tol = problem.tolerances.formula
    for row in comparison.rows:
        report.add(f"compare {row.name}", row.as_dict(), tol)
        if row.max is not None:
            report.discrepancy(row.name, row.max, tol, row.note)
    return report


def list_checks(manager: CheckManager) -> None:
    print(gradient_text("\nAvailable checks:\n"))
    categories = {}
    for check in manager.list_checks():
        categories.setdefault(check['category'], []).append(check)
    for category, checks in categories.items():
        print(gradient_text(f"\n{category.upper()}:"))
        for check in checks:
            needs = " (needs --k)" if check['needs_k'] else ""
            print(f"  {check['name']} - {check['description']}{needs}")


async def cmd_check(problem: Problem, manager: CheckManager, args) -> RunReport:
    report = new_report(f"check {args.predicate}", problem)
    context = CheckContext(
        problem=problem,
        tolerances=problem.tolerances,
        k=args.k,
        x=None if args.x is None else list(parse_vector(args.x, problem.dim, "x")),
        samples=args.samples,
        seed=args.seed,
    )
    result = await manager.run_check(args.predicate, context)
    report.add(args.predicate, result.data, result.tolerance, result.verdict, result.lines)
    return report


async def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.version:
        print(f"randersflag version: {gradient_text(get_current_version())}")
        return 0
    if not args.command:
        parser.error("a command is required (validate, flag, scan, check, compare)")

    manager = None
    if args.command == "check":
        checks_ref = importlib.resources.files("randersflag").joinpath("checks")
        with importlib.resources.as_file(checks_ref) as checks_path:
            manager = CheckManager(checks_path)
            manager.load_all_checks()
        if args.list:
            list_checks(manager)
            return 0
        if not args.problem or not args.predicate:
            parser.error("check needs a problem and a predicate (or --list)")

    problem = load(args.problem, parse_overrides(args.tol))

    if args.command == "validate":
        report = cmd_validate(problem)
    elif args.command == "flag":
        report = cmd_flag(problem, args.y, args.u)
    elif args.command == "scan":
        report = await cmd_scan(problem, args.n, args.seed, args.workers)
    elif args.command == "compare":
        report = await cmd_compare(problem, args.n, args.seed, args.workers)
    else:
        report = await cmd_check(problem, manager, args)

    report.emit(args.format)
    return 0


def run(argv: Optional[List[str]] = None):
    try:
        code = asyncio.run(main(argv))
    except RandersFlagError as e:
        print(f"Error: {e}", file=sys.stderr)
        code = e.exit_code
    except KeyboardInterrupt:
        print(gradient_text("\nCancelled by user. Exiting.", stream=sys.stderr), file=sys.stderr)
        code = 130
    sys.exit(code)


if __name__ == "__main__":
    run()
