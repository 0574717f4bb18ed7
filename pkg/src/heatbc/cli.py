"""Scenario-driven command line front end.

Subcommands: kernel-eval, verify-theorem1, solve-theorem2, compare-oracle.
Reports are JSON, value tables are CSV, and the report path also renders
matplotlib figures next to the tables. Exit codes: 0 pass, 1 check failure,
2 configuration/usage error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import figures as figmod
from .geometry import Interval, Rectangle
from .greens import poisson_boundary_term, solve_m1
from .kernel import KernelOrder, iterated_kernel, kernel_gradient, kernel_normal_derivative
from .oracle import TAIL_PAD_FACTOR, cascade_volume_potential, crank_nicolson_m1
from .potentials import volume_potential, volume_potential_many
from .quadrature import make_boundary_rule, make_time_rule, make_volume_rule
from .report import add_check, new_report, write_csv, write_report
from .scenario import Scenario, bundled_scenarios, load_scenario
from .transparent_bc import verify_theorem1
from .util import ConfigError, NumericalError

EXIT_PASS = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _out_dir(args, scenario_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path("heatbc-out") / scenario_name


def cmd_kernel_eval(args) -> int:
    order = KernelOrder(args.m, args.n)
    x = np.asarray(args.x, dtype=float)
    if x.shape != (order.n,):
        raise ConfigError(f"--x needs {order.n} coordinate(s), got {x.tolist()}")
    # Direction for the reported normal derivative: radially outward from the
    # origin through x, or the first axis when x = 0.
    direction = np.zeros(order.n)
    norm = float(np.linalg.norm(x))
    if norm > 0:
        direction = x / norm
    else:
        direction[0] = 1.0
    header = ["m", "n"] + [f"x{i}" for i in range(order.n)] + ["t", "epsilon"]
    header += [f"grad{i}" for i in range(order.n)] + ["normal_derivative"]
    print(",".join(header))
    for t in args.t:
        value = iterated_kernel(order, x, t)
        if t > 0:
            grad = np.atleast_1d(kernel_gradient(order, x, t))
            dn = kernel_normal_derivative(order, x, t, direction)
        else:
            grad = np.zeros(order.n)
            dn = 0.0
        row = [str(args.m), str(args.n)] + [f"{c:.12g}" for c in x]
        row += [f"{t:.12g}", f"{value:.12g}"]
        row += [f"{c:.12g}" for c in grad] + [f"{dn:.12g}"]
        print(",".join(row))
    return EXIT_PASS


def cmd_verify_theorem1(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    levels = max(1, args.levels)
    res_list = [scenario.resolutions]
    for _ in range(levels - 1):
        res_list.append(res_list[-1].refined())
    level_reports = [verify_theorem1(scenario, res) for res in res_list]

    tol = scenario.tolerances
    report = new_report("verify_theorem1", scenario.raw)
    report["levels"] = [rep.to_dict() for rep in level_reports]
    base = level_reports[0]
    for entry in base.per_k:
        add_check(report, f"bc_residual_k{entry['k']}", entry["max_normalized"],
                  tol["bc_residual"])
    add_check(report, "interior_identity", base.interior_normalized,
              tol["interior_identity"])
    add_check(report, "pde_residual", base.pde_residual_normalized, tol["pde_residual"])
    slope_floor = tol["ic_slope_factor"] * scenario.order.m
    if base.ic_slope is None:
        add_check(report, "ic_slope", None, slope_floor, passed=base.scale_max_u == 0.0,
                  comparison=">=")
    else:
        add_check(report, "ic_slope", base.ic_slope, slope_floor, comparison=">=")
    if levels > 1:
        worst = [rep.max_normalized_bc() for rep in level_reports]
        monotone = all(b < a for a, b in zip(worst, worst[1:]))
        ratios = [b / a if a > 0 else 0.0 for a, b in zip(worst, worst[1:])]
        add_check(report, "bc_monotone", max(ratios) if ratios else 0.0, 1.0,
                  passed=monotone)
        orders = [np.log2(a / b) for a, b in zip(worst, worst[1:]) if b > 0 and a > 0]
        min_order = min(orders) if orders else float("inf")
        add_check(report, "refinement_order", min_order, tol["min_refinement_order"],
                  comparison=">=")
        report["convergence"] = {
            "bc_max_normalized": [float(w) for w in worst],
            "orders": [float(o) for o in orders],
        }

    outdir = _out_dir(args, scenario.name)
    rows = []
    for level, rep in enumerate(level_reports):
        for row in rep.boundary_values:
            rows.append([level, row["t"], row["k"], row["node"],
                         *row["point"], row["residual"], row["normalized"]])
    point_cols = [f"x{i}" for i in range(scenario.order.n)]
    csv_path = write_csv(outdir / "residuals.csv",
                         ["level", "t", "k", "node", *point_cols, "residual", "normalized"],
                         rows)
    report["outputs"]["csv"].append(str(csv_path))
    if not args.no_figures:
        for path in figmod.render_verify_figures(level_reports, outdir):
            report["outputs"]["figures"].append(str(path))
    report["timings"]["wall_s"] = time.perf_counter() - started
    write_report(report, outdir / "report.json")
    print(f"verify-theorem1 {scenario.name}: {'PASS' if report['pass'] else 'FAIL'} "
          f"(report: {outdir / 'report.json'})")
    return EXIT_PASS if report["pass"] else EXIT_CHECK_FAILURE


def _solve_probes(domain):
    if isinstance(domain, Interval):
        fr = np.linspace(0.1, 0.9, 9)
        return (domain.a + fr * domain.length)[:, None]
    if isinstance(domain, Rectangle):
        fr = np.array([0.25, 0.5, 0.75])
        gx = domain.ax + fr * (domain.bx - domain.ax)
        gy = domain.ay + fr * (domain.by - domain.ay)
        xx, yy = np.meshgrid(gx, gy, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])
    raise ConfigError(f"solve-theorem2 supports Interval and Rectangle, got {domain!r}")


def cmd_solve_theorem2(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    if scenario.order.m != 1:
        raise ConfigError(f"solve-theorem2 requires a first-order scenario, got m={scenario.order.m}")
    domain = scenario.domain
    res = scenario.resolutions
    T = scenario.horizon
    f = scenario.source
    phi = scenario.boundary_data
    order1 = KernelOrder(1, scenario.order.n)
    vrule = make_volume_rule(domain, res.volume)
    brule = make_boundary_rule(domain, res.boundary)
    trule = make_time_rule(T, res.time)
    probes = _solve_probes(domain)

    u_solver = np.array([
        solve_m1(f, phi, domain, vrule, brule, trule, x, T) for x in probes
    ])

    source_is_zero = f.note == "zero"

    def dirichlet_data(points, t):
        vals = phi(points, t)
        if not source_is_zero and t > 0.0:
            rule = make_time_rule(t, res.time)
            vals = vals + volume_potential_many(order1, f, domain, vrule, rule, points, t)
        return vals

    grid = crank_nicolson_m1(f, dirichlet_data, domain, res.oracle_nx, res.oracle_nt, T)
    u_oracle = np.array([grid.sample(x, T) for x in probes])

    report = new_report("solve_theorem2", scenario.raw)
    diff = float(np.max(np.abs(u_solver - u_oracle)))
    add_check(report, "solve_linf_vs_oracle", diff, scenario.tolerances["solve_linf"])
    if phi.is_zero:
        pure = np.array([
            volume_potential(order1, f, domain, vrule, trule, x, T) for x in probes
        ])
        identical = bool(np.all(pure == u_solver))
        add_check(report, "remark2_pure_potential_path", 0.0 if identical else 1.0, 0.0,
                  passed=identical)
    report["probe_times"] = [float(T)]

    outdir = _out_dir(args, scenario.name)
    point_cols = [f"x{i}" for i in range(scenario.order.n)]
    rows = [[*map(float, probes[i]), float(T), float(u_solver[i]), float(u_oracle[i]),
             float(abs(u_solver[i] - u_oracle[i]))]
            for i in range(len(probes))]
    csv_path = write_csv(outdir / "solution.csv",
                         [*point_cols, "t", "u_solver", "u_oracle", "abs_diff"], rows)
    report["outputs"]["csv"].append(str(csv_path))
    if not args.no_figures:
        for path in figmod.render_solve_figures(probes, u_solver, u_oracle, T, outdir):
            report["outputs"]["figures"].append(str(path))
    report["timings"]["wall_s"] = time.perf_counter() - started
    write_report(report, outdir / "report.json")
    print(f"solve-theorem2 {scenario.name}: {'PASS' if report['pass'] else 'FAIL'} "
          f"(report: {outdir / 'report.json'})")
    return EXIT_PASS if report["pass"] else EXIT_CHECK_FAILURE


def cmd_compare_oracle(args) -> int:
    started = time.perf_counter()
    scenario = load_scenario(args.scenario)
    m = scenario.order.m
    if m < 2:
        raise ConfigError(f"compare-oracle requires m >= 2, got m={m}")
    domain = scenario.domain
    res = scenario.resolutions
    f = scenario.source
    order = scenario.order
    vrule = make_volume_rule(domain, res.volume)
    points, times = scenario.probe_points()
    pad = TAIL_PAD_FACTOR * float(np.sqrt(scenario.horizon))
    core, wing = (96, 32) if order.n == 1 else (40, 12)

    direct = np.empty(len(times))
    cascade = np.empty(len(times))
    for i, (x, t) in enumerate(zip(points, times)):
        trule = make_time_rule(float(t), res.time)
        direct[i] = volume_potential(order, f, domain, vrule, trule, x, float(t))
        cascade[i] = cascade_volume_potential(m, f, domain, pad, vrule, res.time,
                                              x, float(t), core_nodes=core,
                                              wing_nodes=wing)
    scale = float(np.max(np.abs(direct)))
    rel = np.abs(direct - cascade) / scale if scale > 0 else np.abs(direct - cascade)

    report = new_report("compare_oracle", scenario.raw, seed=scenario.probe_seed)
    add_check(report, "oracle_agreement", float(np.max(rel)),
              scenario.tolerances["oracle_compare"])
    report["scale"] = scale

    outdir = _out_dir(args, scenario.name)
    point_cols = [f"x{i}" for i in range(order.n)]
    rows = [[*map(float, points[i]), float(times[i]), float(direct[i]),
             float(cascade[i]), float(rel[i])] for i in range(len(times))]
    csv_path = write_csv(outdir / "comparison.csv",
                         [*point_cols, "t", "direct", "cascade", "normalized_diff"], rows)
    report["outputs"]["csv"].append(str(csv_path))
    if not args.no_figures:
        for path in figmod.render_compare_figures(rel, outdir):
            report["outputs"]["figures"].append(str(path))
    report["timings"]["wall_s"] = time.perf_counter() - started
    write_report(report, outdir / "report.json")
    print(f"compare-oracle {scenario.name}: {'PASS' if report['pass'] else 'FAIL'} "
          f"(report: {outdir / 'report.json'})")
    return EXIT_PASS if report["pass"] else EXIT_CHECK_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heatbc",
        description="Iterated heat potentials and transparent boundary conditions. "
                    f"Bundled scenarios: {', '.join(bundled_scenarios())}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel-eval", help="print kernel, gradient, and normal-derivative values")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, nargs="+", required=True,
                   help="evaluation displacement (n coordinates)")
    p.add_argument("--t", type=float, nargs="+", required=True, help="one or more time lags")
    p.set_defaults(func=cmd_kernel_eval)

    for name, func, extra in (
        ("verify-theorem1", cmd_verify_theorem1, "levels"),
        ("solve-theorem2", cmd_solve_theorem2, None),
        ("compare-oracle", cmd_compare_oracle, None),
    ):
        p = sub.add_parser(name)
        p.add_argument("scenario", help="scenario file path or bundled scenario name")
        p.add_argument("--out", default=None, help="output directory (default heatbc-out/<name>)")
        p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
        if extra == "levels":
            p.add_argument("--levels", type=int, default=2,
                           help="number of resolution levels (base plus refinements)")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
