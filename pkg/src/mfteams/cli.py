"""Command-line front end: ``solve``, ``sweep``, ``simulate`` and ``figures``.

Exit codes: 0 success, 1 invalid input or unwritable output, 2 when a solver
cannot classify the parameter set.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .model import DomainError, ModelParams
from .simulator import SimulationConfig, deviation_payoff_scan, run_simulation
from .solvers import (
    ManagerVariant,
    PartnershipVariant,
    PlannerVariant,
    central_planner_optimum,
    manager_equilibrium,
    partnership_equilibrium,
    verify_manager_global_max,
    verify_partnership_global_max,
    verify_planner_global_max,
)
from .sweep import PRESET_SWEEPS, PRESETS, figures, format_cell, sweep, sweep_charts, write_sweep_csv

PARAM_FLAGS = ("K", "p", "eps", "beta", "theta", "c", "kappa0", "k", "delta")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for unclassified outcomes
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=sorted(PRESETS))
    for name in PARAM_FLAGS:
        parser.add_argument(f"--{name}", type=float, default=None)


def _params(args) -> ModelParams:
    values = {}
    if args.preset:
        base = PRESETS[args.preset]
        values = {name: getattr(base, name) for name in PARAM_FLAGS}
    for name in PARAM_FLAGS:
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    missing = [f"--{n}" for n in PARAM_FLAGS if n not in values]
    if missing:
        raise UsageError(f"missing parameters {' '.join(missing)} (or use --preset)")
    return ModelParams(**values)


def _emit(pairs) -> None:
    for key, value in pairs:
        if isinstance(value, float):
            value = format_cell(value)
        elif isinstance(value, bool):
            value = str(value).lower()
        elif value is None:
            value = "NA"
        print(f"{key}={value}")


def cmd_solve(args) -> int:
    params = _params(args)
    regime = args.regime
    if regime == "manager":
        out = manager_equilibrium(params)
        pairs = [("regime", regime), ("variant", out.variant.value), ("z_star", out.z_star),
                 ("v_worker", out.v_worker), ("v_manager", out.v_manager)]
        if out.effort is not None:
            pairs.append(("effort_coeff", out.effort.coeff))
        if out.variant is ManagerVariant.INTERIOR:
            pairs.append(("global_max_verified", verify_manager_global_max(params, out.z_star)[0]))
        _emit(pairs)
        return 0
    if regime == "planner":
        out = central_planner_optimum(params)
        pairs = [("regime", regime), ("variant", out.variant.value), ("case", out.case),
                 ("limit", out.limit.value if out.limit else None), ("z_star", out.z_star),
                 ("v_central", out.v_central)]
        if out.effort is not None:
            pairs.append(("effort_coeff", out.effort.coeff))
        if out.variant in (PlannerVariant.UNIQUE_POSITIVE, PlannerVariant.ZERO_AND_POSITIVE):
            pairs.append(("global_max_verified", verify_planner_global_max(params, out.z_star)[0]))
        if out.diagnostics is not None:
            pairs += [("reason", out.diagnostics.reason), ("best_candidate", out.diagnostics.best_candidate)]
        _emit(pairs)
        return 2 if out.variant is PlannerVariant.UNCLASSIFIED else 0
    out = partnership_equilibrium(params)
    pairs = [("regime", regime), ("variant", out.variant.value), ("case", out.case),
             ("z_star", out.z_star), ("v_partner", out.v_partner)]
    if out.effort is not None:
        pairs.append(("effort_coeff", out.effort.coeff))
    if out.variant is PartnershipVariant.UNIQUE_POSITIVE:
        pairs.append(("global_max_verified", verify_partnership_global_max(params, out.z_star)[0]))
    if out.diagnostics is not None:
        d = out.diagnostics
        pairs += [("reason", d.reason), ("best_candidate", d.best_candidate),
                  ("candidate_verified", d.candidate_verified)]
    _emit(pairs)
    return 2 if out.variant is PartnershipVariant.UNCLASSIFIED else 0


def cmd_sweep(args) -> int:
    params = _params(args)
    variable = args.variable
    lo, hi = args.lo, args.hi
    if variable is None or lo is None or hi is None:
        if not args.preset:
            raise UsageError("--variable, --from and --to are required without --preset")
        d_var, d_lo, d_hi = PRESET_SWEEPS[args.preset]
        variable = variable or d_var
        lo = d_lo if lo is None else lo
        hi = d_hi if hi is None else hi
    try:
        table = sweep(params, variable, lo, hi, args.steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    write_sweep_csv(table, out)
    written = [out]
    if args.svg:
        written += sweep_charts(table, out)
    for path in written:
        print(f"wrote={path}")
    return 0


def _simulation_size(params: ModelParams, regime: str):
    """Team size, effort cost and reward share of a regime's positive solution."""
    if regime == "manager":
        out = manager_equilibrium(params)
        if out.variant is not ManagerVariant.INTERIOR:
            raise UsageError(f"manager regime has no positive team size ({out.variant.value})")
        return out.z_star, params.manager_cost, 1 - params.theta
    if regime == "planner":
        out = central_planner_optimum(params)
        if out.variant not in (PlannerVariant.UNIQUE_POSITIVE, PlannerVariant.ZERO_AND_POSITIVE):
            raise UsageError(f"planner regime has no positive team size ({out.variant.value})")
        return out.z_star, params.c, 1.0
    out = partnership_equilibrium(params)
    if out.variant is not PartnershipVariant.UNIQUE_POSITIVE:
        raise UsageError(f"partnership regime has no positive team size ({out.variant.value})")
    return out.z_star, params.c, 1.0


def cmd_simulate(args) -> int:
    params = _params(args)
    if args.teams < 1:
        raise UsageError("--teams must be >= 1")
    if args.z is not None:
        z, cost, share = args.z, params.c, 1.0
    else:
        z, cost, share = _simulation_size(params, args.regime)
    config = SimulationConfig.symmetric(params, z, args.teams, args.seed, effective_cost=cost, reward_share=share)
    if args.deviation != 1.0:
        config = SimulationConfig(config.n_teams, config.seed, params, z, config.intensity,
                                  member_deviation=args.deviation, reward_share=share)
    report = run_simulation(config)
    predicted = share * 0.5 * params.K * (1 + params.beta) * z ** (-params.eps)
    scan = deviation_payoff_scan(config, [0.5, 1.0, 1.5], report)

    def est(name, e):
        return [(f"{name}", e.mean), (f"{name}_stderr", e.stderr if report.stderr_defined else "UNDEFINED")]

    pairs = [("regime", args.regime if args.z is None else "fixed"), ("z", z), ("n_teams", args.teams),
             ("seed", args.seed), ("intensity_coeff", config.intensity.coeff),
             ("ks_distance_vs_rho", report.ks_distance_vs_rho)]
    pairs += est("mean_team_reward", report.mean_team_reward)
    pairs += est("mean_member_payoff", report.mean_member_payoff)
    pairs += est("mean_effort_cost", report.mean_effort_cost)
    pairs += est("probe_member_payoff", report.probe_member_payoff)
    pairs += [("predicted_member_payoff", predicted), ("deviation_argmax", scan.argmax)]
    _emit(pairs)
    if args.cdf_out:
        with open(args.cdf_out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["tau", "ecdf"])
            n = report.n_teams
            step = max(1, n // 1000)
            for i in range(step - 1, n, step):
                w.writerow([format_cell(report.empirical_cdf[i]), format_cell((i + 1) / n)])
    return 0


def cmd_figures(args) -> int:
    presets = [args.preset] if args.preset else sorted(PRESETS)
    for preset in presets:
        for path in figures(preset, args.out, steps=args.steps):
            print(f"wrote={path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mft", description="Teamwise mean-field competition solver")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="classify and solve one regime")
    p.add_argument("regime", choices=["manager", "planner", "partnership"])
    _add_param_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="sweep theta or beta and write a CSV table")
    _add_param_flags(p)
    p.add_argument("--variable", choices=["theta", "beta"])
    p.add_argument("--from", dest="lo", type=float)
    p.add_argument("--to", dest="hi", type=float)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", action="store_true", help="also write value and size charts")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo check at a regime's team size")
    _add_param_flags(p)
    p.add_argument("--regime", choices=["manager", "planner", "partnership"], default="planner")
    p.add_argument("--z", type=float, help="simulate this team size instead of a regime solution")
    p.add_argument("--teams", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--deviation", type=float, default=1.0, help="probe member effort multiplier")
    p.add_argument("--cdf-out", help="write a thinned empirical CDF of completion times")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("figures", help="write the figure data and SVG charts")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--out", required=True)
    p.add_argument("--steps", type=int, default=400)
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
