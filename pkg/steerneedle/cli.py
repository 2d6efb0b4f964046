# Copyright 2024 The SteerNeedle Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""SteerNeedle CLI."""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from absl import logging
from termcolor import cprint

import steerneedle
from steerneedle import constants as consts
from steerneedle import environment
from steerneedle.baselines.rrt import RrtConfig
from steerneedle.environment import generation
from steerneedle.environment.scenario import (
    save_point_file,
    save_scenario,
    scenario_to_dict,
)
from steerneedle.harness import appendix, benchmark
from steerneedle.harness.verification import verify_trajectory
from steerneedle.planner.config import PlannerConfig
from steerneedle.planner.result import PlanResult, PlanStatus, load_plan, save_plan
from steerneedle.primitives import Resolution

_STATUS_COLORS = {
    PlanStatus.SOLVED: "green",
    PlanStatus.TIMED_OUT: "yellow",
    PlanStatus.EXHAUSTED: "red",
}

_DEFAULT_BENCH_PLANNERS = "rcs,rcs-b,rrt,single-res"

_CASES_POINT_FILE = "obstacles.xyz"


def _default_threads() -> int:
    return int(steerneedle.RC_DEFAULTS.get("DEFAULT_THREADS", 1))


def _default_time_budget() -> float:
    return float(steerneedle.RC_DEFAULTS.get("DEFAULT_TIME_BUDGET", consts.TIME_BUDGET))


def _add_budget_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--threads",
        default=_default_threads(),
        type=int,
        help="worker threads for planners that can use them",
    )
    parser.add_argument(
        "--time-budget",
        default=_default_time_budget(),
        type=float,
        help="wall-clock budget per planning query, in seconds",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steerneedle")

    parser.add_argument(
        "--version",
        action="store_true",
        help="print the version of steerneedle.",
    )

    subparsers = parser.add_subparsers(dest="subparser_name", help="sub-command help")

    plan_parser = subparsers.add_parser("plan", help="solve one scenario")
    plan_parser.add_argument(
        "--scenario",
        required=True,
        help="scenario file, or a library name (" + ", ".join(environment.ALL) + ")",
    )
    plan_parser.add_argument(
        "--planner", default="rcs", choices=benchmark.ALL_PLANNERS
    )
    _add_budget_arguments(plan_parser)
    plan_parser.add_argument(
        "--delta-ell-max", default=consts.DELTA_ELL_MAX, type=float
    )
    plan_parser.add_argument("--cutoff-ell", default=consts.CUTOFF_ELL, type=float)
    plan_parser.add_argument(
        "--cutoff-theta", default=consts.CUTOFF_THETA, type=float
    )
    plan_parser.add_argument("--d-sim", default=consts.D_SIM, type=float)
    plan_parser.add_argument("--alpha", default=consts.ALPHA, type=float)
    plan_parser.add_argument(
        "--collision-step", default=consts.COLLISION_STEP, type=float
    )
    plan_parser.add_argument("--seed", default=0, type=int, help="sampler seed")
    plan_parser.add_argument(
        "--keep-improving",
        action="store_true",
        help="search until the budget runs out and keep the cheapest plan",
    )
    plan_parser.add_argument("--out", help="where to write the plan file")

    bench_parser = subparsers.add_parser("bench", help="run a benchmark sweep")
    bench_parser.add_argument(
        "--suite", required=True, help="directory of scenario files"
    )
    bench_parser.add_argument(
        "--planners",
        default=_DEFAULT_BENCH_PLANNERS,
        help="comma-separated planner names",
    )
    _add_budget_arguments(bench_parser)
    bench_parser.add_argument(
        "--case-workers", default=1, type=int, help="cases solved concurrently"
    )
    bench_parser.add_argument(
        "--first-solution",
        action="store_true",
        help="stop each run at its first solution instead of improving it",
    )
    bench_parser.add_argument("--baseline", help="planner that lengths are relative to")
    bench_parser.add_argument("--out", required=True, help="record CSV to write")

    gen_parser = subparsers.add_parser(
        "gen", help="generate a synthetic scenario with one sampled query"
    )
    gen_parser.add_argument("--seed", default=0, type=int)
    gen_parser.add_argument("--n-vessels", default=consts.N_VESSELS, type=int)
    gen_parser.add_argument(
        "--point-spacing", default=consts.POINT_SPACING, type=float
    )
    gen_parser.add_argument("--box-size", default=consts.BOX_SIZE, type=float)
    gen_parser.add_argument("--out", required=True, help="scenario file to write")

    cases_parser = subparsers.add_parser(
        "cases", help="sample test cases in a scenario's environment"
    )
    cases_parser.add_argument("--scenario", required=True)
    cases_parser.add_argument("--n-starts", default=50, type=int)
    cases_parser.add_argument("--goals-per-start", default=10, type=int)
    cases_parser.add_argument("--seed", default=0, type=int)
    cases_parser.add_argument("--out", required=True, help="directory to write")

    verify_parser = subparsers.add_parser("verify", help="re-check a plan file")
    verify_parser.add_argument("--plan", required=True)
    verify_parser.add_argument("--scenario", required=True)
    verify_parser.add_argument(
        "--collision-step", default=consts.COLLISION_STEP, type=float
    )

    appendix_parser = subparsers.add_parser(
        "check-appendix", help="run the numerical property suites"
    )
    appendix_parser.add_argument(
        "--suites",
        default=",".join(appendix.ALL_SUITES),
        help="comma-separated suite names",
    )
    return parser


def _split(value: str) -> List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _print_result(result: PlanResult) -> None:
    cprint(f"Status: {result.status.value}", _STATUS_COLORS[result.status])
    stats = result.stats
    print(
        f"  extracted {stats.nodes_extracted}, expanded {stats.nodes_expanded}, "
        f"wall time {stats.wall_time:.3f}s"
    )
    if result.trajectory is not None:
        traj = result.trajectory
        print(
            f"  {len(traj.primitives)} primitives, length {traj.length:.3f} mm, "
            f"targeting error {traj.targeting_error:.4f} mm"
        )


def _plan(args: argparse.Namespace) -> int:
    problem = environment.load(args.scenario)
    settings = benchmark.BenchSettings(
        time_budget=args.time_budget,
        threads=args.threads,
        keep_improving=args.keep_improving,
        planner=PlannerConfig(
            delta_ell_max=args.delta_ell_max,
            cutoff=Resolution(args.cutoff_ell, args.cutoff_theta),
            d_sim=args.d_sim,
            alpha=args.alpha,
            collision_step=args.collision_step,
            rng_seed=args.seed,
        ),
        rrt=RrtConfig(rng_seed=args.seed, collision_step=args.collision_step),
    )
    result = benchmark.PLANNER_NAME_TO_CALLABLE[args.planner](problem, settings)
    _print_result(result)
    if args.out:
        save_plan(result, args.out)
        print(f"  plan written to {args.out}")
    return 0


def _bench(args: argparse.Namespace) -> int:
    suite = benchmark.load_suite(args.suite)
    settings = benchmark.BenchSettings(
        time_budget=args.time_budget,
        threads=args.threads,
        keep_improving=not args.first_solution,
    )
    records = benchmark.run_benchmark(
        suite, _split(args.planners), settings, case_workers=args.case_workers
    )
    paths = benchmark.write_reports(
        records, args.out, benchmark.default_time_grid(args.time_budget), args.baseline
    )
    print(benchmark.summary_table(records, args.baseline).to_string())
    for path in paths:
        print(f"  wrote {path}")
    return 0


def _gen(args: argparse.Namespace) -> int:
    spec = generation.VesselSpec(
        n_vessels=args.n_vessels,
        box_size=args.box_size,
        point_spacing=args.point_spacing,
    )
    env = generation.generate_synthetic_scenario(args.seed, spec)
    try:
        (problem,) = generation.generate_test_cases(env, 1, 1, args.seed)
    except generation.TestCaseExhaustedError as e:
        cprint(f"Could not sample a query: {e}", "red")
        return 1
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_scenario(problem, out, out.with_suffix(".xyz"))
    cprint(
        f"Scenario with {len(env.obstacle_points)} obstacle points written to {out}.",
        "green",
    )
    return 0


def _cases(args: argparse.Namespace) -> int:
    problem = environment.load(args.scenario)
    try:
        cases = generation.generate_test_cases(
            problem.env,
            args.n_starts,
            args.goals_per_start,
            args.seed,
            kappa_max=problem.kappa_max,
            ell_max=problem.ell_max,
            tau=problem.tau,
        )
    except generation.TestCaseExhaustedError as e:
        cprint(str(e), "red")
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    # Every case shares one point file.
    save_point_file(problem.env.obstacle_points, out / _CASES_POINT_FILE)
    for i, case in enumerate(cases):
        with open(out / f"case-{i:04d}.json", "w") as f:
            json.dump(scenario_to_dict(case, _CASES_POINT_FILE), f, indent=2)
    cprint(f"{len(cases)} cases written to {out}.", "green")
    return 0


def _verify(args: argparse.Namespace) -> int:
    plan = load_plan(args.plan)
    problem = environment.load(args.scenario)
    if plan.trajectory is None:
        cprint(f"Plan has no trajectory (status {plan.status.value}).", "red")
        return 1
    report = verify_trajectory(plan, problem, args.collision_step)
    for check in report.checks:
        cprint(
            f"  {check.name:<12} {'pass' if check.passed else 'FAIL'}  {check.detail}",
            "green" if check.passed else "red",
        )
    return 0 if report.passed else 1


def _check_appendix(args: argparse.Namespace) -> int:
    results = appendix.check_appendix(_split(args.suites))
    for result in results:
        cprint(
            f"  {result.name:<18} {'pass' if result.passed else 'FAIL'}  "
            f"{result.detail} ({result.seconds:.2f}s)",
            "green" if result.passed else "red",
        )
    return 0 if all(r.passed for r in results) else 1


_COMMANDS = {
    "plan": _plan,
    "bench": _bench,
    "gen": _gen,
    "cases": _cases,
    "verify": _verify,
    "check-appendix": _check_appendix,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.set_verbosity(logging.INFO)

    if args.version:
        print(f"steerneedle {steerneedle.__version__}")
        return 0
    if args.subparser_name is None:
        parser.print_help()
        return 1
    return _COMMANDS[args.subparser_name](args)


if __name__ == "__main__":
    sys.exit(main())
