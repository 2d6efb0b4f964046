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

"""Benchmark sweeps: run planners over a suite and tabulate the outcomes."""

import math
from concurrent import futures
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from absl import logging
from tqdm import tqdm

from steerneedle import constants as consts
from steerneedle.baselines.rrt import RrtConfig, plan_rrt
from steerneedle.baselines.single_res import plan_single_res
from steerneedle.environment.scenario import ProblemInstance, load_scenario
from steerneedle.harness.verification import verify_trajectory
from steerneedle.planner import plan
from steerneedle.planner.config import PlannerConfig, Variant
from steerneedle.planner.result import PlanResult, PlanStatus, Trajectory

# Status recorded when a planner raised instead of returning.
ERROR_STATUS = "Error"


def cost(
    trajectory: Trajectory, ell_max: float, tau: float, goal: np.ndarray
) -> float:
    """Insertion length over ell_max plus final tip error over tau."""
    error = float(np.linalg.norm(trajectory.end.position - np.asarray(goal)))
    return trajectory.length / ell_max + error / tau


@dataclass(frozen=True)
class BenchSettings:
    """Shared parameters of every run in a sweep.

    Attributes:
        time_budget: Wall-clock budget per (case, planner) run, in seconds.
        threads: Worker threads for planners that can use them.
        keep_improving: Keep searching after the first solution until the budget
            runs out, so that the best cost is meaningful.
        planner: Base configuration of the search-based planners.
        rrt: Base configuration of the RRT planner.
    """

    time_budget: float = consts.TIME_BUDGET
    threads: int = 1
    keep_improving: bool = True
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    rrt: RrtConfig = field(default_factory=RrtConfig)

    def planner_config(self, variant: Variant) -> PlannerConfig:
        return replace(
            self.planner,
            variant=variant,
            time_budget=self.time_budget,
            thread_count=self.threads if variant.parallel else 1,
            keep_improving=self.keep_improving,
        )


PlannerFn = Callable[[ProblemInstance, BenchSettings], PlanResult]


def _search(variant: Variant) -> PlannerFn:
    def _run(problem: ProblemInstance, settings: BenchSettings) -> PlanResult:
        if variant is Variant.RCS and settings.threads > 1:
            return plan(problem, settings.planner_config(Variant.RCS_PAR))
        return plan(problem, settings.planner_config(variant))

    return _run


def _rrt(problem: ProblemInstance, settings: BenchSettings) -> PlanResult:
    cfg = replace(
        settings.rrt,
        time_budget=settings.time_budget,
        thread_count=settings.threads,
        keep_improving=settings.keep_improving,
    )
    return plan_rrt(problem, cfg)


def _single_res(problem: ProblemInstance, settings: BenchSettings) -> PlanResult:
    return plan_single_res(problem, settings.planner_config(Variant.RCS))


# With more than one thread, "rcs" runs the parallel variant.
PLANNER_NAME_TO_CALLABLE: Dict[str, PlannerFn] = {
    "rcs": _search(Variant.RCS),
    "rcs-b": _search(Variant.RCS_B),
    "rcs-nr": _search(Variant.RCS_NR),
    "rcs-par": _search(Variant.RCS_PAR),
    "rrt": _rrt,
    "single-res": _single_res,
}

ALL_PLANNERS = tuple(PLANNER_NAME_TO_CALLABLE.keys())


@dataclass(frozen=True)
class BenchRecord:
    """Outcome of one planner on one case. Missing values are NaN."""

    case_id: str
    planner: str
    status: str
    time_to_first_solution: float = math.nan
    best_cost: float = math.nan
    length: float = math.nan
    targeting_error: float = math.nan
    nodes_expanded: int = 0
    wall_time: float = math.nan
    verified: bool = False
    error: str = ""

    @property
    def solved(self) -> bool:
        return self.status == PlanStatus.SOLVED.value


def _record(
    case_id: str, planner: str, problem: ProblemInstance, result: PlanResult
) -> BenchRecord:
    stats = result.stats
    record = BenchRecord(
        case_id=case_id,
        planner=planner,
        status=result.status.value,
        nodes_expanded=stats.nodes_expanded,
        wall_time=stats.wall_time,
    )
    traj = result.trajectory
    if traj is None:
        return record
    report = verify_trajectory(traj, problem)
    if not report.passed:
        logging.warning(
            "%s on %s returned a plan failing %s.", planner, case_id, report.failures
        )
    first = stats.time_to_first_solution
    return replace(
        record,
        time_to_first_solution=first if first is not None else stats.wall_time,
        best_cost=cost(traj, problem.ell_max, problem.tau, problem.goal),
        length=traj.length,
        targeting_error=traj.targeting_error,
        verified=report.passed,
    )


def _run_case(
    case_id: str,
    problem: ProblemInstance,
    planners: Sequence[str],
    settings: BenchSettings,
) -> List[BenchRecord]:
    records = []
    for name in planners:
        try:
            result = PLANNER_NAME_TO_CALLABLE[name](problem, settings)
        except Exception as e:
            logging.exception("%s failed on %s.", name, case_id)
            records.append(BenchRecord(case_id, name, ERROR_STATUS, error=repr(e)))
            continue
        records.append(_record(case_id, name, problem, result))
    return records


def run_benchmark(
    suite: Union[Mapping[str, ProblemInstance], Sequence[ProblemInstance]],
    planners: Sequence[str],
    settings: BenchSettings = BenchSettings(),
    case_workers: int = 1,
) -> List[BenchRecord]:
    """Runs every planner on every case and returns one record per pair.

    Records are ordered by case, then by planner, whatever `case_workers` is. A
    planner that raises is logged and recorded with status "Error".

    Raises:
        ValueError: if the suite is empty.
        KeyError: if a planner name is unknown.
    """
    if not isinstance(suite, Mapping):
        suite = {f"case-{i:04d}": problem for i, problem in enumerate(suite)}
    if not suite:
        raise ValueError("The benchmark suite is empty.")
    for name in planners:
        if name not in PLANNER_NAME_TO_CALLABLE:
            raise KeyError(f"Unknown planner {name!r}. Available: {ALL_PLANNERS}.")
    if not planners:
        return []

    logging.info(
        "Benchmarking %s on %d cases (budget %.1fs, %d threads).",
        ", ".join(planners),
        len(suite),
        settings.time_budget,
        settings.threads,
    )
    case_ids = list(suite.keys())
    by_case: Dict[str, List[BenchRecord]] = {}
    with futures.ThreadPoolExecutor(max_workers=case_workers) as executor:
        pending: Dict[futures.Future, str] = {}
        for case_id in case_ids:
            future = executor.submit(
                _run_case, case_id, suite[case_id], planners, settings
            )
            pending[future] = case_id
        for future in tqdm(
            futures.as_completed(pending), total=len(pending), desc="Benchmark"
        ):
            by_case[pending[future]] = future.result()
    return [record for case_id in case_ids for record in by_case[case_id]]


def load_suite(directory: Union[str, Path]) -> Dict[str, ProblemInstance]:
    """Every `*.json` scenario in `directory`, keyed by file stem in sorted order."""
    paths = sorted(Path(directory).glob("*.json"))
    if not paths:
        raise ValueError(f"No scenario files found in {directory}.")
    return {path.stem: load_scenario(path) for path in paths}


def records_to_frame(records: Sequence[BenchRecord]) -> pd.DataFrame:
    columns = list(BenchRecord.__dataclass_fields__.keys())
    return pd.DataFrame([asdict(r) for r in records], columns=columns)


def default_time_grid(time_budget: float, num_points: int = 101) -> np.ndarray:
    return np.linspace(0.0, time_budget, num_points)


def success_curve(
    records: Sequence[BenchRecord], time_grid: Sequence[float]
) -> pd.DataFrame:
    """Fraction of cases each planner has solved by each grid time.

    Returns a frame with a `time` column and one column per planner.
    """
    frame = records_to_frame(records)
    grid = np.asarray(time_grid, dtype=np.float64)
    curve = pd.DataFrame({"time": grid})
    for planner, group in frame.groupby("planner", sort=False):
        n_cases = group["case_id"].nunique()
        solved = group["status"] == PlanStatus.SOLVED.value
        times = np.sort(group.loc[solved, "time_to_first_solution"].to_numpy())
        counts = np.searchsorted(times, grid, side="right")
        rates = counts / n_cases
        assert np.all(np.diff(rates) >= 0) and np.all((0 <= rates) & (rates <= 1))
        curve[planner] = rates
    return curve


def summary_table(
    records: Sequence[BenchRecord], baseline: Optional[str] = None
) -> pd.DataFrame:
    """Plan quality per planner.

    Columns are the success rate, the mean ratio of plan length to the baseline
    planner's plan length, the number of cases that ratio is averaged over, and the
    mean targeting error of solved cases. The ratio only uses cases that every
    planner in the records solved, so the baseline row is exactly 1.0 and all rows
    are NaN when no such case exists. The baseline defaults to "rcs-par", then
    "rcs", then the first planner in the records.
    """
    frame = records_to_frame(records)
    planners = list(dict.fromkeys(frame["planner"]))
    columns = ["success_rate", "relative_length", "common_cases", "targeting_error"]
    if not planners:
        return pd.DataFrame(columns=columns)
    if baseline is None:
        baseline = next(
            (p for p in ("rcs-par", "rcs") if p in planners), planners[0]
        )
    if baseline not in planners:
        raise KeyError(f"Baseline {baseline!r} has no records.")

    solved = frame[frame["status"] == PlanStatus.SOLVED.value]
    lengths = solved.pivot(index="case_id", columns="planner", values="length")
    common = lengths.reindex(columns=planners).dropna()
    if not len(common):
        logging.warning("No case was solved by every planner; relative_length is NaN.")

    rows = {}
    for planner in planners:
        mine = frame[frame["planner"] == planner]
        mine_solved = solved[solved["planner"] == planner]
        if len(common):
            relative = float((common[planner] / common[baseline]).mean())
        else:
            relative = math.nan
        rows[planner] = {
            "success_rate": len(mine_solved) / mine["case_id"].nunique(),
            "relative_length": relative,
            "common_cases": len(common),
            "targeting_error": float(mine_solved["targeting_error"].mean()),
        }
    table = pd.DataFrame.from_dict(rows, orient="index", columns=columns)
    table.index.name = "planner"
    return table


def write_reports(
    records: Sequence[BenchRecord],
    out: Union[str, Path],
    time_grid: Sequence[float],
    baseline: Optional[str] = None,
) -> List[Path]:
    """Writes the record CSV, `<out>.curve.csv` and `<out>.summary.csv`."""
    out = Path(out)
    stem = out.with_suffix("") if out.suffix == ".csv" else out
    paths = [
        out,
        stem.with_name(stem.name + ".curve.csv"),
        stem.with_name(stem.name + ".summary.csv"),
    ]
    records_to_frame(records).to_csv(paths[0], index=False)
    success_curve(records, time_grid).to_csv(paths[1], index=False)
    summary_table(records, baseline).to_csv(paths[2])
    return paths
