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

"""Tests for benchmark.py."""

import math
from dataclasses import replace
from unittest import mock

import numpy as np
import pandas as pd
from absl.testing import absltest, parameterized

from steerneedle.baselines.rrt import RrtConfig
from steerneedle.environment import library
from steerneedle.environment.scenario import save_scenario
from steerneedle.geometry.pose import Pose
from steerneedle.harness import benchmark
from steerneedle.harness.benchmark import BenchRecord, BenchSettings
from steerneedle.planner.config import PlannerConfig
from steerneedle.planner.result import PlanStatus, Trajectory
from steerneedle.primitives import Resolution

_SEED = 12345

# Small search spaces so the blocked cases are exhausted quickly.
_FAST = BenchSettings(
    time_budget=60.0,
    keep_improving=False,
    planner=PlannerConfig(cutoff=Resolution(20.0, math.pi / 2)),
    rrt=RrtConfig(max_iterations=200, rng_seed=_SEED),
)

_SOLVED = PlanStatus.SOLVED.value


def _trajectory_ending_at(end: np.ndarray, length: float) -> Trajectory:
    return Trajectory((), (Pose(end),), length, 0.0)


class CostTest(parameterized.TestCase):
    @parameterized.parameters(
        (100.0, 100.0, 1.0, 1.0, 2.0),
        (0.0, 100.0, 0.0, 1.0, 0.0),
        (50.0, 100.0, 0.5, 1.0, 1.0),
    )
    def test_examples(self, length, ell_max, error, tau, expected) -> None:
        goal = np.array([0.0, error, 0.0])
        traj = _trajectory_ending_at(np.zeros(3), length)
        self.assertAlmostEqual(benchmark.cost(traj, ell_max, tau, goal), expected)


class RunBenchmarkTest(parameterized.TestCase):
    def test_blocked_suite_never_solved(self) -> None:
        suite = [library.blocked(goal_distance=d) for d in (20.0, 25.0)]
        planners = ["rcs", "rcs-b", "single-res", "rrt"]
        records = benchmark.run_benchmark(suite, planners, _FAST)
        self.assertLen(records, 8)
        self.assertEqual(
            [(r.case_id, r.planner) for r in records],
            [(c, p) for c in ("case-0000", "case-0001") for p in planners],
        )
        self.assertFalse(any(r.solved for r in records))
        for r in records:
            expected = "TimedOut" if r.planner == "rrt" else "ExhaustedNoPlan"
            self.assertEqual(r.status, expected)

    def test_empty_suite_solved_and_verified(self) -> None:
        problem = library.empty()
        settings = replace(_FAST, planner=PlannerConfig())
        records = benchmark.run_benchmark(
            {"empty": problem}, list(benchmark.ALL_PLANNERS), settings, case_workers=2
        )
        self.assertLen(records, len(benchmark.ALL_PLANNERS))
        for r in records:
            self.assertTrue(r.solved, r)
            self.assertTrue(r.verified)
            self.assertLessEqual(r.targeting_error, problem.tau)
            self.assertTrue(math.isfinite(r.best_cost))
            self.assertTrue(math.isfinite(r.time_to_first_solution))

    def test_variant_ordering_on_library_suite(self) -> None:
        suite = {
            "empty-50": library.empty(),
            "empty-80": library.empty(goal_distance=80.0),
            "slalom": library.slalom().problem,
        }
        planners = ["rcs", "rcs-b", "rcs-par", "single-res", "rrt"]
        settings = replace(
            _FAST,
            threads=2,
            planner=PlannerConfig(cutoff=Resolution(10.0, math.pi / 4)),
        )
        records = benchmark.run_benchmark(suite, planners, settings)
        solved = {
            p: {r.case_id for r in records if r.planner == p and r.solved}
            for p in planners
        }
        self.assertEqual(solved["rcs"], set(suite))
        self.assertTrue(solved["rcs-b"] <= solved["rcs"])
        self.assertEqual(solved["rcs-par"], solved["rcs"])
        for other in ("rcs-b", "single-res", "rrt"):
            self.assertGreaterEqual(len(solved["rcs"]), len(solved[other]))
        for r in records:
            if r.solved:
                self.assertTrue(r.verified, r)

        table = benchmark.summary_table(records)
        self.assertEqual(table.loc["rcs-par", "relative_length"], 1.0)
        common = table.loc["rcs-par", "common_cases"]
        self.assertGreaterEqual(common, 1)
        self.assertTrue(np.all(table["common_cases"] == common))
        self.assertTrue(np.all(np.isfinite(table["relative_length"])))

    def test_no_planners(self) -> None:
        self.assertEqual(benchmark.run_benchmark([library.empty()], [], _FAST), [])

    def test_empty_suite_is_rejected(self) -> None:
        with self.assertRaises(ValueError):
            benchmark.run_benchmark([], ["rcs"], _FAST)

    def test_unknown_planner(self) -> None:
        with self.assertRaises(KeyError):
            benchmark.run_benchmark([library.empty()], ["aft"], _FAST)

    def test_failures_are_recorded(self) -> None:
        def _broken(problem, settings):
            raise RuntimeError("boom")

        with mock.patch.dict(
            benchmark.PLANNER_NAME_TO_CALLABLE, {"broken": _broken}
        ):
            records = benchmark.run_benchmark(
                [library.empty()], ["broken", "rcs"], _FAST
            )
        self.assertEqual(records[0].status, benchmark.ERROR_STATUS)
        self.assertIn("boom", records[0].error)
        self.assertTrue(records[1].solved)

    def test_load_suite(self) -> None:
        directory = self.create_tempdir()
        save_scenario(library.empty(), directory.full_path + "/b.json")
        save_scenario(library.blocked(), directory.full_path + "/a.json")
        suite = benchmark.load_suite(directory.full_path)
        self.assertEqual(list(suite), ["a", "b"])

    def test_load_empty_directory(self) -> None:
        with self.assertRaises(ValueError):
            benchmark.load_suite(self.create_tempdir().full_path)


def _records(times_by_planner):
    records = []
    for planner, times in times_by_planner.items():
        for i, t in enumerate(times):
            if t is None:
                records.append(BenchRecord(f"case-{i}", planner, "TimedOut"))
            else:
                records.append(
                    BenchRecord(
                        f"case-{i}",
                        planner,
                        _SOLVED,
                        time_to_first_solution=t,
                        length=10.0 * (i + 1),
                        targeting_error=0.1,
                    )
                )
    return records


class SuccessCurveTest(absltest.TestCase):
    def test_all_instant(self) -> None:
        curve = benchmark.success_curve(_records({"rcs": [0.0] * 4}), [0.0, 1.0, 5.0])
        np.testing.assert_array_equal(curve["rcs"], [1.0, 1.0, 1.0])

    def test_no_solves(self) -> None:
        curve = benchmark.success_curve(_records({"rrt": [None] * 3}), [0.0, 10.0])
        np.testing.assert_array_equal(curve["rrt"], [0.0, 0.0])

    def test_monotone(self) -> None:
        random_state = np.random.RandomState(_SEED)
        times = [
            None if random_state.uniform() < 0.3 else random_state.uniform(0, 10)
            for _ in range(50)
        ]
        grid = benchmark.default_time_grid(10.0)
        curve = benchmark.success_curve(_records({"rcs": times}), grid)
        rates = curve["rcs"].to_numpy()
        self.assertTrue(np.all(np.diff(rates) >= 0))
        self.assertAlmostEqual(rates[-1], sum(t is not None for t in times) / 50)

    def test_counts_inclusive(self) -> None:
        curve = benchmark.success_curve(
            _records({"rcs": [1.0, 2.0, None, None]}), [0.5, 1.0, 2.0]
        )
        np.testing.assert_allclose(curve["rcs"], [0.0, 0.25, 0.5])


class SummaryTableTest(absltest.TestCase):
    def test_relative_length_over_common_cases(self) -> None:
        records = _records({"rcs": [1.0, 1.0, 1.0], "rrt": [1.0, None, 2.0]})
        records = [
            replace(r, length=2 * r.length, targeting_error=0.3)
            if r.planner == "rrt"
            else r
            for r in records
        ]
        table = benchmark.summary_table(records)
        self.assertAlmostEqual(table.loc["rcs", "success_rate"], 1.0)
        self.assertAlmostEqual(table.loc["rrt", "success_rate"], 2 / 3)
        self.assertAlmostEqual(table.loc["rcs", "relative_length"], 1.0)
        self.assertAlmostEqual(table.loc["rrt", "relative_length"], 2.0)
        self.assertEqual(table.loc["rrt", "common_cases"], 2)
        self.assertAlmostEqual(table.loc["rrt", "targeting_error"], 0.3)

    def test_no_common_case_is_nan(self) -> None:
        records = _records({"rcs": [1.0, 2.0], "rrt": [None, None]})
        table = benchmark.summary_table(records)
        self.assertTrue(table["relative_length"].isna().all())
        self.assertTrue((table["common_cases"] == 0).all())
        self.assertAlmostEqual(table.loc["rcs", "success_rate"], 1.0)

    def test_unknown_baseline(self) -> None:
        with self.assertRaises(KeyError):
            benchmark.summary_table(_records({"rcs": [1.0]}), baseline="rrt")

    def test_empty(self) -> None:
        self.assertTrue(benchmark.summary_table([]).empty)


class WriteReportsTest(absltest.TestCase):
    def test_three_files(self) -> None:
        out = self.create_tempdir().full_path + "/sweep.csv"
        records = _records({"rcs": [0.5, None], "rrt": [1.5, 2.5]})
        paths = benchmark.write_reports(records, out, [0.0, 1.0, 2.0, 3.0])
        self.assertEqual(
            [p.name for p in paths],
            ["sweep.csv", "sweep.curve.csv", "sweep.summary.csv"],
        )
        frame = pd.read_csv(paths[0])
        self.assertLen(frame, 4)
        self.assertIn("time_to_first_solution", frame.columns)
        curve = pd.read_csv(paths[1])
        self.assertEqual(list(curve.columns), ["time", "rcs", "rrt"])


if __name__ == "__main__":
    absltest.main()
