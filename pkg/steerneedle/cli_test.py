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

"""Tests for cli.py."""

import json
from pathlib import Path

from absl.testing import absltest

from steerneedle import cli
from steerneedle.environment import library
from steerneedle.environment.scenario import load_scenario, save_scenario
from steerneedle.planner.result import PlanStatus, load_plan


class CliTest(absltest.TestCase):
    def test_version(self) -> None:
        self.assertEqual(cli.main(["--version"]), 0)

    def test_no_command(self) -> None:
        self.assertEqual(cli.main([]), 1)

    def test_plan_then_verify(self) -> None:
        directory = Path(self.create_tempdir().full_path)
        scenario = directory / "empty.json"
        save_scenario(library.empty(), scenario)
        plan_file = directory / "plan.json"
        self.assertEqual(
            cli.main(
                ["plan", "--scenario", str(scenario), "--out", str(plan_file)]
            ),
            0,
        )
        self.assertEqual(load_plan(plan_file).status, PlanStatus.SOLVED)
        self.assertEqual(
            cli.main(
                ["verify", "--plan", str(plan_file), "--scenario", str(scenario)]
            ),
            0,
        )

    def test_verify_rejects_plan_for_other_scenario(self) -> None:
        directory = Path(self.create_tempdir().full_path)
        plan_file = directory / "plan.json"
        cli.main(["plan", "--scenario", "empty", "--out", str(plan_file)])
        blocked = directory / "blocked.json"
        save_scenario(library.blocked(), blocked)
        self.assertEqual(
            cli.main(["verify", "--plan", str(plan_file), "--scenario", str(blocked)]),
            1,
        )

    def test_plan_with_rrt_by_library_name(self) -> None:
        plan_file = self.create_tempfile("plan.json").full_path
        code = cli.main(
            [
                "plan",
                "--scenario",
                "empty",
                "--planner",
                "rrt",
                "--seed",
                "3",
                "--out",
                plan_file,
            ]
        )
        self.assertEqual(code, 0)
        with open(plan_file) as f:
            self.assertEqual(json.load(f)["status"], "Solved")

    def test_bench_writes_reports(self) -> None:
        suite = Path(self.create_tempdir().full_path)
        save_scenario(library.empty(), suite / "a.json")
        save_scenario(library.empty(goal_distance=40.0), suite / "b.json")
        out = Path(self.create_tempdir().full_path) / "sweep.csv"
        code = cli.main(
            [
                "bench",
                "--suite",
                str(suite),
                "--planners",
                "rcs,single-res",
                "--time-budget",
                "5",
                "--first-solution",
                "--out",
                str(out),
            ]
        )
        self.assertEqual(code, 0)
        self.assertTrue(out.exists())
        self.assertTrue((out.parent / "sweep.curve.csv").exists())
        self.assertTrue((out.parent / "sweep.summary.csv").exists())

    def test_gen_then_cases(self) -> None:
        directory = Path(self.create_tempdir().full_path)
        scenario = directory / "synthetic.json"
        code = cli.main(
            [
                "gen",
                "--seed",
                "4",
                "--n-vessels",
                "6",
                "--point-spacing",
                "2.0",
                "--out",
                str(scenario),
            ]
        )
        self.assertEqual(code, 0)
        self.assertTrue(scenario.with_suffix(".xyz").exists())
        problem = load_scenario(scenario)

        cases_dir = directory / "cases"
        code = cli.main(
            [
                "cases",
                "--scenario",
                str(scenario),
                "--n-starts",
                "2",
                "--goals-per-start",
                "2",
                "--seed",
                "1",
                "--out",
                str(cases_dir),
            ]
        )
        self.assertEqual(code, 0)
        files = sorted(cases_dir.glob("*.json"))
        self.assertLen(files, 4)
        case = load_scenario(files[0])
        self.assertLen(case.env.obstacle_points, len(problem.env.obstacle_points))

    def test_check_appendix(self) -> None:
        self.assertEqual(cli.main(["check-appendix", "--suites", "d-sim-bound"]), 0)


if __name__ == "__main__":
    absltest.main()
