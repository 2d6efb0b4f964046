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

"""Tests for result.py and config.py."""

import json
import math

import numpy as np
from absl.testing import absltest, parameterized

from steerneedle.geometry.pose import Pose, apply_primitive
from steerneedle.planner import result as result_lib
from steerneedle.planner.config import PlannerConfig, Variant
from steerneedle.planner.result import PlanResult, PlanStats, PlanStatus
from steerneedle.primitives import MotionPrimitive, Resolution


def _trajectory() -> result_lib.Trajectory:
    primitives = [MotionPrimitive(0.01, 20.0, 1.5), MotionPrimitive(0.0, 12.5, 0.0)]
    waypoints = [Pose.identity()]
    for m in primitives:
        waypoints.append(apply_primitive(waypoints[-1], m))
    goal = waypoints[-1].position + np.array([0.0, 0.3, 0.4])
    return result_lib.make_trajectory(primitives, waypoints, goal)


class TrajectoryTest(parameterized.TestCase):
    def test_make_trajectory(self) -> None:
        traj = _trajectory()
        self.assertAlmostEqual(traj.length, 32.5)
        self.assertAlmostEqual(traj.targeting_error, 0.5)

    @parameterized.parameters(
        (100.0, 100.0, 1.0, 1.0, 2.0),
        (0.0, 100.0, 0.0, 1.0, 0.0),
        (50.0, 100.0, 0.5, 1.0, 1.0),
    )
    def test_cost(self, length, ell_max, error, tau, expected) -> None:
        traj = result_lib.Trajectory((), (Pose.identity(),), length, error)
        self.assertAlmostEqual(traj.cost(ell_max, tau), expected)

    def test_waypoint_count(self) -> None:
        with self.assertRaises(ValueError):
            result_lib.Trajectory(
                (MotionPrimitive(0.0, 1.0),), (Pose.identity(),), 1.0, 0.0
            )


class PlanFileTest(absltest.TestCase):
    def test_round_trip(self) -> None:
        stats = PlanStats(nodes_extracted=12, nodes_expanded=7, wall_time=0.25)
        stats.time_to_first_solution = 0.1
        original = PlanResult(PlanStatus.SOLVED, _trajectory(), stats)
        path = self.create_tempfile("plan.json").full_path
        result_lib.save_plan(original, path)
        with open(path) as f:
            document = json.load(f)
        self.assertEqual(
            set(document),
            {
                "status",
                "primitives",
                "waypoints",
                "length_mm",
                "targeting_error_mm",
                "stats",
            },
        )
        self.assertEqual(document["status"], "Solved")
        loaded = result_lib.load_plan(path)
        self.assertEqual(loaded.to_dict(), original.to_dict())
        self.assertEqual(loaded.trajectory.primitives, original.trajectory.primitives)

    def test_unsolved(self) -> None:
        original = PlanResult(PlanStatus.EXHAUSTED, None, PlanStats())
        path = self.create_tempfile("plan.json").full_path
        result_lib.save_plan(original, path)
        loaded = result_lib.load_plan(path)
        self.assertEqual(loaded.status, PlanStatus.EXHAUSTED)
        self.assertIsNone(loaded.trajectory)

    def test_timing_can_be_dropped(self) -> None:
        document = PlanResult(PlanStatus.TIMED_OUT, None, PlanStats()).to_dict(
            include_timing=False
        )
        self.assertNotIn("wall_time", document["stats"])
        self.assertNotIn("time_to_first_solution", document["stats"])


class PlannerConfigTest(parameterized.TestCase):
    def test_defaults(self) -> None:
        cfg = PlannerConfig()
        self.assertEqual(cfg.delta_ell_max, 20.0)
        self.assertEqual(cfg.cutoff, Resolution(0.125, 0.157))
        self.assertEqual(cfg.alpha, 0.05)
        self.assertEqual(cfg.d_sim, 5.5e-5)
        self.assertEqual(cfg.collision_step, 0.5)
        self.assertIs(cfg.variant, Variant.RCS)

    @parameterized.named_parameters(
        ("zero_threads", dict(thread_count=0)),
        ("negative_d_sim", dict(d_sim=-1.0)),
        ("zero_step", dict(collision_step=0.0)),
        ("zero_budget", dict(time_budget=0.0)),
        ("coarse_cutoff", dict(cutoff=Resolution(40.0, 0.1))),
        ("zero_cap", dict(max_expansions=0)),
    )
    def test_invalid(self, kwargs) -> None:
        with self.assertRaises(ValueError):
            PlannerConfig(**kwargs)

    def test_variant_features(self) -> None:
        self.assertFalse(Variant.RCS_NR.rejects_similar)
        self.assertTrue(Variant.RCS_B.rejects_similar)
        self.assertFalse(Variant.RCS_B.optimized)
        self.assertTrue(Variant.RCS.optimized)
        self.assertTrue(Variant.RCS_PAR.optimized and Variant.RCS_PAR.parallel)
        self.assertEqual(Variant("rcs-nr"), Variant.RCS_NR)
        self.assertAlmostEqual(PlannerConfig().delta_theta_max, math.pi / 2)


if __name__ == "__main__":
    absltest.main()
