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

"""Tests for rrt.py."""

import numpy as np
from absl.testing import absltest, parameterized

from steerneedle.baselines import rrt
from steerneedle.environment import library
from steerneedle.geometry.pose import Pose
from steerneedle.harness.verification import verify_trajectory
from steerneedle.planner.result import PlanStatus

_SEED = 12345

_KAPPA_MAX = 0.01

# Goal connections only happen by growing a node onto the goal.
_GROW_ONLY = rrt.RrtConfig(
    goal_bias=0.2, direct_connect_ratio=0.0, max_iterations=5000, rng_seed=_SEED
)


class RrtConfigTest(parameterized.TestCase):
    @parameterized.named_parameters(
        ("goal_bias", dict(goal_bias=1.5)),
        ("ratio", dict(direct_connect_ratio=-0.1)),
        ("extend", dict(max_extend=0.0)),
        ("budget", dict(time_budget=0.0)),
        ("iterations", dict(max_iterations=0)),
        ("threads", dict(thread_count=0)),
    )
    def test_invalid(self, kwargs) -> None:
        with self.assertRaises(ValueError):
            rrt.RrtConfig(**kwargs)

    def test_defaults(self) -> None:
        cfg = rrt.RrtConfig()
        self.assertEqual(cfg.goal_bias, 0.05)
        self.assertEqual(cfg.direct_connect_ratio, 1.0)
        self.assertEqual(cfg.max_extend, 20.0)


class SteerTest(parameterized.TestCase):
    def test_straight_is_clamped(self) -> None:
        m = rrt.steer(Pose.identity(), np.array([0.0, 0.0, 50.0]), _KAPPA_MAX, 20.0)
        self.assertEqual(m.kappa, 0.0)
        self.assertAlmostEqual(m.delta_ell, 20.0)

    def test_reaches_close_target(self) -> None:
        m = rrt.steer(Pose.identity(), np.array([0.5, 0.0, 10.0]), _KAPPA_MAX, 20.0)
        self.assertLessEqual(m.kappa, _KAPPA_MAX)
        self.assertLess(m.delta_ell, 20.0)

    def test_sharp_target_uses_max_curvature(self) -> None:
        m = rrt.steer(Pose.identity(), np.array([0.0, 30.0, 5.0]), _KAPPA_MAX, 15.0)
        self.assertEqual(m.kappa, _KAPPA_MAX)
        self.assertAlmostEqual(m.delta_ell, 15.0)
        self.assertAlmostEqual(m.delta_theta, np.pi / 2)

    @parameterized.named_parameters(
        ("behind", [0.0, 0.0, -5.0], 20.0),
        ("coincident", [0.0, 0.0, 0.0], 20.0),
        ("no_length_left", [0.0, 0.0, 5.0], 0.0),
    )
    def test_no_extension(self, target, max_length) -> None:
        self.assertIsNone(
            rrt.steer(Pose.identity(), np.array(target), _KAPPA_MAX, max_length)
        )


class PlanRrtTest(parameterized.TestCase):
    def test_direct_connection_from_start(self) -> None:
        problem = library.empty()
        result = rrt.plan_rrt(problem)
        self.assertEqual(result.status, PlanStatus.SOLVED)
        self.assertEqual(result.stats.nodes_extracted, 0)
        self.assertTrue(verify_trajectory(result, problem).passed)

    def test_grows_onto_goal(self) -> None:
        problem = library.empty()
        result = rrt.plan_rrt(problem, _GROW_ONLY)
        self.assertEqual(result.status, PlanStatus.SOLVED)
        self.assertLessEqual(result.trajectory.targeting_error, problem.tau)
        report = verify_trajectory(result, problem)
        self.assertTrue(report.passed, report.checks)

    def test_blocked_times_out(self) -> None:
        cfg = rrt.RrtConfig(max_iterations=300, rng_seed=_SEED)
        result = rrt.plan_rrt(library.blocked(), cfg)
        self.assertEqual(result.status, PlanStatus.TIMED_OUT)
        self.assertIsNone(result.trajectory)
        self.assertEqual(result.stats.nodes_extracted, 300)

    def test_tree_edges_are_bounded(self) -> None:
        problem = library.blocked()
        cfg = rrt.RrtConfig(max_iterations=300, max_extend=7.5, rng_seed=_SEED)
        tree = rrt.RapidlyExploringTree(problem, cfg, cfg.rng_seed)
        tree.grow()
        self.assertGreater(len(tree.nodes), 1)
        for node in tree.nodes[1:]:
            self.assertLessEqual(node.primitive.kappa, problem.kappa_max)
            self.assertLessEqual(node.primitive.delta_ell, 7.5 + 1e-12)
            self.assertLessEqual(node.accumulated_length, problem.ell_max + 1e-9)

    def test_deterministic(self) -> None:
        problem = library.empty()
        first = rrt.plan_rrt(problem, _GROW_ONLY)
        second = rrt.plan_rrt(problem, _GROW_ONLY)
        self.assertEqual(
            first.to_dict(include_timing=False), second.to_dict(include_timing=False)
        )

    def test_parallel_trees(self) -> None:
        problem = library.empty()
        cfg = rrt.RrtConfig(
            goal_bias=0.2,
            direct_connect_ratio=0.0,
            max_iterations=5000,
            thread_count=4,
        )
        result = rrt.plan_rrt_parallel(problem, cfg)
        self.assertEqual(result.status, PlanStatus.SOLVED)
        self.assertTrue(verify_trajectory(result, problem).passed)

    def test_parallel_blocked_times_out(self) -> None:
        cfg = rrt.RrtConfig(max_iterations=100, thread_count=3)
        result = rrt.plan_rrt(library.blocked(), cfg)
        self.assertEqual(result.status, PlanStatus.TIMED_OUT)
        self.assertEqual(result.stats.nodes_extracted, 300)


if __name__ == "__main__":
    absltest.main()
