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

"""Tests for library.py."""

import numpy as np
from absl.testing import absltest, parameterized

from steerneedle import environment
from steerneedle.environment import library
from steerneedle.environment.environment import arc_free, point_free
from steerneedle.geometry.pose import apply_primitive
from steerneedle.geometry.reachability import direct_connect
from steerneedle.primitives import hierarchy


class LibraryTest(parameterized.TestCase):
    @parameterized.parameters(*library.SCENARIO_NAME_TO_CALLABLE.keys())
    def test_load_by_name(self, name: str) -> None:
        problem = environment.load(name)
        self.assertTrue(point_free(problem.env, problem.start.position))

    def test_unknown_name(self) -> None:
        with self.assertRaises(KeyError):
            environment.load("not_a_scenario")

    def test_blocked_goal_is_sealed(self) -> None:
        problem = library.blocked()
        dist = np.linalg.norm(problem.env.obstacle_points - problem.goal, axis=1)
        np.testing.assert_allclose(dist, 4.0)
        self.assertFalse(point_free(problem.env, problem.goal))

    def test_sphere_shell_spacing(self) -> None:
        points = library.sphere_shell_points(np.zeros(3), 4.0, 0.5)
        others = np.linalg.norm(points[:, None] - points[None], axis=-1)
        np.fill_diagonal(others, np.inf)
        self.assertLess(float(np.max(np.min(others, axis=1))), 1.0)

    @parameterized.parameters(0, 1, 2, 3)
    def test_corridor_path_is_free(self, seed: int) -> None:
        scenario = library.corridor(seed=seed)
        problem = scenario.problem
        pose = problem.start
        for m in scenario.primitives:
            self.assertTrue(arc_free(problem.env, pose, m, 0.5))
            self.assertLessEqual(hierarchy.length_level(m, 20.0), 4)
            self.assertLessEqual(hierarchy.angle_level(m, np.pi / 2), 4)
            pose = apply_primitive(pose, m)
        np.testing.assert_allclose(pose.position, problem.goal, atol=1e-9)

    def test_corridor_is_deterministic(self) -> None:
        a = library.corridor(seed=7)
        b = library.corridor(seed=7)
        np.testing.assert_array_equal(
            a.problem.env.obstacle_points, b.problem.env.obstacle_points
        )
        self.assertEqual(a.primitives, b.primitives)

    def test_slalom_path_is_free(self) -> None:
        scenario = library.slalom()
        problem = scenario.problem
        self.assertLen(scenario.primitives, 4)
        pose = problem.start
        for m in scenario.primitives:
            self.assertEqual(hierarchy.length_level(m, 20.0), 0)
            self.assertEqual(hierarchy.angle_level(m, np.pi / 2), 0)
            self.assertTrue(arc_free(problem.env, pose, m, 0.5))
            pose = apply_primitive(pose, m)
        np.testing.assert_allclose(pose.position, problem.goal, atol=1e-9)
        np.testing.assert_allclose(
            pose.rotation_matrix, problem.start.rotation_matrix, atol=1e-9
        )

    def test_slalom_direct_arc_collides(self) -> None:
        problem = library.slalom().problem
        offset = problem.goal - problem.start.position
        np.testing.assert_allclose(offset[:2], 0.0, atol=1e-9)
        self.assertGreater(offset[2], 3 * 20.0)
        arc = direct_connect(
            problem.start, problem.goal, problem.kappa_max, problem.tau
        )
        self.assertIsNotNone(arc)
        self.assertLess(arc.primitive.kappa, 1e-6)
        self.assertFalse(arc_free(problem.env, problem.start, arc.primitive, 0.5))


if __name__ == "__main__":
    absltest.main()
