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

"""Tests for search.py."""

import math
from typing import List

import numpy as np
from absl.testing import absltest, parameterized

from steerneedle.environment import library
from steerneedle.environment.environment import arc_free
from steerneedle.environment.scenario import ProblemInstance
from steerneedle.geometry import transformations as tr
from steerneedle.geometry.pose import Pose, apply_primitive
from steerneedle.harness.verification import verify_trajectory
from steerneedle.planner import search
from steerneedle.planner.config import PlannerConfig, Variant
from steerneedle.planner.result import PlanStatus
from steerneedle.planner.search import (
    ClosedSet,
    OpenQueue,
    RejectReason,
    SearchNode,
)
from steerneedle.primitives import MotionPrimitive, Resolution, hierarchy

_SEED = 12345
_NUM_SAMPLES = 100

_SERIAL_VARIANTS = (Variant.RCS_B, Variant.RCS_NR, Variant.RCS)

# Only level-0 lengths and angle levels up to 1 survive this cutoff: 16 primitives
# of 20 mm, so a 40 mm budget allows at most two primitives per path.
_TINY = PlannerConfig(cutoff=Resolution(20.0, math.pi / 4), time_budget=120.0)
_TINY_NODE_BOUND = 1 + 16 + 16**2

# Length level 7 and angle level 4.
_FINE = PlannerConfig(
    cutoff=Resolution(20.0 / 2**7, (math.pi / 2) / 2**4), time_budget=60.0
)


def _coarsest_child(parent: SearchNode, cfg: PlannerConfig) -> SearchNode:
    m = hierarchy.coarsest_primitives((0.0, 0.01), cfg.delta_ell_max, (0.0,))[1]
    return search.make_child(parent, m, cfg)


class _RecordingSearch(search.MultiResolutionSearch):
    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self.extracted_ranks: List[int] = []
        self.accepted: List[Pose] = []

    def process(self, node: SearchNode) -> bool:
        self.extracted_ranks.append(node.rank)
        before = len(self.closed)
        stop = super().process(node)
        if len(self.closed) > before:
            self.accepted.append(node.pose)
        return stop


class OpenQueueTest(absltest.TestCase):
    def test_rank_then_fifo(self) -> None:
        queue = OpenQueue()
        nodes = [SearchNode(Pose.identity(), rank=r) for r in (2, 1, 2, 0, 1)]
        for node in nodes:
            queue.push(node)
        popped = [queue.pop() for _ in range(len(nodes))]
        self.assertEqual([n.rank for n in popped], [0, 1, 1, 2, 2])
        self.assertEqual([n.serial for n in popped], [3, 1, 4, 0, 2])


class ExistsSimilarTest(parameterized.TestCase):
    def test_empty_closed(self) -> None:
        self.assertFalse(search.exists_similar(Pose.identity(), ClosedSet(), 1.0, 0.05))

    def test_exact_duplicate(self) -> None:
        closed = ClosedSet()
        pose = Pose(np.array([1.0, 2.0, 3.0]), tr.quat_about_y(0.4))
        closed.add(pose)
        self.assertTrue(search.exists_similar(pose, closed, 5.5e-5, 0.05))

    def test_positions_two_radii_apart(self) -> None:
        closed = ClosedSet()
        closed.add(Pose.identity())
        other = Pose(np.array([0.0, 2e-3, 0.0]))
        self.assertFalse(search.exists_similar(other, closed, 1e-3, 0.05))

    def test_angular_term_counts(self) -> None:
        closed = ClosedSet()
        closed.add(Pose.identity())
        # 0.5 mm apart; the half-turn adds 0.05 * pi mm.
        rotated = Pose(np.array([0.5, 0.0, 0.0]), tr.quat_about_z(math.pi))
        self.assertTrue(search.exists_similar(rotated, closed, 0.6, 0.0))
        self.assertFalse(search.exists_similar(rotated, closed, 0.6, 0.05))

    def test_zero_radius(self) -> None:
        closed = ClosedSet()
        closed.add(Pose.identity())
        self.assertFalse(search.exists_similar(Pose.identity(), closed, 0.0, 0.05))

    def test_matches_brute_force(self) -> None:
        random_state = np.random.RandomState(_SEED)
        poses = [
            Pose(random_state.uniform(-1, 1, size=3), random_state.normal(size=4))
            for _ in range(300)
        ]
        closed = ClosedSet()
        for pose in poses:
            closed.add(pose)
        for _ in range(_NUM_SAMPLES):
            query = Pose(
                random_state.uniform(-1, 1, size=3), random_state.normal(size=4)
            )
            d_sim = random_state.uniform(0.05, 0.5)
            expected = any(
                np.linalg.norm(p.position - query.position)
                + 0.05 * float(tr.quat_angle_between(p.orientation, query.orientation))
                < d_sim
                for p in poses
            )
            found = search.exists_similar(query, closed, d_sim, 0.05)
            self.assertEqual(found, expected)


class ValidateNodeTest(parameterized.TestCase):
    def setUp(self) -> None:
        super().setUp()
        self.problem = library.empty()
        self.cfg = PlannerConfig()
        self.root = SearchNode(self.problem.start)

    def test_accepts_root(self) -> None:
        verdict = search.validate_node(self.root, self.problem, self.cfg, ClosedSet())
        self.assertTrue(verdict.accepted)

    def test_length(self) -> None:
        node = _coarsest_child(self.root, self.cfg)
        node.accumulated_length = self.problem.ell_max + 0.125
        verdict = search.validate_node(node, self.problem, self.cfg, ClosedSet())
        self.assertEqual(verdict.reason, RejectReason.LENGTH)

    def test_reachability_only_when_optimized(self) -> None:
        node = SearchNode(self.problem.start)
        problem = ProblemInstance(
            env=self.problem.env,
            start=self.problem.start,
            goal=self.problem.start.position + np.array([5.0, 0.0, 5.0]),
            tau=1.0,
            ell_max=self.problem.ell_max,
            kappa_max=self.problem.kappa_max,
        )
        verdict = search.validate_node(node, problem, self.cfg, ClosedSet())
        self.assertEqual(verdict.reason, RejectReason.REACHABILITY)
        basic = PlannerConfig(variant=Variant.RCS_B)
        verdict = search.validate_node(node, problem, basic, ClosedSet())
        self.assertTrue(verdict.accepted)

    def test_duplicate(self) -> None:
        node = _coarsest_child(self.root, self.cfg)
        closed = ClosedSet()
        closed.add(node.pose)
        verdict = search.validate_node(node, self.problem, self.cfg, closed)
        self.assertEqual(verdict.reason, RejectReason.DUPLICATE)

    def test_collision(self) -> None:
        problem = library.blocked()
        root = SearchNode(problem.start)
        node = search.make_child(root, MotionPrimitive(0.0, 20.0).with_id(0), self.cfg)
        basic = PlannerConfig(variant=Variant.RCS_B)
        verdict = search.validate_node(node, problem, basic, ClosedSet())
        self.assertEqual(verdict.reason, RejectReason.COLLISION)


class CoarsestThetasTest(parameterized.TestCase):
    def test_quarter_turns(self) -> None:
        np.testing.assert_allclose(
            search.coarsest_thetas(math.pi / 2),
            [0.0, math.pi / 2, math.pi, 3 * math.pi / 2],
        )

    @parameterized.parameters(1, 3, 6, 8)
    def test_covers_full_turn(self, count: int) -> None:
        thetas = search.coarsest_thetas(2 * math.pi / count)
        self.assertLen(thetas, count)
        self.assertLess(thetas[-1], 2 * math.pi)


class InsertRefinedTest(parameterized.TestCase):
    def setUp(self) -> None:
        super().setUp()
        self.root = SearchNode(Pose.identity())

    def test_root(self) -> None:
        inserted = search.insert_refined(self.root, OpenQueue(), PlannerConfig())
        self.assertEqual(inserted, 0)

    def test_coarsest_child(self) -> None:
        cfg = PlannerConfig()
        queue = OpenQueue()
        node = _coarsest_child(self.root, cfg)
        self.assertEqual(search.insert_refined(node, queue, cfg), 2)
        self.assertLen(queue, 2)
        children = [queue.pop() for _ in range(2)]
        self.assertTrue(all(c.parent is self.root for c in children))
        self.assertTrue(all(c.rank == 2 for c in children))
        self.assertEqual(
            sorted(c.accumulated_length for c in children), [10.0, 20.0]
        )

    def test_all_below_cutoff(self) -> None:
        cfg = PlannerConfig(cutoff=Resolution(20.0, math.pi / 2))
        node = _coarsest_child(self.root, cfg)
        self.assertEqual(search.insert_refined(node, OpenQueue(), cfg), 0)

    @parameterized.parameters((Variant.RCS, 0), (Variant.RCS_B, 2))
    def test_equivalent_primitives(self, variant: Variant, second: int) -> None:
        cfg = PlannerConfig(variant=variant)
        node = _coarsest_child(self.root, cfg)
        self.assertEqual(search.insert_refined(node, OpenQueue(), cfg), 2)
        self.assertEqual(search.insert_refined(node, OpenQueue(), cfg), second)


class RetrievePlanTest(absltest.TestCase):
    def test_root_only(self) -> None:
        root = SearchNode(Pose.identity())
        traj = search.retrieve_plan(root, np.zeros(3))
        self.assertEmpty(traj.primitives)
        self.assertLen(traj.waypoints, 1)
        self.assertEqual(traj.length, 0.0)
        self.assertEqual(traj.targeting_error, 0.0)

    def test_two_primitives(self) -> None:
        cfg = PlannerConfig()
        root = SearchNode(Pose.identity())
        a = search.make_child(root, MotionPrimitive(0.01, 20.0, 1.0), cfg)
        b = search.make_child(a, MotionPrimitive(0.0, 15.0, 0.5), cfg)
        traj = search.retrieve_plan(b, b.pose.position)
        self.assertLen(traj.waypoints, 3)
        self.assertAlmostEqual(traj.length, 35.0)
        self.assertEqual(traj.targeting_error, 0.0)


class PlanTest(parameterized.TestCase):
    def test_direct_straight_segment(self) -> None:
        problem = library.empty()
        result = search.plan_serial(problem, PlannerConfig())
        self.assertEqual(result.status, PlanStatus.SOLVED)
        traj = result.trajectory
        self.assertLen(traj.primitives, 1)
        self.assertEqual(traj.primitives[0].kappa, 0.0)
        self.assertAlmostEqual(traj.primitives[0].delta_ell, 50.0, places=9)
        self.assertLess(traj.targeting_error, 1e-9)

    @parameterized.parameters(*_SERIAL_VARIANTS)
    def test_empty_solved(self, variant: Variant) -> None:
        problem = library.empty()
        result = search.plan_serial(problem, PlannerConfig(variant=variant))
        self.assertEqual(result.status, PlanStatus.SOLVED)
        self.assertLessEqual(result.trajectory.targeting_error, problem.tau)
        self.assertLessEqual(result.trajectory.length, problem.ell_max)
        self.assertIsNotNone(result.stats.time_to_first_solution)

    @parameterized.parameters(*_SERIAL_VARIANTS)
    def test_blocked_exhausts(self, variant: Variant) -> None:
        cfg = PlannerConfig(
            cutoff=_TINY.cutoff, time_budget=_TINY.time_budget, variant=variant
        )
        result = search.plan_serial(library.blocked(), cfg)
        self.assertEqual(result.status, PlanStatus.EXHAUSTED)
        self.assertIsNone(result.trajectory)
        self.assertLessEqual(result.stats.nodes_expanded, _TINY_NODE_BOUND)

    @parameterized.parameters(*_SERIAL_VARIANTS)
    def test_slalom_needs_search(self, variant: Variant) -> None:
        problem = library.slalom().problem
        cfg = PlannerConfig(
            cutoff=Resolution(10.0, math.pi / 4), time_budget=300.0, variant=variant
        )
        result = search.plan_serial(problem, cfg)
        self.assertEqual(result.status, PlanStatus.SOLVED)
        self.assertGreater(result.stats.nodes_extracted, 1)

        traj = result.trajectory
        if not variant.optimized:
            self.assertGreaterEqual(len(traj.primitives), 4)
        pose = problem.start
        for m, waypoint in zip(traj.primitives, traj.waypoints[1:]):
            self.assertLessEqual(m.kappa, problem.kappa_max)
            self.assertTrue(arc_free(problem.env, pose, m, cfg.collision_step))
            pose = apply_primitive(pose, m)
            self.assertTrue(pose.allclose(waypoint, atol=1e-9))
        self.assertLessEqual(traj.length, problem.ell_max + 1e-9)
        self.assertLessEqual(
            float(np.linalg.norm(pose.position - problem.goal)), problem.tau
        )

    @parameterized.parameters(*range(10))
    def test_fine_cutoff_solves_corridor(self, seed: int) -> None:
        self._assert_solved_at_fine_cutoff(library.corridor(seed=seed).problem)

    def test_fine_cutoff_solves_slalom(self) -> None:
        self._assert_solved_at_fine_cutoff(library.slalom().problem)

    def _assert_solved_at_fine_cutoff(self, problem: ProblemInstance) -> None:
        result = search.plan_serial(problem, _FINE)
        self.assertEqual(result.status, PlanStatus.SOLVED)
        self.assertLess(result.stats.time_to_first_solution, _FINE.time_budget)
        report = verify_trajectory(result, problem, _FINE.collision_step)
        self.assertTrue(report.passed, msg=report.failures)

    def test_ranks_non_decreasing(self) -> None:
        for variant in _SERIAL_VARIANTS:
            engine = _RecordingSearch(
                library.blocked(),
                PlannerConfig(cutoff=_TINY.cutoff, variant=variant),
            )
            engine.run()
            ranks = engine.extracted_ranks
            self.assertGreater(len(ranks), 1)
            self.assertTrue(all(a <= b for a, b in zip(ranks[:-1], ranks[1:])))

    def test_deterministic(self) -> None:
        problem = library.slalom().problem
        cfg = PlannerConfig(cutoff=Resolution(10.0, math.pi / 4), time_budget=300.0)
        a = search.plan_serial(problem, cfg)
        b = search.plan_serial(problem, cfg)
        self.assertGreater(a.stats.nodes_extracted, 1)
        self.assertEqual(
            a.to_dict(include_timing=False), b.to_dict(include_timing=False)
        )

    def test_no_rejection_accepts_superset(self) -> None:
        problem = library.blocked()
        runs = {}
        for variant in (Variant.RCS_B, Variant.RCS_NR):
            engine = _RecordingSearch(
                problem,
                PlannerConfig(cutoff=_TINY.cutoff, d_sim=0.5, variant=variant),
            )
            engine.run()
            runs[variant] = engine.accepted
        for pose in runs[Variant.RCS_B]:
            self.assertTrue(any(pose.allclose(p) for p in runs[Variant.RCS_NR]))

    def test_expansion_cap_times_out(self) -> None:
        cfg = PlannerConfig(variant=Variant.RCS_B, max_expansions=5)
        result = search.plan_serial(library.blocked(), cfg)
        self.assertEqual(result.status, PlanStatus.TIMED_OUT)
        self.assertEqual(result.stats.nodes_extracted, 5)


if __name__ == "__main__":
    absltest.main()
