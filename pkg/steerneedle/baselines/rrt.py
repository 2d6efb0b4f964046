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

"""Workspace-sampling RRT with direct goal connection."""

import threading
import time
from concurrent import futures
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np
from absl import logging

from steerneedle import constants as consts
from steerneedle.environment.environment import PointIndex, arc_free
from steerneedle.environment.scenario import ProblemInstance
from steerneedle.geometry.pose import Pose, apply_primitive
from steerneedle.geometry.reachability import (
    UndefinedDirectionError,
    curvature_to_point,
)
from steerneedle.planner.result import PlanResult, PlanStats, PlanStatus, Trajectory
from steerneedle.planner.search import SearchNode, connect_to_goal, retrieve_plan
from steerneedle.primitives.motion_primitive import MotionPrimitive

# Extensions shorter than this (mm) are not added to the tree.
_MIN_EXTEND = 1e-6

_PROGRESS_SECONDS = 10.0


@dataclass(frozen=True)
class RrtConfig:
    """Parameters of one RRT run.

    Attributes:
        goal_bias: Probability of sampling the goal instead of a workspace point.
        direct_connect_ratio: Probability of trying a direct goal connection from
            each new tree node.
        max_extend: Longest arc added per extension, in mm.
        rng_seed: Seed of the sampler. Tree `i` of a parallel run uses
            `rng_seed + i`.
        time_budget: Wall-clock budget in seconds.
        max_iterations: Optional cap on drawn samples, reported as a timeout.
        keep_improving: Keep growing after the first solution and return the
            cheapest one found.
        collision_step: Arc sampling step for collision checks, in mm.
        thread_count: Number of independent trees grown concurrently.
    """

    goal_bias: float = consts.GOAL_BIAS
    direct_connect_ratio: float = consts.DIRECT_CONNECT_RATIO
    max_extend: float = consts.MAX_EXTEND
    rng_seed: int = 0
    time_budget: float = consts.TIME_BUDGET
    max_iterations: Optional[int] = None
    keep_improving: bool = False
    collision_step: float = consts.COLLISION_STEP
    thread_count: int = 1

    def __post_init__(self) -> None:
        for name in ("goal_bias", "direct_connect_ratio"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}.")
        for name in ("max_extend", "time_budget", "collision_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}.")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive when given.")
        if self.thread_count < 1:
            raise ValueError(f"thread_count must be >= 1, got {self.thread_count}.")


def steer(
    pose: Pose, target: np.ndarray, kappa_max: float, max_length: float
) -> Optional[MotionPrimitive]:
    """The arc from `pose` toward `target`, at most `max_length` mm long.

    When the arc through `target` is too sharp, the maximum-curvature arc in the same
    curving plane is followed instead. Returns None when no direction is defined or
    the allowed length is negligible.
    """
    if max_length < _MIN_EXTEND:
        return None
    try:
        solution = curvature_to_point(pose, target)
    except UndefinedDirectionError:
        return None
    except ValueError:
        # Target coincides with the tip.
        return None
    if solution.kappa <= kappa_max:
        length = min(solution.arc_length, max_length)
        kappa = solution.kappa
    else:
        length = max_length
        kappa = kappa_max
    if length < _MIN_EXTEND:
        return None
    return MotionPrimitive(kappa, length, solution.delta_theta)


class RapidlyExploringTree:
    """One tree rooted at the start pose, grown by nearest-position extension."""

    def __init__(
        self,
        problem: ProblemInstance,
        cfg: RrtConfig,
        seed: int,
        stop_event: Optional[threading.Event] = None,
    ) -> None:
        self.problem = problem
        self.cfg = cfg
        self.stats = PlanStats()
        self.nodes: List[SearchNode] = []
        self.best: Optional[Trajectory] = None
        self._index = PointIndex()
        self._random_state = np.random.RandomState(seed)
        self._stop_event = stop_event or threading.Event()
        self._start_time = 0.0

    def _add(self, node: SearchNode) -> None:
        node.serial = len(self.nodes)
        self.nodes.append(node)
        self._index.add(node.pose.position)

    def sample(self) -> np.ndarray:
        bounds = self.problem.env.bounds
        if self._random_state.uniform() < self.cfg.goal_bias:
            return self.problem.goal
        return self._random_state.uniform(bounds.minimum, bounds.maximum)

    def extend(self, target: np.ndarray) -> Optional[SearchNode]:
        """Grows the tree from the node nearest to `target`; returns the new node."""
        index, _ = self._index.nearest(target)
        near = self.nodes[index]
        remaining = self.problem.ell_max - near.accumulated_length
        m = steer(
            near.pose,
            target,
            self.problem.kappa_max,
            min(self.cfg.max_extend, remaining),
        )
        if m is None:
            return None
        if not arc_free(self.problem.env, near.pose, m, self.cfg.collision_step):
            self.stats.nodes_pruned_collision += 1
            return None
        child = SearchNode(
            pose=apply_primitive(near.pose, m),
            parent=near,
            primitive=m,
            accumulated_length=near.accumulated_length + m.delta_ell,
        )
        self._add(child)
        self.stats.nodes_expanded += 1
        return child

    def goal_solution(self, node: SearchNode) -> Optional[Trajectory]:
        goal = self.problem.goal
        if np.linalg.norm(node.pose.position - goal) <= self.problem.tau:
            return retrieve_plan(node, goal)
        if self._random_state.uniform() < self.cfg.direct_connect_ratio:
            arc = connect_to_goal(self.problem, node, self.cfg.collision_step)
            if arc is not None:
                return retrieve_plan(node, goal, arc)
        return None

    def record(self, trajectory: Trajectory) -> bool:
        """Keeps a found trajectory; returns whether growth should stop."""
        if self.stats.time_to_first_solution is None:
            self.stats.time_to_first_solution = time.perf_counter() - self._start_time
        ell_max, tau = self.problem.ell_max, self.problem.tau
        if self.best is None or trajectory.cost(ell_max, tau) < self.best.cost(
            ell_max, tau
        ):
            self.best = trajectory
        return not self.cfg.keep_improving

    def _budget_exhausted(self, deadline: float) -> bool:
        if self._stop_event.is_set() or time.perf_counter() > deadline:
            return True
        cap = self.cfg.max_iterations
        return cap is not None and self.stats.nodes_extracted >= cap

    def grow(self) -> PlanResult:
        """Samples and extends until a solution is found or the budget runs out.

        RRT never proves that no plan exists, so unsolved runs are timeouts.
        """
        self._start_time = time.perf_counter()
        deadline = self._start_time + self.cfg.time_budget
        root = SearchNode(self.problem.start)
        self._add(root)
        trajectory = self.goal_solution(root)
        stop = trajectory is not None and self.record(trajectory)
        while not stop and not self._budget_exhausted(deadline):
            self.stats.nodes_extracted += 1
            child = self.extend(self.sample())
            if child is not None:
                trajectory = self.goal_solution(child)
                if trajectory is not None:
                    stop = self.record(trajectory)
            logging.log_every_n_seconds(
                logging.INFO,
                "RRT: %d samples, %d tree nodes.",
                _PROGRESS_SECONDS,
                self.stats.nodes_extracted,
                len(self.nodes),
            )
        self.stats.wall_time = time.perf_counter() - self._start_time
        status = PlanStatus.SOLVED if self.best is not None else PlanStatus.TIMED_OUT
        return PlanResult(status, self.best, self.stats)


def plan_rrt(problem: ProblemInstance, cfg: RrtConfig = RrtConfig()) -> PlanResult:
    """Single-tree RRT; the same seed always grows the same tree."""
    if cfg.thread_count > 1:
        return plan_rrt_parallel(problem, cfg)
    logging.info("Planning with rrt (budget %.1fs).", cfg.time_budget)
    result = RapidlyExploringTree(problem, cfg, cfg.rng_seed).grow()
    logging.info(
        "rrt: %s after %d samples in %.2fs.",
        result.status.value,
        result.stats.nodes_extracted,
        result.stats.wall_time,
    )
    return result


def _merge_stats(results: List[PlanResult], wall_time: float) -> PlanStats:
    merged = PlanStats(wall_time=wall_time)
    for r in results:
        merged.nodes_extracted += r.stats.nodes_extracted
        merged.nodes_expanded += r.stats.nodes_expanded
        merged.nodes_pruned_collision += r.stats.nodes_pruned_collision
    firsts = [
        r.stats.time_to_first_solution
        for r in results
        if r.stats.time_to_first_solution is not None
    ]
    merged.time_to_first_solution = min(firsts) if firsts else None
    return merged


def plan_rrt_parallel(problem: ProblemInstance, cfg: RrtConfig) -> PlanResult:
    """Grows `cfg.thread_count` independent trees; the first solution stops all.

    With `keep_improving`, trees run to the budget and the cheapest solution wins.
    """
    if cfg.thread_count == 1:
        return plan_rrt(problem, cfg)
    start = time.perf_counter()
    stop_event = threading.Event()
    tree_cfg = replace(cfg, thread_count=1)
    trees = [
        RapidlyExploringTree(problem, tree_cfg, cfg.rng_seed + i, stop_event)
        for i in range(cfg.thread_count)
    ]

    winner: List[Trajectory] = []
    lock = threading.Lock()

    def _grow(tree: RapidlyExploringTree) -> PlanResult:
        result = tree.grow()
        if result.trajectory is not None and not cfg.keep_improving:
            with lock:
                if not winner:
                    winner.append(result.trajectory)
            stop_event.set()
        return result

    logging.info(
        "Planning with %d rrt trees (budget %.1fs).", len(trees), cfg.time_budget
    )
    with futures.ThreadPoolExecutor(max_workers=len(trees)) as executor:
        results = list(executor.map(_grow, trees))
    solved = [r.trajectory for r in results if r.trajectory is not None]
    best = winner[0] if winner else None
    if solved and cfg.keep_improving:
        best = min(solved, key=lambda t: t.cost(problem.ell_max, problem.tau))
    status = PlanStatus.SOLVED if best is not None else PlanStatus.TIMED_OUT
    return PlanResult(status, best, _merge_stats(results, time.perf_counter() - start))
