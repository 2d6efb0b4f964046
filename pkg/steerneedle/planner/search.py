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

"""Multi-resolution search over motion primitives."""

import enum
import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, NamedTuple, Optional, Set, Tuple

import numpy as np
from absl import logging

from steerneedle.environment.environment import PointIndex, arc_free
from steerneedle.environment.scenario import ProblemInstance
from steerneedle.geometry import transformations as tr
from steerneedle.geometry.pose import Arc, Pose, apply_primitive
from steerneedle.geometry.reachability import (
    UndefinedDirectionError,
    direct_connect,
    goal_reachable,
)
from steerneedle.planner.config import PlannerConfig
from steerneedle.planner.result import (
    PlanResult,
    PlanStats,
    PlanStatus,
    Trajectory,
    make_trajectory,
)
from steerneedle.primitives import hierarchy
from steerneedle.primitives.motion_primitive import MotionPrimitive

# Poses closer than this in position (mm) and rotation (rad) are the same pose.
_DUPLICATE_TOL = 1e-9

# Slack on the insertion-length bound for accumulated floating-point sums.
_LENGTH_TOL = 1e-9

_TWO_PI = 2 * math.pi

_PROGRESS_SECONDS = 10.0


class RejectReason(enum.Enum):
    LENGTH = "length"
    REACHABILITY = "reachability"
    DUPLICATE = "duplicate"
    COLLISION = "collision"
    SIMILAR = "similar"


class Validation(NamedTuple):
    accepted: bool
    reason: Optional[RejectReason] = None


_ACCEPT = Validation(True)


@dataclass(eq=False)
class SearchNode:
    """A search-tree vertex: the tip pose reached from `parent` through `primitive`.

    `explored_primitive_ids` lists the primitives already used to create children of
    this node.
    """

    pose: Pose
    parent: Optional["SearchNode"] = None
    primitive: Optional[MotionPrimitive] = None
    rank: int = 0
    accumulated_length: float = 0.0
    explored_primitive_ids: Set[int] = field(default_factory=set)
    serial: int = -1

    @property
    def is_root(self) -> bool:
        return self.parent is None


class OpenQueue:
    """Priority queue of nodes; ties are served first-in first-out."""

    def __init__(self, priority: Callable[[SearchNode], float] = lambda n: n.rank):
        self._priority = priority
        self._heap: List[Tuple[float, int, SearchNode]] = []
        self._serial = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, node: SearchNode) -> None:
        node.serial = self._serial
        self._serial += 1
        heapq.heappush(self._heap, (self._priority(node), node.serial, node))

    def pop(self) -> SearchNode:
        return heapq.heappop(self._heap)[2]


class ClosedSet:
    """Poses of accepted nodes with exact radius queries on their positions."""

    def __init__(self) -> None:
        self._index = PointIndex()
        self._orientations: List[np.ndarray] = []

    def __len__(self) -> int:
        return len(self._orientations)

    def add(self, pose: Pose) -> None:
        self._index.add(pose.position)
        self._orientations.append(pose.orientation)

    def _angles_within(
        self, pose: Pose, radius: float
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Position distances and rotation angles to stored poses within `radius`."""
        indices = self._index.query_radius(pose.position, radius)
        if len(indices) == 0:
            return np.empty(0), np.empty(0)
        positions = self._index.points[indices]
        orientations = np.asarray([self._orientations[i] for i in indices])
        dists = np.linalg.norm(positions - pose.position, axis=1)
        angles = tr.quat_angle_between(orientations, pose.orientation)
        return dists, np.atleast_1d(angles)

    def contains_duplicate(self, pose: Pose, tol: float = _DUPLICATE_TOL) -> bool:
        _, angles = self._angles_within(pose, tol)
        return bool(np.any(angles <= tol))

    def contains_similar(self, pose: Pose, d_sim: float, alpha: float) -> bool:
        if d_sim <= 0:
            return False
        dists, angles = self._angles_within(pose, d_sim)
        return bool(np.any(dists + alpha * angles < d_sim))


def exists_similar(pose: Pose, closed: ClosedSet, d_sim: float, alpha: float) -> bool:
    """Whether some closed pose lies within `d_sim` of `pose` under the pose metric.

    Candidates come from a radius query on positions, which never misses a match
    because the metric is at least the position distance.
    """
    if d_sim < 0:
        raise ValueError(f"d_sim must be non-negative, got {d_sim}.")
    return closed.contains_similar(pose, d_sim, alpha)


def coarsest_thetas(delta_theta_max: float) -> List[float]:
    """Multiples of `delta_theta_max` in [0, 2*pi)."""
    count = int(math.ceil(_TWO_PI / delta_theta_max - 1e-9))
    return [k * delta_theta_max for k in range(count)]


def make_child(
    parent: SearchNode, m: MotionPrimitive, cfg: PlannerConfig
) -> SearchNode:
    return SearchNode(
        pose=apply_primitive(parent.pose, m),
        parent=parent,
        primitive=m,
        rank=hierarchy.rank(parent.rank, m, cfg.delta_ell_max, cfg.delta_theta_max),
        accumulated_length=parent.accumulated_length + m.delta_ell,
    )


def check_bounds(
    node: SearchNode, problem: ProblemInstance, cfg: PlannerConfig
) -> Validation:
    """Length bound, then goal reachability for the optimized variants."""
    if node.accumulated_length > problem.ell_max + _LENGTH_TOL:
        return Validation(False, RejectReason.LENGTH)
    if cfg.variant.optimized and not goal_reachable(
        node.pose, problem.goal, problem.kappa_max, problem.tau
    ):
        return Validation(False, RejectReason.REACHABILITY)
    return _ACCEPT


def check_collision(
    node: SearchNode, problem: ProblemInstance, cfg: PlannerConfig
) -> Validation:
    if node.is_root:
        return _ACCEPT
    if not arc_free(problem.env, node.parent.pose, node.primitive, cfg.collision_step):
        return Validation(False, RejectReason.COLLISION)
    return _ACCEPT


def validate_node(
    node: SearchNode,
    problem: ProblemInstance,
    cfg: PlannerConfig,
    closed: ClosedSet,
) -> Validation:
    """Lazy validation of an extracted node.

    Checks, in order: accumulated length, goal reachability (optimized variants
    only), exact duplicates among closed poses and collisions along the extending
    arc. The first failing check names the rejection.
    """
    verdict = check_bounds(node, problem, cfg)
    if not verdict.accepted:
        return verdict
    if closed.contains_duplicate(node.pose):
        return Validation(False, RejectReason.DUPLICATE)
    return check_collision(node, problem, cfg)


def insert_refined(node: SearchNode, open_queue: OpenQueue, cfg: PlannerConfig) -> int:
    """Enqueues the parent extended by each refinement of the node's primitive.

    Refinements finer than the cutoff are dropped. The optimized variants also skip
    primitives the parent has already been extended with. Returns the number of
    nodes enqueued.
    """
    if node.is_root:
        return 0
    parent = node.parent
    inserted = 0
    for m in hierarchy.refine(node.primitive, cfg.delta_ell_max, cfg.delta_theta_max):
        if hierarchy.below_cutoff(
            m, cfg.cutoff, cfg.delta_ell_max, cfg.delta_theta_max
        ):
            continue
        if cfg.variant.optimized:
            if m.id in parent.explored_primitive_ids:
                continue
            parent.explored_primitive_ids.add(m.id)
        open_queue.push(make_child(parent, m, cfg))
        inserted += 1
    return inserted


def connect_to_goal(
    problem: ProblemInstance, node: SearchNode, collision_step: float
) -> Optional[Arc]:
    """A collision-free single arc from `node` to within tau of the goal.

    The arc must also keep the total insertion length within `ell_max`.
    """
    try:
        arc = direct_connect(node.pose, problem.goal, problem.kappa_max, problem.tau)
    except UndefinedDirectionError:
        return None
    if arc is None:
        return None
    if node.accumulated_length + arc.length > problem.ell_max + _LENGTH_TOL:
        return None
    if np.linalg.norm(arc.end.position - problem.goal) > problem.tau:
        return None
    if not arc_free(problem.env, node.pose, arc.primitive, collision_step):
        return None
    return arc


def retrieve_plan(
    node: SearchNode, goal: np.ndarray, tail: Optional[Arc] = None
) -> Trajectory:
    """Walks parent links back to the root; `tail` is appended when given."""
    path = []
    while node is not None:
        path.append(node)
        node = node.parent
    path.reverse()
    primitives = [n.primitive for n in path[1:]]
    waypoints = [n.pose for n in path]
    if tail is not None:
        primitives.append(tail.primitive)
        waypoints.append(tail.end)
    return make_trajectory(primitives, waypoints, goal)


class MultiResolutionSearch:
    """Serial search engine.

    Nodes are served by rank. Accepted nodes are extended by the coarsest
    primitives and every extracted non-root node inserts its refined siblings.
    """

    def __init__(self, problem: ProblemInstance, cfg: PlannerConfig) -> None:
        self.problem = problem
        self.cfg = cfg
        self.stats = PlanStats()
        self.open = OpenQueue(self._priority)
        self.closed = ClosedSet()
        self.best: Optional[Trajectory] = None
        self._primitives = self.expansion_primitives()
        self._start_time = 0.0

    @property
    def name(self) -> str:
        return self.cfg.variant.value

    def _priority(self, node: SearchNode) -> float:
        return node.rank

    def expansion_primitives(self) -> List[MotionPrimitive]:
        return hierarchy.coarsest_primitives(
            (0.0, self.problem.kappa_max),
            self.cfg.delta_ell_max,
            coarsest_thetas(self.cfg.delta_theta_max),
            self.cfg.delta_theta_max,
        )

    def refine(self, node: SearchNode) -> int:
        return insert_refined(node, self.open, self.cfg)

    def expand(self, node: SearchNode) -> None:
        for m in self._primitives:
            if self.cfg.variant.optimized and m.id is not None:
                node.explored_primitive_ids.add(m.id)
            self.open.push(make_child(node, m, self.cfg))

    def direct_arc(self, node: SearchNode) -> Optional[Arc]:
        return connect_to_goal(self.problem, node, self.cfg.collision_step)

    def goal_solution(self, node: SearchNode) -> Optional[Trajectory]:
        """Trajectory ending at `node` or through its direct goal connection."""
        goal = self.problem.goal
        if np.linalg.norm(node.pose.position - goal) <= self.problem.tau:
            return retrieve_plan(node, goal)
        if self.cfg.variant.optimized:
            arc = self.direct_arc(node)
            if arc is not None:
                return retrieve_plan(node, goal, arc)
        return None

    def record(self, trajectory: Trajectory) -> bool:
        """Keeps a found trajectory; returns whether the search should stop."""
        if self.stats.time_to_first_solution is None:
            self.stats.time_to_first_solution = time.perf_counter() - self._start_time
        if not self.cfg.keep_improving:
            self.best = trajectory
            return True
        ell_max, tau = self.problem.ell_max, self.problem.tau
        if self.best is None or trajectory.cost(ell_max, tau) < self.best.cost(
            ell_max, tau
        ):
            self.best = trajectory
        return False

    def count_rejection(self, reason: RejectReason) -> None:
        if reason is RejectReason.REACHABILITY:
            self.stats.nodes_pruned_reachability += 1
        elif reason is RejectReason.SIMILAR:
            self.stats.nodes_pruned_similar += 1
        elif reason is RejectReason.COLLISION:
            self.stats.nodes_pruned_collision += 1

    def process(self, node: SearchNode) -> bool:
        """Handles one extracted node; returns whether the search should stop."""
        stop = False
        verdict = validate_node(node, self.problem, self.cfg, self.closed)
        if verdict.accepted and self.cfg.variant.rejects_similar:
            if exists_similar(node.pose, self.closed, self.cfg.d_sim, self.cfg.alpha):
                verdict = Validation(False, RejectReason.SIMILAR)
        if verdict.accepted:
            trajectory = self.goal_solution(node)
            if trajectory is not None:
                stop = self.record(trajectory)
            if not stop:
                self.expand(node)
                self.closed.add(node.pose)
                self.stats.nodes_expanded += 1
        else:
            self.count_rejection(verdict.reason)
            logging.vlog(2, "Rejected node %d: %s.", node.serial, verdict.reason.value)
        if not stop:
            self.refine(node)
        return stop

    def budget_exhausted(self, deadline: float) -> bool:
        if time.perf_counter() > deadline:
            return True
        cap = self.cfg.max_expansions
        return cap is not None and self.stats.nodes_extracted >= cap

    def finish(self, status: PlanStatus) -> PlanResult:
        self.stats.wall_time = time.perf_counter() - self._start_time
        if self.best is not None:
            status = PlanStatus.SOLVED
        result = PlanResult(status, self.best, self.stats)
        logging.info(
            "%s: %s after %d extracted / %d expanded nodes in %.2fs.",
            self.name,
            status.value,
            self.stats.nodes_extracted,
            self.stats.nodes_expanded,
            self.stats.wall_time,
        )
        return result

    def run(self) -> PlanResult:
        self._start_time = time.perf_counter()
        deadline = self._start_time + self.cfg.time_budget
        logging.info(
            "Planning with %s (budget %.1fs).",
            self.name,
            self.cfg.time_budget,
        )
        self.open.push(SearchNode(self.problem.start))
        while len(self.open):
            if self.budget_exhausted(deadline):
                return self.finish(PlanStatus.TIMED_OUT)
            node = self.open.pop()
            self.stats.nodes_extracted += 1
            if self.process(node):
                break
            logging.log_every_n_seconds(
                logging.INFO,
                "%d nodes extracted, %d open, %d closed.",
                _PROGRESS_SECONDS,
                self.stats.nodes_extracted,
                len(self.open),
                len(self.closed),
            )
        return self.finish(PlanStatus.EXHAUSTED)


def plan_serial(problem: ProblemInstance, cfg: PlannerConfig) -> PlanResult:
    return MultiResolutionSearch(problem, cfg).run()
