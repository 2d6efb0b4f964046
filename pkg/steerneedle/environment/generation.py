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

"""Synthetic vessel scenarios and benchmark test cases."""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from absl import logging

from steerneedle import constants as consts
from steerneedle.environment.environment import (
    Bounds,
    Environment,
    arc_free,
    point_free,
)
from steerneedle.environment.scenario import ProblemInstance
from steerneedle.geometry.pose import Pose
from steerneedle.geometry.reachability import UndefinedDirectionError, direct_connect
from steerneedle.primitives.motion_primitive import MotionPrimitive

# Goals are drawn at distances in this fraction range of the insertion budget.
_GOAL_DISTANCE_RANGE = (0.2, 0.8)

# Goals placed behind an obstacle point go at most this much deeper than the
# minimum clearance behind it (mm).
_OCCLUDED_GOAL_DEPTH = 10.0

# Maximum change of a vessel's direction between consecutive segments (rad).
_MAX_BEND = math.pi / 4


class TestCaseExhaustedError(RuntimeError):
    """Filters rejected too many draws to produce the requested test cases."""


@dataclass(frozen=True)
class VesselSpec:
    """Parameters of a synthetic vessel scenario."""

    n_vessels: int = consts.N_VESSELS
    vessel_radius_range: Tuple[float, float] = consts.VESSEL_RADIUS_RANGE
    box_size: float = consts.BOX_SIZE
    point_spacing: float = consts.POINT_SPACING
    segments_per_vessel: int = consts.SEGMENTS_PER_VESSEL

    def __post_init__(self) -> None:
        if self.n_vessels < 0:
            raise ValueError("n_vessels must be non-negative.")
        low, high = self.vessel_radius_range
        if not 0 < low <= high:
            raise ValueError("vessel_radius_range must satisfy 0 < low <= high.")
        if self.box_size <= 0:
            raise ValueError("box_size must be positive.")
        if self.point_spacing <= 0:
            raise ValueError("point_spacing must be positive.")
        if self.segments_per_vessel <= 0:
            raise ValueError("segments_per_vessel must be positive.")


def _orthonormal_basis(axis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Two unit vectors completing `axis` to a right-handed frame."""
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(axis)))] = 1.0
    u = np.cross(axis, helper)
    u /= np.linalg.norm(u)
    return u, np.cross(axis, u)


def tube_surface_points(
    p0: np.ndarray, p1: np.ndarray, radius: float, spacing: float
) -> np.ndarray:
    """Rings of points on the cylinder of `radius` around segment p0-p1."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    length = float(np.linalg.norm(p1 - p0))
    if length == 0.0:
        return np.empty((0, 3))
    axis = (p1 - p0) / length
    u, v = _orthonormal_basis(axis)
    n_along = max(1, math.ceil(length / spacing))
    n_around = max(3, math.ceil(2 * math.pi * radius / spacing))
    t = np.linspace(0.0, length, n_along + 1)
    phi = np.arange(n_around) * (2 * math.pi / n_around)
    ring = radius * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v)
    centers = p0 + t[:, None] * axis
    return (centers[:, None, :] + ring[None, :, :]).reshape(-1, 3)


def box_shell_points(bounds: Bounds, spacing: float) -> np.ndarray:
    """Grid points on the six faces of `bounds`."""
    axes = [
        np.linspace(lo, hi, max(2, math.ceil((hi - lo) / spacing) + 1))
        for lo, hi in zip(bounds.minimum, bounds.maximum)
    ]
    faces = []
    for fixed in range(3):
        free = [i for i in range(3) if i != fixed]
        a, b = np.meshgrid(axes[free[0]], axes[free[1]], indexing="ij")
        for value in (bounds.minimum[fixed], bounds.maximum[fixed]):
            face = np.empty((a.size, 3))
            face[:, fixed] = value
            face[:, free[0]] = a.ravel()
            face[:, free[1]] = b.ravel()
            faces.append(face)
    return np.unique(np.vstack(faces), axis=0)


def _vessel_centerline(
    spec: VesselSpec, random_state: np.random.RandomState
) -> np.ndarray:
    size = spec.box_size
    vertices = [random_state.uniform(0.1 * size, 0.9 * size, size=3)]
    direction = random_state.normal(size=3)
    direction /= np.linalg.norm(direction)
    for _ in range(spec.segments_per_vessel):
        length = random_state.uniform(0.2, 0.5) * size
        nxt = np.clip(vertices[-1] + length * direction, 0.0, size)
        vertices.append(nxt)
        u, v = _orthonormal_basis(direction)
        bend = random_state.uniform(0.0, _MAX_BEND)
        phase = random_state.uniform(0.0, 2 * math.pi)
        direction = (
            math.cos(bend) * direction
            + math.sin(bend) * (math.cos(phase) * u + math.sin(phase) * v)
        )
    return np.asarray(vertices)


def generate_synthetic_scenario(
    seed: int,
    spec: VesselSpec = VesselSpec(),
    needle_radius: float = consts.NEEDLE_RADIUS,
) -> Environment:
    """Random vessel-like tubes plus the box boundary, as one point cloud.

    The same seed and spec always produce the same cloud.
    """
    random_state = np.random.RandomState(seed)
    bounds = Bounds.cube(spec.box_size)
    clouds = [box_shell_points(bounds, spec.point_spacing)]
    for _ in range(spec.n_vessels):
        radius = random_state.uniform(*spec.vessel_radius_range)
        vertices = _vessel_centerline(spec, random_state)
        for p0, p1 in zip(vertices[:-1], vertices[1:]):
            clouds.append(tube_surface_points(p0, p1, radius, spec.point_spacing))
    points = np.vstack(clouds)
    points = points[bounds.contains(points)]
    logging.info(
        "Generated scenario (seed=%d) with %d obstacle points.", seed, len(points)
    )
    return Environment(
        points, bounds, needle_radius, clearance_margin=0.5 * spec.point_spacing
    )


def _random_quaternion(random_state: np.random.RandomState) -> np.ndarray:
    quat = random_state.normal(size=4)
    return quat / np.linalg.norm(quat)


def _sample_goal(
    start: Pose,
    kappa_max: float,
    ell_max: float,
    random_state: np.random.RandomState,
) -> np.ndarray:
    """A point ahead of `start` inside the cone a single feasible arc can reach."""
    dist = random_state.uniform(*_GOAL_DISTANCE_RANGE) * ell_max
    max_angle = math.asin(min(1.0, 0.5 * dist * kappa_max))
    cos_angle = random_state.uniform(math.cos(max_angle), 1.0)
    sin_angle = math.sqrt(max(0.0, 1.0 - cos_angle * cos_angle))
    azimuth = random_state.uniform(0.0, 2 * math.pi)
    local = dist * np.array(
        [sin_angle * math.cos(azimuth), sin_angle * math.sin(azimuth), cos_angle]
    )
    return start.position + start.rotation_matrix @ local


def _occluding_points(
    env: Environment, start: Pose, kappa_max: float, max_dist: float
) -> np.ndarray:
    """Interior obstacle points ahead of `start` that one feasible arc could pass."""
    near = env.spatial_index.query_radius(start.position, max_dist)
    points = env.obstacle_points[near]
    margin = env.collision_radius
    interior = np.all(
        (points > env.bounds.minimum + margin) & (points < env.bounds.maximum - margin),
        axis=1,
    )
    points = points[interior]
    local = start.to_local(points)
    dist = np.linalg.norm(local, axis=1)
    ahead = dist > 0
    points, local, dist = points[ahead], local[ahead], dist[ahead]
    max_angle = np.arcsin(np.minimum(1.0, 0.5 * dist * kappa_max))
    in_cone = local[:, 2] >= dist * np.cos(max_angle)
    return points[in_cone]


def _sample_occluded_goal(
    start: Pose,
    occluders: np.ndarray,
    collision_radius: float,
    random_state: np.random.RandomState,
) -> np.ndarray:
    """A point just behind a random obstacle point, seen from `start`."""
    obstacle = occluders[random_state.randint(len(occluders))]
    ray = obstacle - start.position
    ray /= np.linalg.norm(ray)
    low = 2.0 * collision_radius
    return obstacle + random_state.uniform(low, low + _OCCLUDED_GOAL_DEPTH) * ray


def generate_test_cases(
    env: Environment,
    n_starts: int,
    goals_per_start: int,
    seed: int,
    kappa_max: float = consts.KAPPA_MAX,
    ell_max: float = consts.ELL_MAX,
    tau: float = consts.TAU,
    delta_ell_max: float = consts.DELTA_ELL_MAX,
    collision_step: float = consts.COLLISION_STEP,
) -> List[ProblemInstance]:
    """Samples non-trivial planning queries in `env`.

    Starts are collision-free poses whose straight segment of `delta_ell_max` is clear.
    Goals are free points for which a single arc exists but collides, so that no
    case is solved by one direct connection. Half of the goal draws are placed just
    behind an obstacle point seen from the start. A start that yields fewer than
    `goals_per_start` goals within `MAX_GOAL_DRAWS_PER_START` draws, or that has no
    obstacle ahead of it, is discarded together with its goals and a new start is
    drawn.

    Raises:
        TestCaseExhaustedError: If more than `MAX_DRAWS_PER_CASE` times the
            requested number of draws were rejected.
    """
    if n_starts <= 0 or goals_per_start <= 0:
        raise ValueError("n_starts and goals_per_start must be positive.")
    random_state = np.random.RandomState(seed)
    max_rejections = consts.MAX_DRAWS_PER_CASE * n_starts * goals_per_start
    rejections = 0
    discarded_starts = 0
    straight_ahead = MotionPrimitive(0.0, delta_ell_max)
    max_goal_dist = _GOAL_DISTANCE_RANGE[1] * ell_max

    def reject() -> None:
        nonlocal rejections
        rejections += 1
        if rejections > max_rejections:
            raise TestCaseExhaustedError(
                f"Rejected {rejections} draws while generating "
                f"{n_starts}x{goals_per_start} test cases."
            )

    def draw_start() -> Pose:
        while True:
            position = random_state.uniform(env.bounds.minimum, env.bounds.maximum)
            start = Pose(position, _random_quaternion(random_state))
            if point_free(env, position) and arc_free(
                env, start, straight_ahead, collision_step
            ):
                return start
            reject()

    def draw_goal(start: Pose, occluders: np.ndarray) -> np.ndarray:
        if random_state.uniform() < 0.5:
            return _sample_occluded_goal(
                start, occluders, env.collision_radius, random_state
            )
        return _sample_goal(start, kappa_max, ell_max, random_state)

    def goal_is_hard(start: Pose, goal: np.ndarray) -> bool:
        if not point_free(env, goal):
            return False
        try:
            arc = direct_connect(start, goal, kappa_max, tau)
        except UndefinedDirectionError:
            return False
        if arc is None or arc.length > ell_max:
            return False
        return not arc_free(env, start, arc.primitive, collision_step)

    cases: List[ProblemInstance] = []
    while len(cases) < n_starts * goals_per_start:
        start = draw_start()
        occluders = _occluding_points(env, start, kappa_max, max_goal_dist)
        if len(occluders) == 0:
            discarded_starts += 1
            reject()
            continue
        goals: List[np.ndarray] = []
        for _ in range(consts.MAX_GOAL_DRAWS_PER_START):
            goal = draw_goal(start, occluders)
            if goal_is_hard(start, goal):
                goals.append(goal)
                if len(goals) == goals_per_start:
                    break
            else:
                reject()
        if len(goals) < goals_per_start:
            discarded_starts += 1
            continue
        cases.extend(
            ProblemInstance(
                env=env,
                start=start,
                goal=goal,
                tau=tau,
                ell_max=ell_max,
                kappa_max=kappa_max,
            )
            for goal in goals
        )

    logging.info(
        "Generated %d test cases (%d draws rejected, %d starts discarded).",
        len(cases),
        rejections,
        discarded_starts,
    )
    return cases
