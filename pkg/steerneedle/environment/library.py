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

"""Programmatically built scenarios for testing and demos."""

import math
from typing import Callable, Dict, List, NamedTuple

import numpy as np
from sklearn.neighbors import KDTree

from steerneedle import constants as consts
from steerneedle.environment.environment import Bounds, Environment
from steerneedle.environment.scenario import ProblemInstance
from steerneedle.geometry.pose import Pose, interpolate_arc
from steerneedle.primitives.hierarchy import coarsest_primitives, primitive_id
from steerneedle.primitives.motion_primitive import MotionPrimitive

_START_POSITION = (50.0, 50.0, 10.0)


def _start_pose() -> Pose:
    return Pose(np.array(_START_POSITION))


def sphere_shell_points(
    center: np.ndarray, radius: float, spacing: float
) -> np.ndarray:
    """Near-uniform points on a sphere (golden-angle spiral) at about `spacing`."""
    n = max(4, math.ceil(4 * math.pi * radius**2 / spacing**2))
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(1.0 - z**2)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    unit = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    return np.asarray(center, dtype=np.float64) + radius * unit


def empty(
    box_size: float = consts.BOX_SIZE, goal_distance: float = 50.0
) -> ProblemInstance:
    """No obstacles; the goal lies straight ahead of the start."""
    env = Environment(
        np.empty((0, 3)), Bounds.cube(box_size), consts.NEEDLE_RADIUS, 0.0
    )
    start = _start_pose()
    return ProblemInstance(
        env=env,
        start=start,
        goal=start.position + np.array([0.0, 0.0, goal_distance]),
        tau=consts.TAU,
        ell_max=consts.ELL_MAX,
        kappa_max=consts.KAPPA_MAX,
    )


def blocked(
    goal_distance: float = 25.0,
    shell_radius: float = 4.0,
    spacing: float = 0.5,
    ell_max: float = 40.0,
) -> ProblemInstance:
    """The goal is sealed inside a spherical shell, so no plan exists."""
    start = _start_pose()
    goal = start.position + np.array([0.0, 0.0, goal_distance])
    env = Environment(
        sphere_shell_points(goal, shell_radius, spacing),
        Bounds.cube(consts.BOX_SIZE),
        consts.NEEDLE_RADIUS,
        0.5 * spacing,
    )
    return ProblemInstance(
        env=env,
        start=start,
        goal=goal,
        tau=consts.TAU,
        ell_max=ell_max,
        kappa_max=consts.KAPPA_MAX,
    )


class CorridorScenario(NamedTuple):
    problem: ProblemInstance
    primitives: List[MotionPrimitive]
    half_width: float


def _random_grid_primitive(
    random_state: np.random.RandomState, max_level: int
) -> MotionPrimitive:
    kappa = float(random_state.choice(consts.CURVATURES))
    ell_level = random_state.randint(0, max_level + 1)
    if ell_level == 0:
        ell_num = 1
    else:
        ell_num = 2 * random_state.randint(0, 2 ** (ell_level - 1)) + 1
    theta_level = random_state.randint(0, max_level + 1)
    if theta_level == 0:
        theta_num = random_state.randint(0, 4)
    else:
        theta_num = 2 * random_state.randint(0, 2 ** (theta_level + 1)) + 1
    m = MotionPrimitive(
        kappa,
        ell_num * consts.DELTA_ELL_MAX / 2**ell_level,
        theta_num * consts.DELTA_THETA_MAX / 2**theta_level,
    )
    return m.with_id(primitive_id(m, consts.DELTA_ELL_MAX, consts.DELTA_THETA_MAX))


def _path_poses(primitives: List[MotionPrimitive], step: float) -> List[Pose]:
    poses = [_start_pose()]
    for m in primitives:
        poses.extend(interpolate_arc(poses[-1], m, step)[1:])
    return poses


def _corridor_problem(
    primitives: List[MotionPrimitive], clearance: float, spacing: float
) -> CorridorScenario:
    """Encloses the path of `primitives` from the start in a tube of points."""
    margin = 0.5 * spacing
    half_width = consts.NEEDLE_RADIUS + margin + clearance + spacing
    poses = _path_poses(primitives, spacing)
    positions = np.array([p.position for p in poses])

    n_around = max(3, math.ceil(2 * math.pi * half_width / spacing))
    phi = np.arange(n_around) * (2 * math.pi / n_around)
    rings = []
    for pose in poses:
        x_axis, y_axis = pose.rotation_matrix[:, 0], pose.rotation_matrix[:, 1]
        offsets = np.outer(np.cos(phi), x_axis) + np.outer(np.sin(phi), y_axis)
        rings.append(pose.position + half_width * offsets)
    ring_points = np.vstack(rings)
    dist, _ = KDTree(positions).query(ring_points, k=1)
    ring_points = ring_points[dist[:, 0] >= 0.99 * half_width]

    problem = ProblemInstance(
        env=Environment(
            ring_points, Bounds.cube(consts.BOX_SIZE), consts.NEEDLE_RADIUS, margin
        ),
        start=poses[0],
        goal=poses[-1].position,
        tau=consts.TAU,
        ell_max=consts.ELL_MAX,
        kappa_max=consts.KAPPA_MAX,
    )
    return CorridorScenario(problem, primitives, half_width)


def corridor(
    seed: int = 0,
    n_primitives: int = 3,
    max_level: int = 4,
    clearance: float = 0.75,
    spacing: float = 0.5,
) -> CorridorScenario:
    """A tube of obstacle points around a random grid-primitive path.

    The path is a sequence of primitives on the dyadic grid at levels up to
    `max_level`, so a fine enough search contains it. Its tip keeps `clearance` mm
    of slack beyond the collision radius everywhere inside the tube. At the
    default curvature bound such paths are nearly straight, so the goal is often
    reachable with a single arc from the start.
    """
    random_state = np.random.RandomState(seed)
    half_width = consts.NEEDLE_RADIUS + 0.5 * spacing + clearance + spacing
    bounds = Bounds.cube(consts.BOX_SIZE)
    inner = Bounds(bounds.minimum + half_width, bounds.maximum - half_width)
    while True:
        primitives = [
            _random_grid_primitive(random_state, max_level)
            for _ in range(n_primitives)
        ]
        positions = np.array([p.position for p in _path_poses(primitives, spacing)])
        if np.all(inner.contains(positions)):
            break
    return _corridor_problem(primitives, clearance, spacing)


# Bend directions relative to the current frame: out, back, across, back.
_SLALOM_THETAS = (0.0, math.pi, 0.0, math.pi)


def slalom(clearance: float = 0.75, spacing: float = 0.5) -> CorridorScenario:
    """A tube around an S-shaped path of four full-length, full-curvature arcs.

    The path leaves the start axis by about 4 mm and returns to it with the start
    heading, so the goal lies straight ahead of the start but the straight segment
    to it crosses the tube wall. Reaching the goal with grid primitives alone takes
    at least four of them.
    """
    primitives = coarsest_primitives(
        (consts.KAPPA_MAX,),
        consts.DELTA_ELL_MAX,
        _SLALOM_THETAS,
        consts.DELTA_THETA_MAX,
    )
    return _corridor_problem(primitives, clearance, spacing)


SCENARIO_NAME_TO_CALLABLE: Dict[str, Callable[[], ProblemInstance]] = {
    "empty": empty,
    "blocked": blocked,
    "corridor": lambda: corridor().problem,
    "slalom": lambda: slalom().problem,
}
