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

"""Goal reachability and direct goal connection for curvature-bounded arcs."""

import math
from typing import NamedTuple, Optional

import numpy as np

from steerneedle.geometry.pose import Arc, Pose
from steerneedle.primitives.motion_primitive import MotionPrimitive

# Lateral offsets below this are treated as lying on the heading axis.
_AXIS_TOL = 1e-12

# Largest heading change a single connecting arc may sweep.
_MAX_TURN = math.pi / 2


class UndefinedDirectionError(ValueError):
    """Raised when the goal lies exactly on the backward heading axis."""


class CurvatureSolution(NamedTuple):
    """The unique planar arc through the tip pose and a goal point."""

    kappa: float
    delta_theta: float
    arc_length: float

    @property
    def turn(self) -> float:
        """Heading change swept by the arc, in radians."""
        return self.kappa * self.arc_length


def _wrap_angle(angle: float) -> float:
    wrapped = angle % (2 * math.pi)
    return 0.0 if wrapped >= 2 * math.pi else wrapped


def goal_reachable(pose: Pose, goal: np.ndarray, kappa_max: float, tau: float) -> bool:
    """Whether any curvature-bounded path from `pose` can end within `tau` of `goal`.

    A goal is rejected when it lies deeper than `tau` inside the torus swept by the
    maximum-curvature circles tangent to the heading, or when reaching it would need
    a heading change beyond 90 degrees. The latter covers goals behind the tip plane
    and goals more than one turning radius to the side but less than one radius
    ahead. Paths of several primitives are allowed, so a goal can pass this test
    while `direct_connect` finds no single arc to it.
    """
    if kappa_max <= 0:
        raise ValueError(f"kappa_max must be positive, got {kappa_max}.")
    if tau < 0:
        raise ValueError(f"tau must be non-negative, got {tau}.")
    x, y, z = pose.to_local(goal)
    radius = 1.0 / kappa_max
    lateral = math.hypot(x, y)
    depth = radius - math.hypot(lateral - radius, z)
    if depth > tau:
        return False
    if z < 0 and math.sqrt(x * x + y * y + z * z) > tau:
        return False
    # Within a 90 degree turn the tip gets one radius sideways only after one
    # radius of depth.
    if lateral > radius and radius - z > tau:
        return False
    return True


def curvature_to_point(pose: Pose, goal: np.ndarray) -> CurvatureSolution:
    """Curvature, curving-plane angle and arc length of the arc ending at `goal`.

    Raises:
        ValueError: if the goal coincides with the tip position.
        UndefinedDirectionError: if the goal lies exactly behind the tip.
    """
    x, y, z = pose.to_local(goal)
    lateral = math.hypot(x, y)
    if lateral <= _AXIS_TOL:
        if z > _AXIS_TOL:
            return CurvatureSolution(0.0, 0.0, float(z))
        if z < -_AXIS_TOL:
            raise UndefinedDirectionError(
                "Goal lies on the backward heading axis; no arc direction is defined."
            )
        raise ValueError("Goal coincides with the tip position.")

    delta_theta = _wrap_angle(math.atan2(y, x))
    kappa = 2.0 * lateral / (lateral * lateral + z * z)
    turn = 2.0 * math.atan2(lateral, z)
    if turn < 1e-10:
        arc_length = math.hypot(lateral, z)
    else:
        arc_length = turn / kappa
    return CurvatureSolution(kappa, delta_theta, arc_length)


def direct_connect(
    pose: Pose, goal: np.ndarray, kappa_max: float, tau: float
) -> Optional[Arc]:
    """A single arc from `pose` to (or to within `tau` of) `goal`, if one exists.

    The exact arc is returned when its curvature is feasible. Otherwise, when the goal
    sits at most `tau` inside the unreachable region, the maximum-curvature arc in the
    same plane is stopped at its point closest to the goal. Arcs turning the heading
    by more than 90 degrees are never returned. Collisions are not checked.
    """
    local = pose.to_local(goal)
    if float(np.linalg.norm(local)) <= _AXIS_TOL:
        return None
    solution = curvature_to_point(pose, goal)

    if solution.kappa <= kappa_max:
        if solution.turn > _MAX_TURN:
            return None
        primitive = MotionPrimitive(
            solution.kappa, solution.arc_length, solution.delta_theta
        )
        return Arc(pose, primitive)

    # The goal is inside the maximum-curvature circle of its plane. In-plane
    # coordinates put the circle center at (radius, 0).
    radius = 1.0 / kappa_max
    lateral = math.hypot(local[0], local[1])
    depth = radius - math.hypot(lateral - radius, local[2])
    if depth > tau:
        return None
    turn = math.atan2(local[2], radius - lateral)
    if turn <= 0.0 or turn > _MAX_TURN:
        return None
    primitive = MotionPrimitive(kappa_max, turn * radius, solution.delta_theta)
    return Arc(pose, primitive)
