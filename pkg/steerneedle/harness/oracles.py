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

"""Independent reference computations used to cross-check the planner."""

import math
from typing import List, Sequence, Tuple, Union

import numpy as np

from steerneedle.environment.environment import Environment
from steerneedle.geometry import pose as pose_lib
from steerneedle.geometry import transformations as tr
from steerneedle.geometry.pose import Pose
from steerneedle.primitives.motion_primitive import MotionPrimitive

# Default integration step of the kinematics oracle, in mm.
ODE_STEP = 1e-3

# Cross-product matrix of the local Y axis: the tip frame turns about it.
_SKEW_Y = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])


def _rot_z(angle: np.ndarray) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    mats = np.zeros(np.shape(angle) + (3, 3))
    mats[..., 0, 0] = c
    mats[..., 0, 1] = -s
    mats[..., 1, 0] = s
    mats[..., 1, 1] = c
    mats[..., 2, 2] = 1.0
    return mats


def ode_oracle_batch(
    poses: Sequence[Pose],
    primitives: Sequence[MotionPrimitive],
    step: float = ODE_STEP,
) -> List[Pose]:
    """Integrates the tip kinematics for many (pose, primitive) pairs at once.

    The state is position p and frame R with p' = R e_z and R' = kappa R [e_y]x,
    starting from the frame pre-rotated about local Z by delta_theta. Every pair
    takes the same number of classic 4th-order Runge-Kutta steps, each no longer
    than `step`.
    """
    if len(poses) != len(primitives):
        raise ValueError("poses and primitives must have the same length.")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}.")
    if not poses:
        return []
    kappa = np.array([m.kappa for m in primitives])
    length = np.array([m.delta_ell for m in primitives])
    theta = np.array([m.delta_theta for m in primitives])
    n_steps = max(1, math.ceil(float(np.max(length)) / step))
    h = (length / n_steps)[:, None]

    p = np.array([x.position for x in poses])
    rot = np.array([x.rotation_matrix for x in poses]) @ _rot_z(theta)
    omega = kappa[:, None, None] * _SKEW_Y

    def rate(r: np.ndarray) -> np.ndarray:
        return r @ omega

    hm = h[:, :, None]
    for _ in range(n_steps):
        k1 = rate(rot)
        k2 = rate(rot + 0.5 * hm * k1)
        k3 = rate(rot + 0.5 * hm * k2)
        k4 = rate(rot + hm * k3)
        # The position rate is the heading column of each stage's frame.
        p = p + h / 6.0 * (
            rot[:, :, 2]
            + 2.0 * (rot + 0.5 * hm * k1)[:, :, 2]
            + 2.0 * (rot + 0.5 * hm * k2)[:, :, 2]
            + (rot + hm * k3)[:, :, 2]
        )
        rot = rot + hm / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return [Pose(pi, tr.rmat_to_quat(ri)) for pi, ri in zip(p, rot)]


def ode_oracle(
    pose: Pose,
    kappa: float,
    delta_ell: float,
    delta_theta: float = 0.0,
    step: float = ODE_STEP,
) -> Pose:
    """Tip pose after one primitive, by numerical integration."""
    primitive = MotionPrimitive(kappa, delta_ell, delta_theta)
    return ode_oracle_batch([pose], [primitive], step)[0]


def _as_arrays(traj: Sequence[Pose]) -> Tuple[np.ndarray, np.ndarray]:
    positions = np.array([x.position for x in traj]).reshape(-1, 3)
    orientations = np.array([x.orientation for x in traj]).reshape(-1, 4)
    return positions, orientations


def hausdorff_one_way(
    traj_a: Sequence[Pose], traj_b: Sequence[Pose], alpha: float
) -> float:
    """Max over samples of `traj_b` of the min pose distance to `traj_a`."""
    pos_a, quat_a = _as_arrays(traj_a)
    pos_b, quat_b = _as_arrays(traj_b)
    return pose_lib.directed_hausdorff(pos_a, quat_a, pos_b, quat_b, alpha)


def clearance(traj: Union[Sequence[Pose], np.ndarray], env: Environment) -> float:
    """Smallest obstacle distance minus the needle radius over a sampled path.

    Returns inf when the environment has no obstacle points.
    """
    if isinstance(traj, np.ndarray):
        positions = traj.reshape(-1, 3)
    else:
        positions = np.array([x.position for x in traj]).reshape(-1, 3)
    nearest = env.spatial_index.nearest_distance(positions)
    return float(np.min(nearest)) - env.needle_radius


def arc_deviation(points: np.ndarray, start: Pose, m: MotionPrimitive) -> float:
    """Largest Euclidean distance from `points` to the arc of `m` leaving `start`.

    Distances are computed in closed form against the continuous arc.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    local = start.to_local(points) @ _rot_z(m.delta_theta)
    if m.kappa == 0.0:
        t = np.clip(local[:, 2], 0.0, m.delta_ell)
        nearest = np.zeros_like(local)
        nearest[:, 2] = t
        return float(np.max(np.linalg.norm(local - nearest, axis=1)))

    radius = 1.0 / m.kappa
    sweep = m.kappa * m.delta_ell
    x, y, z = local[:, 0], local[:, 1], local[:, 2]
    angle = np.mod(np.arctan2(z, radius - x), 2 * math.pi)
    to_circle = np.hypot(np.hypot(x - radius, z) - radius, y)

    end = [2 * radius * math.sin(0.5 * sweep) ** 2, 0.0, radius * math.sin(sweep)]
    ends = np.array([[0.0, 0.0, 0.0], end])
    to_ends = np.min(np.linalg.norm(local[:, None, :] - ends[None], axis=-1), axis=1)
    dist = np.where(angle <= sweep, to_circle, to_ends)
    return float(np.max(dist))
