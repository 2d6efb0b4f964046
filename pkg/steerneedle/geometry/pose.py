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

"""Needle-tip poses and circular-arc kinematics."""

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Sequence, Tuple

import numpy as np

from steerneedle.geometry import transformations as tr

if TYPE_CHECKING:
    from steerneedle.primitives.motion_primitive import MotionPrimitive

# Below this swept angle an arc is evaluated as a straight segment.
_STRAIGHT_ETA = 1e-10

# Relative tolerance used to decide whether the last sample coincides with the arc end.
_SAMPLE_TOL = 1e-9

# Quaternions already this close to unit norm are stored as given.
_UNIT_TOL = 1e-12

_UNIT_Z = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True, eq=False)
class Pose:
    """Needle-tip configuration: position in mm and a unit quaternion [w, x, y, z].

    The local +Z axis of the orientation frame is the tip heading.
    """

    position: np.ndarray
    orientation: np.ndarray = field(default_factory=lambda: tr.IDENTITY_QUATERNION)

    def __post_init__(self) -> None:
        position = np.array(self.position, dtype=np.float64).reshape(3)
        orientation = np.array(self.orientation, dtype=np.float64).reshape(4)
        if not (np.all(np.isfinite(position)) and np.all(np.isfinite(orientation))):
            raise ValueError("Pose position and orientation must be finite.")
        if abs(np.linalg.norm(orientation) - 1.0) > _UNIT_TOL:
            orientation = tr.quat_normalize(orientation)
        position.setflags(write=False)
        orientation.setflags(write=False)
        object.__setattr__(self, "position", position)
        object.__setattr__(self, "orientation", orientation)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.zeros(3), tr.IDENTITY_QUATERNION)

    @property
    def heading(self) -> np.ndarray:
        """Unit tangent of the needle tip in world coordinates."""
        return tr.quat_rotate(self.orientation, _UNIT_Z)

    @property
    def rotation_matrix(self) -> np.ndarray:
        return tr.quat_to_rmat(self.orientation)

    def to_local(self, point: np.ndarray) -> np.ndarray:
        """Expresses a world point in this pose's local frame."""
        delta = np.asarray(point, dtype=np.float64) - self.position
        return delta @ self.rotation_matrix

    def allclose(self, other: "Pose", atol: float = 1e-9) -> bool:
        """Position and rotation agree within `atol` (quaternion sign ignored)."""
        if not np.allclose(self.position, other.position, rtol=0.0, atol=atol):
            return False
        return bool(tr.quat_angle_between(self.orientation, other.orientation) <= atol)

    def to_dict(self) -> Dict[str, List[float]]:
        return {
            "position": [float(v) for v in self.position],
            "quaternion": [float(v) for v in self.orientation],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Sequence[float]]) -> "Pose":
        return cls(np.asarray(data["position"]), np.asarray(data["quaternion"]))


def _check_primitive(m: "MotionPrimitive") -> None:
    values = (m.kappa, m.delta_ell, m.delta_theta)
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"Primitive has non-finite parameters: {values}.")
    if m.kappa < 0:
        raise ValueError(f"Curvature must be non-negative, got {m.kappa}.")
    if m.delta_ell <= 0:
        raise ValueError(f"Arc length must be positive, got {m.delta_ell}.")


def arc_frames(
    pose: Pose, kappa: float, arc_lengths: np.ndarray, delta_theta: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Positions (N, 3) and orientations (N, 4) along one arc.

    The frame is first rotated about local Z by `delta_theta`; the arc then lies in
    the rotated XZ-plane and bends toward local +X.
    """
    s = np.atleast_1d(np.asarray(arc_lengths, dtype=np.float64))
    plane = tr.quat_mul(pose.orientation, tr.quat_about_z(delta_theta))
    eta = kappa * s
    local = np.zeros((s.shape[0], 3))
    if kappa * float(np.max(s, initial=0.0)) < _STRAIGHT_ETA:
        local[:, 2] = s
        orientations = np.broadcast_to(plane, (s.shape[0], 4))
    else:
        radius = 1.0 / kappa
        # 2 r sin^2(eta / 2) is r (1 - cos eta) without the cancellation.
        local[:, 0] = 2.0 * radius * np.sin(0.5 * eta) ** 2
        local[:, 2] = radius * np.sin(eta)
        orientations = tr.quat_mul(plane, tr.quat_about_y(eta))
    positions = pose.position + tr.quat_rotate(plane, local).reshape(-1, 3)
    return positions, tr.quat_normalize(orientations)


def apply_primitive(pose: Pose, m: "MotionPrimitive") -> Pose:
    """Returns the tip pose after executing `m` from `pose` (x ⊕ M)."""
    _check_primitive(m)
    positions, orientations = arc_frames(
        pose, m.kappa, np.array([m.delta_ell]), m.delta_theta
    )
    return Pose(positions[0], orientations[0])


def sample_arc_lengths(delta_ell: float, step: float) -> np.ndarray:
    """Arc-length parameters {0, step, 2 step, ..., delta_ell}."""
    if step <= 0:
        raise ValueError(f"Sampling step must be positive, got {step}.")
    count = int(math.floor(delta_ell / step + _SAMPLE_TOL))
    samples = step * np.arange(count + 1, dtype=np.float64)
    if delta_ell - samples[-1] > _SAMPLE_TOL * max(1.0, delta_ell):
        samples = np.append(samples, delta_ell)
    else:
        samples[-1] = delta_ell
    return samples


def arc_positions(pose: Pose, m: "MotionPrimitive", step: float) -> np.ndarray:
    """Tip positions sampled along `m` every `step` mm, endpoints included."""
    _check_primitive(m)
    positions, _ = arc_frames(
        pose, m.kappa, sample_arc_lengths(m.delta_ell, step), m.delta_theta
    )
    return positions


def interpolate_arc(pose: Pose, m: "MotionPrimitive", step: float) -> List[Pose]:
    """Poses sampled along `m` every `step` mm; the last one is the arc end."""
    _check_primitive(m)
    positions, orientations = arc_frames(
        pose, m.kappa, sample_arc_lengths(m.delta_ell, step), m.delta_theta
    )
    poses = [Pose(p, q) for p, q in zip(positions[:-1], orientations[:-1])]
    poses.append(apply_primitive(pose, m))
    return poses


def distance(a: Pose, b: Pose, alpha: float) -> float:
    """Configuration metric: Euclidean distance plus alpha times geodesic angle."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}.")
    angle = tr.quat_angle_between(a.orientation, b.orientation)
    return float(np.linalg.norm(a.position - b.position) + alpha * angle)


@dataclass(frozen=True, eq=False)
class Arc:
    """A primitive executed from a start pose, with its end pose cached."""

    start: Pose
    primitive: "MotionPrimitive"
    end: Pose = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "end", apply_primitive(self.start, self.primitive))

    @property
    def length(self) -> float:
        return self.primitive.delta_ell


def directed_hausdorff(
    positions_a: np.ndarray,
    orientations_a: np.ndarray,
    positions_b: np.ndarray,
    orientations_b: np.ndarray,
    alpha: float,
    chunk_size: int = 512,
) -> float:
    """Max over samples of b of the min metric distance to samples of a.

    `alpha` may be zero, in which case only positions are compared.
    """
    if len(positions_a) == 0 or len(positions_b) == 0:
        raise ValueError("Both trajectories must contain at least one sample.")
    worst = 0.0
    for begin in range(0, len(positions_b), chunk_size):
        pos_b = positions_b[begin : begin + chunk_size]
        dists = np.linalg.norm(pos_b[:, None, :] - positions_a[None, :, :], axis=-1)
        if alpha > 0:
            quat_b = orientations_b[begin : begin + chunk_size]
            dots = np.clip(np.abs(quat_b @ orientations_a.T), 0.0, 1.0)
            dists = dists + alpha * 2.0 * np.arccos(dots)
        worst = max(worst, float(np.max(np.min(dists, axis=1))))
    return worst
