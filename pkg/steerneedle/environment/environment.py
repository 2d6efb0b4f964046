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

"""Obstacle point clouds, exact spatial indexing and collision checks."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.neighbors import KDTree

from steerneedle.geometry.pose import Pose, arc_positions
from steerneedle.primitives.motion_primitive import MotionPrimitive

# Points appended after the last rebuild are scanned linearly until the buffer
# outgrows the tree, at which point the tree is rebuilt over everything.
_MIN_BUFFER = 256

_LEAF_SIZE = 40


class PointIndex:
    """Exact fixed-radius and nearest-neighbour queries over a growing point set.

    Bulk points live in a `sklearn.neighbors.KDTree`; recent insertions are kept in a
    small buffer that is searched by brute force. Not thread-safe for writes.
    """

    def __init__(self, points: Optional[np.ndarray] = None) -> None:
        self._tree: Optional[KDTree] = None
        self._tree_points = np.empty((0, 3), dtype=np.float64)
        self._buffer: List[np.ndarray] = []
        if points is not None and len(points) > 0:
            self._rebuild(np.asarray(points, dtype=np.float64).reshape(-1, 3))

    def __len__(self) -> int:
        return len(self._tree_points) + len(self._buffer)

    @property
    def points(self) -> np.ndarray:
        if not self._buffer:
            return self._tree_points
        return np.vstack([self._tree_points, np.asarray(self._buffer)])

    def _rebuild(self, points: np.ndarray) -> None:
        self._tree_points = points
        self._tree = KDTree(points, leaf_size=_LEAF_SIZE) if len(points) else None
        self._buffer = []

    def add(self, point: np.ndarray) -> int:
        """Inserts one point and returns its index."""
        self._buffer.append(np.asarray(point, dtype=np.float64).reshape(3))
        index = len(self) - 1
        if len(self._buffer) > max(_MIN_BUFFER, len(self._tree_points)):
            self._rebuild(self.points)
        return index

    def query_radius(self, point: np.ndarray, radius: float) -> np.ndarray:
        """Sorted indices of all points within `radius` (inclusive) of `point`."""
        point = np.asarray(point, dtype=np.float64).reshape(1, 3)
        found = []
        if self._tree is not None:
            found.append(self._tree.query_radius(point, r=radius)[0])
        if self._buffer:
            buffer = np.asarray(self._buffer)
            near = np.linalg.norm(buffer - point, axis=1) <= radius
            found.append(np.flatnonzero(near) + len(self._tree_points))
        if not found:
            return np.empty((0,), dtype=np.intp)
        return np.sort(np.concatenate(found)).astype(np.intp)

    def any_within(self, points: np.ndarray, radius: float) -> bool:
        """Whether some indexed point lies within `radius` of any query point."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        if self._tree is not None:
            counts = self._tree.query_radius(points, r=radius, count_only=True)
            if np.any(counts > 0):
                return True
        if self._buffer:
            buffer = np.asarray(self._buffer)
            dists = np.linalg.norm(points[:, None, :] - buffer[None, :, :], axis=-1)
            if np.any(dists <= radius):
                return True
        return False

    def nearest(self, point: np.ndarray) -> Tuple[int, float]:
        """Index of and distance to the point closest to `point`; lowest index wins."""
        if len(self) == 0:
            raise ValueError("Cannot query an empty index.")
        point = np.asarray(point, dtype=np.float64).reshape(1, 3)
        best_index, best_dist = -1, np.inf
        if self._tree is not None:
            dist, ind = self._tree.query(point, k=1)
            best_index, best_dist = int(ind[0, 0]), float(dist[0, 0])
        if self._buffer:
            dists = np.linalg.norm(np.asarray(self._buffer) - point, axis=1)
            i = int(np.argmin(dists))
            if dists[i] < best_dist:
                best_index, best_dist = i + len(self._tree_points), float(dists[i])
        return best_index, best_dist

    def nearest_distance(self, points: np.ndarray) -> np.ndarray:
        """Distance from each query point to its nearest indexed point, or inf."""
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        nearest = np.full(len(points), np.inf)
        if self._tree is not None:
            dist, _ = self._tree.query(points, k=1)
            nearest = np.minimum(nearest, dist[:, 0])
        if self._buffer:
            buffer = np.asarray(self._buffer)
            dists = np.linalg.norm(points[:, None, :] - buffer[None, :, :], axis=-1)
            nearest = np.minimum(nearest, dists.min(axis=1))
        return nearest


@dataclass(frozen=True, eq=False)
class Bounds:
    """Axis-aligned workspace box in mm."""

    minimum: np.ndarray
    maximum: np.ndarray

    def __post_init__(self) -> None:
        minimum = np.array(self.minimum, dtype=np.float64).reshape(3)
        maximum = np.array(self.maximum, dtype=np.float64).reshape(3)
        if not np.all(minimum < maximum):
            raise ValueError(
                f"Bounds minimum {minimum} must be below maximum {maximum}."
            )
        minimum.setflags(write=False)
        maximum.setflags(write=False)
        object.__setattr__(self, "minimum", minimum)
        object.__setattr__(self, "maximum", maximum)

    @classmethod
    def cube(cls, size: float) -> "Bounds":
        return cls(np.zeros(3), np.full(3, float(size)))

    @property
    def size(self) -> np.ndarray:
        return self.maximum - self.minimum

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        return np.all((points >= self.minimum) & (points <= self.maximum), axis=1)


def estimate_point_spacing(points: np.ndarray) -> float:
    """Median nearest-neighbour distance of a cloud; 0.0 below two points."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(points) < 2:
        return 0.0
    dist, _ = KDTree(points).query(points, k=2)
    return float(np.median(dist[:, 1]))


class Environment:
    """Obstacle cloud, workspace bounds and needle size.

    The workspace boundary acts as an obstacle. A tip position is free when it is
    inside the bounds and farther than `needle_radius + clearance_margin` from every
    obstacle point. The margin defaults to half the cloud's point spacing.
    """

    def __init__(
        self,
        obstacle_points: Sequence[Sequence[float]],
        bounds: Bounds,
        needle_radius: float,
        clearance_margin: Optional[float] = None,
    ) -> None:
        points = np.array(obstacle_points, dtype=np.float64).reshape(-1, 3)
        if not np.all(np.isfinite(points)):
            raise ValueError("Obstacle points must be finite.")
        if not np.all(bounds.contains(points)):
            raise ValueError("All obstacle points must lie within the bounds.")
        if needle_radius < 0:
            raise ValueError(
                f"needle_radius must be non-negative, got {needle_radius}."
            )
        if clearance_margin is None:
            clearance_margin = 0.5 * estimate_point_spacing(points)
        if clearance_margin < 0:
            raise ValueError(
                f"clearance_margin must be non-negative, got {clearance_margin}."
            )
        points.setflags(write=False)
        self._points = points
        self._bounds = bounds
        self._needle_radius = float(needle_radius)
        self._clearance_margin = float(clearance_margin)
        self._index = PointIndex(points)

    @property
    def obstacle_points(self) -> np.ndarray:
        return self._points

    @property
    def bounds(self) -> Bounds:
        return self._bounds

    @property
    def needle_radius(self) -> float:
        return self._needle_radius

    @property
    def clearance_margin(self) -> float:
        return self._clearance_margin

    @property
    def collision_radius(self) -> float:
        """Distance below which an obstacle point collides with the tip."""
        return self._needle_radius + self._clearance_margin

    @property
    def spatial_index(self) -> PointIndex:
        return self._index


def points_free(env: Environment, points: np.ndarray) -> bool:
    """Whether every point is inside the bounds and clear of all obstacles."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if not np.all(env.bounds.contains(points)):
        return False
    return not env.spatial_index.any_within(points, env.collision_radius)


def point_free(env: Environment, p: np.ndarray) -> bool:
    return points_free(env, np.asarray(p).reshape(1, 3))


def arc_free(env: Environment, start: Pose, m: MotionPrimitive, step: float) -> bool:
    """Collision check of every sample of `m` taken every `step` mm from `start`."""
    return points_free(env, arc_positions(start, m, step))
