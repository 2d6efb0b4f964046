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

"""Quaternion helpers. Quaternions are stored as [w, x, y, z] numpy arrays.

All functions accept inputs with or without leading batch dimensions unless stated
otherwise.
"""

import numpy as np

_TOL = 1e-10

IDENTITY_QUATERNION = np.array([1.0, 0.0, 0.0, 0.0], dtype=np.float64)


def quat_normalize(quat: np.ndarray) -> np.ndarray:
    """Returns `quat` scaled to unit norm."""
    quat = np.asarray(quat, dtype=np.float64)
    norm = np.linalg.norm(quat, axis=-1, keepdims=True)
    if np.any(norm < _TOL):
        raise ValueError("Cannot normalize a zero quaternion.")
    return quat / norm


def quat_mul(quat1: np.ndarray, quat2: np.ndarray) -> np.ndarray:
    """Hamilton product `quat1 * quat2`."""
    quat1 = np.asarray(quat1, dtype=np.float64)
    quat2 = np.asarray(quat2, dtype=np.float64)

    # 4x4 matrix representation of quat1 so the product becomes a matmul.
    w1, x1, y1, z1 = [quat1[..., i] for i in range(4)]
    qmat = np.stack(
        [
            np.stack([w1, -x1, -y1, -z1], axis=-1),
            np.stack([x1, w1, -z1, y1], axis=-1),
            np.stack([y1, z1, w1, -x1], axis=-1),
            np.stack([z1, -y1, x1, w1], axis=-1),
        ],
        axis=-2,
    )
    return np.squeeze(qmat @ np.expand_dims(quat2, axis=-1), axis=-1)


def quat_about_z(angle: np.ndarray) -> np.ndarray:
    """Quaternion of a rotation by `angle` radians about the Z axis."""
    half = 0.5 * np.asarray(angle, dtype=np.float64)
    zeros = np.zeros_like(half)
    return np.stack([np.cos(half), zeros, zeros, np.sin(half)], axis=-1)


def quat_about_y(angle: np.ndarray) -> np.ndarray:
    """Quaternion of a rotation by `angle` radians about the Y axis."""
    half = 0.5 * np.asarray(angle, dtype=np.float64)
    zeros = np.zeros_like(half)
    return np.stack([np.cos(half), zeros, np.sin(half), zeros], axis=-1)


def quat_to_rmat(quat: np.ndarray) -> np.ndarray:
    """Returns the 3x3 rotation matrix of a single unit quaternion."""
    w, x, y, z = np.asarray(quat, dtype=np.float64)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def rmat_to_quat(mat: np.ndarray) -> np.ndarray:
    """Returns the unit quaternion (w >= 0) of a single 3x3 rotation matrix."""
    mat = np.asarray(mat, dtype=np.float64)
    q = np.empty((4,), dtype=np.float64)
    t = np.trace(mat)
    if t > 0.0:
        t += 1.0
        q[0] = t
        q[1] = mat[2, 1] - mat[1, 2]
        q[2] = mat[0, 2] - mat[2, 0]
        q[3] = mat[1, 0] - mat[0, 1]
    else:
        i, j, k = 0, 1, 2
        if mat[1, 1] > mat[0, 0]:
            i, j, k = 1, 2, 0
        if mat[2, 2] > mat[i, i]:
            i, j, k = 2, 0, 1
        t = mat[i, i] - (mat[j, j] + mat[k, k]) + 1.0
        q[i + 1] = t
        q[j + 1] = mat[i, j] + mat[j, i]
        q[k + 1] = mat[k, i] + mat[i, k]
        q[0] = mat[k, j] - mat[j, k]
    q *= 0.5 / np.sqrt(t)
    if q[0] < 0.0:
        q = -q
    return quat_normalize(q)


def quat_rotate(quat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Rotates one or more 3-vectors (shape (3,) or (N, 3)) by a single quaternion."""
    return np.asarray(vec, dtype=np.float64) @ quat_to_rmat(quat).T


def quat_angle_between(quat1: np.ndarray, quat2: np.ndarray) -> np.ndarray:
    """Geodesic angle in [0, pi] between the rotations of two unit quaternions.

    Equal to 2 * arccos(|<quat1, quat2>|). The half-angle between the two 4-vectors
    is evaluated as 2 * atan2(|q1 - q2|, |q1 + q2|), which is symmetric in its
    arguments and stays accurate for nearly identical orientations.
    """
    quat1 = np.asarray(quat1, dtype=np.float64)
    quat2 = np.asarray(quat2, dtype=np.float64)
    diff = np.linalg.norm(quat1 - quat2, axis=-1)
    total = np.linalg.norm(quat1 + quat2, axis=-1)
    half = 2.0 * np.arctan2(diff, total)
    return 2.0 * np.minimum(half, np.pi - half)
