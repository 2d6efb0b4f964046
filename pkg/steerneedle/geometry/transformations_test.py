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

"""Tests for transformations.py."""

import numpy as np
from absl.testing import absltest, parameterized

from steerneedle.geometry import transformations as tr

_SEED = 12345
_NUM_SAMPLES = 100


def _random_quat(random_state: np.random.RandomState) -> np.ndarray:
    return tr.quat_normalize(random_state.normal(size=4))


class QuaternionTest(parameterized.TestCase):
    def test_rmat_round_trip(self) -> None:
        random_state = np.random.RandomState(_SEED)
        for _ in range(_NUM_SAMPLES):
            quat = _random_quat(random_state)
            back = tr.rmat_to_quat(tr.quat_to_rmat(quat))
            self.assertAlmostEqual(abs(float(np.dot(quat, back))), 1.0, places=12)

    def test_mul_matches_matrix_product(self) -> None:
        random_state = np.random.RandomState(_SEED)
        for _ in range(_NUM_SAMPLES):
            q1, q2 = _random_quat(random_state), _random_quat(random_state)
            np.testing.assert_allclose(
                tr.quat_to_rmat(tr.quat_mul(q1, q2)),
                tr.quat_to_rmat(q1) @ tr.quat_to_rmat(q2),
                atol=1e-12,
            )

    def test_mul_broadcasts_over_batch(self) -> None:
        random_state = np.random.RandomState(_SEED)
        q1 = _random_quat(random_state)
        batch = tr.quat_normalize(random_state.normal(size=(5, 4)))
        product = tr.quat_mul(q1, batch)
        self.assertEqual(product.shape, (5, 4))
        for i in range(5):
            np.testing.assert_allclose(product[i], tr.quat_mul(q1, batch[i]))

    @parameterized.parameters(0.0, 0.3, np.pi / 2, np.pi)
    def test_angle_between_axis_rotations(self, angle: float) -> None:
        self.assertAlmostEqual(
            float(
                tr.quat_angle_between(tr.IDENTITY_QUATERNION, tr.quat_about_z(angle))
            ),
            angle,
            places=12,
        )

    def test_angle_between_ignores_sign(self) -> None:
        quat = tr.quat_about_y(0.7)
        self.assertAlmostEqual(float(tr.quat_angle_between(quat, -quat)), 0.0)

    def test_rotate_heading(self) -> None:
        heading = tr.quat_rotate(tr.quat_about_y(np.pi / 2), np.array([0.0, 0.0, 1.0]))
        np.testing.assert_allclose(heading, [1.0, 0.0, 0.0], atol=1e-15)

    def test_normalize_rejects_zero(self) -> None:
        with self.assertRaises(ValueError):
            tr.quat_normalize(np.zeros(4))


if __name__ == "__main__":
    absltest.main()
